"""Generic exact/anytime interval-scheduling search kernel.

The engine minimises makespan over a model made of:

- TaskVar: a half-open interval with a fixed duration, a duration selected
  from a menu by a choice variable, or an elastic (free nonnegative) duration;
  optionally present only when a guard choice takes a given value;
- ChoiceVar: a finite integer domain (machine index, worker count, ...);
- ConstraintSet: exact-offset links (start(succ) = end(pred) + delta, the
  delta possibly a table over two choice values), precedence links
  (end(pred) + delta <= start(succ)), disjunctive groups, weighted cumulative
  resources, conditional objective bounds ("if this exact choice fingerprint
  holds, the objective is at least this value" -- the logic-cut form), and
  fingerprint exclusions ("not all of these choice values simultaneously").

Search is depth-first branch and bound: choice variables first (machine-kind
before worker-kind, then model order; values in domain order), then
chronological start-time fixing, then remaining elastic end fixing.  The
first descent therefore behaves like a greedy earliest-start dive.  Bounds
propagation runs at every node (time windows through offsets and precedences,
pairwise disjunctive reasoning, timetable reasoning over mandatory parts of
cumulatives, exclusion filtering).  Every incumbent is re-checked against the
raw constraints by an independent evaluator before it is stored.

Determinism: with a node budget, results are a pure function of (model, seed,
budget); nothing reads the clock except the optional wall-clock budget, which
is documented as non-deterministic.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass, field

INF = float("inf")

_KIND_PRIORITY = {"machine": 0, "worker": 1}


@dataclass(frozen=True, slots=True)
class ChoiceVar:
    id: str
    values: tuple[int, ...]
    kind: str = "generic"


@dataclass(frozen=True, slots=True)
class TaskVar:
    """Interval task; exactly one of duration / duration_menu / elastic."""

    id: str
    duration: int | None = None
    duration_menu: tuple[str, dict[int, int]] | None = None
    elastic: bool = False
    est: int = 0
    lct: int = 0
    presence: tuple[str, int] | None = None


@dataclass(frozen=True, slots=True)
class Member:
    """Guarded membership of a task in a disjunctive group or cumulative."""

    task: str
    weight: int = 1
    weight_choice: str | None = None
    guard: tuple[str, int] | None = None


Delta = tuple[str, str, dict[tuple[int, int], int]]


@dataclass(frozen=True, slots=True)
class OffsetLink:
    """start(succ) = end(pred) + delta (table keyed by two choice values wins)."""

    pred: str
    succ: str
    delta: int = 0
    table: Delta | None = None


@dataclass(frozen=True, slots=True)
class Precedence:
    """end(pred) + delta <= start(succ)."""

    pred: str
    succ: str
    delta: int = 0
    table: Delta | None = None


@dataclass(frozen=True, slots=True)
class Disjunctive:
    id: str
    members: tuple[Member, ...]


@dataclass(frozen=True, slots=True)
class Cumulative:
    id: str
    capacity: int
    members: tuple[Member, ...]


@dataclass(frozen=True, slots=True)
class ConditionalBound:
    """If every listed choice takes its listed value, objective >= bound."""

    fingerprint: tuple[tuple[str, int], ...]
    bound: int


@dataclass(frozen=True, slots=True)
class Exclusion:
    """Forbid the exact simultaneous assignment of all listed choice values."""

    fingerprint: tuple[tuple[str, int], ...]


@dataclass(slots=True)
class ConstraintSet:
    offsets: list[OffsetLink] = field(default_factory=list)
    precedences: list[Precedence] = field(default_factory=list)
    disjunctives: list[Disjunctive] = field(default_factory=list)
    cumulatives: list[Cumulative] = field(default_factory=list)
    conditional_bounds: list[ConditionalBound] = field(default_factory=list)
    exclusions: list[Exclusion] = field(default_factory=list)


@dataclass(slots=True)
class EngineModel:
    tasks: dict[str, TaskVar]
    choices: dict[str, ChoiceVar]
    constraints: ConstraintSet
    objective_tasks: list[str]
    objective_floor: int = 0


@dataclass(frozen=True, slots=True)
class Assignment:
    """A complete concrete assignment (absent tasks may be omitted)."""

    choices: dict[str, int]
    starts: dict[str, int]
    ends: dict[str, int]


@dataclass(slots=True)
class SearchResult:
    status: str  # optimal | feasible | infeasible | unknown
    objective: int | None
    lower_bound: int
    incumbent: Assignment | None
    nodes: int
    wall_time: float
    ub_history: list[tuple[int, int]]


class State:
    """Mutable search state: task time bounds plus choice domains."""

    __slots__ = ("s_lo", "s_hi", "e_lo", "e_hi", "domains")

    def __init__(self, s_lo, s_hi, e_lo, e_hi, domains):
        self.s_lo = s_lo
        self.s_hi = s_hi
        self.e_lo = e_lo
        self.e_hi = e_hi
        self.domains = domains

    def copy(self) -> "State":
        return State(
            list(self.s_lo), list(self.s_hi), list(self.e_lo), list(self.e_hi),
            list(self.domains),
        )


def check_model(model: EngineModel) -> None:
    """Validate structural sanity; raise ValueError on a malformed model."""
    tasks, choices = model.tasks, model.choices
    for cid, c in choices.items():
        if cid != c.id:
            raise ValueError(f"choice key {cid} != id {c.id}")
        if not c.values:
            raise ValueError(f"choice {cid} has an empty domain")
        if len(set(c.values)) != len(c.values):
            raise ValueError(f"choice {cid} has duplicate domain values")
    for tid, t in tasks.items():
        if tid != t.id:
            raise ValueError(f"task key {tid} != id {t.id}")
        kinds = (t.duration is not None) + (t.duration_menu is not None) + t.elastic
        if kinds != 1:
            raise ValueError(f"task {tid} must have exactly one duration mode")
        if t.duration is not None and t.duration < 0:
            raise ValueError(f"task {tid} has negative duration")
        if t.duration_menu is not None:
            cid, menu = t.duration_menu
            if cid not in choices:
                raise ValueError(f"task {tid} menu references unknown choice {cid}")
            missing = [v for v in choices[cid].values if v not in menu]
            if missing:
                raise ValueError(f"task {tid} menu misses durations for {missing}")
            if any(d < 0 for d in menu.values()):
                raise ValueError(f"task {tid} has a negative menu duration")
        if t.est < 0 or t.lct < t.est:
            raise ValueError(f"task {tid} has an invalid window [{t.est},{t.lct}]")
        if t.presence is not None and t.presence[0] not in choices:
            raise ValueError(f"task {tid} presence references unknown choice")

    def check_member(where: str, m: Member) -> None:
        if m.task not in tasks:
            raise ValueError(f"{where} references unknown task {m.task}")
        if m.weight_choice is not None and m.weight_choice not in choices:
            raise ValueError(f"{where} references unknown weight choice")
        if m.guard is not None and m.guard[0] not in choices:
            raise ValueError(f"{where} references unknown guard choice")

    cs = model.constraints
    for link in list(cs.offsets) + list(cs.precedences):
        for tid in (link.pred, link.succ):
            if tid not in tasks:
                raise ValueError(f"link references unknown task {tid}")
        if link.table is not None:
            ca, cb, table = link.table
            for cid in (ca, cb):
                if cid not in choices:
                    raise ValueError(f"link table references unknown choice {cid}")
            for va in choices[ca].values:
                for vb in choices[cb].values:
                    if (va, vb) not in table:
                        raise ValueError(
                            f"link table misses delta for ({va},{vb}) of ({ca},{cb})"
                        )
    for group in cs.disjunctives:
        for m in group.members:
            check_member(f"disjunctive {group.id}", m)
    for cum in cs.cumulatives:
        if cum.capacity < 0:
            raise ValueError(f"cumulative {cum.id} has negative capacity")
        for m in cum.members:
            check_member(f"cumulative {cum.id}", m)
    for cb in cs.conditional_bounds:
        for cid, _ in cb.fingerprint:
            if cid not in choices:
                raise ValueError(f"conditional bound references unknown choice {cid}")
    for ex in cs.exclusions:
        if not ex.fingerprint:
            raise ValueError("exclusion with empty fingerprint forbids everything")
        for cid, _ in ex.fingerprint:
            if cid not in choices:
                raise ValueError(f"exclusion references unknown choice {cid}")
    for tid in model.objective_tasks:
        if tid not in tasks:
            raise ValueError(f"objective references unknown task {tid}")


class _Compiled:
    """Index-based view of an EngineModel plus the propagation routines."""

    def __init__(self, model: EngineModel) -> None:
        check_model(model)
        self.model = model
        self.tids = list(model.tasks)
        self.tidx = {t: i for i, t in enumerate(self.tids)}
        self.cids = list(model.choices)
        self.cidx = {c: i for i, c in enumerate(self.cids)}
        self.tasks = [model.tasks[t] for t in self.tids]
        self.choices = [model.choices[c] for c in self.cids]

        self.presence = [
            None if t.presence is None else (self.cidx[t.presence[0]], t.presence[1])
            for t in self.tasks
        ]
        self.menus = [
            None if t.duration_menu is None
            else (self.cidx[t.duration_menu[0]], t.duration_menu[1])
            for t in self.tasks
        ]

        def compile_delta(link):
            if link.table is None:
                return (link.delta, None)
            ca, cb, table = link.table
            return (0, (self.cidx[ca], self.cidx[cb], table))

        self.offsets = [
            (self.tidx[l.pred], self.tidx[l.succ], *compile_delta(l))
            for l in model.constraints.offsets
        ]
        self.precedences = [
            (self.tidx[l.pred], self.tidx[l.succ], *compile_delta(l))
            for l in model.constraints.precedences
        ]

        def compile_member(m: Member):
            return (
                self.tidx[m.task],
                m.weight,
                None if m.weight_choice is None else self.cidx[m.weight_choice],
                None if m.guard is None else (self.cidx[m.guard[0]], m.guard[1]),
            )

        self.disjunctives = [
            (g.id, [compile_member(m) for m in g.members])
            for g in model.constraints.disjunctives
        ]
        self.cumulatives = [
            (c.id, c.capacity, [compile_member(m) for m in c.members])
            for c in model.constraints.cumulatives
        ]
        self.cond_bounds = [
            ([(self.cidx[cid], val) for cid, val in cb.fingerprint], cb.bound)
            for cb in model.constraints.conditional_bounds
        ]
        self.exclusions = [
            [(self.cidx[cid], val) for cid, val in ex.fingerprint]
            for ex in model.constraints.exclusions
        ]
        self.obj_tasks = [self.tidx[t] for t in model.objective_tasks]
        self.floor = model.objective_floor

        self.choice_order = sorted(
            range(len(self.choices)),
            key=lambda i: (_KIND_PRIORITY.get(self.choices[i].kind, 2), i),
        )
        self.elastic_flag = [t.elastic for t in self.tasks]

    # -- state helpers ------------------------------------------------------

    def root_state(self) -> State:
        return State(
            [t.est for t in self.tasks],
            [t.lct for t in self.tasks],
            [t.est for t in self.tasks],
            [t.lct for t in self.tasks],
            [c.values for c in self.choices],
        )

    def present_state(self, st: State, ti: int) -> int:
        """+1 present-certain, -1 absent-certain, 0 undecided."""
        p = self.presence[ti]
        if p is None:
            return 1
        ci, val = p
        dom = st.domains[ci]
        if val not in dom:
            return -1
        return 1 if len(dom) == 1 else 0

    def _guard_state(self, st: State, guard) -> int:
        if guard is None:
            return 1
        ci, val = guard
        dom = st.domains[ci]
        if val not in dom:
            return -1
        return 1 if len(dom) == 1 else 0

    def member_active(self, st: State, member) -> int:
        """+1 active-certain, -1 never active, 0 undecided."""
        pres = self.present_state(st, member[0])
        gua = self._guard_state(st, member[3])
        if pres == -1 or gua == -1:
            return -1
        if pres == 1 and gua == 1:
            return 1
        return 0

    def duration_bounds(self, st: State, ti: int) -> tuple[int, int]:
        t = self.tasks[ti]
        if t.duration is not None:
            return t.duration, t.duration
        menu = self.menus[ti]
        if menu is not None:
            ci, table = menu
            durs = [table[v] for v in st.domains[ci]]
            return min(durs), max(durs)
        return 0, max(0, st.e_hi[ti] - st.s_lo[ti])

    def min_weight(self, st: State, member) -> int:
        if member[2] is None:
            return member[1]
        return min(st.domains[member[2]])

    def delta_bounds(self, st: State, const: int, table) -> tuple[int, int]:
        if table is None:
            return const, const
        ca, cb, mapping = table
        da, db = st.domains[ca], st.domains[cb]
        if len(da) == 1 and len(db) == 1:
            d = mapping[(da[0], db[0])]
            return d, d
        vals = [mapping[(va, vb)] for va in da for vb in db]
        return min(vals), max(vals)

    # -- propagation --------------------------------------------------------

    def propagate(self, st: State, obj_cap: float) -> str | None:
        """Shrink bounds to a fixpoint; return a violated constraint id or None."""
        if obj_cap < INF:
            cap = int(obj_cap)
            for ti in self.obj_tasks:
                if self.present_state(st, ti) == 1 and st.e_hi[ti] > cap:
                    st.e_hi[ti] = cap

        changed = True
        while changed:
            changed = False

            for ti in range(len(self.tasks)):
                if self.present_state(st, ti) != 1:
                    continue
                dmin, dmax = self.duration_bounds(st, ti)
                lo = max(st.e_lo[ti], st.s_lo[ti] + dmin)
                hi = min(st.e_hi[ti], st.s_hi[ti] + dmax)
                slo = max(st.s_lo[ti], lo - dmax)
                shi = min(st.s_hi[ti], hi - dmin)
                if lo != st.e_lo[ti] or hi != st.e_hi[ti]:
                    st.e_lo[ti], st.e_hi[ti] = lo, hi
                    changed = True
                if slo != st.s_lo[ti] or shi != st.s_hi[ti]:
                    st.s_lo[ti], st.s_hi[ti] = slo, shi
                    changed = True
                if st.s_lo[ti] > st.s_hi[ti] or st.e_lo[ti] > st.e_hi[ti]:
                    return f"task:{self.tids[ti]}"

            for pi, si, const, table in self.offsets:
                if self.present_state(st, pi) != 1 or self.present_state(st, si) != 1:
                    continue
                dmin, dmax = self.delta_bounds(st, const, table)
                if st.s_lo[si] < st.e_lo[pi] + dmin:
                    st.s_lo[si] = st.e_lo[pi] + dmin
                    changed = True
                if st.s_hi[si] > st.e_hi[pi] + dmax:
                    st.s_hi[si] = st.e_hi[pi] + dmax
                    changed = True
                if st.e_lo[pi] < st.s_lo[si] - dmax:
                    st.e_lo[pi] = st.s_lo[si] - dmax
                    changed = True
                if st.e_hi[pi] > st.s_hi[si] - dmin:
                    st.e_hi[pi] = st.s_hi[si] - dmin
                    changed = True
                if st.s_lo[si] > st.s_hi[si] or st.e_lo[pi] > st.e_hi[pi]:
                    return f"offset:{self.tids[pi]}->{self.tids[si]}"

            for pi, si, const, table in self.precedences:
                if self.present_state(st, pi) != 1 or self.present_state(st, si) != 1:
                    continue
                dmin, _ = self.delta_bounds(st, const, table)
                if st.s_lo[si] < st.e_lo[pi] + dmin:
                    st.s_lo[si] = st.e_lo[pi] + dmin
                    changed = True
                if st.e_hi[pi] > st.s_hi[si] - dmin:
                    st.e_hi[pi] = st.s_hi[si] - dmin
                    changed = True
                if st.s_lo[si] > st.s_hi[si] or st.e_lo[pi] > st.e_hi[pi]:
                    return f"precedence:{self.tids[pi]}->{self.tids[si]}"

            for gid, members in self.disjunctives:
                active = [m[0] for m in members if self.member_active(st, m) == 1]
                for x in range(len(active)):
                    a = active[x]
                    for y in range(x + 1, len(active)):
                        b = active[y]
                        a_first = st.e_lo[a] <= st.s_hi[b]
                        b_first = st.e_lo[b] <= st.s_hi[a]
                        if not a_first and not b_first:
                            return f"disjunctive:{gid}"
                        if a_first and not b_first:
                            if st.s_lo[b] < st.e_lo[a]:
                                st.s_lo[b] = st.e_lo[a]
                                changed = True
                            if st.e_hi[a] > st.s_hi[b]:
                                st.e_hi[a] = st.s_hi[b]
                                changed = True
                        elif b_first and not a_first:
                            if st.s_lo[a] < st.e_lo[b]:
                                st.s_lo[a] = st.e_lo[b]
                                changed = True
                            if st.e_hi[b] > st.s_hi[a]:
                                st.e_hi[b] = st.s_hi[a]
                                changed = True

            for cid, cap, members in self.cumulatives:
                fail = self._timetable(st, cid, cap, members)
                if fail is not None:
                    return fail
                if self._lift_starts(st, cap, members):
                    changed = True

            for fp in self.exclusions:
                unfixed = None
                dead = False
                for ci, val in fp:
                    dom = st.domains[ci]
                    if val not in dom:
                        dead = True
                        break
                    if len(dom) > 1:
                        if unfixed is not None:
                            unfixed = -1  # more than one undecided choice
                            break
                        unfixed = (ci, val)
                if dead or unfixed == -1:
                    continue
                if unfixed is None:
                    return "exclusion"
                ci, val = unfixed
                st.domains[ci] = tuple(v for v in st.domains[ci] if v != val)
                changed = True
                if not st.domains[ci]:
                    return "exclusion"
        return None

    def _mandatory_events(self, st: State, members):
        """Sorted profile events over mandatory parts of active-certain members,
        plus each contributing member's own (lo, hi, weight) span."""
        events: list[tuple[int, int]] = []
        own: dict[int, tuple[int, int, int]] = {}
        for m in members:
            if self.member_active(st, m) != 1:
                continue
            ti = m[0]
            w = self.min_weight(st, m)
            if w <= 0:
                continue
            lo, hi = st.s_hi[ti], st.e_lo[ti]
            if lo < hi:
                events.append((lo, w))
                events.append((hi, -w))
                own[ti] = (lo, hi, w)
        events.sort()
        return events, own

    def _timetable(self, st: State, cid: str, cap: int, members) -> str | None:
        events, _ = self._mandatory_events(st, members)
        level = 0
        for _, delta in events:
            level += delta
            if level > cap:
                return f"cumulative:{cid}"
        return None

    def _lift_starts(self, st: State, cap: int, members) -> bool:
        """Push earliest starts of unfixed active members past profile stretches
        that cannot accommodate them.  Exact: the member's own mandatory part is
        subtracted from the profile before testing.  Lifting past the window is
        left to the task-window check on the next fixpoint round."""
        events, own = self._mandatory_events(st, members)
        if not events:
            return False
        segs = _profile_segments(events)
        if not segs:
            return False
        moved_any = False
        for m in members:
            ti = m[0]
            if st.s_lo[ti] >= st.s_hi[ti]:
                continue  # fixed or empty: the profile sweep already covers it
            if self.member_active(st, m) != 1:
                continue
            dmin, _ = self.duration_bounds(st, ti)
            if dmin <= 0:
                continue
            w = self.min_weight(st, m)
            if w <= 0:
                continue
            mine = own.get(ti)
            t = st.s_lo[ti]
            moved = True
            while moved:
                moved = False
                for seg_lo, seg_hi, level in segs:
                    if seg_hi <= t or seg_lo >= t + dmin:
                        continue
                    if mine is None or mine[1] <= seg_lo or mine[0] >= seg_hi:
                        pieces = ((seg_lo, seg_hi, level),)
                    else:
                        olo, ohi, ow = mine
                        a, b = max(seg_lo, olo), min(seg_hi, ohi)
                        pieces = tuple(
                            p for p in (
                                (seg_lo, a, level),
                                (a, b, level - ow),
                                (b, seg_hi, level),
                            ) if p[0] < p[1]
                        )
                    for plo, phi, lvl in pieces:
                        if phi <= t or plo >= t + dmin:
                            continue
                        if lvl + w > cap:
                            t = phi
                            moved = True
                            break
                    if moved:
                        break
            if t > st.s_lo[ti]:
                st.s_lo[ti] = t
                moved_any = True
        return moved_any

    # -- node bound and leaf extraction ---------------------------------------

    def node_lb(self, st: State) -> int:
        lb = self.floor
        for ti in self.obj_tasks:
            if self.present_state(st, ti) == 1 and st.e_lo[ti] > lb:
                lb = st.e_lo[ti]
        for fp, bound in self.cond_bounds:
            if bound > lb and all(
                len(st.domains[ci]) == 1 and st.domains[ci][0] == val
                for ci, val in fp
            ):
                lb = bound
        return lb

    def extract(self, st: State) -> Assignment:
        choices = {
            self.cids[ci]: st.domains[ci][0] for ci in range(len(self.choices))
        }
        starts: dict[str, int] = {}
        ends: dict[str, int] = {}
        for ti in range(len(self.tasks)):
            if self.present_state(st, ti) == 1:
                starts[self.tids[ti]] = st.s_lo[ti]
                ends[self.tids[ti]] = st.e_lo[ti]
        return Assignment(choices=choices, starts=starts, ends=ends)


def _profile_segments(events: list[tuple[int, int]]):
    """Constant positive-level segments (lo, hi, level) of a sorted event list."""
    segs = []
    level = 0
    prev = None
    for point, delta in events:
        if prev is not None and point > prev and level > 0:
            segs.append((prev, point, level))
        level += delta
        prev = point
    return segs


def check_assignment(model: EngineModel, asg: Assignment) -> list[str]:
    """Independently verify a concrete assignment against every constraint."""
    v: list[str] = []
    choices = asg.choices
    for cid, c in model.choices.items():
        if cid not in choices:
            v.append(f"choice {cid} unassigned")
        elif choices[cid] not in c.values:
            v.append(f"choice {cid} assigned out-of-domain value {choices[cid]}")
    if v:
        return v

    def present(t: TaskVar) -> bool:
        return t.presence is None or choices[t.presence[0]] == t.presence[1]

    spans: dict[str, tuple[int, int]] = {}
    for tid, t in model.tasks.items():
        if not present(t):
            continue
        if tid not in asg.starts or tid not in asg.ends:
            v.append(f"task {tid} present but unassigned")
            continue
        s, e = asg.starts[tid], asg.ends[tid]
        spans[tid] = (s, e)
        if s < t.est or e > t.lct:
            v.append(f"task {tid} outside window [{t.est},{t.lct}]")
        if t.duration is not None and e - s != t.duration:
            v.append(f"task {tid} duration {e - s} != {t.duration}")
        elif t.duration_menu is not None:
            want = t.duration_menu[1][choices[t.duration_menu[0]]]
            if e - s != want:
                v.append(f"task {tid} duration {e - s} != selected {want}")
        elif t.elastic and e < s:
            v.append(f"task {tid} has negative duration")
    if v:
        return v

    def delta_of(link) -> int | None:
        if link.table is None:
            return link.delta
        ca, cb, table = link.table
        return table.get((choices[ca], choices[cb]))

    for link in model.constraints.offsets:
        if link.pred in spans and link.succ in spans:
            d = delta_of(link)
            if d is None:
                v.append(f"offset {link.pred}->{link.succ}: no delta for choices")
            elif spans[link.succ][0] != spans[link.pred][1] + d:
                v.append(
                    f"offset {link.pred}->{link.succ}: "
                    f"{spans[link.succ][0]} != {spans[link.pred][1]} + {d}"
                )
    for link in model.constraints.precedences:
        if link.pred in spans and link.succ in spans:
            d = delta_of(link)
            if d is None:
                v.append(f"precedence {link.pred}->{link.succ}: no delta for choices")
            elif spans[link.pred][1] + d > spans[link.succ][0]:
                v.append(f"precedence {link.pred}->{link.succ} violated")

    def active(m: Member) -> bool:
        if not present(model.tasks[m.task]):
            return False
        return m.guard is None or choices[m.guard[0]] == m.guard[1]

    for group in model.constraints.disjunctives:
        live = [m.task for m in group.members if active(m)]
        for x in range(len(live)):
            for y in range(x + 1, len(live)):
                (s1, e1), (s2, e2) = spans[live[x]], spans[live[y]]
                if max(s1, s2) < min(e1, e2):
                    v.append(f"disjunctive {group.id}: {live[x]} overlaps {live[y]}")

    for cum in model.constraints.cumulatives:
        events: list[tuple[int, int]] = []
        for m in cum.members:
            if not active(m):
                continue
            s, e = spans[m.task]
            if e > s:
                w = m.weight if m.weight_choice is None else choices[m.weight_choice]
                events.append((s, w))
                events.append((e, -w))
        level = 0
        for _, delta in sorted(events):
            level += delta
            if level > cum.capacity:
                v.append(f"cumulative {cum.id}: capacity {cum.capacity} exceeded")
                break

    for ex in model.constraints.exclusions:
        if all(choices[cid] == val for cid, val in ex.fingerprint):
            v.append("excluded fingerprint assigned")
    return v


def evaluate_objective(model: EngineModel, asg: Assignment) -> int:
    """Objective of an assignment: max objective-task end, lifted by the model
    floor and by any conditional bound whose fingerprint the assignment hits."""
    value = model.objective_floor
    for tid in model.objective_tasks:
        t = model.tasks[tid]
        if t.presence is None or asg.choices[t.presence[0]] == t.presence[1]:
            value = max(value, asg.ends[tid])
    for cb in model.constraints.conditional_bounds:
        if cb.bound > value and all(
            asg.choices[cid] == val for cid, val in cb.fingerprint
        ):
            value = cb.bound
    return value


def root_state(model: EngineModel) -> tuple[_Compiled, State]:
    """Compile a model and return its root state (exposed for propagation tests)."""
    comp = _Compiled(model)
    return comp, comp.root_state()


def propagate(model: EngineModel) -> tuple[State, str | None]:
    """Run root propagation to fixpoint.

    Returns the reduced state and None, or the partially reduced state and
    the id of the constraint that proved the model infeasible.
    """
    comp, st = root_state(model)
    fail = comp.propagate(st, float("inf"))
    return st, fail


def _pick_branch(comp: _Compiled, st: State):
    """Deterministic branching decision, or None when the node is a leaf."""
    for ci in comp.choice_order:
        if len(st.domains[ci]) > 1:
            return ("choice", ci)
    best = None
    for ti in range(len(comp.tasks)):
        if comp.present_state(st, ti) != 1:
            continue
        if st.s_lo[ti] < st.s_hi[ti]:
            key = (st.s_lo[ti], 1 if comp.elastic_flag[ti] else 0, ti)
            if best is None or key < best:
                best = key
    if best is not None:
        return ("start", best[2])
    for ti in range(len(comp.tasks)):
        if comp.present_state(st, ti) != 1:
            continue
        if st.e_lo[ti] < st.e_hi[ti]:
            return ("end", ti)
    return None


def _child_edits(st: State, branch):
    """Ordered child edits for a branching decision (an exhaustive split)."""
    kind, idx = branch
    if kind == "choice":
        def assign(value):
            def edit(s: State) -> None:
                s.domains[idx] = (value,)
            return edit
        return [assign(v) for v in st.domains[idx]]
    if kind == "start":
        def fix(s: State) -> None:
            s.s_hi[idx] = s.s_lo[idx]
        def bump(s: State) -> None:
            s.s_lo[idx] = s.s_lo[idx] + 1
        return [fix, bump]
    def fix_end(s: State) -> None:
        s.e_hi[idx] = s.e_lo[idx]
    def bump_end(s: State) -> None:
        s.e_lo[idx] = s.e_lo[idx] + 1
    return [fix_end, bump_end]


def solve(
    model: EngineModel,
    *,
    node_budget: int | None = None,
    time_budget: float | None = None,
    seed: int = 0,
    hint: Assignment | None = None,
) -> SearchResult:
    """Anytime branch-and-bound minimisation of the model's makespan.

    ``node_budget`` counts propagated nodes and gives fully deterministic
    results; ``time_budget`` (seconds) is honoured but non-deterministic.  A
    ``hint`` assignment, if given, must pass the constraint checker and seeds
    the incumbent.  The returned lower bound is proven: no feasible assignment
    has an objective below it.
    """
    del seed  # reserved; the search is deterministic and draws no randomness
    comp = _Compiled(model)
    t0 = _time.perf_counter()

    incumbent: Assignment | None = None
    ub: float = INF
    history: list[tuple[int, int]] = []
    if hint is not None:
        bad = check_assignment(model, hint)
        if bad:
            raise ValueError(f"invalid hint: {bad[0]}")
        incumbent = hint
        ub = evaluate_objective(model, hint)
        history.append((0, int(ub)))

    nodes = 0
    stack: list[list] = []

    def process(state: State) -> None:
        """Propagate one node; record a leaf or push a search frame."""
        nonlocal nodes, incumbent, ub
        nodes += 1
        fail = comp.propagate(state, ub - 1 if incumbent is not None else INF)
        if fail is not None:
            return
        lb = comp.node_lb(state)
        if lb >= ub:
            return
        branch = _pick_branch(comp, state)
        if branch is None:
            asg = comp.extract(state)
            bad = check_assignment(model, asg)
            if bad:
                raise RuntimeError(f"search reached an invalid leaf: {bad[0]}")
            obj = evaluate_objective(model, asg)
            if obj < ub:
                incumbent, ub = asg, obj
                history.append((nodes, obj))
            return
        stack.append([state, _child_edits(state, branch), 0, lb])

    process(comp.root_state())

    budget_hit = False
    frontier_min: float = INF
    while stack:
        if node_budget is not None and nodes >= node_budget:
            budget_hit = True
        elif time_budget is not None and _time.perf_counter() - t0 > time_budget:
            budget_hit = True
        if budget_hit:
            for frame in stack:
                if frame[2] < len(frame[1]):
                    frontier_min = min(frontier_min, frame[3])
            break
        frame = stack[-1]
        if frame[2] >= len(frame[1]):
            stack.pop()
            continue
        edit = frame[1][frame[2]]
        frame[2] += 1
        child = frame[0].copy()
        edit(child)
        process(child)

    wall = _time.perf_counter() - t0
    if incumbent is not None:
        obj = int(ub)
        if not budget_hit or frontier_min >= ub:
            return SearchResult("optimal", obj, obj, incumbent, nodes, wall, history)
        return SearchResult(
            "feasible", obj, int(frontier_min), incumbent, nodes, wall, history
        )
    if not budget_hit:
        return SearchResult("infeasible", None, comp.floor, None, nodes, wall, history)
    lb = int(frontier_min) if frontier_min < INF else comp.floor
    return SearchResult("unknown", None, lb, None, nodes, wall, history)
