"""Data types and feasibility validators for hybrid flexible flowshop scheduling.

An instance describes jobs flowing through an ordered list of stages, each stage
holding one or more parallel identical machines.  A job visits an ordered subset
of stages (it may skip the rest).  Processing an operation -- one (job, stage)
pair -- occupies a machine of that stage and a chosen number of workers from a
shared pool; the duration depends on the worker count.  Between the machines of
consecutive visited stages the job travels for an exact, machine-pair-specific
transport time.  Before and after processing, the job may sit in the machine's
entry or exit buffer, both of limited capacity.

Conventions used throughout the package:

- time is a nonnegative integer; all intervals are half-open ``[start, end)``,
  so an interval ending at t and one starting at t do not overlap;
- a zero-length wait interval occupies no buffer slot;
- a job in transit between machines occupies neither buffer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

Op = tuple[str, str]
Interval = tuple[int, int]


@dataclass(frozen=True, slots=True)
class Instance:
    """A complete problem datum.  Immutable after construction.

    ``machines`` maps machine id to its owning stage and fixes the machine
    order used by generators and solvers.  ``transport`` must contain an entry
    for every (m, n) machine pair that some job could traverse between
    consecutive eligible stages.  ``proc_time`` maps (job, stage, workers) to
    the processing duration for every admissible worker count of the stage.
    """

    jobs: tuple[str, ...]
    stages: tuple[str, ...]
    machines: dict[str, str]
    eligible_stages: dict[str, tuple[str, ...]]
    buffer_in: dict[str, int]
    buffer_out: dict[str, int]
    transport: dict[tuple[str, str], int]
    workers_total: int
    workers_min: dict[str, int]
    workers_max: dict[str, int]
    proc_time: dict[tuple[str, str, int], int]

    def machines_of(self, stage: str) -> tuple[str, ...]:
        return tuple(m for m, s in self.machines.items() if s == stage)

    def worker_window(self, stage: str) -> range:
        return range(self.workers_min[stage], self.workers_max[stage] + 1)

    def ops(self) -> list[Op]:
        """All (job, stage) operations in job-major, stage-order sequence."""
        return [(j, s) for j in self.jobs for s in self.eligible_stages.get(j, ())]


@dataclass(frozen=True, slots=True)
class Schedule:
    """A complete assignment: machine, worker count, and the three intervals
    (wait-before, process, wait-after) per operation, plus the makespan."""

    machine_of: dict[Op, str]
    workers_of: dict[Op, int]
    wait_before: dict[Op, Interval]
    process: dict[Op, Interval]
    wait_after: dict[Op, Interval]
    makespan: int


def makespan_of(sched: Schedule) -> int:
    """Maximum end of any wait-after interval.

    Raises ValueError on a schedule with no operations.  For a consistent
    schedule this equals ``sched.makespan``; the validator flags mismatches.
    """
    if not sched.wait_after:
        raise ValueError("schedule has no operations")
    return max(end for _, end in sched.wait_after.values())


def serial_schedule(
    inst: Instance, machine_of: dict[Op, str] | None = None
) -> Schedule:
    """A feasible baseline schedule: jobs strictly one after another, each
    operation back to back with zero-length waits and exact transport gaps.

    Always feasible for a valid instance: at most one process interval is
    active at any time (so machine, buffer, and worker limits cannot bind;
    zero-length waits occupy no buffer slot), and every worker count respects
    its stage window.  When ``machine_of`` is given it fixes the machine per
    operation; otherwise each stage's first machine is used.
    """
    chosen_machine: dict[Op, str] = {}
    workers_of: dict[Op, int] = {}
    wb: dict[Op, Interval] = {}
    pr: dict[Op, Interval] = {}
    wa: dict[Op, Interval] = {}
    t = 0
    for j in inst.jobs:
        prev: str | None = None
        for s in inst.eligible_stages[j]:
            op = (j, s)
            m = machine_of[op] if machine_of is not None else inst.machines_of(s)[0]
            window = inst.worker_window(s)
            w = min(window, key=lambda v: (inst.proc_time[(j, s, v)], v))
            if prev is not None:
                t += inst.transport[(prev, m)]
            p = inst.proc_time[(j, s, w)]
            chosen_machine[op] = m
            workers_of[op] = w
            wb[op] = (t, t)
            pr[op] = (t, t + p)
            wa[op] = (t + p, t + p)
            t += p
            prev = m
    return Schedule(chosen_machine, workers_of, wb, pr, wa, makespan=t)


def validate_instance(inst: Instance) -> list[str]:
    """Check every instance invariant; return human-readable violations.

    An empty list means the instance is well formed.  Violations carry the
    offending job/stage/machine ids so callers can report a precise locus.
    """
    v: list[str] = []
    if not inst.jobs:
        v.append("instance has no jobs")
    if not inst.stages:
        v.append("instance has no stages")
    if len(set(inst.jobs)) != len(inst.jobs):
        v.append("duplicate job ids")
    if len(set(inst.stages)) != len(inst.stages):
        v.append("duplicate stage ids")

    stage_index = {s: i for i, s in enumerate(inst.stages)}
    for m, s in inst.machines.items():
        if s not in stage_index:
            v.append(f"machine {m} tagged with unknown stage {s}")
    for s in inst.stages:
        if not inst.machines_of(s):
            v.append(f"stage {s} has no machines")

    for m in inst.machines:
        for name, table in (("entry", inst.buffer_in), ("exit", inst.buffer_out)):
            if m not in table:
                v.append(f"machine {m} missing {name} buffer capacity")
            elif table[m] < 0:
                v.append(f"machine {m} has negative {name} buffer capacity")

    if inst.workers_total < 1:
        v.append("workers_total must be positive")
    for s in inst.stages:
        if s not in inst.workers_min or s not in inst.workers_max:
            v.append(f"stage {s} missing worker window")
            continue
        lo, hi = inst.workers_min[s], inst.workers_max[s]
        if not (1 <= lo <= hi <= inst.workers_total):
            v.append(f"stage {s} worker window [{lo},{hi}] outside [1,{inst.workers_total}]")

    for j in inst.jobs:
        elig = inst.eligible_stages.get(j)
        if not elig:
            v.append(f"job {j} has no eligible stages")
            continue
        if any(s not in stage_index for s in elig):
            v.append(f"job {j} eligible for unknown stage")
            continue
        idx = [stage_index[s] for s in elig]
        if idx != sorted(set(idx)):
            v.append(f"job {j} eligible stages violate the global stage order")

    # Processing-time table: complete over admissible worker counts, positive,
    # and satisfying the equal-work floor p[j,s,w] >= ceil(p[j,s,1]/w) when a
    # single worker is admissible (more workers can never do less than an even
    # share of the one-worker workload).
    for j in inst.jobs:
        for s in inst.eligible_stages.get(j, ()):
            if s not in inst.workers_min or s not in inst.workers_max:
                continue
            window = inst.worker_window(s)
            for w in window:
                p = inst.proc_time.get((j, s, w))
                if p is None:
                    v.append(f"missing processing time for ({j},{s},{w})")
                elif p < 1:
                    v.append(f"nonpositive processing time for ({j},{s},{w})")
            base = inst.proc_time.get((j, s, 1))
            if window.start == 1 and base is not None and base >= 1:
                for w in window:
                    p = inst.proc_time.get((j, s, w))
                    if p is not None and p * w < base:
                        v.append(
                            f"equal-work floor violated at ({j},{s},{w}): "
                            f"{p} < ceil({base}/{w})"
                        )
    known_ops = {(j, s) for j in inst.jobs for s in inst.eligible_stages.get(j, ())}
    for (j, s, w) in inst.proc_time:
        if (j, s) not in known_ops:
            v.append(f"processing time listed for non-eligible pair ({j},{s})")
        elif s in inst.workers_min and w not in inst.worker_window(s):
            v.append(f"processing time listed for inadmissible worker count ({j},{s},{w})")

    # Transport coverage: every machine pair a job could traverse between
    # consecutive eligible stages needs an entry.
    needed_pairs: set[tuple[str, str]] = set()
    for j in inst.jobs:
        elig = inst.eligible_stages.get(j, ())
        for a, b in zip(elig, elig[1:]):
            for m in inst.machines_of(a):
                for n in inst.machines_of(b):
                    needed_pairs.add((m, n))
    for pair in sorted(needed_pairs):
        if pair not in inst.transport:
            v.append(f"missing transport entry for machine pair {pair[0]} -> {pair[1]}")
    for pair, t in inst.transport.items():
        if t < 0:
            v.append(f"negative transport time for machine pair {pair[0]} -> {pair[1]}")
    return v


def _sweep_max(intervals: list[tuple[Interval, int]]) -> int:
    """Peak weighted occupancy of half-open intervals (endpoint sweep).

    Zero-length intervals contribute nothing.
    """
    events: list[tuple[int, int]] = []
    for (start, end), weight in intervals:
        if end > start:
            events.append((start, weight))
            events.append((end, -weight))
    peak = level = 0
    for _, delta in sorted(events):
        level += delta
        peak = max(peak, level)
    return peak


def validate_schedule(inst: Instance, sched: Schedule) -> list[str]:
    """Check a candidate schedule against every constraint of the problem.

    Pure function; returns one entry per violated constraint.  Checks, in
    order: operation coverage and id cross-references, interval sanity and the
    wait/process/wait chain equalities, process durations against the worker
    choice, exact transport offsets between consecutive assigned machines,
    stage order, per-machine no-overlap, entry/exit buffer capacities, total
    worker usage, and makespan consistency.
    """
    v: list[str] = []
    expected_ops = {(j, s) for j in inst.jobs for s in inst.eligible_stages.get(j, ())}
    for name, table in (
        ("machine_of", sched.machine_of),
        ("workers_of", sched.workers_of),
        ("wait_before", sched.wait_before),
        ("process", sched.process),
        ("wait_after", sched.wait_after),
    ):
        got = set(table)
        for op in sorted(expected_ops - got):
            v.append(f"{name} missing operation ({op[0]},{op[1]})")
        for op in sorted(got - expected_ops):
            v.append(f"{name} references unknown operation ({op[0]},{op[1]})")
    if v:
        return v

    for op in sorted(expected_ops):
        j, s = op
        m = sched.machine_of[op]
        if inst.machines.get(m) != s:
            v.append(f"operation ({j},{s}) assigned to machine {m} outside stage {s}")
        w = sched.workers_of[op]
        if w not in inst.worker_window(s):
            v.append(f"operation ({j},{s}) uses inadmissible worker count {w}")
        for name, (start, end) in (
            ("wait_before", sched.wait_before[op]),
            ("process", sched.process[op]),
            ("wait_after", sched.wait_after[op]),
        ):
            if start < 0 or end < start:
                v.append(f"{name} of ({j},{s}) is not a valid interval [{start},{end})")
    if v:
        return v

    for op in sorted(expected_ops):
        j, s = op
        wb, pr, wa = sched.wait_before[op], sched.process[op], sched.wait_after[op]
        if pr[0] != wb[1]:
            v.append(f"({j},{s}): process must start exactly when wait_before ends")
        if wa[0] != pr[1]:
            v.append(f"({j},{s}): wait_after must start exactly when process ends")
        expected = inst.proc_time.get((j, s, sched.workers_of[op]))
        if expected is not None and pr[1] - pr[0] != expected:
            v.append(
                f"({j},{s}): process duration {pr[1] - pr[0]} != {expected} "
                f"for {sched.workers_of[op]} workers"
            )

    for j in inst.jobs:
        elig = inst.eligible_stages[j]
        for a, b in zip(elig, elig[1:]):
            m, n = sched.machine_of[(j, a)], sched.machine_of[(j, b)]
            t = inst.transport.get((m, n))
            if t is None:
                v.append(f"missing transport entry for machine pair {m} -> {n}")
                continue
            gap = sched.wait_before[(j, b)][0] - sched.wait_after[(j, a)][1]
            if gap != t:
                v.append(
                    f"job {j}, {a} -> {b}: transfer gap {gap} != transport time {t}"
                )
            if sched.process[(j, a)][1] > sched.process[(j, b)][0]:
                v.append(f"job {j}: stage order violated between {a} and {b}")

    by_machine: dict[str, list[tuple[Op, Interval]]] = {}
    for op in expected_ops:
        by_machine.setdefault(sched.machine_of[op], []).append((op, sched.process[op]))
    for m in sorted(by_machine):
        spans = sorted(by_machine[m], key=lambda item: item[1])
        for (op1, iv1), (op2, iv2) in zip(spans, spans[1:]):
            if iv1[1] > iv2[0]:
                v.append(
                    f"machine {m}: processes of ({op1[0]},{op1[1]}) and "
                    f"({op2[0]},{op2[1]}) overlap"
                )

    for m in sorted(inst.machines):
        entry = [
            (sched.wait_before[op], 1)
            for op in expected_ops
            if sched.machine_of[op] == m
        ]
        if _sweep_max(entry) > inst.buffer_in[m]:
            v.append(f"machine {m}: entry buffer capacity {inst.buffer_in[m]} exceeded")
        exits = [
            (sched.wait_after[op], 1)
            for op in expected_ops
            if sched.machine_of[op] == m
        ]
        if _sweep_max(exits) > inst.buffer_out[m]:
            v.append(f"machine {m}: exit buffer capacity {inst.buffer_out[m]} exceeded")

    usage = [(sched.process[op], sched.workers_of[op]) for op in expected_ops]
    if _sweep_max(usage) > inst.workers_total:
        v.append(f"worker pool capacity {inst.workers_total} exceeded")

    if expected_ops and sched.makespan != makespan_of(sched):
        v.append(
            f"stored makespan {sched.makespan} != max wait_after end {makespan_of(sched)}"
        )
    return v


# ---------------------------------------------------------------------------
# JSON serialization.  The schemas are part of the CLI contract; unknown
# fields are rejected so silently misspelled inputs cannot pass.

_INSTANCE_FIELDS = {
    "jobs", "stages", "machines", "eligible_stages", "buffer_in", "buffer_out",
    "transport", "workers_total", "workers_min", "workers_max", "proc_time",
}
_SCHEDULE_FIELDS = {"machine_of", "workers_of", "intervals", "makespan"}

OP_KEY_SEP = "|"


def _op_key(op: Op) -> str:
    return f"{op[0]}{OP_KEY_SEP}{op[1]}"


def _parse_op_key(key: str) -> Op:
    job, sep, stage = key.partition(OP_KEY_SEP)
    if not sep or not job or not stage:
        raise ValueError(f"bad operation key {key!r} (expected 'job{OP_KEY_SEP}stage')")
    return job, stage


def _require_int(value: object, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{where}: expected an integer, got {value!r}")
    return value


def instance_to_json(inst: Instance) -> str:
    doc = {
        "jobs": list(inst.jobs),
        "stages": list(inst.stages),
        "machines": [{"id": m, "stage": s} for m, s in inst.machines.items()],
        "eligible_stages": {j: list(e) for j, e in inst.eligible_stages.items()},
        "buffer_in": dict(inst.buffer_in),
        "buffer_out": dict(inst.buffer_out),
        "transport": [
            {"from": m, "to": n, "t": t} for (m, n), t in inst.transport.items()
        ],
        "workers_total": inst.workers_total,
        "workers_min": dict(inst.workers_min),
        "workers_max": dict(inst.workers_max),
        "proc_time": [
            {"job": j, "stage": s, "w": w, "p": p}
            for (j, s, w), p in inst.proc_time.items()
        ],
    }
    return json.dumps(doc, indent=2)


def instance_from_json(text: str) -> Instance:
    """Parse an instance document, rejecting unknown or ill-typed fields."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("instance document must be a JSON object")
    unknown = set(doc) - _INSTANCE_FIELDS
    if unknown:
        raise ValueError(f"unknown instance fields: {sorted(unknown)}")
    missing = _INSTANCE_FIELDS - set(doc)
    if missing:
        raise ValueError(f"missing instance fields: {sorted(missing)}")

    machines: dict[str, str] = {}
    for row in doc["machines"]:
        extra = set(row) - {"id", "stage"}
        if extra:
            raise ValueError(f"unknown machine fields: {sorted(extra)}")
        machines[str(row["id"])] = str(row["stage"])
    transport: dict[tuple[str, str], int] = {}
    for row in doc["transport"]:
        extra = set(row) - {"from", "to", "t"}
        if extra:
            raise ValueError(f"unknown transport fields: {sorted(extra)}")
        transport[(str(row["from"]), str(row["to"]))] = _require_int(row["t"], "transport.t")
    proc_time: dict[tuple[str, str, int], int] = {}
    for row in doc["proc_time"]:
        extra = set(row) - {"job", "stage", "w", "p"}
        if extra:
            raise ValueError(f"unknown proc_time fields: {sorted(extra)}")
        key = (str(row["job"]), str(row["stage"]), _require_int(row["w"], "proc_time.w"))
        proc_time[key] = _require_int(row["p"], "proc_time.p")

    return Instance(
        jobs=tuple(str(j) for j in doc["jobs"]),
        stages=tuple(str(s) for s in doc["stages"]),
        machines=machines,
        eligible_stages={
            str(j): tuple(str(s) for s in elig)
            for j, elig in doc["eligible_stages"].items()
        },
        buffer_in={str(m): _require_int(c, "buffer_in") for m, c in doc["buffer_in"].items()},
        buffer_out={str(m): _require_int(c, "buffer_out") for m, c in doc["buffer_out"].items()},
        transport=transport,
        workers_total=_require_int(doc["workers_total"], "workers_total"),
        workers_min={str(s): _require_int(w, "workers_min") for s, w in doc["workers_min"].items()},
        workers_max={str(s): _require_int(w, "workers_max") for s, w in doc["workers_max"].items()},
        proc_time=proc_time,
    )


def schedule_to_json(sched: Schedule) -> str:
    doc = {
        "machine_of": {_op_key(op): m for op, m in sched.machine_of.items()},
        "workers_of": {_op_key(op): w for op, w in sched.workers_of.items()},
        "intervals": {
            _op_key(op): {
                "wb": list(sched.wait_before[op]),
                "pr": list(sched.process[op]),
                "wa": list(sched.wait_after[op]),
            }
            for op in sched.machine_of
        },
        "makespan": sched.makespan,
    }
    return json.dumps(doc, indent=2)


def schedule_from_json(text: str) -> Schedule:
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("schedule document must be a JSON object")
    unknown = set(doc) - _SCHEDULE_FIELDS
    if unknown:
        raise ValueError(f"unknown schedule fields: {sorted(unknown)}")
    missing = _SCHEDULE_FIELDS - set(doc)
    if missing:
        raise ValueError(f"missing schedule fields: {sorted(missing)}")

    machine_of = {_parse_op_key(k): str(m) for k, m in doc["machine_of"].items()}
    workers_of = {
        _parse_op_key(k): _require_int(w, "workers_of") for k, w in doc["workers_of"].items()
    }
    wait_before: dict[Op, Interval] = {}
    process: dict[Op, Interval] = {}
    wait_after: dict[Op, Interval] = {}
    for key, triple in doc["intervals"].items():
        extra = set(triple) - {"wb", "pr", "wa"}
        if extra:
            raise ValueError(f"unknown interval fields for {key}: {sorted(extra)}")
        op = _parse_op_key(key)
        for name, target in (("wb", wait_before), ("pr", process), ("wa", wait_after)):
            pair = triple[name]
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ValueError(f"interval {name} of {key} must be a [start, end] pair")
            target[op] = (_require_int(pair[0], name), _require_int(pair[1], name))
    return Schedule(
        machine_of=machine_of,
        workers_of=workers_of,
        wait_before=wait_before,
        process=process,
        wait_after=wait_after,
        makespan=_require_int(doc["makespan"], "makespan"),
    )
