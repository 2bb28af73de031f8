"""Deterministic, seeded generators for the two benchmark instance families.

Reproducibility contract
------------------------
Generated instances are part of the file-format contract, so the PRNG and the
exact order of draws are fixed:

- PRNG: SplitMix64 (Steele, Lea & Flood's publicly specified 64-bit generator),
  seeded directly with ``spec.seed`` (masked to 64 bits).  Bounded draws map
  the raw 64-bit output as ``lo + next64() % (hi - lo + 1)``; the modulo bias
  is below 2**-60 for every range used here.  A skip event draws
  ``uniform_int(1, 5)`` and skips on value 1 (an exact 0.2 probability).

- Group 1 (8 stages x 10 machines, worker pool 20, worker window 1..3):
  1. per job, in job order: skip flag for stage 4, then for stage 8;
  2. per machine, in stage-major machine order: entry buffer ~ U{1,5}, then
     exit buffer ~ U{1,5}; afterwards, machines of any job's first eligible
     stage get entry capacity |J| and machines of any job's last eligible
     stage get exit capacity |J| (the drawn value is consumed either way);
  3. per stage pair, in the fixed order (1,2),(2,3),...,(7,8),(3,5), then per
     machine pair in machine order: transport ~ U{1,9} (pair (3,5) covers jobs
     that skip stage 4);
  4. per job, then per eligible stage in order: nominal time ~ U{2,15}.

- Group 2 (worker pool 8, worker window 1..3):
  1. variant 2 only: per stage, in order: machine count ~ U{1,3} (variant 1
     fixes 2 machines per stage);
  2. per job, in job order: one skip flag per stage in order; if every stage
     was skipped, one extra draw ``uniform_int(0, stages-1)`` picks the single
     stage to retain (resampling the whole vector would visibly bias the
     marginal skip rate at 2 stages);
  3. per machine, in stage-major order: entry buffer ~ U{1,3}, then exit
     buffer ~ U{1,3} (finite everywhere; no boundary exemption);
  4. per ordered stage pair (a,b), a < b, in lexicographic order, then per
     machine pair: transport ~ U{1,9} * (b - a);
  5. per job, then per eligible stage in order: nominal time ~ U{2,15}.

Worker-dependent durations are derived from the nominal (one-worker) time by
``derive_proc_times``: an even split of the workload rounded up to keep times
integral.  The derived table is non-increasing in the worker count and always
satisfies the equal-work floor ceil(nominal/w) >= nominal/w.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance

_MASK = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG; bit-identical across platforms and Python versions."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform_int(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both inclusive."""
        if hi < lo:
            raise ValueError(f"empty range [{lo},{hi}]")
        return lo + self.next64() % (hi - lo + 1)

    def bernoulli_fifth(self) -> bool:
        """True with probability exactly 1/5."""
        return self.uniform_int(1, 5) == 1


@dataclass(frozen=True, slots=True)
class GenSpec:
    """Parameters for one generated instance.

    ``stages`` and ``variant`` apply to group 2 only; group 1 fixes 8 stages,
    10 machines per stage and a worker pool of 20, group 2 a worker pool of 8.
    """

    group: int
    jobs: int
    stages: int | None = None
    variant: int | None = None
    seed: int = 0

    def check(self) -> None:
        if self.group not in (1, 2):
            raise ValueError(f"group must be 1 or 2, got {self.group}")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")
        if self.group == 1:
            if self.stages is not None or self.variant is not None:
                raise ValueError("group 1 fixes stages and has no variants")
        else:
            if self.stages not in (2, 3, 4):
                raise ValueError(f"group-2 stages must be in {{2,3,4}}, got {self.stages}")
            if self.variant not in (1, 2):
                raise ValueError(f"group-2 variant must be 1 or 2, got {self.variant}")


def derive_proc_times(nominal: int, w: int) -> int:
    """Duration with w workers: the nominal workload split evenly, rounded up."""
    if w < 1:
        raise ValueError("worker count must be at least 1")
    if nominal < 1:
        raise ValueError("nominal time must be at least 1")
    return -(-nominal // w)


def _build(
    jobs: list[str],
    stages: list[str],
    machines: dict[str, str],
    eligible: dict[str, tuple[str, ...]],
    buffer_in: dict[str, int],
    buffer_out: dict[str, int],
    transport: dict[tuple[str, str], int],
    workers_total: int,
    nominal: dict[tuple[str, str], int],
) -> Instance:
    proc_time = {
        (j, s, w): derive_proc_times(p, w)
        for (j, s), p in nominal.items()
        for w in (1, 2, 3)
    }
    return Instance(
        jobs=tuple(jobs),
        stages=tuple(stages),
        machines=machines,
        eligible_stages=eligible,
        buffer_in=buffer_in,
        buffer_out=buffer_out,
        transport=transport,
        workers_total=workers_total,
        workers_min={s: 1 for s in stages},
        workers_max={s: 3 for s in stages},
        proc_time=proc_time,
    )


def _generate_group1(spec: GenSpec, rng: SplitMix64) -> Instance:
    jobs = [f"j{k}" for k in range(1, spec.jobs + 1)]
    stages = [f"s{k}" for k in range(1, 9)]
    machines = {f"{s}_m{k}": s for s in stages for k in range(1, 11)}

    eligible: dict[str, tuple[str, ...]] = {}
    for j in jobs:
        skip4 = rng.bernoulli_fifth()
        skip8 = rng.bernoulli_fifth()
        kept = [
            s
            for s in stages
            if not (s == "s4" and skip4) and not (s == "s8" and skip8)
        ]
        eligible[j] = tuple(kept)

    buffer_in = {m: rng.uniform_int(1, 5) for m in machines}
    buffer_out = {m: rng.uniform_int(1, 5) for m in machines}
    first_stages = {elig[0] for elig in eligible.values()}
    last_stages = {elig[-1] for elig in eligible.values()}
    for m, s in machines.items():
        if s in first_stages:
            buffer_in[m] = spec.jobs
        if s in last_stages:
            buffer_out[m] = spec.jobs

    stage_pairs = [(f"s{i}", f"s{i + 1}") for i in range(1, 8)] + [("s3", "s5")]
    transport: dict[tuple[str, str], int] = {}
    for a, b in stage_pairs:
        for m in (mm for mm, ss in machines.items() if ss == a):
            for n in (nn for nn, ss in machines.items() if ss == b):
                transport[(m, n)] = rng.uniform_int(1, 9)

    nominal = {
        (j, s): rng.uniform_int(2, 15) for j in jobs for s in eligible[j]
    }
    return _build(
        jobs, stages, machines, eligible, buffer_in, buffer_out, transport, 20, nominal
    )


def _generate_group2(spec: GenSpec, rng: SplitMix64) -> Instance:
    assert spec.stages is not None and spec.variant is not None
    jobs = [f"j{k}" for k in range(1, spec.jobs + 1)]
    stages = [f"s{k}" for k in range(1, spec.stages + 1)]
    counts = {
        s: (2 if spec.variant == 1 else rng.uniform_int(1, 3)) for s in stages
    }
    machines = {f"{s}_m{k}": s for s in stages for k in range(1, counts[s] + 1)}

    eligible: dict[str, tuple[str, ...]] = {}
    for j in jobs:
        skipped = [rng.bernoulli_fifth() for _ in stages]
        if all(skipped):
            skipped[rng.uniform_int(0, len(stages) - 1)] = False
        eligible[j] = tuple(s for s, skip in zip(stages, skipped) if not skip)

    buffer_in = {m: rng.uniform_int(1, 3) for m in machines}
    buffer_out = {m: rng.uniform_int(1, 3) for m in machines}

    transport: dict[tuple[str, str], int] = {}
    for ai in range(len(stages)):
        for bi in range(ai + 1, len(stages)):
            a, b = stages[ai], stages[bi]
            for m in (mm for mm, ss in machines.items() if ss == a):
                for n in (nn for nn, ss in machines.items() if ss == b):
                    transport[(m, n)] = rng.uniform_int(1, 9) * (bi - ai)

    nominal = {
        (j, s): rng.uniform_int(2, 15) for j in jobs for s in eligible[j]
    }
    return _build(
        jobs, stages, machines, eligible, buffer_in, buffer_out, transport, 8, nominal
    )


def generate(spec: GenSpec) -> Instance:
    """Generate one instance; identical specs yield bit-identical instances."""
    spec.check()
    rng = SplitMix64(spec.seed)
    if spec.group == 1:
        return _generate_group1(spec, rng)
    return _generate_group2(spec, rng)
