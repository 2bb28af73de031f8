"""Shared fixtures: a frozen sampler for tiny instances plus the
session-wide suite whose brute-force optima several suites reuse."""

from __future__ import annotations

import random

import pytest

from hffs.model import Instance

from oracles import brute_force_optimum

SUITE_SEED = 20260814
SUITE_SIZE = 50


def make_instance(
    *,
    jobs: dict[str, list[str]],
    stage_machines: dict[str, list[str]],
    proc: dict[tuple[str, str, int], int],
    transport: dict[tuple[str, str], int],
    workers_total: int = 1,
    workers_max: dict[str, int] | None = None,
    buffer_in: dict[str, int] | int | None = None,
    buffer_out: dict[str, int] | int | None = None,
) -> Instance:
    """Hand-built instance helper: omitted buffers default to |jobs| (vacuous)."""
    stages = tuple(stage_machines)
    machines = {m: s for s, ms in stage_machines.items() for m in ms}
    njobs = len(jobs)

    def buf(spec) -> dict[str, int]:
        if spec is None:
            return {m: njobs for m in machines}
        if isinstance(spec, int):
            return {m: spec for m in machines}
        return {m: spec.get(m, njobs) for m in machines}

    if workers_max is None:
        wmax = {s: 1 for s in stages}
        for (_, s, w) in proc:
            wmax[s] = max(wmax[s], w)
    else:
        wmax = workers_max
    return Instance(
        jobs=tuple(jobs),
        stages=stages,
        machines=machines,
        eligible_stages={j: tuple(ss) for j, ss in jobs.items()},
        buffer_in=buf(buffer_in),
        buffer_out=buf(buffer_out),
        transport=transport,
        workers_total=workers_total,
        workers_min={s: 1 for s in stages},
        workers_max={s: wmax.get(s, workers_total) for s in stages},
        proc_time=proc,
    )


def sample_tiny(rng: random.Random) -> Instance:
    """Random instance within the tiny-suite caps: at most 4 jobs, 3
    stages, 2 machines per stage, 3 workers, nominal times in [2, 6].

    Four-job instances with more than 6 operations keep every stage at a
    single worker; the exact solvers stay fast on everything this emits.
    """
    njobs = rng.choice([2, 2, 3, 3, 4])
    nstages = rng.choice([1, 2, 2, 3])
    if njobs == 4 and nstages == 3:
        nstages = 2
    stages = [f"s{i + 1}" for i in range(nstages)]
    jobs = [f"j{i + 1}" for i in range(njobs)]
    machines = {
        f"m{si + 1}{k + 1}": s
        for si, s in enumerate(stages)
        for k in range(rng.randint(1, 2))
    }
    W = rng.randint(1, 3)
    elig: dict[str, list[str]] = {}
    for j in jobs:
        keep = [s for s in stages if rng.random() < 0.75]
        elig[j] = keep or [rng.choice(stages)]
    nops = sum(len(v) for v in elig.values())
    if njobs == 4 and nops > 6:
        wmax = {s: 1 for s in stages}
    else:
        wmax = {s: rng.randint(1, W) for s in stages}
    proc = {}
    for j in jobs:
        for s in elig[j]:
            base = rng.randint(2, 6)
            for w in range(1, wmax[s] + 1):
                proc[(j, s, w)] = -(-base // w)
    transport = {}
    for m, sm in machines.items():
        for n, sn in machines.items():
            ia, ib = stages.index(sm), stages.index(sn)
            if ib == ia + 1:
                transport[(m, n)] = rng.randint(1, 4)
            elif ib > ia + 1:
                transport[(m, n)] = rng.randint(1, 4) + rng.randint(0, 2)
    if rng.random() < 0.4 and njobs <= 3:
        bin_ = {m: rng.randint(0, 1) for m in machines}
        bout = {m: rng.randint(0, 1) for m in machines}
    else:
        bin_ = {m: njobs for m in machines}
        bout = {m: njobs for m in machines}
    return Instance(
        jobs=tuple(jobs),
        stages=tuple(stages),
        machines=machines,
        eligible_stages={j: tuple(s for s in stages if s in elig[j]) for j in jobs},
        buffer_in=bin_,
        buffer_out=bout,
        transport=transport,
        workers_total=W,
        workers_min={s: 1 for s in stages},
        workers_max=wmax,
        proc_time=proc,
    )


@pytest.fixture(scope="session")
def suite50() -> list[Instance]:
    rng = random.Random(SUITE_SEED)
    return [sample_tiny(rng) for _ in range(SUITE_SIZE)]


@pytest.fixture(scope="session")
def suite_optima(suite50) -> list[int]:
    return [brute_force_optimum(inst) for inst in suite50]
