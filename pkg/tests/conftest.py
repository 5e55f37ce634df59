from __future__ import annotations

from dataclasses import dataclass

import pytest
from hypothesis import HealthCheck, settings

from htaction.engine import ConstructionBudget, ConstructionLog, finalize, run_construction
from htaction.forcing import PartialAssignment
from htaction.permutation import FinPerm
from htaction.words import Word

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def reference_budget() -> ConstructionBudget:
    """Two free generators, words up to length 4, pairs on radius 3, orbits of length 6."""
    return ConstructionBudget(
        n_free=2,
        word_len=4,
        tuple_max=2,
        window=3,
        orbit_target=6,
        designated=(Word.parse("tau2"), Word.parse("[sigma, tau2]")),
    )


@dataclass
class Run:
    budget: ConstructionBudget
    partial: PartialAssignment
    log: ConstructionLog
    assign: dict[str, FinPerm]
    seconds: float


@pytest.fixture(scope="session")
def reference_run() -> Run:
    import time

    budget = reference_budget()
    start = time.perf_counter()
    partial, log = run_construction(budget)
    assign = finalize(partial)
    return Run(budget, partial, log, assign, time.perf_counter() - start)
