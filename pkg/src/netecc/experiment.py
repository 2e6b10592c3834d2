"""Monte Carlo estimate of how often a fully random code fails verification."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from netecc.code import construct_random
from netecc.field import FieldSpec
from netecc.graph import Network
from netecc.report import KVRecord


@dataclass
class ExperimentReport(KVRecord):
    trials: int
    failures: int
    rate: float
    delta: float | None
    q: int
    k: int
    alpha: int
    seed: int
    within_bound: bool | None
    failed_seeds: list[int] = field(default_factory=list)


def _trial(args) -> bool:
    net, k, alpha, q, seed = args
    _, report = construct_random(net, k, alpha, FieldSpec(q), seed)
    return report.success


def run_experiment(net: Network, k: int, alpha: int, q: int, trials: int, seed: int = 0,
                   delta: float | None = None, workers: int = 1) -> ExperimentReport:
    """Run ``trials`` random constructions with seeds ``seed, seed+1, ...``."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    jobs = [(net, k, alpha, q, seed + i) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        outcomes = [_trial(j) for j in jobs]
    failed = [seed + i for i, ok in enumerate(outcomes) if not ok]
    rate = len(failed) / trials
    return ExperimentReport(
        trials=trials, failures=len(failed), rate=rate,
        delta=None if delta is None else float(delta), q=q, k=k, alpha=alpha, seed=seed,
        within_bound=None if delta is None else rate <= float(delta), failed_seeds=failed,
    )
