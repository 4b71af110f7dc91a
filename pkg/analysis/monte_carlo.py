"""
Monte Carlo Detection

Runs a strategy through the full protocol and compares the empirical
detection rate with the branch oracle, per round and over groups of N rounds.
"""

import math
from typing import List, Optional, Sequence

from pydantic import BaseModel, Field

from adversary.collective import adversary_distinguishability, analytic_distinguishability
from adversary.strategies import dump_strategy
from analysis.oracle import enumerate_branches
from analysis.statistics import InsufficientData, detection_curve
from protocol.schema import ProtocolConfig
from runner.simulation_runner import SimulationRunner
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_N_VALUES = (1, 4, 16, 64)
SIGMA_BOUND = 3.0


class GroupedDetection(BaseModel):
    """Detection over consecutive groups of N rounds"""
    n: int = Field(ge=1)
    analytic: float = Field(description="1 - (1 - p)^N")
    groups: int = Field(description="Number of complete groups in the run")
    empirical: Optional[float] = Field(default=None, description="Fraction of groups with a flagged round")
    standard_error: Optional[float] = None
    consistent: Optional[bool] = None


class DetectionReport(BaseModel):
    """Oracle and empirical detection of one strategy"""
    strategy: dict = Field(description="Strategy descriptor")
    strategy_label: str
    rounds: int
    seed: int
    per_round_detection: float = Field(ge=0.0, le=1.0, description="Oracle per-round detection")
    empirical_estimate: float
    standard_error: float
    consistent: bool = Field(description="Empirical within three standard errors of the oracle")
    grouped: List[GroupedDetection] = Field(default_factory=list)
    analytic_distinguishability: Optional[float] = None
    empirical_distinguishability: Optional[float] = None
    verdict: str = Field(default="")

    @property
    def n_round_curve(self) -> List[float]:
        return [g.analytic for g in self.grouped]


def binomial_standard_error(p: float, trials: int) -> float:
    if trials < 1:
        raise InsufficientData("no trials")
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def within_sigma(observed: float, expected: float, trials: int, sigmas: float = SIGMA_BOUND) -> bool:
    # a zero-variance expectation must be met exactly
    bound = sigmas * binomial_standard_error(expected, trials)
    return abs(observed - expected) <= bound + 1e-12


def grouped_detection(flagged_positions: Sequence[int], rounds: int, n: int) -> float:
    """Fraction of complete N-round groups containing at least one flagged round"""
    groups = rounds // n
    if groups < 1:
        raise InsufficientData(f"{rounds} rounds do not fill a group of {n}")
    hit = {position // n for position in flagged_positions if position < groups * n}
    return len(hit) / groups


def estimate_detection(
    strategy,
    cfg: ProtocolConfig,
    n_values: Sequence[int] = DEFAULT_N_VALUES,
    workers: int = 1,
    with_distinguishability: bool = True,
) -> DetectionReport:
    """
    Run ``strategy`` for ``cfg.rounds`` rounds and compare with the oracle.

    Args:
        strategy: Attack strategy
        cfg: Protocol configuration (seed and round count)
        n_values: Group sizes for the N-round curve
        workers: Worker processes for the run
        with_distinguishability: Also measure TP's key information for collective attacks

    Returns:
        DetectionReport
    """
    if not n_values:
        raise ValueError("n_values must not be empty")
    p = enumerate_branches(strategy, cfg).flagged_weight
    p = min(max(p, 0.0), 1.0)

    collective = with_distinguishability and strategy.is_collective
    runner = SimulationRunner(cfg, strategy, workers=workers, keep_records=collective)
    result = runner.run()
    outcome = result.outcome

    empirical = len(outcome.flagged_positions) / cfg.rounds
    standard_error = binomial_standard_error(p, cfg.rounds)
    consistent = within_sigma(empirical, p, cfg.rounds)

    grouped = []
    for n, analytic in zip(n_values, detection_curve(p, n_values)):
        groups = cfg.rounds // n
        if groups < 1:
            grouped.append(GroupedDetection(n=n, analytic=analytic, groups=0))
            continue
        observed = grouped_detection(outcome.flagged_positions, cfg.rounds, n)
        grouped.append(GroupedDetection(
            n=n,
            analytic=analytic,
            groups=groups,
            empirical=observed,
            standard_error=binomial_standard_error(analytic, groups),
            consistent=within_sigma(observed, analytic, groups),
        ))

    analytic_info = None
    empirical_info = None
    if collective:
        analytic_info = analytic_distinguishability(strategy, cfg)
        try:
            empirical_info = adversary_distinguishability(None, result.transcripts)
        except InsufficientData as e:
            logger.warning(f"Empirical distinguishability unavailable: {e}")

    all_consistent = consistent and all(g.consistent is not False for g in grouped)
    verdict = "pass" if all_consistent else "fail"
    if analytic_info is not None and analytic_info <= 1e-10:
        verdict += "; no key information"

    logger.info(
        f"{strategy.label()}: oracle {p:.6f}, empirical {empirical:.6f} "
        f"+/- {standard_error:.6f} ({verdict})"
    )

    return DetectionReport(
        strategy=dump_strategy(strategy),
        strategy_label=strategy.label(),
        rounds=cfg.rounds,
        seed=cfg.master_seed,
        per_round_detection=p,
        empirical_estimate=empirical,
        standard_error=standard_error,
        consistent=consistent,
        grouped=grouped,
        analytic_distinguishability=analytic_info,
        empirical_distinguishability=empirical_info,
        verdict=verdict,
    )
