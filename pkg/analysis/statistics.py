"""
Detection Statistics

Closed-form detection curves, expected efficiency and goodness-of-fit tests of
simulated case histograms.
"""

from typing import List, Optional, Sequence

from pydantic import BaseModel, Field
from scipy import stats

from analysis.oracle import HONEST_CASE_WEIGHTS
from protocol.schema import ProtocolConfig

MIN_CHI_SQUARE_TOTAL = 1000


class InsufficientData(ValueError):
    """Raised when there are too few samples for a statistic"""
    pass


class ChiSquareResult(BaseModel):
    """Outcome of the case-distribution and situation-4 balance tests"""
    statistic: float = Field(description="Pearson statistic over the nine cases")
    p_value: float
    degrees_of_freedom: int = Field(default=8)
    alpha: float
    passed: bool
    balance_statistic: Optional[float] = Field(default=None, description="1-df statistic of situation-4 announcements")
    balance_p_value: Optional[float] = None
    balance_passed: bool = True


def detection_curve(p: float, n_values: Sequence[int]) -> List[float]:
    """1 - (1 - p)^N for each N"""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"detection probability {p!r} outside [0, 1]")
    return [1.0 - (1.0 - p) ** n for n in n_values]


def efficiency_expected(cfg: ProtocolConfig) -> float:
    """Probability of a situation-2 round that is kept for the raw key"""
    return cfg.p_alice_mh * (1.0 - cfg.p_bob_mh) * (1.0 - cfg.check_fraction)


def chi_square_case_test(
    observed: Sequence[int],
    expected: Sequence[float] = HONEST_CASE_WEIGHTS,
    alpha: float = 0.01,
    situation4_announcements: Optional[Sequence[int]] = None,
) -> ChiSquareResult:
    if len(observed) != 9 or len(expected) != 9:
        raise ValueError("case histograms have nine entries")
    total = sum(observed)
    if total < MIN_CHI_SQUARE_TOTAL:
        raise InsufficientData(f"{total} observations, need at least {MIN_CHI_SQUARE_TOTAL}")

    weight_sum = sum(expected)
    expected_counts = [total * w / weight_sum for w in expected]
    statistic, p_value = stats.chisquare(f_obs=list(observed), f_exp=expected_counts)
    result = ChiSquareResult(
        statistic=float(statistic),
        p_value=float(p_value),
        alpha=alpha,
        passed=bool(p_value >= alpha),
    )

    if situation4_announcements is not None and sum(situation4_announcements) > 0:
        balance, balance_p = stats.chisquare(f_obs=list(situation4_announcements))
        result = result.model_copy(update={
            "balance_statistic": float(balance),
            "balance_p_value": float(balance_p),
            "balance_passed": bool(balance_p >= alpha),
        })
    return result
