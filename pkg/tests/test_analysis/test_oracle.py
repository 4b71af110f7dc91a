"""
Tests for the branch oracle
"""

import math

import pytest

from adversary.strategies import (
    BasisDescriptor,
    FakedBellStrategy,
    FakedSingleStrategy,
    HonestStrategy,
    TPMeasureBasisStrategy,
)
from analysis.oracle import HONEST_CASE_WEIGHTS, basis_angle_detection, enumerate_branches, per_round_detection
from protocol.schema import ProtocolConfig

BREIDBART_DETECTION = 0.07322330470336313


class TestHonestEnumeration:
    """Exact distribution of an honest round"""

    @pytest.fixture
    def honest(self):
        return enumerate_branches(HonestStrategy())

    def test_case_weights(self, honest):
        """Nine case weights match the honest table"""
        for observed, expected in zip(honest.case_weights(), HONEST_CASE_WEIGHTS):
            assert observed == pytest.approx(expected, abs=1e-12)

    def test_weights_sum_to_one(self, honest):
        """Branch weights form a distribution"""
        assert honest.total_weight == pytest.approx(1.0, abs=1e-12)
        assert sum(HONEST_CASE_WEIGHTS) == pytest.approx(1.0)

    def test_no_undefined_rounds(self, honest):
        """Every honest round falls into a defined case"""
        assert honest.undefined_weight == pytest.approx(0.0, abs=1e-12)

    def test_situation_weights(self, honest):
        """Each operation pair occurs with probability 1/4"""
        assert honest.situation_weights() == pytest.approx([0.25] * 4)

    def test_no_detection(self, honest):
        """Honest TP never raises an error"""
        assert honest.flagged_weight == pytest.approx(0.0, abs=1e-12)

    def test_biased_operations(self):
        """Situation weights follow the operation probabilities"""
        cfg = ProtocolConfig(rounds=1, p_alice_mh=0.9, p_bob_mh=0.9)
        weights = enumerate_branches(HonestStrategy(), cfg).situation_weights()
        assert weights == pytest.approx([0.81, 0.09, 0.09, 0.01])


class TestAttackDetection:
    """Per-round detection probabilities of the individual attacks"""

    @pytest.mark.parametrize("strategy,expected", [
        (TPMeasureBasisStrategy(basis=BasisDescriptor(name="Z")), 1 / 4),
        (TPMeasureBasisStrategy(basis=BasisDescriptor(name="Breidbart")), BREIDBART_DETECTION),
        (FakedSingleStrategy(prep=0, tp_basis="Z"), 7 / 16),
        (FakedSingleStrategy(prep=0, tp_basis="X"), 1 / 4),
        (FakedSingleStrategy(prep=1, tp_basis="Z"), 7 / 16),
        (FakedSingleStrategy(prep=1, tp_basis="X"), 1 / 4),
        (FakedBellStrategy(tp_basis="Bell"), 3 / 8),
        (FakedBellStrategy(tp_basis="Computational2Q"), 7 / 16),
    ])
    def test_detection(self, strategy, expected):
        """Oracle detection matches the closed form"""
        assert per_round_detection(strategy) == pytest.approx(expected, abs=1e-12)

    def test_faked_single_case_outside_table(self):
        """Attacks may produce rounds that no honest case describes"""
        enumeration = enumerate_branches(FakedSingleStrategy(prep=0, tp_basis="Z"))
        assert enumeration.total_weight == pytest.approx(1.0, abs=1e-12)
        assert sum(enumeration.case_weights()) + enumeration.undefined_weight == pytest.approx(1.0)

    def test_flagged_by_situation_sums(self):
        """Per-situation detection adds up to the total"""
        enumeration = enumerate_branches(TPMeasureBasisStrategy(basis=BasisDescriptor(name="Z")))
        assert sum(enumeration.flagged_by_situation()) == pytest.approx(enumeration.flagged_weight)


class TestBasisAngle:
    """Detection of a TP measuring in a rotated basis"""

    @pytest.mark.parametrize("theta,expected", [
        (0.0, 1 / 4),
        (math.pi / 8, BREIDBART_DETECTION),
        (math.pi / 4, 0.0),
    ])
    def test_known_angles(self, theta, expected):
        """Z basis, Breidbart basis and X basis"""
        assert basis_angle_detection(theta) == pytest.approx(expected, abs=1e-12)

    def test_monotone_towards_x(self):
        """Detection falls as the basis turns towards X"""
        values = [basis_angle_detection(k * math.pi / 32) for k in range(9)]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
