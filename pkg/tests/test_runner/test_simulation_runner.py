"""
Tests for round distribution and the simulation runner
"""

import pytest

from adversary.strategies import BasisDescriptor, HonestStrategy, TPMeasureBasisStrategy
from protocol.schema import ProtocolConfig
from runner.round_distributor import RoundDistributor, plan_chunks, run_chunk
from runner.simulation_runner import SimulationRunner


def dumped(transcripts):
    return [t.model_dump() for t in transcripts]


class TestChunkPlanning:
    """Splitting a run into index ranges"""

    def test_even_split(self):
        assert plan_chunks(10, 5) == [(0, 5), (5, 10)]

    def test_remainder(self):
        """The last chunk holds the remainder"""
        assert plan_chunks(7, 3) == [(0, 3), (3, 6), (6, 7)]

    def test_zero_rounds(self):
        assert plan_chunks(0, 3) == []

    def test_invalid_chunk_size(self):
        with pytest.raises(ValueError):
            plan_chunks(10, 0)

    def test_invalid_workers(self):
        with pytest.raises(ValueError):
            RoundDistributor(workers=0)


class TestDeterminism:
    """Transcripts depend only on the seed and the round index"""

    @pytest.fixture
    def cfg(self):
        return ProtocolConfig(rounds=120, master_seed=17)

    def test_chunking_does_not_matter(self, cfg):
        """Different chunk sizes give the same transcripts"""
        whole = RoundDistributor(chunk_size=1000).execute(cfg, HonestStrategy())
        pieces = RoundDistributor(chunk_size=7).execute(cfg, HonestStrategy())
        assert dumped(whole) == dumped(pieces)

    def test_serial_and_parallel_agree(self, cfg):
        """A process pool reproduces the serial run"""
        strategy = TPMeasureBasisStrategy(basis=BasisDescriptor(name="Z"))
        serial = RoundDistributor(workers=1, chunk_size=30).execute(cfg, strategy, keep_records=False)
        parallel = RoundDistributor(workers=2, chunk_size=30).execute(cfg, strategy, keep_records=False)
        assert dumped(serial) == dumped(parallel)

    def test_chunk_matches_run_slice(self, cfg):
        """A chunk starting mid-run reproduces the same rounds"""
        full = run_chunk(cfg, HonestStrategy(), 0, 20)
        tail = run_chunk(cfg, HonestStrategy(), 10, 20)
        assert dumped(full[10:]) == dumped(tail)

    def test_records_dropped(self, cfg):
        """keep_records=False strips adversary records"""
        transcripts = run_chunk(cfg, HonestStrategy(), 0, 5, keep_records=False)
        assert all(t.adversary_record is None for t in transcripts)


class TestSimulationRunner:
    """Full runs"""

    def test_honest_run(self):
        """An honest run is error free and keeps roughly one round in eight"""
        result = SimulationRunner(ProtocolConfig(rounds=4000, master_seed=42)).run()
        assert not result.outcome.aborted
        assert result.outcome.flagged_positions == []
        assert result.outcome.raw_key_alice == result.outcome.raw_key_bob
        assert result.efficiency == pytest.approx(1 / 8, abs=0.03)
        assert len(result.transcripts) == 4000

    def test_attack_run_aborts(self):
        """Measuring in Z is caught with a zero error threshold"""
        strategy = TPMeasureBasisStrategy(basis=BasisDescriptor(name="Z"))
        result = SimulationRunner(ProtocolConfig(rounds=400, master_seed=42), strategy).run()
        assert result.outcome.aborted
        assert result.outcome.flagged_positions

    def test_reuses_supplied_rounds(self):
        """Precomputed transcripts are sifted without rerunning"""
        cfg = ProtocolConfig(rounds=200, master_seed=3)
        runner = SimulationRunner(cfg)
        rounds = runner.run_rounds()
        assert runner.run(rounds).outcome == runner.run().outcome
