"""
Simulation Runner

Orchestrates a full protocol run: distribute the rounds, collect transcripts,
sift, and report efficiency.
"""

import time
from dataclasses import dataclass
from typing import List, Optional

from adversary.strategies import HonestStrategy
from protocol.schema import ProtocolConfig, RoundTranscript, SiftOutcome
from protocol.sifting import qubit_efficiency, sift
from runner.round_distributor import DEFAULT_CHUNK_SIZE, RoundDistributor
from utils.logger import SimulationLogger


@dataclass
class SimulationResult:
    config: ProtocolConfig
    transcripts: List[RoundTranscript]
    outcome: SiftOutcome
    efficiency: float
    duration: float


class SimulationRunner:
    """
    Runs the protocol for a configuration and a strategy
    """

    def __init__(
        self,
        config: ProtocolConfig,
        strategy=None,
        workers: int = 1,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
        keep_records: bool = False,
    ):
        """
        Initialize simulation runner

        Args:
            config: Protocol configuration
            strategy: Attack strategy (honest when omitted)
            workers: Worker processes for round execution
            chunk_size: Rounds per distributed chunk
            keep_records: Keep per-round adversary records in the transcripts
        """
        self.config = config
        self.strategy = strategy or HonestStrategy()
        self.keep_records = keep_records
        self.distributor = RoundDistributor(workers=workers, chunk_size=chunk_size)
        self.logger = SimulationLogger(self.strategy.label(), kind="runner")

    def run_rounds(self) -> List[RoundTranscript]:
        return self.distributor.execute(self.config, self.strategy, keep_records=self.keep_records)

    def run(self, rounds: Optional[List[RoundTranscript]] = None) -> SimulationResult:
        """Execute (or reuse) the rounds and sift them"""
        self.logger.log_run_start(self.strategy.label(), self.config.rounds, self.config.master_seed)
        start = time.perf_counter()
        transcripts = rounds if rounds is not None else self.run_rounds()
        outcome = sift(transcripts, self.config)
        efficiency = qubit_efficiency(outcome, self.config)
        duration = time.perf_counter() - start
        if outcome.aborted:
            self.logger.log_abort(outcome.abort_reason.value, outcome.per_situation_error_rate)
        self.logger.log_run_complete(self.strategy.label(), duration, outcome.key_length)
        return SimulationResult(
            config=self.config,
            transcripts=transcripts,
            outcome=outcome,
            efficiency=efficiency,
            duration=duration,
        )
