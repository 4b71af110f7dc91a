"""
Round Distributor

This module splits a run into contiguous chunks of round indices and executes
them serially or on a process pool. Rounds draw from per-index streams, so the
collected transcripts do not depend on how the run was split.
"""

from concurrent.futures import ProcessPoolExecutor
from typing import List, Tuple

from protocol.engine import run_round
from protocol.schema import ProtocolConfig, RoundTranscript
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_CHUNK_SIZE = 5000


def plan_chunks(rounds: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> List[Tuple[int, int]]:
    """Half-open [start, stop) ranges covering range(rounds)"""
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    return [(start, min(start + chunk_size, rounds)) for start in range(0, rounds, chunk_size)]


def run_chunk(
    cfg: ProtocolConfig,
    strategy,
    start: int,
    stop: int,
    keep_records: bool = True,
) -> List[RoundTranscript]:
    return [run_round(cfg, strategy, index, keep_record=keep_records) for index in range(start, stop)]


class RoundDistributor:
    """
    Executes the rounds of a run in chunks

    With more than one worker the chunks are mapped onto a process pool;
    results are reassembled in chunk order.
    """

    def __init__(self, workers: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE):
        """
        Initialize round distributor

        Args:
            workers: Number of worker processes (1 runs in-process)
            chunk_size: Rounds per chunk
        """
        if workers < 1:
            raise ValueError("workers must be >= 1")
        self.workers = workers
        self.chunk_size = chunk_size

    def execute(self, cfg: ProtocolConfig, strategy, keep_records: bool = True) -> List[RoundTranscript]:
        chunks = plan_chunks(cfg.rounds, self.chunk_size)
        logger.debug(f"Executing {cfg.rounds} rounds in {len(chunks)} chunks on {self.workers} workers")

        if self.workers == 1 or len(chunks) == 1:
            results = [run_chunk(cfg, strategy, start, stop, keep_records) for start, stop in chunks]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [
                    pool.submit(run_chunk, cfg, strategy, start, stop, keep_records)
                    for start, stop in chunks
                ]
                results = [future.result() for future in futures]

        transcripts = [t for chunk in results for t in chunk]
        return transcripts
