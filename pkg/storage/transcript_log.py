"""
Transcript Log

Line-delimited JSON log of protocol rounds, one round per line, for replay and
audit. Lines use sorted keys so that identical runs give byte-identical files.
"""

import json
from pathlib import Path
from typing import Iterable, List, Union

from protocol.schema import ParticipantOp, RoundTranscript
from utils.logger import get_logger

logger = get_logger(__name__)


class TranscriptLogError(Exception):
    """Raised when a transcript log cannot be written or parsed"""
    pass


def dumps_line(t: RoundTranscript) -> str:
    record = t.adversary_record
    return json.dumps(
        {
            "round": t.round_index,
            "alice_op": t.alice_op.value,
            "bob_op": t.bob_op.value,
            "alice_bit": t.alice_bit,
            "bob_bit": t.bob_bit,
            "tp_bit": t.tp_announced_bit,
            "alice_aborted": t.alice_aborted_flag,
            "tp_outcome": record.tp_outcome if record is not None else None,
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def parse_line(line: str) -> RoundTranscript:
    try:
        data = json.loads(line)
    except ValueError as e:
        raise TranscriptLogError(f"Invalid transcript line: {e}")
    if not isinstance(data, dict):
        raise TranscriptLogError(f"Invalid transcript line: expected an object, got {type(data).__name__}")
    try:
        return RoundTranscript(
            round_index=data["round"],
            alice_op=ParticipantOp(data["alice_op"]),
            bob_op=ParticipantOp(data["bob_op"]),
            alice_bit=data["alice_bit"],
            bob_bit=data["bob_bit"],
            tp_announced_bit=data["tp_bit"],
            alice_aborted_flag=data["alice_aborted"],
        )
    except (ValueError, KeyError, TypeError) as e:
        raise TranscriptLogError(f"Invalid transcript line: {e}")


def write_log(path: Union[str, Path], transcripts: Iterable[RoundTranscript]) -> int:
    """Write transcripts in round order; returns the number of lines written"""
    ordered = sorted(transcripts, key=lambda t: t.round_index)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for t in ordered:
                f.write(dumps_line(t))
                f.write("\n")
    except OSError as e:
        logger.error(f"Error writing transcript log {path}: {e}")
        raise TranscriptLogError(f"Failed to write {path}: {e}")
    logger.info(f"Wrote {len(ordered)} rounds to {path}")
    return len(ordered)


def read_log(path: Union[str, Path]) -> List[RoundTranscript]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return [parse_line(line) for line in f if line.strip()]
    except OSError as e:
        logger.error(f"Error reading transcript log {path}: {e}")
        raise TranscriptLogError(f"Failed to read {path}: {e}")
