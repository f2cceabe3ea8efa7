import os
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .exceptions import CheckpointError

RECOVERY_HINT = "Delete the file or pass a different --checkpoint path to start over."


@dataclass
class CheckpointState:
    """What a checkpoint file holds: the residue cache and the completed blocks."""
    cache: Optional[Dict[int, int]] = None
    blocks: Dict[Tuple[int, int], List[Dict[str, Any]]] = field(default_factory=dict)


class DataHandler:
    """
    Reads and writes scan checkpoints and report files.

    A checkpoint is line-delimited JSON: a header naming the scan kind and its
    configuration, an optional residue cache line, then for each finished block
    its records followed by ``{"block_lo": .., "block_hi": .., "status": "done"}``.
    Every checkpoint write replaces the file atomically; reports are written or appended in place.
    """

    def __init__(self, file_path):
        """
        Args:
            file_path (str): The checkpoint or report path.
        """
        self.file_path = file_path
        self.logger = logging.getLogger(__name__)
        self._lines: List[str] = []

    @staticmethod
    def _dump(obj: Dict[str, Any]) -> str:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"))

    def _flush(self):
        tmp_path = f"{self.file_path}.tmp"
        with open(tmp_path, "w", encoding="utf-8") as file:
            file.write("\n".join(self._lines) + "\n")
            file.flush()
            os.fsync(file.fileno())
        os.replace(tmp_path, self.file_path)

    def begin(self, kind: str, config: Dict[str, Any]):
        """Starts a fresh checkpoint, overwriting any existing file."""
        self._lines = [self._dump({"kind": kind, "config": config})]
        self._flush()
        self.logger.info("checkpoint started at %s", self.file_path)

    def record_cache(self, cache: Dict[int, int]):
        self._lines.append(self._dump({"cache": sorted([d, r] for d, r in cache.items())}))
        self._flush()

    def record_block(self, block_lo: int, block_hi: int, records: List[Dict[str, Any]]):
        """Appends a block's records and its done marker, then rewrites the file."""
        self._lines.extend(self._dump(record) for record in records)
        self._lines.append(self._dump({"block_lo": block_lo, "block_hi": block_hi, "status": "done"}))
        self._flush()
        self.logger.info("checkpoint: block [%d, %d) done, %d records", block_lo, block_hi, len(records))

    def resume(self, kind: str, config: Dict[str, Any]) -> CheckpointState:
        """
        Loads a checkpoint written for the same scan.

        Records that follow the last done marker belong to an unfinished block and
        are dropped.

        Args:
            kind (str): The scan kind being resumed.
            config (Dict[str, Any]): The scan configuration being resumed.

        Returns:
            CheckpointState: Cache and completed blocks.

        Raises:
            CheckpointError: If the file is missing, unreadable, corrupt or was
                written for a different scan.
        """
        try:
            with open(self.file_path, "r", encoding="utf-8") as file:
                raw = [line for line in file.read().splitlines() if line.strip()]
        except OSError as e:
            raise CheckpointError(f"Cannot read checkpoint '{self.file_path}': {e}. {RECOVERY_HINT}")
        try:
            entries = [json.loads(line) for line in raw]
        except json.JSONDecodeError as e:
            raise CheckpointError(f"Checkpoint '{self.file_path}' is corrupt: {e}. {RECOVERY_HINT}")

        if not entries or entries[0].get("kind") != kind or entries[0].get("config") != config:
            raise CheckpointError(f"Checkpoint '{self.file_path}' belongs to a different scan. {RECOVERY_HINT}")

        state = CheckpointState()
        kept = [raw[0]]
        pending: List[Tuple[str, Dict[str, Any]]] = []
        for line, entry in zip(raw[1:], entries[1:]):
            if "cache" in entry:
                state.cache = {int(d): int(r) for d, r in entry["cache"]}
                kept.append(line)
            elif entry.get("status") == "done":
                block = (int(entry["block_lo"]), int(entry["block_hi"]))
                state.blocks[block] = [record for _, record in pending]
                kept.extend(pending_line for pending_line, _ in pending)
                kept.append(line)
                pending = []
            elif "n" in entry:
                pending.append((line, entry))
            else:
                raise CheckpointError(f"Unrecognised checkpoint line {line!r}. {RECOVERY_HINT}")

        if pending:
            self.logger.warning("dropping %d records of an unfinished block", len(pending))
        self._lines = kept
        self.logger.info("resuming from %s: %d blocks done", self.file_path, len(state.blocks))
        return state

    def write_text(self, text: str, append: bool = False):
        """Writes a rendered report, or appends to one when ``append`` is set."""
        with open(self.file_path, "a" if append else "w", encoding="utf-8") as file:
            file.write(text)
        self.logger.debug("%d characters written to %s", len(text), self.file_path)
