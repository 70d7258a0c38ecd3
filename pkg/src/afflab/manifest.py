"""Run manifests: every JSON the CLI emits embeds one.

A manifest records the command line, tool version, seed, budgets, the
sigma_3 value in effect, timestamps, and digests of all inputs and of the
result itself.  Reruns with identical manifests reproduce identical result
digests in single-worker mode.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

from . import __version__
from .params import sigma3


def _digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


_VOLATILE_KEYS = {"wall_time", "elapsed"}


def _stable_view(obj):
    """Result with timing fields dropped and keys stringified, so rerun
    digests can match and canonical sorting never mixes key types."""
    if isinstance(obj, dict):
        return {str(k): _stable_view(v) for k, v in obj.items()
                if k not in _VOLATILE_KEYS}
    if isinstance(obj, (list, tuple)):
        return [_stable_view(v) for v in obj]
    return obj


@dataclass
class RunManifest:
    command: list[str]
    seed: int
    budget: int | None
    threads: int
    version: str = __version__
    sigma3: str = ""
    started: float = field(default_factory=time.time)
    finished: float = 0.0
    input_digests: dict[str, str] = field(default_factory=dict)
    result_digest: str = ""

    def __post_init__(self):
        if not self.sigma3:
            self.sigma3 = str(sigma3())

    def add_input(self, name: str, data: bytes) -> None:
        self.input_digests[name] = _digest_bytes(data)

    def finalize(self, result: dict) -> dict:
        """Close the manifest over the result and return the full envelope.

        The digest covers a stable view of the result (timing fields
        removed), so identical reruns hash identically."""
        self.finished = time.time()
        self.result_digest = _digest_bytes(
            canonical_json(_stable_view(result)).encode())
        return {
            "manifest": {
                "command": self.command,
                "version": self.version,
                "seed": self.seed,
                "budget": self.budget,
                "threads": self.threads,
                "sigma3": self.sigma3,
                "started": self.started,
                "finished": self.finished,
                "input_digests": self.input_digests,
                "result_digest": self.result_digest,
            },
            "result": result,
        }
