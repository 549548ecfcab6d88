"""Run manifest: what was run, with which seed, on which inputs, producing which outputs."""

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from .. import config

MANIFEST_NAME = "manifest.json"


def file_digest(filepath):
    """sha256 of a file's bytes."""
    digest = hashlib.sha256()
    with open(filepath, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    seed: int = None
    scenario: str = None
    version: str = config.VERSION
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    started: str = field(default_factory=_now)
    finished: str = None
    status: str = "ok"
    error: dict = None

    def add_input(self, filepath):
        if filepath and os.path.exists(filepath):
            self.inputs[filepath] = file_digest(filepath)

    def add_output(self, filepath):
        self.outputs[filepath] = file_digest(filepath)

    def record_error(self, error, exit_status):
        """Mark the run failed; outputs written before the failure stay listed."""
        self.status = "failed"
        self.error = {"type": error.__class__.__name__, "message": str(error), "exit_status": exit_status}
        binding = getattr(error, "binding", None)
        if binding:
            self.error["binding"] = binding

    def write(self, output_dir):
        """Finish the manifest and write it as manifest.json in output_dir."""
        self.finished = _now()
        os.makedirs(output_dir, exist_ok=True)
        filepath = os.path.join(output_dir, MANIFEST_NAME)
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(asdict(self), f, indent=2, sort_keys=True)
            f.write("\n")
        return filepath
