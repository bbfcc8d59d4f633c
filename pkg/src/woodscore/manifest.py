"""Run manifests: a content-addressed record of what produced an output.

The digest is the sha256 of the manifest's canonical JSON (sorted keys, no
timestamps), so identical commands over identical inputs yield identical
digests and, by the determinism contracts, byte-identical outputs.  Text
outputs cite the short digest in a leading ``# manifest`` comment line.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import ValidationError

SHORT_DIGEST_LEN = 16


@dataclass(frozen=True)
class RunManifest:
    command: str
    inputs: tuple[tuple[str, str], ...]
    params: tuple[tuple[str, str], ...]
    version: str

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "inputs": [{"path": p, "sha256": d} for p, d in self.inputs],
            "params": {k: v for k, v in self.params},
            "version": self.version,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    def short_digest(self) -> str:
        return self.digest()[:SHORT_DIGEST_LEN]

    def save(self, path: str) -> None:
        payload = json.loads(self.to_json())
        payload["digest"] = self.digest()
        with open(path, "w", encoding="utf-8", newline="") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for block in iter(lambda: fh.read(1 << 20), b""):
                digest.update(block)
    except OSError as exc:
        raise ValidationError(f"cannot read input {path}: {exc}") from exc
    return digest.hexdigest()


def build_manifest(
    command: str,
    input_paths: list[str],
    params: dict,
    version: str,
) -> RunManifest:
    """Digest each input file and freeze the parameters.

    Params are stringified with repr-stable formatting so the canonical
    JSON does not depend on float printing quirks across runs.
    """
    inputs = tuple((p, file_sha256(p)) for p in input_paths)
    frozen = tuple(sorted((k, _stable(v)) for k, v in params.items()))
    return RunManifest(command=command, inputs=inputs, params=frozen, version=version)


def _stable(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_stable(v) for v in value) + "]"
    return str(value)
