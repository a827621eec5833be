"""Run manifests: flat key=value records written atomically next to outputs."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from pathlib import Path

VERSION = "0.1.0"


@dataclass
class RunManifest:
    command: str
    parameters: dict[str, object] = field(default_factory=dict)
    grid_fingerprint: str = ""
    outputs: list[str] = field(default_factory=list)
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    started: float = field(default_factory=time.time)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(passed), detail))
        return passed

    @property
    def all_passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def render(self) -> str:
        lines = [
            f"command={self.command}",
            f"version={VERSION}",
            f"duration_s={time.time() - self.started:.3f}",
            f"grid_fingerprint={self.grid_fingerprint}",
        ]
        for k in sorted(self.parameters):
            lines.append(f"param.{k}={self.parameters[k]}")
        for out in self.outputs:
            lines.append(f"output={out}")
        for name, ok, detail in self.checks:
            status = "pass" if ok else "FAIL"
            lines.append(f"check.{name}={status}" + (f" ({detail})" if detail else ""))
        lines.append(f"summary={'pass' if self.all_passed else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> None:
        atomic_write_text(path, self.render())


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partials."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def manifest_path_for(output: str | Path) -> Path:
    p = Path(output)
    return p.with_name(p.name + ".manifest")
