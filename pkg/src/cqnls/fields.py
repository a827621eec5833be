"""Complex radial profiles sampled on a grid, plus the text field-file format.

Field files are UTF-8 text: '#' comment lines carrying key=value metadata,
then CSV rows "r,re,im" in increasing r.  Floats are written with repr so a
read-back reproduces the samples exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, StructuralError
from .grid import RadialGrid


@dataclass
class RadialField:
    """Complex samples of a radial function on a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise StructuralError(
                f"field has {v.shape} values for a grid of {self.grid.n_points} nodes"
            )
        self.values = v

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.n_points, dtype=np.complex128))

    @classmethod
    def from_callable(cls, grid: RadialGrid, fn) -> "RadialField":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=np.complex128))

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.values.copy())

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def require_finite(self, context: str = "field") -> None:
        if not self.is_finite():
            raise DataError(f"{context} contains non-finite samples")

    def l2_norm(self) -> float:
        return float(np.sqrt(np.real(self.grid.integrate(np.abs(self.values) ** 2))))

    def same_grid(self, other_grid: RadialGrid) -> bool:
        return self.grid == other_grid


def write_field(path: str | Path, field_: RadialField, metadata: dict | None = None) -> None:
    """Write a field file; metadata keys go into '#' header lines."""
    lines = []
    meta = dict(metadata or {})
    meta.setdefault("n_points", field_.grid.n_points)
    meta.setdefault("r_max", field_.grid.r_max)
    meta.setdefault("grading", field_.grid.grading.value)
    for k, v in meta.items():
        lines.append(f"# {k}={v!r}" if isinstance(v, str) else f"# {k}={v}")
    lines.append("# columns=r,re,im")
    for r, z in zip(field_.grid.nodes, field_.values):
        lines.append(f"{float(r)!r},{z.real!r},{z.imag!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_field(path: str | Path, grid: RadialGrid | None = None):
    """Read a field file; returns (RadialField, metadata dict).

    If grid is given the file must match it node for node; otherwise a grid
    is rebuilt from the metadata.
    """
    meta: dict[str, str] = {}
    rs, res, ims = [], [], []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip().strip("'\"")
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise DataError(f"malformed field row: {line!r}")
        rs.append(float(parts[0]))
        res.append(float(parts[1]))
        ims.append(float(parts[2]))
    if grid is None:
        from .grid import Grading, build_grid

        try:
            grid = build_grid(
                int(meta["n_points"]), float(meta["r_max"]), Grading(meta.get("grading", "uniform"))
            )
        except KeyError as exc:
            raise DataError(f"field file lacks grid metadata key {exc}") from exc
    if len(rs) != grid.n_points or not np.allclose(rs, grid.nodes, rtol=0, atol=1e-12):
        raise StructuralError("field file nodes do not match the target grid")
    values = np.asarray(res, dtype=float) + 1j * np.asarray(ims, dtype=float)
    fld = RadialField(grid, values)
    return fld, meta
