"""Static SVG rendering of the mass-energy plane with the scattering region."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigurationError, StructuralError
from .threshold import ThresholdCurve

_W, _H = 640, 440
_MARGIN = 56


def _fmt(x: float) -> str:
    return f"{x:.6g}"


@dataclass
class PlaneFigure:
    a: float
    curve: ThresholdCurve
    overlays: list[tuple[float, float, str]]
    svg: str


def emit_plane(
    a: float,
    curve: ThresholdCurve,
    overlays: list[tuple[float, float, str]] | None = None,
    path: str | Path | None = None,
) -> PlaneFigure:
    """Draw the threshold curve with the region below it shaded.

    Axes span [0, 1.1 M(Q_1)] x [0, 1.1 max e]; the S and Q_1 masses are
    marked on the mass axis.  Output bytes are deterministic for identical
    inputs.
    """
    if abs(curve.a - a) > 1e-12:
        raise StructuralError(f"curve has a={curve.a}, requested a={a}")
    if not curve.samples:
        raise ConfigurationError("cannot render an empty curve")
    overlays = list(overlays or [])

    finite = [(s.m, s.e) for s in curve.samples if s.m <= curve.mass_q]
    e_top = 1.1 * max(max(e for _, e in finite), 1e-12)
    m_top = 1.1 * curve.mass_q

    def px(m):  # mass to x pixel
        return _MARGIN + (m / m_top) * (_W - 2 * _MARGIN)

    def py(e):  # energy to y pixel (origin bottom-left)
        return _H - _MARGIN - (e / e_top) * (_H - 2 * _MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    # shaded region: full columns below mass_s (curve is +infinity there),
    # then under the curve up to mass_q
    poly = [(px(0.0), py(0.0)), (px(0.0), py(e_top)), (px(curve.mass_s), py(e_top))]
    for m, e in finite:
        poly.append((px(m), py(min(e, e_top))))
    poly.append((px(curve.mass_q), py(0.0)))
    points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in poly)
    parts.append(f'<polygon points="{points}" fill="#b8d4f0" stroke="none" opacity="0.8"/>')
    # curve itself
    curve_pts = " ".join(f"{_fmt(px(m))},{_fmt(py(min(e, e_top)))}" for m, e in finite)
    parts.append(f'<polyline points="{curve_pts}" fill="none" stroke="#1f4e8c" stroke-width="2"/>')
    # axes
    parts.append(
        f'<line x1="{_MARGIN}" y1="{py(0.0)}" x2="{_W - _MARGIN}" y2="{py(0.0)}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN}" y1="{py(0.0)}" x2="{_MARGIN}" y2="{_MARGIN}" '
        f'stroke="black" stroke-width="1"/>'
    )
    # mass markers for S and Q1
    for mval, label in ((curve.mass_s, "M(S)"), (curve.mass_q, "M(Q1)")):
        x = _fmt(px(mval))
        parts.append(
            f'<line x1="{x}" y1="{py(0.0)}" x2="{x}" y2="{py(0.0) + 6}" '
            f'stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x}" y="{py(0.0) + 20}" font-size="12" text-anchor="middle">{label}</text>'
        )
    parts.append(
        f'<text x="{_W - _MARGIN}" y="{py(0.0) + 36}" font-size="12" text-anchor="end">mass</text>'
    )
    parts.append(
        f'<text x="{_MARGIN - 40}" y="{_MARGIN - 8}" font-size="12">energy</text>'
    )
    parts.append(
        f'<text x="{_fmt(px(0.45 * curve.mass_s))}" y="{_fmt(py(0.45 * e_top))}" '
        f'font-size="14" fill="#1f4e8c">K region</text>'
    )
    for m, e, label in overlays:
        parts.append(
            f'<circle cx="{_fmt(px(m))}" cy="{_fmt(py(min(e, e_top)))}" r="3" fill="#c23b22"/>'
        )
        if label:
            parts.append(
                f'<text x="{_fmt(px(m) + 5)}" y="{_fmt(py(min(e, e_top)) - 5)}" '
                f'font-size="10">{label}</text>'
            )
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    fig = PlaneFigure(a=a, curve=curve, overlays=overlays, svg=svg)
    if path is not None:
        Path(path).write_text(svg, encoding="utf-8")
    return fig
