"""Deterministic SVG rendering of an AS-to-AS matrix.

Fill encodes locality, stroke encodes directness trouble. Cell sizes use
user fractions renormalized by the covered fraction, so the drawn square
represents exactly the examined area; the unexamined remainder is stated in
the caption. Output is byte-identical for identical input: fixed ordering
and fixed 2-decimal coordinate formatting throughout.
"""

from __future__ import annotations

from .model import DirectnessVerdict, EyeballMatrix, LocalityVerdict

FILL = {
    LocalityVerdict.IN_COUNTRY: "#2ca02c",
    LocalityVerdict.OUT_OF_COUNTRY: "#ff7f0e",
    LocalityVerdict.NO_COVERAGE: "#d3d3d3",
    LocalityVerdict.INCONSISTENT: "#000000",
    LocalityVerdict.UNDETERMINED: "#000000",
}

STROKE = {
    DirectnessVerdict.INDIRECT: "#d62728",
    DirectnessVerdict.MIXED: "#1f77b4",
}

GRID = 600.0
MARGIN_LEFT = 80.0
MARGIN_TOP = 80.0
MARGIN_RIGHT = 20.0
MARGIN_BOTTOM = 40.0
STROKE_WIDTH = 3.0


def _f(x: float) -> str:
    return f"{x:.2f}"


def render_svg(matrix: EyeballMatrix) -> str:
    """Render the matrix as a standalone SVG document string."""
    eyeball_set = matrix.eyeball_set
    networks = eyeball_set.networks
    covered = eyeball_set.covered_fraction
    width = MARGIN_LEFT + GRID + MARGIN_RIGHT
    height = MARGIN_TOP + GRID + MARGIN_BOTTOM

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}">',
        f'<title>eyeball matrix {eyeball_set.country}</title>',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
    ]

    if networks and covered > 0:
        # cumulative offsets of each network's edge within the grid
        offsets = [0.0]
        for net in networks:
            offsets.append(offsets[-1] + net.user_fraction / covered * GRID)

        fills = []
        strokes = []
        labels = []
        for i, src in enumerate(networks):
            y = MARGIN_TOP + offsets[i]
            h = offsets[i + 1] - offsets[i]
            for j, dst in enumerate(networks):
                x = MARGIN_LEFT + offsets[j]
                w = offsets[j + 1] - offsets[j]
                cell = matrix.cell(src.asn, dst.asn)
                fills.append(
                    f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
                    f'fill="{FILL[cell.locality]}"/>'
                )
                stroke = STROKE.get(cell.directness)
                if stroke:
                    inset = STROKE_WIDTH / 2
                    strokes.append(
                        f'<rect x="{_f(x + inset)}" y="{_f(y + inset)}" '
                        f'width="{_f(max(w - STROKE_WIDTH, 0.0))}" height="{_f(max(h - STROKE_WIDTH, 0.0))}" '
                        f'fill="none" stroke="{stroke}" stroke-width="{_f(STROKE_WIDTH)}"/>'
                    )
        for i, net in enumerate(networks):
            cy = MARGIN_TOP + (offsets[i] + offsets[i + 1]) / 2
            cx = MARGIN_LEFT + (offsets[i] + offsets[i + 1]) / 2
            labels.append(
                f'<text x="{_f(MARGIN_LEFT - 6)}" y="{_f(cy + 3)}" text-anchor="end" '
                f'font-family="monospace" font-size="11">AS{net.asn}</text>'
            )
            labels.append(
                f'<text x="{_f(cx)}" y="{_f(MARGIN_TOP - 8)}" text-anchor="start" '
                f'font-family="monospace" font-size="11" '
                f'transform="rotate(-45 {_f(cx)} {_f(MARGIN_TOP - 8)})">AS{net.asn}</text>'
            )
        lines.extend(fills)
        lines.extend(strokes)
        lines.extend(labels)
        lines.append(
            f'<rect x="{_f(MARGIN_LEFT)}" y="{_f(MARGIN_TOP)}" width="{_f(GRID)}" '
            f'height="{_f(GRID)}" fill="none" stroke="#555555" stroke-width="1"/>'
        )

    unexamined = 1.0 - covered * covered
    lines.append(
        f'<text x="{_f(MARGIN_LEFT)}" y="{_f(MARGIN_TOP + GRID + 24)}" '
        f'font-family="monospace" font-size="12">'
        f"{eyeball_set.country}: rows are source AS, columns destination AS; "
        f"unexamined share outside this square: {100.0 * unexamined:.1f}%</text>"
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
