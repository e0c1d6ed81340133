import contextlib
import csv
import json
import sys
import xml.etree.ElementTree as ET
from collections.abc import Iterable, Iterator, Sequence
from typing import Any, NamedTuple, Optional, TextIO

import numpy as np
from numpy.typing import NDArray

from annulus_conformal.core.composite import AnnulusGrid, CompositeMap, inner_hole_image
from annulus_conformal.core.discrepancy import BenchmarkCase, Table1Row
from annulus_conformal.core.outer_map import sample_boundary
from annulus_conformal.utils.curve_types import CurveKind
from annulus_conformal.utils.logger import logger

SVG_SIZE = 600
SVG_MARGIN = 0.05
SVG_STYLES = {
    CurveKind.OUTER: {"stroke": "#1f4e79", "stroke-width": "1.5", "fill": "none"},
    CurveKind.HOLE: {"stroke": "#b03a2e", "stroke-width": "1.5", "fill": "none"},
    CurveKind.HOLE_CIRCLE_REF: {"stroke": "#555555", "stroke-width": "1", "fill": "none", "stroke-dasharray": "6 4"},
}


class CurveSamples(NamedTuple):
    kind: CurveKind
    thetas: NDArray[np.float64]
    points: NDArray[np.complex128]


def format_number(value: float, precision: int) -> str:
    """Format with ``precision`` significant digits, '.' as decimal point."""
    return f"{value:.{precision}g}"


@contextlib.contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Yield a text stream for ``path``; ``None`` or '-' means stdout."""
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, mode="w", newline="", encoding="utf-8") as handle:
        yield handle
    logger.info("Wrote %s", path)


def build_curves(cm: CompositeMap, samples: int) -> list[CurveSamples]:
    """Outer curve, exact hole image and the reference circle h + R e^{i theta}, at the same angles."""
    thetas = 2.0 * np.pi * np.arange(samples) / samples
    outer = np.asarray(sample_boundary(cm.outer, samples))
    hole = np.asarray(inner_hole_image(cm, thetas))
    reference = cm.hole.h + cm.hole.R * np.exp(1j * thetas)
    return [
        CurveSamples(CurveKind.OUTER, thetas, outer),
        CurveSamples(CurveKind.HOLE, thetas, hole),
        CurveSamples(CurveKind.HOLE_CIRCLE_REF, thetas, reference),
    ]


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------


def _writer(stream: TextIO) -> Any:
    return csv.writer(stream, lineterminator="\n")


def write_curves_csv(stream: TextIO, curves: Iterable[CurveSamples], precision: int) -> None:
    writer = _writer(stream)
    writer.writerow(["curve", "theta", "x", "y"])
    for curve in curves:
        for theta, z in zip(curve.thetas, curve.points):
            writer.writerow(
                [
                    curve.kind.value,
                    format_number(float(theta), precision),
                    format_number(float(z.real), precision),
                    format_number(float(z.imag), precision),
                ]
            )


def write_table1_csv(stream: TextIO, rows: Sequence[Table1Row], precision: int) -> None:
    writer = _writer(stream)
    writer.writerow(["R", "d", "epsilon", "delta_max"])
    for row in rows:
        writer.writerow([format_number(v, precision) for v in (row.R, row.d, row.epsilon, row.delta_max)])


def write_grid_csv(stream: TextIO, grid: AnnulusGrid, precision: int) -> None:
    """One row per grid node; nodes at the pole get empty x, y and at_infinity = 1."""
    writer = _writer(stream)
    writer.writerow(["ring", "ray", "x", "y", "at_infinity"])
    rings, rays = grid.points.shape
    for i in range(rings):
        for j in range(rays):
            if grid.at_infinity[i, j]:
                writer.writerow([i, j, "", "", 1])
                continue
            z = grid.points[i, j]
            writer.writerow([i, j, format_number(float(z.real), precision), format_number(float(z.imag), precision), 0])


def write_benchmarks_csv(stream: TextIO, cases: Sequence[BenchmarkCase], precision: int) -> None:
    writer = _writer(stream)
    writer.writerow(["name", "delta_max", "expected", "matched"])
    for case in cases:
        writer.writerow([case.name, format_number(case.delta_max, precision), format_number(case.expected, precision), int(case.matched)])


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def write_json(stream: TextIO, payload: Any) -> None:
    json.dump(payload, stream, indent=2)
    stream.write("\n")


def curves_as_records(curves: Iterable[CurveSamples], precision: int) -> list[dict[str, Any]]:
    return [
        {
            "curve": curve.kind.value,
            "theta": float(format_number(float(theta), precision)),
            "x": float(format_number(float(z.real), precision)),
            "y": float(format_number(float(z.imag), precision)),
        }
        for curve in curves
        for theta, z in zip(curve.thetas, curve.points)
    ]


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------


def _viewport(curves: Sequence[CurveSamples]) -> tuple[float, float, float]:
    """(x0, y1, scale) mapping plane coordinates into a square SVG canvas, y pointing up."""
    points = np.concatenate([c.points for c in curves])
    x_lo, x_hi = float(points.real.min()), float(points.real.max())
    y_lo, y_hi = float(points.imag.min()), float(points.imag.max())
    span = max(x_hi - x_lo, y_hi - y_lo) or 1.0
    pad = SVG_MARGIN * span
    x_mid, y_mid = 0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi)
    half = 0.5 * span + pad
    return x_mid - half, y_mid + half, SVG_SIZE / (2.0 * half)


def build_svg(curves: Sequence[CurveSamples], precision: int = 6) -> ET.Element:
    """Closed polylines for the outer curve and the hole; the reference circle drawn dashed."""
    x0, y1, scale = _viewport(curves)
    root = ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": str(SVG_SIZE),
            "height": str(SVG_SIZE),
            "viewBox": f"0 0 {SVG_SIZE} {SVG_SIZE}",
        },
    )
    for curve in curves:
        xs = (curve.points.real - x0) * scale
        ys = (y1 - curve.points.imag) * scale
        points = " ".join(f"{format_number(float(x), precision)},{format_number(float(y), precision)}" for x, y in zip(xs, ys))
        element = ET.SubElement(root, "polygon", {"points": points, **SVG_STYLES[curve.kind]})
        element.set("class", curve.kind.value)
    return root


def write_svg(stream: TextIO, curves: Sequence[CurveSamples]) -> None:
    tree = ET.ElementTree(build_svg(curves))
    ET.indent(tree)
    tree.write(stream, encoding="unicode", xml_declaration=True)
    stream.write("\n")
