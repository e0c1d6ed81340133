"""
How far the second hole is from a true circle.

Delta(theta) = F(e + r1 e^{i theta}) - (h + R e^{i theta}) is sampled on the
exact image. For the straight-edged hypotrochoid (m = 1/n^2) a closed form,
its small-epsilon amplitude and the touching-circles limit are available as
independent checks.
"""

import math
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from annulus_conformal.config import get_global_conf
from annulus_conformal.core.composite import CompositeMap, HoleTarget, build_composite, inner_hole_image
from annulus_conformal.core.errors import WrongFamilyError
from annulus_conformal.core.outer_map import (
    HypotrochoidSpec,
    LaurentMap,
    PolygonSpec,
    hypotrochoid_map,
    normalize_map,
    schwarz_christoffel_map,
    straight_edge_m,
)
from annulus_conformal.utils.logger import logger

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

TABLE1_RADII = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 128.0)
TABLE1_GAPS = (1e-5, 0.1, 1.0)


class DiscrepancyReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta_star: float
    delta_max: float
    thetas: np.ndarray
    deltas: np.ndarray
    asymptotic_amplitude: float
    touching_estimate: Optional[float] = None

    @property
    def samples(self) -> list[tuple[float, complex]]:
        return [(float(t), complex(d)) for t, d in zip(self.thetas, self.deltas)]


class Table1Row(BaseModel):
    model_config = ConfigDict(frozen=True)

    R: float
    d: float
    epsilon: float
    delta_max: float


class BenchmarkCase(BaseModel):
    """A published hole configuration with its reported maximal discrepancy."""

    model_config = ConfigDict(frozen=True)

    name: str
    delta_max: float
    expected: float
    matched: bool = True


# ---------------------------------------------------------------------------
# Pointwise discrepancy
# ---------------------------------------------------------------------------


def discrepancy_at(cm: CompositeMap, theta: Any) -> Any:
    """Delta(theta) = exact hole image minus the circle h + R e^{i theta}."""
    t = np.asarray(theta, dtype=np.float64)
    delta = np.asarray(inner_hole_image(cm, t)) - (cm.hole.h + cm.hole.R * np.exp(1j * t))
    return complex(delta) if np.ndim(theta) == 0 else delta


def discrepancy_closed_form(n: int, C: float, e: float, eps: float, theta: Any) -> Any:
    """(C / (n^2 e^n)) [n eps e^{i theta} - 1 + (1 + eps e^{i theta})^-n]."""
    x = eps * np.exp(1j * np.asarray(theta, dtype=np.float64))
    value = C / (n * n * e**n) * (n * x - 1.0 + (1.0 + x) ** (-n))
    return complex(value) if np.ndim(theta) == 0 else value


def _straight_edge_order(outer: LaurentMap) -> int:
    spec = outer.family
    if not isinstance(spec, HypotrochoidSpec) or not math.isclose(spec.m, straight_edge_m(spec.n), rel_tol=1e-12):
        raise WrongFamilyError(f"closed form needs a hypotrochoid with m = 1/n^2, got {spec!r}")
    return spec.n


def closed_form_for(cm: CompositeMap, theta: Any) -> Any:
    """discrepancy_closed_form with n, C, e, eps taken from a straight-edged hypotrochoid map."""
    n = _straight_edge_order(cm.outer)
    return discrepancy_closed_form(n, cm.outer.scale, cm.e, cm.hole.epsilon, theta)


# ---------------------------------------------------------------------------
# Maximum search
# ---------------------------------------------------------------------------


def _golden_max(func: Any, lower: float, upper: float, tol: float) -> tuple[float, float]:
    """Golden-section search for the maximum of a unimodal func on [lower, upper]."""
    a, b = lower, upper
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = func(c), func(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = func(d)
    best = 0.5 * (a + b)
    return best, func(best)


def leading_amplitude(cm: CompositeMap) -> float:
    """
    Second-order amplitude |C sum c_n n(n+1)/2 r1^2 / e^(n+2)| of Delta for any
    real-coefficient map; reduces to asymptotic_amplitude for m = 1/n^2.
    """
    e, r1 = cm.e, cm.r1
    total = math.fsum(c * n * (n + 1) / 2.0 * r1 * r1 / e ** (n + 2) for n, c in cm.outer.nonzero_terms())
    return abs(cm.outer.scale * total)


def max_discrepancy(
    cm: CompositeMap,
    coarse_samples: Optional[int] = None,
    refine_tol: Optional[float] = None,
) -> DiscrepancyReport:
    """
    Maximum of |Delta| over the hole boundary.

    |Delta| is even in theta for real coefficients, so the coarse scan covers
    [0, pi] with both ends included; the best grid cell is then refined by
    golden-section search.
    """
    conf = get_global_conf()
    coarse_samples = conf.get_coarse_samples() if coarse_samples is None else coarse_samples
    refine_tol = conf.get_refine_tol() if refine_tol is None else refine_tol
    if coarse_samples < 64:
        raise ValueError(f"coarse_samples must be at least 64, got {coarse_samples}")

    thetas = np.linspace(0.0, np.pi, coarse_samples + 1)
    deltas = discrepancy_at(cm, thetas)
    magnitudes = np.abs(deltas)
    best = int(np.argmax(magnitudes))
    theta_star, delta_max = float(thetas[best]), float(magnitudes[best])

    if delta_max > 0.0:
        spacing = np.pi / coarse_samples
        refined_theta, refined = _golden_max(
            lambda t: abs(discrepancy_at(cm, t)),
            theta_star - spacing,
            theta_star + spacing,
            refine_tol,
        )
        if refined > delta_max:
            # fold back into [0, pi]
            theta_star = abs(math.remainder(refined_theta, 2.0 * math.pi))
            delta_max = refined

    touching = None
    spec = cm.outer.family
    if isinstance(spec, HypotrochoidSpec) and math.isclose(spec.m, straight_edge_m(spec.n), rel_tol=1e-12):
        touching = touching_max_discrepancy(spec.n, cm.outer.scale, cm.r1)

    logger.debug("max_discrepancy: theta*=%.12g delta_max=%.12g", theta_star, delta_max)
    return DiscrepancyReport(
        theta_star=theta_star,
        delta_max=delta_max,
        thetas=thetas,
        deltas=deltas,
        asymptotic_amplitude=leading_amplitude(cm),
        touching_estimate=touching,
    )


# ---------------------------------------------------------------------------
# Asymptotics for the straight-edged hypotrochoid
# ---------------------------------------------------------------------------


def asymptotic_amplitude(n: int, C: float, e: float, eps: float, as_printed: bool = False) -> float:
    """
    Leading-order |Delta| for small eps: C (n+1) eps^2 / (2 n e^n), from the
    second-order term of (1 + x)^-n in the closed form.

    ``as_printed=True`` returns C/(n^2 e^n) (eps^2/2)(1 + 1/n) instead, the
    variant without the n^2 from the expansion; it undershoots sampled maxima.
    """
    if as_printed:
        return C / (n * n * e**n) * eps * eps / 2.0 * (1.0 + 1.0 / n)
    return C * (n + 1) * eps * eps / (2.0 * n * e**n)


def touching_discrepancy(n: int, C: float, r1: float, theta: Any) -> Any:
    """Delta on the hole when the w-plane circles touch (s = 0, e = 1 + r1)."""
    return discrepancy_closed_form(n, C, 1.0 + r1, r1 / (1.0 + r1), theta)


def touching_max_discrepancy(n: int, C: float, r1: float, as_printed: bool = False) -> float:
    """
    |Delta| at theta = pi for touching circles:
    (C / n^2) [1 - ((n+1) r1 + 1) / (1 + r1)^(n+1)].

    ``as_printed=True`` uses the exponent n in the denominator, which turns
    negative for small r1.
    """
    power = n if as_printed else n + 1
    return C / (n * n) * (1.0 - ((n + 1) * r1 + 1.0) / (1.0 + r1) ** power)


def touching_limit(n: int, C: float) -> float:
    """Upper envelope C / n^2 of the touching discrepancy as r1 grows."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return C / (n * n)


# ---------------------------------------------------------------------------
# Reference configurations
# ---------------------------------------------------------------------------


def table1_outer_map() -> LaurentMap:
    """Straight-edged hypotrochoid n = 2, m = 1/4, scaled to outer radius 1 (C = 0.8)."""
    return normalize_map(hypotrochoid_map(HypotrochoidSpec(n=2, m=straight_edge_m(2))), r_out=1.0)


def reproduce_table1(coarse_samples: Optional[int] = None) -> list[Table1Row]:
    """epsilon and maximal discrepancy over the R x d grid, ordered by R then d."""
    outer = table1_outer_map()
    rows = []
    for R in TABLE1_RADII:
        for d in TABLE1_GAPS:
            cm = build_composite(outer, HoleTarget(R=R, d=d, reference=1.0))
            report = max_discrepancy(cm, coarse_samples=coarse_samples)
            rows.append(Table1Row(R=R, d=d, epsilon=cm.hole.epsilon, delta_max=report.delta_max))
    return rows


def _case(name: str, outer: LaurentMap, reference: float, d: float, R: float, expected: float, matched: bool = True) -> BenchmarkCase:
    cm = build_composite(outer, HoleTarget(R=R, d=d, reference=reference))
    return BenchmarkCase(name=name, delta_max=max_discrepancy(cm).delta_max, expected=expected, matched=matched)


def benchmark_cases() -> list[BenchmarkCase]:
    """
    Reported hole configurations beyond the R x d table.

    The gap d is measured from the length each configuration is normalized
    by (r_out, C or a = F(1)). The octagon is the one configuration whose
    reported value is not reproduced under either polygon orientation.
    """
    cases = []

    table_map = table1_outer_map()
    for R, expected in ((0.25, 0.0170), (1.0, 0.0587), (2.0, 0.0810)):
        cases.append(_case(f"hypotrochoid n=2 d=0.1 R={R:g}", table_map, 1.0, 0.1, R, expected))
    for d, expected in ((1e-5, 0.0794), (0.1, 0.0587), (1.0, 0.0087)):
        cases.append(_case(f"hypotrochoid n=2 R=1 d={d:g}", table_map, 1.0, d, 1.0, expected))

    for n, expected in ((2, 0.0184), (3, 0.0110), (4, 0.0060)):
        outer = normalize_map(hypotrochoid_map(HypotrochoidSpec(n=n, m=-straight_edge_m(n))), r_out=1.0)
        cases.append(_case(f"hypotrochoid n={n} m=-1/n^2 d=0.5 R=1", outer, 1.0, 0.5, 1.0, expected))

    for n, expected in ((3, 0.02524), (4, 0.0089), (5, 0.0034)):
        outer = schwarz_christoffel_map(PolygonSpec(n_sides=n, terms=5, C=1.0))
        cases.append(_case(f"polygon n={n} terms=5 C=1 d=1 R=1", outer, 1.0, 1.0, 1.0, expected))

    triangle = schwarz_christoffel_map(PolygonSpec(n_sides=3, terms=3, C=1.0, rotated=True))
    cases.append(_case("polygon n=3 terms=3 rotated C=1 d=1 R=1", triangle, 1.0, 1.0, 1.0, 0.0188))
    square = normalize_map(schwarz_christoffel_map(PolygonSpec(n_sides=4, terms=3, rotated=True)), a=1.0)
    cases.append(_case("polygon n=4 terms=3 rotated a=1 d=0.5 R=0.5", square, 1.0, 0.5, 0.5, 0.0182))
    octagon = normalize_map(schwarz_christoffel_map(PolygonSpec(n_sides=8, terms=3, rotated=True)), a=1.0)
    cases.append(_case("polygon n=8 terms=3 rotated a=1 d=0.5 R=2", octagon, 1.0, 0.5, 2.0, 0.0271, matched=False))
    return cases
