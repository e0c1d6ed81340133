"""
Exterior Laurent maps F(w) = C (w + sum_n c_n / w^n).

Two closed-form families are provided on top of user-supplied coefficient
lists: hypotrochoids F(w) = C (w + m / w^n) and truncated Schwarz-Christoffel
maps of regular polygons. Coefficients are real, so every curve is symmetric
about the real axis.
"""

import math
from typing import NamedTuple, Optional, TypeVar

import numpy as np
from numpy.polynomial import polynomial as P
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import special

from annulus_conformal.config import get_global_conf
from annulus_conformal.core.errors import BadShapeError, DomainViolationError
from annulus_conformal.utils.logger import logger
from annulus_conformal.utils.summation import compensated_sum

ComplexLike = TypeVar("ComplexLike", complex, NDArray[np.complex128])

# radius of the circle on which F' must not vanish
CONFORMAL_CHECK_RADIUS = 1.0 + 1e-6


class HypotrochoidSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    m: float
    C: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def _univalent(self) -> "HypotrochoidSpec":
        # equality allowed: m = 1/n gives boundary cusps but stays conformal for |w| > 1
        if abs(self.m) > 1.0 / self.n * (1.0 + 1e-12):
            raise BadShapeError(f"|m|={abs(self.m)} exceeds 1/n={1.0 / self.n}")
        return self


class PolygonSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_sides: int
    terms: int = Field(default=5, ge=1)
    C: float = Field(default=1.0, gt=0.0)
    rotated: bool = False

    @model_validator(mode="after")
    def _is_polygon(self) -> "PolygonSpec":
        if self.n_sides < 3:
            raise BadShapeError(f"a polygon needs at least 3 sides, got {self.n_sides}")
        return self


class LaurentMap(BaseModel):
    """
    F(w) = scale * (w + sum_{n=1..N} coeffs[n-1] / w^n).

    ``family`` records where the coefficients came from; ``None`` means a
    user-supplied coefficient list.
    """

    model_config = ConfigDict(frozen=True)

    scale: float = Field(gt=0.0)
    coeffs: tuple[float, ...] = ()
    family: HypotrochoidSpec | PolygonSpec | None = None

    @field_validator("coeffs")
    @classmethod
    def _finite(cls, coeffs: tuple[float, ...]) -> tuple[float, ...]:
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must be finite real numbers")
        return coeffs

    @model_validator(mode="after")
    def _conformal_outside_unit_circle(self) -> "LaurentMap":
        # F'(w)/C = 1 - sum n c_n u^(n+1) with u = 1/w; a zero with |u| < 1/(1+1e-6)
        # is a critical point in the exterior domain
        poly = np.zeros(len(self.coeffs) + 2)
        poly[0] = 1.0
        for n, c in enumerate(self.coeffs, start=1):
            poly[n + 1] = -n * c
        poly = P.polytrim(poly)
        if len(poly) > 1:
            roots = P.polyroots(poly)
            inside = roots[np.abs(roots) < 1.0 / CONFORMAL_CHECK_RADIUS]
            if inside.size:
                w_crit = 1.0 / inside[np.argmin(np.abs(inside))]
                raise BadShapeError(f"F' vanishes at w={w_crit:.6g} with |w|={abs(w_crit):.6g} > 1")
        return self

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def nonzero_terms(self) -> list[tuple[int, float]]:
        """(n, c_n) pairs in ascending n, zeros skipped."""
        return [(n, c) for n, c in enumerate(self.coeffs, start=1) if c != 0.0]

    def rescaled(self, scale: float) -> "LaurentMap":
        family = self.family.model_copy(update={"C": scale}) if self.family is not None else None
        return LaurentMap(scale=scale, coeffs=self.coeffs, family=family)


class CurvatureExtremes(NamedTuple):
    r_min: float
    r_max: float


def _check_domain(w: NDArray[np.complex128], domain_tol: Optional[float]) -> None:
    tol = get_global_conf().get_domain_tolerance() if domain_tol is None else domain_tol
    if np.any(np.abs(w) < 1.0 - tol):
        bad = w[np.abs(w) < 1.0 - tol] if w.ndim else w
        raise DomainViolationError(f"|w| < 1 at {np.ravel(bad)[0]}; the Laurent map lives on |w| >= 1")


def _like(value: NDArray[np.complex128], like: complex | NDArray[np.complex128]) -> ComplexLike:
    if np.ndim(like) == 0:
        return complex(value)  # type: ignore[return-value]
    return value  # type: ignore[return-value]


def eval_laurent(fmap: LaurentMap, w: ComplexLike, domain_tol: Optional[float] = None) -> ComplexLike:
    """C (w + sum c_n w^-n), accumulated in ascending n with compensation."""
    z = np.asarray(w, dtype=np.complex128)
    _check_domain(z, domain_tol)
    inv = 1.0 / z
    terms = [z] + [c * inv**n for n, c in fmap.nonzero_terms()]
    return _like(fmap.scale * compensated_sum(terms), w)


def laurent_derivative(fmap: LaurentMap, w: ComplexLike, domain_tol: Optional[float] = None) -> ComplexLike:
    """C (1 - sum n c_n w^-(n+1))."""
    z = np.asarray(w, dtype=np.complex128)
    _check_domain(z, domain_tol)
    inv = 1.0 / z
    terms = [np.ones_like(z)] + [-n * c * inv ** (n + 1) for n, c in fmap.nonzero_terms()]
    return _like(fmap.scale * compensated_sum(terms), w)


def boundary_point(fmap: LaurentMap) -> float:
    """F(1) = C (1 + sum c_n), the curve point on the positive real axis."""
    return fmap.scale * math.fsum([1.0, *fmap.coeffs])


def outer_radius(fmap: LaurentMap) -> float:
    """C (1 + sum |c_n|): bound on |F| over the unit circle, attained by both closed-form families."""
    return fmap.scale * math.fsum([1.0, *(abs(c) for c in fmap.coeffs)])


def normalize_map(
    fmap: LaurentMap,
    *,
    C: Optional[float] = None,
    r_out: Optional[float] = None,
    a: Optional[float] = None,
) -> LaurentMap:
    """
    Rescale so that exactly one normalization holds: the scale factor itself,
    the outer radius C(1 + sum|c_n|), or the boundary point F(1) = a.
    """
    given = {k: v for k, v in {"C": C, "r_out": r_out, "a": a}.items() if v is not None}
    if len(given) != 1:
        raise ValueError(f"exactly one of C, r_out, a is required, got {sorted(given) or 'none'}")
    key, value = next(iter(given.items()))
    if value <= 0:
        raise BadShapeError(f"normalization {key} must be positive, got {value}")
    if key == "C":
        return fmap.rescaled(value)
    unit = fmap.rescaled(1.0)
    reference = outer_radius(unit) if key == "r_out" else boundary_point(unit)
    if reference <= 0:
        raise BadShapeError(f"F(1) = {reference} at unit scale; cannot normalize by a")
    return fmap.rescaled(value / reference)


# ---------------------------------------------------------------------------
# Hypotrochoids
# ---------------------------------------------------------------------------


def hypotrochoid_map(spec: HypotrochoidSpec) -> LaurentMap:
    """C (w + m / w^n): an (n+1)-lobed curve, a circle of radius C when m = 0."""
    coeffs = (0.0,) * (spec.n - 1) + (spec.m,)
    return LaurentMap(scale=spec.C, coeffs=coeffs, family=spec)


def hypotrochoid_bounds(spec: HypotrochoidSpec) -> tuple[float, float]:
    """(r_in, r_out) = (C(1 - |m|), C(1 + |m|)); negative m only rotates the lobes."""
    m = abs(spec.m)
    return spec.C * (1.0 - m), spec.C * (1.0 + m)


def curvature_extremes(spec: HypotrochoidSpec) -> CurvatureExtremes:
    """
    Radii of curvature at the lobe tip (theta = 0) and at the flank
    (theta = pi/(n+1)). The flank radius is returned as a magnitude and is
    infinite for the straight-edged case m n^2 = 1.
    """
    m, n, C = abs(spec.m), spec.n, spec.C
    r_min = C * (m * n - 1.0) ** 2 / (m * n * n + 1.0)
    denominator = abs(m * n * n - 1.0)
    if denominator <= 1e-12:
        return CurvatureExtremes(r_min, math.inf)
    return CurvatureExtremes(r_min, C * (m * n + 1.0) ** 2 / denominator)


def is_concave_at_max(spec: HypotrochoidSpec) -> bool:
    """True when the flank bends inward (m n^2 > 1), the sign curvature_extremes drops."""
    return abs(spec.m) * spec.n * spec.n > 1.0 + 1e-12


def straight_edge_m(n: int) -> float:
    if n < 1:
        raise BadShapeError(f"n must be a positive integer, got {n}")
    return 1.0 / (n * n)


# ---------------------------------------------------------------------------
# Schwarz-Christoffel regular polygons
# ---------------------------------------------------------------------------


def generalized_binomial(alpha: float, k: int) -> float:
    """alpha (alpha-1) ... (alpha-k+1) / k! for real alpha."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    return float(special.binom(alpha, k))


def schwarz_christoffel_map(spec: PolygonSpec) -> LaurentMap:
    """
    Truncated series of the exterior map onto a regular n-gon.

    Term k contributes sigma^k binom(2/n, k) / (1 - n k) at power w^(1 - n k),
    sigma = -1 for the vertex-on-axis orientation and +1 for the rotated one.
    The integration constant is zero, so the polygon is centred at the origin.
    """
    n, alpha = spec.n_sides, 2.0 / spec.n_sides
    sigma = 1.0 if spec.rotated else -1.0
    size = n * (spec.terms - 1) - 1 if spec.terms > 1 else 0
    coeffs = [0.0] * size
    for k in range(1, spec.terms):
        coeffs[n * k - 2] = sigma**k * generalized_binomial(alpha, k) / (1.0 - n * k)
    logger.debug("schwarz_christoffel_map: n=%d terms=%d rotated=%s coeffs=%s", n, spec.terms, spec.rotated, coeffs)
    return LaurentMap(scale=spec.C, coeffs=tuple(coeffs), family=spec)


def sample_boundary(fmap: LaurentMap, samples: int) -> NDArray[np.complex128]:
    """F(e^{i theta_j}) for theta_j = 2 pi j / samples."""
    if samples < 3:
        raise ValueError(f"samples must be at least 3, got {samples}")
    theta = 2.0 * np.pi * np.arange(samples) / samples
    return eval_laurent(fmap, np.exp(1j * theta))
