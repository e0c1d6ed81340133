"""
Composite map z = F(f(zeta)) from the annulus onto the plane with two holes.

The unit circle goes onto the curve L of the outer Laurent map; the inner
circle |zeta| = rho1 goes onto a nearly circular hole centred at h on the
positive real axis. Given a target (h, R) the w-plane circle (e, r1) is found
from the real equation for e and the linear relation for r1, and the bilinear
parameters follow from the circle data.
"""

import math
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import optimize

from annulus_conformal.config import get_global_conf
from annulus_conformal.core.bilinear import (
    BilinearParams,
    CirclePairGeometry,
    eval_bilinear,
    solve_bilinear_params,
)
from annulus_conformal.core.errors import (
    DegenerateDerivativeError,
    DomainViolationError,
    InconsistentSolutionError,
    NoRootError,
    NonConvergenceError,
    NonRealTargetError,
    OverlappingCirclesError,
)
from annulus_conformal.core.outer_map import LaurentMap, boundary_point, eval_laurent
from annulus_conformal.utils.logger import logger

# Laurent evaluation inside eval_composite skips its own |w| >= 1 check; the annulus check covers it
_NO_DOMAIN_CHECK = math.inf


class HoleTarget(BaseModel):
    """
    Requested hole: centre h and radius R, or axial gap d and radius R.

    With a gap the centre is h = reference + d + R, where ``reference``
    defaults to the curve point Re(F(1)).
    """

    model_config = ConfigDict(frozen=True)

    R: float = Field(gt=0.0)
    h: Optional[float] = None
    d: Optional[float] = Field(default=None, ge=0.0)
    reference: Optional[float] = None

    @field_validator("h", mode="before")
    @classmethod
    def _real_centre(cls, value: Any) -> Any:
        if isinstance(value, complex):
            if value.imag != 0.0:
                raise NonRealTargetError(
                    f"h={value} is off the real axis; e is real, so only symmetric placements are reachable"
                )
            return value.real
        return value

    @model_validator(mode="after")
    def _one_placement(self) -> "HoleTarget":
        if (self.h is None) == (self.d is None):
            raise ValueError("give exactly one of h or d")
        if self.h is not None and self.h <= 0.0:
            raise ValueError(f"h must be positive, got {self.h}")
        return self

    def center_for(self, outer: LaurentMap) -> float:
        if self.h is not None:
            return self.h
        base = boundary_point(outer) if self.reference is None else self.reference
        assert self.d is not None
        return base + self.d + self.R


class HoleImage(BaseModel):
    model_config = ConfigDict(frozen=True)

    h: float
    R: float
    epsilon: float = Field(gt=0.0, lt=1.0)


class CompositeMap(BaseModel):
    model_config = ConfigDict(frozen=True)

    outer: LaurentMap
    bilinear: BilinearParams
    geometry: CirclePairGeometry
    hole: HoleImage

    @property
    def e(self) -> float:
        return self.geometry.e

    @property
    def r1(self) -> float:
        return self.geometry.r1


class AnnulusGrid(BaseModel):
    """Composite images of a polar grid; rows are rings (inner to outer), columns rays."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    radii: np.ndarray
    angles: np.ndarray
    points: np.ndarray
    at_infinity: np.ndarray


# ---------------------------------------------------------------------------
# Hole geometry from the circle data
# ---------------------------------------------------------------------------


def hole_center(outer: LaurentMap, e: float) -> float:
    """h = C (e + sum c_n / e^n)."""
    return outer.scale * math.fsum([e, *(c / e**n for n, c in outer.nonzero_terms())])


def hole_radius(outer: LaurentMap, e: float, r1: float) -> float:
    """R = C (1 - sum n c_n / e^(n+1)) r1."""
    return outer.scale * math.fsum([1.0, *(-n * c / e ** (n + 1) for n, c in outer.nonzero_terms())]) * r1


def _center_residual(outer: LaurentMap, e: float, h_over_c: float) -> float:
    return math.fsum([e, *(c / e**n for n, c in outer.nonzero_terms()), -h_over_c])


def solve_e(
    outer: LaurentMap,
    h: float,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> float:
    """
    Solve e + sum c_n / e^n = h / C for the centre of the second w-plane circle.

    Direct iteration e_k = h/C - sum c_n / e_{k-1}^n from e_0 = h/C; when it
    does not settle within max_iter, bisection on [1 + sum|c_n|, h/C + sum|c_n|].

    Raises:
        NoRootError: the bisection bracket has no sign change.
        NonConvergenceError: both methods ran out of budget.
    """
    conf = get_global_conf()
    tol = conf.get_solver_residual_tol() if tol is None else tol
    max_iter = conf.get_solver_max_iter() if max_iter is None else max_iter
    step_tol = conf.get_solver_step_tol()

    h_over_c = h / outer.scale
    terms = outer.nonzero_terms()
    spread = math.fsum(abs(c) for _, c in terms)
    if h_over_c <= 1.0 + spread:
        logger.warning("solve_e: h/C=%s does not exceed 1 + sum|c_n|=%s; a root with e > 1 is not guaranteed", h_over_c, 1.0 + spread)

    previous = h_over_c
    for iteration in range(1, max_iter + 1):
        current = math.fsum([h_over_c, *(-c / previous**n for n, c in terms)])
        if not math.isfinite(current) or current <= 1.0:
            logger.debug("solve_e: iteration left e > 1 at step %d (e=%s)", iteration, current)
            break
        step = abs(current - previous)
        if step < step_tol * max(1.0, current) and abs(_center_residual(outer, current, h_over_c)) < tol:
            logger.debug("solve_e: converged in %d iterations, e=%s", iteration, current)
            return current
        previous = current

    logger.info("solve_e: direct iteration did not settle in %d steps, falling back to bisection", max_iter)
    lower, upper = 1.0 + spread, h_over_c + spread
    f_lower = _center_residual(outer, lower, h_over_c)
    f_upper = _center_residual(outer, upper, h_over_c)
    if f_lower == 0.0:
        return lower
    if f_upper == 0.0:
        return upper
    if f_lower * f_upper > 0.0:
        raise NoRootError(f"no sign change of the centre equation on [{lower}, {upper}]")

    # |d residual / de| <= 1 + sum n|c_n| for e > 1
    slope = 1.0 + math.fsum(n * abs(c) for n, c in terms)
    root, result = optimize.bisect(
        lambda x: _center_residual(outer, x, h_over_c),
        lower,
        upper,
        xtol=min(step_tol * max(1.0, upper), 0.5 * tol / slope),
        maxiter=max_iter,
        full_output=True,
        disp=False,
    )
    if not result.converged:
        raise NonConvergenceError(f"iteration and bisection exhausted {max_iter} steps each (h={h})")
    residual = _center_residual(outer, root, h_over_c)
    if abs(residual) >= tol:
        raise NonConvergenceError(f"bisection root e={root} leaves residual {residual:.3g}, tolerance {tol:.3g} (h={h})")
    return float(root)


def solve_r1(outer: LaurentMap, e: float, R: float) -> float:
    """r1 = R / (C (1 - sum n c_n / e^(n+1)))."""
    denominator = outer.scale * math.fsum([1.0, *(-n * c / e ** (n + 1) for n, c in outer.nonzero_terms())])
    if abs(denominator) < 1e-12:
        raise DegenerateDerivativeError(f"F'(e) = {denominator} vanishes at e={e}")
    return R / denominator


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


def composite_from_geometry(outer: LaurentMap, e: float, r1: float) -> CompositeMap:
    """Build the composite map straight from the w-plane circle |w - e| = r1."""
    params, geometry = solve_bilinear_params(e, r1)
    hole = HoleImage(h=hole_center(outer, e), R=hole_radius(outer, e, r1), epsilon=r1 / e)
    return CompositeMap(outer=outer, bilinear=params, geometry=geometry, hole=hole)


def build_composite(
    outer: LaurentMap,
    target: HoleTarget,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> CompositeMap:
    """
    Chain solve_e, solve_r1 and solve_bilinear_params for a hole target.

    Raises:
        OverlappingCirclesError: the requested hole reaches into curve L.
        NoRootError, NonConvergenceError, DegenerateDerivativeError: from the solvers.
    """
    h = target.center_for(outer)
    e = solve_e(outer, h, tol=tol, max_iter=max_iter)
    r1 = solve_r1(outer, e, target.R)
    try:
        cm = composite_from_geometry(outer, e, r1)
    except OverlappingCirclesError as exc:
        raise OverlappingCirclesError(f"hole (h={h}, R={target.R}) intersects the curve: {exc}", stage="composite") from exc

    scale = max(1.0, abs(h), target.R)
    if abs(cm.hole.h - h) > 1e-10 * scale or abs(cm.hole.R - target.R) > 1e-10 * scale:
        raise InconsistentSolutionError(
            f"solved circle reproduces (h, R) = ({cm.hole.h}, {cm.hole.R}), wanted ({h}, {target.R})",
            stage="composite",
        )
    logger.info(
        "build_composite: h=%.12g R=%.12g -> e=%.12g r1=%.12g lambda=%.12g rho1=%.12g eps=%.6g s=%.6g",
        h,
        target.R,
        e,
        r1,
        cm.bilinear.lam,
        cm.bilinear.rho1,
        cm.hole.epsilon,
        cm.geometry.s,
    )
    return cm


def eval_composite(cm: CompositeMap, zeta: Any, pole_tol: Optional[float] = None) -> Any:
    """z = F(f(zeta)) on the closed annulus rho1 <= |zeta| <= 1."""
    slack = get_global_conf().get_annulus_tolerance()
    modulus = np.abs(np.asarray(zeta))
    if np.any(modulus < cm.bilinear.rho1 - slack) or np.any(modulus > 1.0 + slack):
        raise DomainViolationError(f"zeta outside the annulus {cm.bilinear.rho1} <= |zeta| <= 1", stage="composite")
    w = eval_bilinear(cm.bilinear, zeta, pole_tol=pole_tol)
    return eval_laurent(cm.outer, w, domain_tol=_NO_DOMAIN_CHECK)


def inner_hole_image(cm: CompositeMap, theta: Any) -> Any:
    """Exact image C (e + r1 e^{i theta} + sum c_n / (e + r1 e^{i theta})^n) of the inner circle."""
    w = cm.e + cm.r1 * np.exp(1j * np.asarray(theta, dtype=np.float64))
    image = eval_laurent(cm.outer, w)
    return complex(image) if np.ndim(theta) == 0 else image


def annulus_grid(cm: CompositeMap, rings: int, rays: int, pole_tol: Optional[float] = None) -> AnnulusGrid:
    """
    Map a polar grid of the annulus: radii log-spaced from rho1 to 1, angles uniform.

    Cells within the pole tolerance are returned as infinity and flagged in
    ``at_infinity``.
    """
    if rings < 2 or rays < 3:
        raise ValueError(f"need rings >= 2 and rays >= 3, got rings={rings}, rays={rays}")
    tol = get_global_conf().get_pole_tolerance() if pole_tol is None else pole_tol
    lam = cm.bilinear.lam

    radii = np.geomspace(cm.bilinear.rho1, 1.0, rings)
    angles = 2.0 * np.pi * np.arange(rays) / rays
    zeta = radii[:, None] * np.exp(1j * angles)[None, :]

    at_infinity = np.abs(lam * zeta - 1.0) < tol * lam
    safe = np.where(at_infinity, -1.0, zeta)
    w = eval_bilinear(cm.bilinear, safe, pole_tol=tol)
    points = np.asarray(eval_laurent(cm.outer, w, domain_tol=_NO_DOMAIN_CHECK))
    points = np.where(at_infinity, complex(np.inf, np.inf), points)
    if at_infinity.any():
        logger.debug("annulus_grid: %d cell(s) at the pole", int(at_infinity.sum()))
    return AnnulusGrid(radii=radii, angles=angles, points=points, at_infinity=at_infinity)
