"""
Bilinear (Moebius) map between the annulus plane and the two-circle plane.

    w = f(zeta) = (zeta - lam) / (lam * zeta - 1)

With lam > 1 and rho1 < 1/lam the annulus rho1 <= |zeta| <= 1 goes onto the
exterior of the unit circle and of the circle |w - e| = r1. The map is its own
inverse, and its pole zeta = 1/lam lies inside the open annulus, so the image
region is unbounded.
"""

import math
from typing import Optional, TypeVar

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, computed_field, model_validator

from annulus_conformal.config import get_global_conf
from annulus_conformal.core.errors import (
    InconsistentSolutionError,
    OverlappingCirclesError,
    PoleInputError,
)
from annulus_conformal.utils.logger import logger

ComplexLike = TypeVar("ComplexLike", complex, NDArray[np.complex128])

# substitution check applied to every solve_bilinear_params result
SUBSTITUTION_TOL = 1e-9


class BilinearParams(BaseModel):
    """Parameters lam and rho1 of the bilinear map."""

    model_config = ConfigDict(frozen=True)

    lam: float = Field(gt=1.0, description="lambda of the bilinear map")
    rho1: float = Field(gt=0.0, description="inner radius of the annulus")

    @model_validator(mode="after")
    def _pole_inside_annulus(self) -> "BilinearParams":
        if not self.rho1 < 1.0 / self.lam:
            raise ValueError(f"rho1={self.rho1} must be below 1/lambda={1.0 / self.lam}")
        return self

    @property
    def pole(self) -> float:
        return 1.0 / self.lam


class CirclePairGeometry(BaseModel):
    """Second w-plane circle |w - e| = r1 next to the unit circle."""

    model_config = ConfigDict(frozen=True)

    e: float
    r1: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _circles_apart(self) -> "CirclePairGeometry":
        if not self.e > 1.0 + self.r1:
            raise ValueError(f"circles overlap: e={self.e} <= 1 + r1={1.0 + self.r1}")
        return self

    @computed_field  # type: ignore[prop-decorator]
    @property
    def s(self) -> float:
        """Minimal spacing between the two circles."""
        return self.e - 1.0 - self.r1


def _check_pole(lam: float, zeta: complex | NDArray[np.complex128], pole_tol: Optional[float]) -> None:
    tol = get_global_conf().get_pole_tolerance() if pole_tol is None else pole_tol
    if np.any(np.abs(lam * np.asarray(zeta) - 1.0) < tol * lam):
        raise PoleInputError(f"point within pole tolerance of 1/lambda={1.0 / lam}")


def _scalar_or_array(value: NDArray[np.complex128], like: complex | NDArray[np.complex128]) -> ComplexLike:
    if np.ndim(like) == 0:
        return complex(value)  # type: ignore[return-value]
    return value  # type: ignore[return-value]


def eval_bilinear(p: BilinearParams, zeta: ComplexLike, pole_tol: Optional[float] = None) -> ComplexLike:
    """
    Evaluate w = (zeta - lam) / (lam*zeta - 1).

    Accepts a scalar or a numpy array of points; raises PoleInputError if any
    point sits within the pole tolerance of 1/lam.
    """
    _check_pole(p.lam, zeta, pole_tol)
    z = np.asarray(zeta, dtype=np.complex128)
    return _scalar_or_array((z - p.lam) / (p.lam * z - 1.0), zeta)


def bilinear_inverse(p: BilinearParams, w: ComplexLike, pole_tol: Optional[float] = None) -> ComplexLike:
    """Inverse of eval_bilinear. The map is an involution, so the formula is the same."""
    _check_pole(p.lam, w, pole_tol)
    z = np.asarray(w, dtype=np.complex128)
    return _scalar_or_array((z - p.lam) / (p.lam * z - 1.0), w)


def bilinear_derivative(p: BilinearParams, zeta: ComplexLike, pole_tol: Optional[float] = None) -> ComplexLike:
    """f'(zeta) = (lam^2 - 1) / (lam*zeta - 1)^2, never zero for lam > 1."""
    _check_pole(p.lam, zeta, pole_tol)
    z = np.asarray(zeta, dtype=np.complex128)
    return _scalar_or_array((p.lam * p.lam - 1.0) / (p.lam * z - 1.0) ** 2, zeta)


def solve_bilinear_params(e: float, r1: float) -> tuple[BilinearParams, CirclePairGeometry]:
    """
    Recover (lam, rho1) from the circle |w - e| = r1.

    lam takes the non-negative square-root branch, which is the one giving
    lam > 1. The result is checked by mapping +-rho1 back to e +- r1.

    Raises:
        OverlappingCirclesError: if e <= 1 + r1 or r1 <= 0.
        InconsistentSolutionError: if the substitution check fails.
    """
    if not (r1 > 0.0 and e > 1.0 + r1):
        raise OverlappingCirclesError(f"need e > 1 + r1 > 1, got e={e}, r1={r1}")

    discriminant = (e * e - (1.0 + r1) ** 2) * (e * e - (1.0 - r1) ** 2)
    if discriminant <= 0.0:
        raise OverlappingCirclesError(f"non-positive discriminant {discriminant} for e={e}, r1={r1}")

    lam = (e * e + 1.0 - r1 * r1 + math.sqrt(discriminant)) / (2.0 * e)
    rho1 = (r1 + e - lam) / (lam * (r1 + e) - 1.0)
    logger.debug("solve_bilinear_params: e=%s r1=%s -> lambda=%s rho1=%s", e, r1, lam, rho1)

    try:
        params = BilinearParams(lam=lam, rho1=rho1)
    except ValueError as exc:
        raise InconsistentSolutionError(f"solved parameters violate lambda > 1 > lambda*rho1: {exc}") from exc

    far = (rho1 - lam) / (lam * rho1 - 1.0)
    near = (-rho1 - lam) / (-lam * rho1 - 1.0)
    scale = max(1.0, e + r1)
    if abs(far - (e + r1)) > SUBSTITUTION_TOL * scale or abs(near - (e - r1)) > SUBSTITUTION_TOL * scale:
        raise InconsistentSolutionError(f"f(+-rho1) = ({far}, {near}) does not reproduce e +- r1 = ({e + r1}, {e - r1})")

    return params, CirclePairGeometry(e=e, r1=r1)
