from collections.abc import Iterable

import numpy as np
from numpy.typing import ArrayLike, NDArray


def _neumaier_real(terms: Iterable[NDArray[np.float64]]) -> NDArray[np.float64]:
    """Elementwise Neumaier summation of equally shaped real arrays, in the order given."""
    total: NDArray[np.float64] | None = None
    compensation: NDArray[np.float64] | None = None
    for term in terms:
        if total is None or compensation is None:
            total = np.array(term, dtype=np.float64, copy=True)
            compensation = np.zeros_like(total)
            continue
        head = total + term
        # two-add tail; the larger magnitude operand decides which branch is exact
        tail = np.where(
            np.abs(total) >= np.abs(term),
            (total - head) + term,
            (term - head) + total,
        )
        compensation = compensation + tail
        total = head
    if total is None or compensation is None:
        return np.zeros(())
    return total + compensation


def compensated_sum(terms: Iterable[ArrayLike]) -> NDArray[np.complex128]:
    """
    Sum complex arrays with Neumaier compensation applied to each component.

    Terms are consumed in the order given; callers pass them in ascending
    power so that small tails are accumulated before the bulk.
    """
    materialised = [np.asarray(t, dtype=np.complex128) for t in terms]
    if not materialised:
        return np.zeros((), dtype=np.complex128)
    shape = np.broadcast_shapes(*(t.shape for t in materialised))
    materialised = [np.broadcast_to(t, shape) for t in materialised]
    real = _neumaier_real(t.real for t in materialised)
    imag = _neumaier_real(t.imag for t in materialised)
    return real + 1j * imag
