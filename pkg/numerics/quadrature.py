"""Gaussian quadrature rules and an order-doubling driver.

Gauss–Hermite nodes are built from the symmetric tridiagonal Jacobi matrix of
the probabilists' Hermite polynomials (Golub–Welsch), so the weights come out
normalized against the standard normal density:

    Σ w_i f(x_i) ≈ ∫ f(e) φ(e) de
"""
from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from numpy.typing import NDArray

from common.config import QUADRATURE_CONFIG
from common.errors import InputError, QuadratureError

__all__ = ["hermite_quadrature", "legendre_quadrature", "integrate_until_converged"]

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _hermite_cached(order: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    off = np.sqrt(np.arange(1, order, dtype=np.float64))
    jacobi = np.diag(off, k=1) + np.diag(off, k=-1)
    nodes, vectors = np.linalg.eigh(jacobi)
    weights = vectors[0, :] ** 2
    # symmetrize to remove eigen-solver asymmetry
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def hermite_quadrature(order: int) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Return nodes and positive weights for ∫ f(e) φ(e) de.

    Exact for polynomials of degree ≤ 2·order − 1.

    Raises:
        InputError: if order < 2.
    """
    if int(order) != order or order < 2:
        raise InputError(f"Gauss–Hermite requires order >= 2 (got order={order})")
    return _hermite_cached(int(order))


def legendre_quadrature(order: int, lo: NDArray[np.float64] | float,
                        hi: NDArray[np.float64] | float) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Gauss–Legendre nodes/weights mapped onto [lo, hi].

    lo and hi may be arrays; the returned arrays then carry a leading node axis
    followed by the broadcast shape of the bounds.
    """
    if order < 1:
        raise InputError(f"Gauss–Legendre requires order >= 1 (got order={order})")
    x, w = np.polynomial.legendre.leggauss(int(order))
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    shape = (order,) + (1,) * np.broadcast(lo, hi).ndim
    nodes = mid + half * x.reshape(shape)
    weights = half * w.reshape(shape)
    return nodes, weights


def integrate_until_converged(evaluate: Callable[[int], NDArray[np.float64]],
                              initial_order: int = None,
                              max_order: int = None,
                              tolerance: float = None) -> Tuple[NDArray[np.float64], int]:
    """Double the order until two successive evaluations agree.

    Args:
        evaluate: Maps a quadrature order to an array of integrals.
        initial_order: First order tried (default from QUADRATURE_CONFIG).
        max_order: Order cap (default 640).
        tolerance: Max absolute change accepted between successive orders.

    Returns:
        The converged array and the order that produced it.
    """
    order = initial_order or QUADRATURE_CONFIG["initial_order"]
    cap = max_order or QUADRATURE_CONFIG["max_order"]
    tol = QUADRATURE_CONFIG["tolerance"] if tolerance is None else tolerance

    previous = evaluate(order)
    while True:
        nxt = order * 2
        if nxt > cap:
            raise QuadratureError(f"quadrature did not converge to {tol:g} by order {cap}")
        current = evaluate(nxt)
        change = float(np.max(np.abs(current - previous))) if current.size else 0.0
        if change < tol:
            logger.debug("quadrature converged at order %d (change %.2e)", nxt, change)
            return current, nxt
        previous, order = current, nxt
