"""Quadrature rules and finite differences for the closed-form engine.

Three quadrature families are used by the analysis layer:

* Gauss-Chebyshev (first kind) node tables for the interference integral,
  where the integrand is mapped from t in (0, pi/2) to the Chebyshev
  interval via phi = (pi/4)(1 + theta).
* Gauss-Legendre rules built by Newton iteration on the Legendre
  recurrence, used for all finite-interval integrals.
* A semi-infinite rule for threshold integrals over [0, inf), built from
  the substitution eps = u / (1 - u) with panels refined toward u = 1 so
  integrands whose mass spans many decades of eps are still resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidParameterError, NumericError

__all__ = [
    "ChebyshevNodes",
    "QuadratureRule",
    "gauss_chebyshev_nodes",
    "gauss_legendre_rule",
    "integrate_semi_infinite",
    "finite_difference",
]

_NEWTON_TOL = 1e-15
_MAX_PANELS = 64


class ChebyshevNodes(NamedTuple):
    """Gauss-Chebyshev node table for k = 1..K."""

    theta: np.ndarray  # cos((2k - 1) pi / (2K))
    phi: np.ndarray    # (pi/4)(1 + theta_k), inside (0, pi/2)
    weight: np.ndarray  # sqrt(1 - theta_k^2)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for a fixed interval [lo, hi]."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of integrand values at the nodes."""
        return float(np.dot(self.weights, values))


def gauss_chebyshev_nodes(K: int) -> ChebyshevNodes:
    """Return the K-point Chebyshev abscissas used by the interference sum.

    Args:
        K: number of nodes, K >= 1.

    Returns:
        ChebyshevNodes with theta_k = cos((2k-1)pi/(2K)), the mapped angle
        phi_k = (pi/4)(1 + theta_k) and weight sqrt(1 - theta_k^2).

    The composite identity used downstream is
        integral_0^{pi/2} f(t) dt ~= (pi^2 / 4K) sum_k weight_k f(phi_k).
    """
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise InvalidParameterError(f"K must be a positive integer, got {K!r}")
    k = np.arange(1, K + 1, dtype=np.float64)
    theta = np.cos((2.0 * k - 1.0) * np.pi / (2.0 * K))
    phi = (np.pi / 4.0) * (1.0 + theta)
    weight = np.sqrt(1.0 - theta * theta)
    return ChebyshevNodes(theta=theta, phi=phi, weight=weight)


@lru_cache(maxsize=64)
def _legendre_base(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].

    Computed by Newton iteration on the three-term Legendre recurrence,
    stopping when every node moves by less than 1e-15.  Only the lower half
    is iterated; the upper half is mirrored so the rule is exactly
    symmetric.
    """
    if n == 1:
        return np.zeros(1), np.full(1, 2.0)
    m = (n + 1) // 2
    i = np.arange(1, m + 1, dtype=np.float64)
    x = np.cos(np.pi * (i - 0.25) / (n + 0.5))  # Tricomi initial guess
    for _ in range(100):
        p_prev = np.ones_like(x)
        p = x.copy()
        for j in range(2, n + 1):
            p_prev, p = p, ((2.0 * j - 1.0) * x * p - (j - 1.0) * p_prev) / j
        dp = n * (x * p - p_prev) / (x * x - 1.0)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    else:  # pragma: no cover - Newton converges in a handful of steps
        raise NumericError(f"Legendre Newton iteration failed for n={n}")
    # recompute derivative at the converged nodes for the weights
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2.0 * j - 1.0) * x * p - (j - 1.0) * p_prev) / j
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    w_half = 2.0 / ((1.0 - x * x) * dp * dp)

    # x holds the positive half in descending order; mirror it so the full
    # rule is exactly symmetric about 0
    nodes = np.empty(n)
    weights = np.empty(n)
    nodes[:m] = -x
    weights[:m] = w_half
    nodes[n - m:] = x[::-1]
    weights[n - m:] = w_half[::-1]
    if n % 2 == 1:
        nodes[m - 1] = 0.0
    return nodes, weights


def gauss_legendre_rule(n: int, lo: float, hi: float) -> QuadratureRule:
    """n-point Gauss-Legendre rule mapped onto [lo, hi].

    Raises InvalidParameterError unless n >= 1 and lo < hi are finite.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameterError(f"order must be a positive integer, got {n!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise InvalidParameterError(f"invalid interval [{lo}, {hi}]")
    base_x, base_w = _legendre_base(int(n))
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return QuadratureRule(nodes=mid + half * base_x, weights=half * base_w,
                          interval=(float(lo), float(hi)))


def _eval_panel(f: Callable, eps: np.ndarray) -> np.ndarray:
    """Evaluate f on a node vector, accepting scalar-only callables."""
    try:
        vals = np.asarray(f(eps), dtype=np.float64)
        if vals.shape == eps.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([float(f(float(e))) for e in eps], dtype=np.float64)


def integrate_semi_infinite(f: Callable, cfg) -> float:
    """Approximate integral of f over [0, inf).

    The substitution eps = u/(1-u) (Jacobian 1/(1-u)^2) maps the half line
    onto (0, 1).  A single fixed-order rule cannot resolve integrands whose
    mass is spread over many decades of eps, so the u interval is split
    into panels [0, 1/2], [1/2, 3/4], ... refined geometrically toward
    u = 1 (each panel covers one octave of eps) and a Gauss-Legendre rule
    of order ``cfg.gl_order_rate`` is applied per panel.  Panels stop once
    two consecutive contributions fall below ``cfg.tolerance`` relative to
    the running total.

    ``f`` may be vectorized (ndarray -> ndarray); scalar callables are
    looped over.  A non-finite integrand value raises NumericError carrying
    the offending eps.
    """
    order = int(cfg.gl_order_rate)
    tol = float(cfg.tolerance)
    base_x, base_w = _legendre_base(order)

    # work in s = 1 - u so the dyadic panel edges stay exact; then
    # eps = 1/s - 1 and the Jacobian is 1/s^2
    total = 0.0
    small_streak = 0
    for j in range(_MAX_PANELS):
        s_hi = 2.0 ** (-j)        # panel covers s in [s_hi/2, s_hi]
        s_lo = 0.5 * s_hi
        half = 0.5 * (s_hi - s_lo)
        s = (s_lo + half) - half * base_x  # descending s = ascending eps
        eps = 1.0 / s - 1.0
        vals = _eval_panel(f, eps)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            e_bad = float(eps[np.argmax(bad)])
            raise NumericError(
                f"integrand returned a non-finite value at eps={e_bad!r}",
                epsilon=e_bad)
        contrib = half * float(np.dot(base_w, vals / (s * s)))
        total += contrib
        if abs(contrib) <= tol * max(abs(total), 1e-300):
            small_streak += 1
            if small_streak >= 2:
                break
        else:
            small_streak = 0
    else:
        raise NumericError(
            f"semi-infinite integral not converged after {_MAX_PANELS} "
            f"panels (last contribution {contrib!r} against total {total!r})")
    return total


def finite_difference(f: Callable[[float], float], x: float, order: int,
                      h: float) -> float:
    """Central finite-difference derivative estimate.

    order 1: (f(x+h) - f(x-h)) / (2h)
    order 2: (f(x+h) - 2 f(x) + f(x-h)) / h^2

    The caller owns the step-size tradeoff between truncation and roundoff.
    """
    if order not in (1, 2):
        raise InvalidParameterError(f"order must be 1 or 2, got {order!r}")
    if not (h > 0 and math.isfinite(h)):
        raise InvalidParameterError(f"step h must be positive, got {h!r}")
    if order == 1:
        return (f(x + h) - f(x - h)) / (2.0 * h)
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
