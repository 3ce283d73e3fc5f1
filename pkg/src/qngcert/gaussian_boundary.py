"""Vacuum probabilities of pure Gaussian states and the Gaussian boundary.

A pure single-mode Gaussian state is described by the normalized quadrature
variance ``V`` (covariance ``diag(V, 1/V)``, vacuum has ``V = 1``) and a
displacement ``(d_x, d_p)``.  For fixed ``T`` the largest vacuum probability
after loss, ``q0``, that any mixture of Gaussian states can reach at a given
vacuum probability ``p0`` is traced out by amplitude-squeezed coherent states
with ``V`` in ``(0, 1]``.  States above that curve are quantum non-Gaussian.

The curve is parameterized by ``V``; the ``boundary_*`` helpers accept numpy
arrays so the figure tables and oracle scans can evaluate it in bulk.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._numerics import bisect_increasing
from .errors import DomainError

# bracket for the p0 -> V inversion; p0(1e-9, T) underflows to zero
V_BRACKET = (1e-9, 1.0)
APPROX_REGIME = 0.1


class AdvisoryWarning(UserWarning):
    """The approximate criterion was evaluated outside its near-vacuum regime."""


@dataclass(frozen=True)
class GaussianStateParams:
    """Pure single-mode squeezed coherent state ``(V, d_x, d_p)``."""

    V: float
    d_x: float = 0.0
    d_p: float = 0.0

    def __post_init__(self):
        if not (self.V > 0 and math.isfinite(self.V)):
            raise DomainError(f"variance must be positive, got {self.V!r}")

    def vacuum_after_loss(self, T: float) -> float:
        """Vacuum probability after loss ``T`` on the closed interval ``[0, 1]``."""
        if not 0.0 <= T <= 1.0:
            raise DomainError(f"transmittance must lie in [0, 1], got {T!r}")
        return float(_q0_formula(self.V, self.d_x, self.d_p, T))


@dataclass(frozen=True)
class BoundaryPoint:
    V: float
    T: float
    p0: float
    q0: float
    lam: float
    W_G: float


def _check_open_T(T: float) -> float:
    T = float(T)
    if not 0.0 < T < 1.0:
        raise DomainError(f"transmittance must lie in (0, 1), got {T!r}")
    return T


def _check_boundary_V(V: float) -> float:
    V = float(V)
    if not 0.0 < V <= 1.0:
        raise DomainError(f"boundary variance must lie in (0, 1], got {V!r}")
    return V


def _q0_formula(V, d_x, d_p, T):
    a = T * V + 2.0 - T
    b = T + 2.0 * V - T * V
    return 2.0 * np.sqrt(V) / np.sqrt(a * b) * np.exp(-T * d_x**2 / a - T * V * d_p**2 / b)


def p0_gaussian(s: GaussianStateParams) -> float:
    """Vacuum probability ``pi Q(0)`` of a pure Gaussian state."""
    V = s.V
    return float(2.0 * np.sqrt(V) / (V + 1.0) * np.exp(-(s.d_x**2 + V * s.d_p**2) / (V + 1.0)))


def q0_gaussian(s: GaussianStateParams, T: float) -> float:
    """Vacuum probability of a pure Gaussian state after loss ``T`` in ``(0, 1)``."""
    T = _check_open_T(T)
    return float(_q0_formula(s.V, s.d_x, s.d_p, T))


def dx_opt(V: float, T: float) -> float:
    """Displacement that maximizes ``q0`` at fixed ``p0`` for variance ``V <= 1``."""
    V = _check_boundary_V(V)
    T = _check_open_T(T)
    return float(np.sqrt(_dx_opt_sq(V, T)))


def _dx_opt_sq(V, T):
    return (1.0 - V * V) / (2.0 * V) * (2.0 - T + T * V) / (2.0 * V - T * V + T)


def boundary_p0(V, T):
    """``p0`` along the boundary; vectorized, no domain checks."""
    return 2.0 * np.sqrt(V) / (V + 1.0) * np.exp(
        -(1.0 - V) * (2.0 - T + T * V) / (2.0 * V * (2.0 * V - T * V + T)))


def boundary_q0(V, T):
    """``q0`` along the boundary; vectorized, no domain checks."""
    return 2.0 * np.sqrt(V) / np.sqrt((T * V + 2.0 - T) * (T + 2.0 * V - T * V)) * np.exp(
        -T * (1.0 - V * V) / (2.0 * V * (2.0 * V - T * V + T)))


def boundary_lambda(V, T):
    """Witness slope that makes the boundary tangent at ``V``.

    Equal to ``(V+1) T / (TV+2-T) * q0 / p0``, written without the ratio so
    that it stays finite where ``p0`` underflows; it overflows to ``inf``
    as ``V -> 0``.
    """
    a = T * V + 2.0 - T
    b = T + 2.0 * V - T * V
    with np.errstate(over="ignore"):
        return (V + 1.0) ** 2 * T / (a * np.sqrt(a * b)) * np.exp((1.0 - V) * (1.0 - T) / (V * b))


def boundary_wg(V, T):
    """Largest value of ``q0 - lambda p0`` reachable by Gaussian states."""
    return 2.0 * (1.0 - T) / (T * V + 2.0 - T) * boundary_q0(V, T)


def boundary_point(V: float, T: float) -> BoundaryPoint:
    V = _check_boundary_V(V)
    T = _check_open_T(T)
    return BoundaryPoint(
        V=V,
        T=T,
        p0=float(boundary_p0(V, T)),
        q0=float(boundary_q0(V, T)),
        lam=float(boundary_lambda(V, T)),
        W_G=float(boundary_wg(V, T)),
    )


def solve_V_for_p0(p0_target: float, T: float) -> float:
    """Unique ``V`` in ``(0, 1)`` with ``boundary_p0(V, T) == p0_target``.

    The boundary ``p0`` increases strictly with ``V``, so plain bisection on
    the bracket ``V_BRACKET`` converges; it runs to floating-point resolution.
    """
    T = _check_open_T(T)
    p0_target = float(p0_target)
    if not 0.0 < p0_target < 1.0:
        raise DomainError(f"no boundary variance for p0 = {p0_target!r}; need 0 < p0 < 1")
    return bisect_increasing(lambda v: float(boundary_p0(v, T)), p0_target, *V_BRACKET)


def q0_threshold(p0: float, T: float) -> float:
    """Largest ``q0`` reachable by Gaussian mixtures at vacuum probability ``p0``.

    The boundary is evaluated at the solved ``V`` and shifted along its
    tangent (slope ``lambda``) by the remaining ``p0`` residual, which makes
    the result insensitive to the last bits of the inversion.
    """
    return tangent_threshold(p0, T)[1]


def tangent_threshold(p0: float, T: float) -> tuple[float, float]:
    """``(V, q0_threshold)`` for ``p0`` in ``(0, 1]``; ``p0 = 1`` maps to the vacuum."""
    if p0 == 1.0:
        return 1.0, 1.0
    V = solve_V_for_p0(p0, T)
    p_b = float(boundary_p0(V, T))
    q_b = float(boundary_q0(V, T))
    return V, q_b + float(boundary_lambda(V, T)) * (p0 - p_b)


def physical_bounds(p0: float, T: float) -> tuple[float, float]:
    """Range ``[p0, 1 - T (1 - p0)]`` of ``q0`` allowed for any state."""
    if not 0.0 <= p0 <= 1.0:
        raise DomainError(f"p0 must lie in [0, 1], got {p0!r}")
    T = _check_open_T(T)
    return float(p0), 1.0 - T * (1.0 - p0)


def nbar_threshold_parametric(V: float) -> tuple[float, float]:
    """``(p0, nbar_th)`` at variance ``V`` for the mean-photon-number criterion.

    A state whose mean photon number lies below ``nbar_th`` at this ``p0``
    is quantum non-Gaussian.
    """
    V = _check_boundary_V(V)
    p0 = 2.0 * math.sqrt(V) / (V + 1.0) * math.exp(-(1.0 - V) / (2.0 * V * V))
    nbar = (1.0 - V) * (1.0 + 2.0 * V - V * V) / (4.0 * V * V)
    return p0, nbar


def nbar_threshold(p0: float) -> float:
    """Mean-photon-number threshold at vacuum probability ``p0``."""
    if not 0.0 < p0 <= 1.0:
        raise DomainError(f"p0 must lie in (0, 1], got {p0!r}")
    if p0 == 1.0:
        return 0.0
    V = bisect_increasing(lambda v: nbar_threshold_parametric(v)[0], p0, *V_BRACKET)
    return nbar_threshold_parametric(V)[1]


def approx_qng_test(p0: float, q0: float, T: float) -> bool:
    """Closed-form approximate criterion, valid only close to vacuum.

    Advisory: the exact boundary comparison is authoritative.  Outside the
    regime ``1 - p0 < 0.1`` an ``AdvisoryWarning`` is issued.
    """
    T = _check_open_T(T)
    if not 1.0 - p0 < APPROX_REGIME:
        warnings.warn(f"approximate criterion used at p0={p0!r}, outside 1 - p0 < {APPROX_REGIME}",
                      AdvisoryWarning, stacklevel=2)
    c = 3.0 * T * T / (2.0 * (1.0 - T) * (2.0 - T))
    return (1.0 - q0) ** 3 > c * (1.0 - T - q0 + T * p0)


def approx_delta_threshold(p0, T):
    """Gap ``1 - T(1 - p0) - q0`` below the physical bound at which the
    approximate criterion switches, as a function of ``p0``.  Vectorized.

    With ``x = 1 - q0`` the switch is the smallest root above ``T(1 - p0)``
    of ``x**3 / c - x + T(1 - p0)``; Newton iteration from that point
    converges monotonically because the cubic is convex there.  Where no
    root exists every physical ``q0`` passes, and the gap is the full
    physical range ``(1 - T)(1 - p0)``; results are clipped to that range.
    """
    T = float(T)
    c = 3.0 * T * T / (2.0 * (1.0 - T) * (2.0 - T))
    p0 = np.asarray(p0, dtype=float)
    a = T * (1.0 - p0)
    full = (1.0 - T) * (1.0 - p0)
    has_root = a <= (2.0 / 3.0) * np.sqrt(c / 3.0)
    x = np.where(has_root, a, 0.0)
    for _ in range(200):
        g = x**3 / c - x + a
        dg = 3.0 * x * x / c - 1.0
        step = np.where(has_root & (dg < 0), g / np.where(dg < 0, dg, -1.0), 0.0)
        x = x - step
        if np.all(np.abs(step) <= 1e-16 * np.abs(x) + 1e-300):
            break
    return np.where(has_root, np.minimum(x**3 / c, full), full)


def appendix_a_perturbation_check(V: float, T: float, eps: float) -> tuple[float, float]:
    """Compare a squeezed vacuum with a slightly displaced squeezed state.

    The squeezed vacuum has variance ``V + K eps`` with ``K = -2V/(1-V)``,
    chosen so both states share ``p0`` to first order; the displaced state
    has variance ``V`` and ``d_x**2 = eps``.  Returns ``(dp0, dq0)``,
    squeezed vacuum minus displaced.  ``dq0`` is negative: the squeezed
    vacuum never maximizes ``q0``.
    """
    if not 0.0 < V < 1.0:
        raise DomainError(f"perturbation check needs 0 < V < 1, got {V!r}")
    T = _check_open_T(T)
    if eps < 0:
        raise DomainError("eps must be nonnegative")
    K = -2.0 * V / (1.0 - V)
    v_sv = V + K * eps
    if v_sv <= 0:
        raise DomainError(f"eps={eps!r} too large for V={V!r}")
    sv = GaussianStateParams(v_sv)
    displaced = GaussianStateParams(V, d_x=math.sqrt(eps))
    dp = p0_gaussian(sv) - p0_gaussian(displaced)
    dq = q0_gaussian(sv, T) - q0_gaussian(displaced, T)
    return dp, dq


def appendix_a_leading_coefficient(V: float, T: float) -> float:
    """First-order coefficient of ``dq0`` in ``eps`` from the perturbation check."""
    return -4.0 * (1.0 - T) * T * math.sqrt(V) / ((2.0 - T + T * V) * (2.0 * V + T - T * V)) ** 1.5


def appendix_b_polynomial(V, T):
    """Polynomial whose roots would allow a two-mode optimum with unequal variances.

    Works on floats, numpy arrays and exact rationals (``fractions.Fraction``).
    """
    return (-(2 - T) ** 2 * V**4 - 2 * (1 - T) * T * V**3 + 2 * (2 - T) * (T + 1) * V**2
            + 2 * (4 - (3 - T) * T) * V + (2 - T) * T)
