"""Photon-number distributions and the lossy-channel vacuum functional.

Everything here works on the diagonal of the density matrix in the Fock
basis.  A pure-loss channel of transmittance ``T`` acts on that diagonal as
a binomial thinning, and the probability of observing vacuum after the
channel is ``sum_n p_n (1 - T)**n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import comb, gammaln

from .errors import DomainError, InvalidDistributionError

NORM_TOL = 1e-9

# below this photon number binomial coefficients are formed directly
_LOG_BINOM_ABOVE = 50


@dataclass(frozen=True)
class PhotonNumberDistribution:
    """Truncated photon-number distribution.

    ``probs[n]`` is the probability of ``n`` photons for ``n <= n_max``;
    ``tail_bound`` bounds the probability mass that was cut off.
    """

    probs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float).ravel()
        if probs.size == 0:
            raise InvalidDistributionError("empty distribution")
        if not np.all(np.isfinite(probs)):
            raise InvalidDistributionError("non-finite probability")
        if np.any(probs < 0):
            raise InvalidDistributionError("negative probability")
        tail = float(self.tail_bound)
        if not (tail >= 0 and np.isfinite(tail)):
            raise InvalidDistributionError(f"invalid tail bound {tail!r}")
        total = probs.sum() + tail
        if abs(total - 1.0) > NORM_TOL:
            raise InvalidDistributionError(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "tail_bound", tail)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def p0(self) -> float:
        return float(self.probs[0])

    def vacuum_after_loss(self, T: float) -> float:
        return vacuum_after_loss(self, T)

    @classmethod
    def fock(cls, n: int) -> "PhotonNumberDistribution":
        probs = np.zeros(n + 1)
        probs[n] = 1.0
        return cls(probs)

    def __eq__(self, other):
        if not isinstance(other, PhotonNumberDistribution):
            return NotImplemented
        return self.tail_bound == other.tail_bound and np.array_equal(self.probs, other.probs)

    __hash__ = None


def _check_transmittance(T: float) -> float:
    T = float(T)
    if not 0.0 <= T <= 1.0:
        raise DomainError(f"transmittance must lie in [0, 1], got {T!r}")
    return T


def vacuum_after_loss(dist: PhotonNumberDistribution, T: float) -> float:
    """Vacuum probability after a pure-loss channel: ``sum_n p_n (1 - T)**n``."""
    T = _check_transmittance(T)
    n = np.arange(dist.probs.size)
    value = float(np.dot(dist.probs, (1.0 - T) ** n))
    # keep the contract q0 in [p0, 1] against summation round-off
    return min(max(value, dist.p0), 1.0)


def mean_photon(dist: PhotonNumberDistribution) -> tuple[float, float]:
    """Mean photon number and the truncation error bound ``n_max * tail_bound``."""
    n = np.arange(dist.probs.size)
    return float(np.dot(n, dist.probs)), dist.n_max * dist.tail_bound


def second_moment(dist: PhotonNumberDistribution) -> float:
    n = np.arange(dist.probs.size)
    return float(np.dot(n * n, dist.probs))


def binomial_matrix(n_max: int, T: float) -> np.ndarray:
    """Thinning matrix ``B[m, n] = C(n, m) T**m (1 - T)**(n - m)`` for ``m <= n``."""
    T = _check_transmittance(T)
    n = np.arange(n_max + 1)
    m = n[:, None]
    nn = n[None, :]
    mask = m <= nn
    if T == 0.0:
        return np.where(mask & (m == 0), 1.0, 0.0)
    if T == 1.0:
        return np.eye(n_max + 1)
    k = np.where(mask, nn - m, 0)
    if n_max <= _LOG_BINOM_ABOVE:
        coeff = comb(nn, m)
        out = coeff * T**m * (1.0 - T) ** k
    else:
        log_c = gammaln(nn + 1) - gammaln(m + 1) - gammaln(k + 1)
        out = np.exp(log_c + m * np.log(T) + k * np.log1p(-T))
    return np.where(mask, out, 0.0)


def attenuate(dist: PhotonNumberDistribution, T: float) -> PhotonNumberDistribution:
    """Photon statistics after a pure-loss channel of transmittance ``T``."""
    T = _check_transmittance(T)
    if T == 1.0:
        return dist
    out = binomial_matrix(dist.n_max, T) @ dist.probs
    out = np.clip(out, 0.0, None)
    # entry 0 must agree with the closed-form vacuum functional
    out[0] = vacuum_after_loss(dist, T)
    return PhotonNumberDistribution(out, dist.tail_bound)


def convolve(a: PhotonNumberDistribution, b: PhotonNumberDistribution) -> PhotonNumberDistribution:
    """Total photon-number distribution of two independent modes."""
    probs = np.convolve(a.probs, b.probs)
    # cross terms between a kept entry and a dropped one are bounded by the tails
    tail = a.tail_bound + b.tail_bound
    return PhotonNumberDistribution(np.clip(probs, 0.0, None), tail)
