"""Test states: Poissonian noise, vacuum/single-photon mixtures, product states.

Every factory returns distributions whose truncated tail carries less than
``TAIL_TOL`` probability.  ``load_state_spec`` parses the JSON state
description accepted by the command line.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence, Union

import numpy as np
from scipy.stats import poisson

from ._numerics import bisect_predicate
from .errors import DomainError
from .gaussian_boundary import GaussianStateParams, q0_threshold
from .photon_stats import PhotonNumberDistribution, convolve

TAIL_TOL = 1e-12
ETA_TOL = 1e-8


@dataclass(frozen=True)
class NoisySinglePhotonModel:
    """Mixture ``eta |1><1| + (1 - eta) |0><0|`` tensored with Poissonian noise of mean ``nbar``."""

    eta: float
    nbar: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"eta must lie in [0, 1], got {self.eta!r}")
        if not (self.nbar >= 0.0 and math.isfinite(self.nbar)):
            raise DomainError(f"nbar must be a nonnegative number, got {self.nbar!r}")

    def vacuum_after_loss(self, T: float) -> float:
        if not 0.0 <= T <= 1.0:
            raise DomainError(f"transmittance must lie in [0, 1], got {T!r}")
        return (1.0 - self.eta * T) * math.exp(-self.nbar * T)

    def distribution(self) -> PhotonNumberDistribution:
        return noisy_single_photon_distribution(self)


ModeState = Union[PhotonNumberDistribution, GaussianStateParams, NoisySinglePhotonModel]


@dataclass(frozen=True)
class MultimodeProductState:
    """Product of independent modes; vacuum probabilities multiply."""

    modes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    def vacuum_after_loss(self, T: float) -> float:
        return math.prod(m.vacuum_after_loss(T) for m in self.modes)

    def vacuum_pair(self, T: float) -> tuple[float, float]:
        return self.vacuum_after_loss(1.0), self.vacuum_after_loss(T)


def poisson_distribution(nbar: float, tail: float = TAIL_TOL) -> PhotonNumberDistribution:
    """Poisson statistics truncated where the omitted mass drops below ``tail``."""
    if not nbar >= 0.0:
        raise DomainError(f"nbar must be nonnegative, got {nbar!r}")
    if nbar == 0.0:
        return PhotonNumberDistribution([1.0])
    n_max = max(int(nbar + 10.0 * math.sqrt(nbar) + 10), 1)
    while poisson.sf(n_max, nbar) >= tail:
        n_max *= 2
    # shrink back to the smallest cutoff meeting the tail rule
    sf = poisson.sf(np.arange(n_max + 1), nbar)
    n_max = int(np.argmax(sf < tail))
    probs = poisson.pmf(np.arange(n_max + 1), nbar)
    return PhotonNumberDistribution(probs, float(sf[n_max]))


def fock_mixture(probs: Sequence[float]) -> PhotonNumberDistribution:
    """Finite mixture of Fock states with weights ``probs[n]``."""
    return PhotonNumberDistribution(np.asarray(probs, dtype=float))


def noisy_single_photon_vacuum_pair(m: NoisySinglePhotonModel, T: float) -> tuple[float, float]:
    """Closed-form ``(p0, q0)`` of the noisy single-photon model."""
    if not 0.0 < T < 1.0:
        raise DomainError(f"transmittance must lie in (0, 1), got {T!r}")
    return (1.0 - m.eta) * math.exp(-m.nbar), (1.0 - m.eta * T) * math.exp(-m.nbar * T)


def noisy_single_photon_distribution(m: NoisySinglePhotonModel) -> PhotonNumberDistribution:
    signal = PhotonNumberDistribution([1.0 - m.eta, m.eta])
    if m.nbar == 0.0:
        return signal
    return convolve(signal, poisson_distribution(m.nbar))


def is_certified_pair(p0: float, q0: float, T: float) -> bool:
    """Exact boundary comparison, with the ``p0 -> 0`` and ``p0 -> 1`` edges handled."""
    if p0 <= 0.0:
        # no Gaussian state has p0 = 0
        return True
    if p0 >= 1.0:
        return False
    return q0 > q0_threshold(p0, T)


def eta_threshold(nbar: float, T: float) -> float | None:
    """Smallest single-photon fraction certifiable at noise ``nbar`` and channel ``T``.

    Returns ``None`` when even ``eta = 1`` is not certified.  Near
    ``nbar = 0`` the result is limited by double precision: the gap between
    a weak mixture and the boundary shrinks like ``eta**3``.
    """
    if not 0.0 < T < 1.0:
        raise DomainError(f"transmittance must lie in (0, 1), got {T!r}")
    if not nbar >= 0.0:
        raise DomainError(f"nbar must be nonnegative, got {nbar!r}")

    def certified(eta: float) -> bool:
        p0, q0 = noisy_single_photon_vacuum_pair(NoisySinglePhotonModel(eta, nbar), T)
        return is_certified_pair(p0, q0, T)

    if not certified(1.0):
        return None
    if certified(0.0):
        return 0.0
    return bisect_predicate(certified, 0.0, 1.0, ETA_TOL)


def load_state_spec(spec: Union[str, dict]) -> Any:
    """Build a state from its JSON description.

    ``{"model": "noisy_single_photon", "eta": .., "nbar": ..}`` gives a
    :class:`NoisySinglePhotonModel`, ``{"model": "fock_mixture", "probs": [..]}``
    a :class:`PhotonNumberDistribution` and
    ``{"model": "squeezed_coherent", "V": .., "dx": .., "dp": ..}`` a
    :class:`GaussianStateParams`.  All three expose ``vacuum_after_loss(T)``.
    """
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict):
        raise ValueError("state spec must be a JSON object")
    model = spec.get("model")
    expected = {
        "noisy_single_photon": {"eta", "nbar"},
        "fock_mixture": {"probs"},
        "squeezed_coherent": {"V", "dx", "dp"},
    }
    if model not in expected:
        raise ValueError(f"unknown model {model!r}; expected one of {sorted(expected)}")
    extra = set(spec) - expected[model] - {"model"}
    if extra:
        raise ValueError(f"unexpected keys for {model}: {sorted(extra)}")
    if model == "noisy_single_photon":
        return NoisySinglePhotonModel(float(spec["eta"]), float(spec.get("nbar", 0.0)))
    if model == "fock_mixture":
        return fock_mixture([float(p) for p in spec["probs"]])
    return GaussianStateParams(float(spec["V"]), float(spec.get("dx", 0.0)), float(spec.get("dp", 0.0)))
