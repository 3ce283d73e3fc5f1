"""Verdicts for measured or modeled vacuum-probability pairs."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from ._numerics import scan_then_refine
from .errors import DomainError, NonphysicalPairError
from .gaussian_boundary import boundary_lambda, boundary_wg, tangent_threshold

# violations of the physical region up to this size are clamped, larger ones rejected
CLAMP_TOL = 1e-9

SCHEMES = ("single", "double")


@dataclass(frozen=True)
class VacuumPair:
    """Vacuum probability ``p0`` of a state and ``q0`` after loss ``T``.

    ``N`` optionally records how many runs estimated each probability, and
    ``scheme`` whether they were measured sequentially with one detector
    (``"single"``) or simultaneously with two (``"double"``).
    """

    p0: float
    q0: float
    T: float
    N: Optional[int] = None
    scheme: str = "single"

    def __post_init__(self):
        p0, q0, T = float(self.p0), float(self.q0), float(self.T)
        if not all(math.isfinite(x) for x in (p0, q0, T)):
            raise NonphysicalPairError("non-finite probability or transmittance")
        if not 0.0 < T < 1.0:
            raise DomainError(f"transmittance must lie in (0, 1), got {T!r}")
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.N is not None and self.N <= 0:
            raise DomainError(f"N must be positive, got {self.N!r}")
        if p0 > 1.0:
            p0 = _clamp(p0, 1.0, "p0 exceeds 1")
        if p0 <= 0.0:
            raise NonphysicalPairError(f"p0 must be positive, got {p0!r}")
        upper = 1.0 - T * (1.0 - p0)
        if q0 < p0:
            q0 = _clamp(q0, p0, f"q0={q0!r} below the lower bound p0={p0!r}")
        if q0 > upper:
            q0 = _clamp(q0, upper, f"q0={q0!r} above the upper bound 1 - T(1 - p0) = {upper!r}")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "T", T)


def _clamp(value: float, bound: float, message: str) -> float:
    if abs(value - bound) > CLAMP_TOL:
        raise NonphysicalPairError(f"nonphysical pair: {message}")
    return bound


@dataclass(frozen=True)
class Witness:
    lam: float
    V: float
    W: float
    W_G: float


@dataclass(frozen=True)
class CertificationResult:
    verdict: str
    margin: float
    witness: Witness
    significance: Optional[float] = None

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self) -> dict:
        out = asdict(self)
        out["witness"]["lambda"] = out["witness"].pop("lam")
        return out


def witness_variance(p0: float, q0: float, lam, scheme: str, N: float):
    """Variance of ``q0_hat - lam * p0_hat`` after ``N`` runs.

    ``single`` spends ``N/2`` runs on each probability; ``double`` measures
    both in every run, so the estimates are positively correlated with
    covariance ``p0 (1 - q0) / N``.
    """
    base = q0 * (1.0 - q0) + lam * lam * p0 * (1.0 - p0)
    if scheme == "single":
        return 2.0 * base / N
    if scheme == "double":
        return (base - 2.0 * lam * p0 * (1.0 - q0)) / N
    raise DomainError(f"scheme must be one of {SCHEMES}, got {scheme!r}")


def _significance(diff: float, var: float) -> float:
    if not (math.isfinite(diff) and math.isfinite(var)):
        # witnesses with overflowing slope are useless, never optimal
        return -math.inf
    if var <= 0.0:
        # only the vacuum has zero variance, and it sits on the boundary
        return 0.0
    return diff / math.sqrt(var)


def certify(pair: VacuumPair) -> CertificationResult:
    """Compare ``pair.q0`` with the Gaussian threshold at ``pair.p0``.

    The witness is the one tangent to the boundary at ``pair.p0``.  When
    ``pair.N`` is given, ``significance`` is the witness excess over its
    Gaussian cap in units of its standard deviation, with each probability
    estimated from ``N`` runs.
    """
    T = pair.T
    V, threshold = tangent_threshold(pair.p0, T)
    lam = float(boundary_lambda(V, T))
    W_G = float(boundary_wg(V, T))
    W = pair.q0 - lam * pair.p0
    margin = pair.q0 - threshold
    significance = None
    if pair.N is not None:
        # N runs per probability: the single scheme then used 2N in total
        runs = 2 * pair.N if pair.scheme == "single" else pair.N
        var = witness_variance(pair.p0, pair.q0, lam, pair.scheme, runs)
        significance = _significance(W - W_G, var)
    return CertificationResult(
        verdict="certified" if margin > 0 else "not_certified",
        margin=margin,
        witness=Witness(lam=lam, V=V, W=W, W_G=W_G),
        significance=significance,
    )


def witness_v_grid(n: int = 256) -> np.ndarray:
    """Bracketing grid over ``V`` in ``(0, 1]``, dense near both ends."""
    half = n // 2
    low = np.geomspace(1e-6, 0.5, half, endpoint=False)
    high = 1.0 - np.geomspace(0.5, 1e-10, n - half)
    return np.unique(np.concatenate([low, high, [1.0]]))


def pair_v_grid(pair: VacuumPair, n: int = 256) -> list[float]:
    """:func:`witness_v_grid` plus a cluster around the pair's tangent ``V``.

    Close to the boundary only witnesses near the tangent separate the pair,
    in a window of width about the square root of the margin.
    """
    grid = witness_v_grid(n)
    if pair.p0 < 1.0:
        V_t = tangent_threshold(pair.p0, pair.T)[0]
        offsets = np.geomspace(1e-9, 0.3, 48) * V_t
        near = np.concatenate([[V_t], V_t - offsets, V_t + offsets])
        grid = np.concatenate([grid, near[(near > 0.0) & (near <= 1.0)]])
    return [float(v) for v in np.unique(grid)]


def optimal_witness(pair: VacuumPair, scheme: str, N: int) -> tuple[float, float, float]:
    """Witness of the ``V`` family with the largest significance.

    Maximizes ``(W - W_G) / sigma`` over ``V``, with ``sigma`` for ``N``
    total runs of the given scheme and the pair's probabilities plugged in.
    Returns ``(lambda, V, significance)``.  For pairs that are not
    certified the significance is at most zero and the ``V`` returned is
    the best available.
    """
    if scheme not in SCHEMES:
        raise DomainError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if N <= 0:
        raise DomainError(f"N must be positive, got {N!r}")
    p0, q0, T = pair.p0, pair.q0, pair.T
    if p0 >= 1.0:
        # vacuum touches the boundary at V = 1 and has no noise
        return float(boundary_lambda(1.0, T)), 1.0, 0.0

    def score(V: float) -> float:
        lam = float(boundary_lambda(V, T))
        diff = q0 - lam * p0 - float(boundary_wg(V, T))
        return _significance(diff, witness_variance(p0, q0, lam, scheme, 1.0))

    V, best = scan_then_refine(score, pair_v_grid(pair))
    lam = float(boundary_lambda(V, T))
    return lam, V, best * math.sqrt(N)
