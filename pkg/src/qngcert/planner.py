"""How many runs each detection scheme needs to certify a state.

The requirement is that the witness standard deviation equals its
distance from the Gaussian cap, optimized over the tangent-witness family
parameterized by ``V``.  Run counts are reported as reals.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from ._numerics import scan_then_refine
from .certification import VacuumPair, certify, pair_v_grid, witness_variance
from .errors import DomainError, NotCertifiableError
from .gaussian_boundary import boundary_lambda, boundary_wg


class LimitValue(float):
    """A float returned at a degenerate edge, where only the limit is defined."""

    is_limit = True


@dataclass(frozen=True)
class PlanResult:
    N_S: float
    N_D: float
    lambda_S: float
    lambda_D: float
    V_S: float
    V_D: float
    R_DS: float
    R_DS_min: float
    lambda0: float
    K_opt_fraction: float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


def _runs_per_unit(pair: VacuumPair, scheme: str, V: float) -> float:
    """Runs needed with the witness tangent at ``V``; ``inf`` where it does not certify."""
    T = pair.T
    lam = float(boundary_lambda(V, T))
    diff = pair.q0 - lam * pair.p0 - float(boundary_wg(V, T))
    if not diff > 0.0:
        return math.inf
    return float(witness_variance(pair.p0, pair.q0, lam, scheme, 1.0)) / diff**2


def _minimize_runs(pair: VacuumPair, scheme: str) -> tuple[float, float]:
    x, neg = scan_then_refine(lambda V: -_runs_per_unit(pair, scheme, V), pair_v_grid(pair))
    return x, -neg


def required_runs(pair: VacuumPair) -> PlanResult:
    """Runs ``N_S`` (one detector) and ``N_D`` (two detectors) to certify ``pair``.

    Raises :class:`NotCertifiableError` when the pair does not lie above the
    Gaussian boundary.
    """
    if not certify(pair).certified:
        raise NotCertifiableError("pair is not above the Gaussian boundary; no finite plan")
    V_S, N_S = _minimize_runs(pair, "single")
    V_D, N_D = _minimize_runs(pair, "double")
    # each optimum must be at least as good as the other scheme's witness
    N_S_alt = _runs_per_unit(pair, "single", V_D)
    if N_S_alt < N_S:
        V_S, N_S = V_D, N_S_alt
    N_D_alt = _runs_per_unit(pair, "double", V_S)
    if N_D_alt < N_D:
        V_D, N_D = V_S, N_D_alt
    if not (math.isfinite(N_S) and math.isfinite(N_D)):
        raise NotCertifiableError("no witness of the family separates the pair from the boundary")
    lam_S = float(boundary_lambda(V_S, pair.T))
    lam_D = float(boundary_lambda(V_D, pair.T))
    lam0 = lambda0(pair.p0, pair.q0)
    return PlanResult(
        N_S=N_S,
        N_D=N_D,
        lambda_S=lam_S,
        lambda_D=lam_D,
        V_S=V_S,
        V_D=V_D,
        R_DS=N_D / N_S,
        R_DS_min=float(rds_min(pair.p0, pair.q0)),
        lambda0=lam0,
        K_opt_fraction=lam0 / (lam_S + lam0),
    )


def lambda0(p0: float, q0: float) -> float:
    """Witness slope at which the scheme-variance ratio is smallest."""
    if not 0.0 < p0 < 1.0:
        raise DomainError(f"lambda0 needs 0 < p0 < 1, got {p0!r}")
    return math.sqrt(q0 * (1.0 - q0) / (p0 * (1.0 - p0)))


def rds_min(p0: float, q0: float) -> float:
    """Lower bound on ``N_D / N_S`` from a common witness for both schemes.

    At ``q0 = 1`` or ``p0 = 0`` the bound is 1/2, and at ``p0 = q0 = 1``
    it is 0; these edge values come back as :class:`LimitValue`.
    """
    if not (0.0 <= p0 <= 1.0 and 0.0 <= q0 <= 1.0 and p0 <= q0):
        raise DomainError(f"rds_min needs 0 <= p0 <= q0 <= 1, got p0={p0!r}, q0={q0!r}")
    if p0 == q0:
        return LimitValue(0.0) if q0 == 1.0 else 0.0
    if q0 == 1.0 or p0 == 0.0:
        return LimitValue(0.5)
    ratio = p0 * (1.0 - q0) / (q0 * (1.0 - p0))
    return 0.5 * (1.0 - math.sqrt(ratio))


def k_opt(lam: float, p0: float, q0: float, N: int) -> int:
    """Runs to spend at transmittance ``T`` in the one-detector scheme."""
    N = int(N)
    if N < 2:
        raise DomainError(f"need at least two runs to split, got N={N}")
    if lam < 0:
        raise DomainError(f"lambda must be nonnegative, got {lam!r}")
    lam0 = lambda0(p0, q0)
    if math.isinf(lam):
        K = 1.0
    else:
        K = lam0 / (lam + lam0) * N if lam + lam0 > 0 else N / 2
    return min(max(int(round(K)), 1), N - 1)


def split_variance(lam: float, p0: float, q0: float, N: float, K: float) -> float:
    """Witness variance with ``K`` runs at ``T`` and ``N - K`` with the attenuator open."""
    if not 0 < K < N:
        raise DomainError(f"split must satisfy 0 < K < N, got K={K!r}, N={N!r}")
    return q0 * (1.0 - q0) / K + lam * lam * p0 * (1.0 - p0) / (N - K)


def optimal_split_variance(lam: float, p0: float, q0: float, N: float) -> float:
    """Split variance at the real-valued optimal ``K``."""
    return (math.sqrt(q0 * (1.0 - q0)) + lam * math.sqrt(p0 * (1.0 - p0))) ** 2 / N
