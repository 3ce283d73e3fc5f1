"""Monte Carlo simulation of the one- and two-detector measurement schemes.

Detectors are on/off devices with efficiency ``eta``, modeled as a loss
channel followed by an ideal detector.  Only vacuum probabilities after
loss enter, so any state exposing ``vacuum_after_loss(T)`` can be simulated.

Sampling is split into fixed blocks of ``BLOCK_RUNS`` runs.  Each block
draws from its own Philox stream keyed by ``(seed, stream tag, block
index)``, so tallies are bit-identical whatever number of worker shards
processes the blocks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np

from .certification import witness_variance
from .errors import DomainError

BLOCK_RUNS = 1 << 24
MAX_RUNS = 10**12

_DOUBLE, _SINGLE_FULL, _SINGLE_OPEN = 0, 1, 2


@dataclass(frozen=True)
class DetectorConfig:
    """Beam-splitter transmittance ``T`` and detector efficiencies.

    ``eta_B`` is only used by the two-detector scheme.
    """

    T: float
    eta_A: float = 1.0
    eta_B: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.T < 1.0:
            raise DomainError(f"transmittance must lie in (0, 1), got {self.T!r}")
        for name in ("eta_A", "eta_B"):
            eta = getattr(self, name)
            if not 0.0 < eta <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {eta!r}")

    @property
    def effective_T(self) -> float:
        """Splitting ratio seen by ideal detectors."""
        a = self.eta_A * self.T
        return a / (a + self.eta_B * (1.0 - self.T))

    @property
    def total_efficiency(self) -> float:
        return self.eta_A * self.T + self.eta_B * (1.0 - self.T)


@dataclass(frozen=True)
class ClickTally:
    """Counts of the three exclusive outcomes of the two-detector scheme."""

    n_none: int
    n_b_only: int
    n_a: int
    N: int
    seed: int

    def __post_init__(self):
        if self.n_none + self.n_b_only + self.n_a != self.N:
            raise ValueError("tally counts do not add up to N")

    def to_dict(self) -> dict:
        return asdict(self)

    def estimates(self) -> tuple[float, float]:
        """Plug-in ``(p0, q0)``: nobody clicks, and detector A stays silent."""
        return self.n_none / self.N, (self.n_none + self.n_b_only) / self.N


@dataclass(frozen=True)
class SingleTally:
    """No-click counts of the one-detector scheme.

    ``k0_full`` counts silent runs among ``K`` with the attenuator at ``T``,
    ``k0_open`` among the remaining ``N - K`` with the attenuator open.
    """

    k0_full: int
    k0_open: int
    K: int
    N: int
    seed: int

    def __iter__(self):
        return iter((self.k0_full, self.k0_open))

    def to_dict(self) -> dict:
        return asdict(self)

    def estimates(self) -> tuple[float, float]:
        return self.k0_open / (self.N - self.K), self.k0_full / self.K


def event_probabilities(state, cfg: DetectorConfig) -> tuple[float, float, float]:
    """Probabilities of (no click, only B clicks, A clicks) in one run."""
    silent_all = state.vacuum_after_loss(cfg.total_efficiency)
    silent_a = state.vacuum_after_loss(cfg.eta_A * cfg.T)
    p_none = min(max(silent_all, 0.0), 1.0)
    p_a = min(max(1.0 - silent_a, 0.0), 1.0)
    p_b_only = max(1.0 - p_none - p_a, 0.0)
    return p_none, p_b_only, p_a


def _check_runs(N: int) -> int:
    N = int(N)
    if not 1 <= N <= MAX_RUNS:
        raise DomainError(f"number of runs must lie in [1, {MAX_RUNS}], got {N}")
    return N


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise DomainError(f"seed must be nonnegative, got {seed}")
    return seed


def _rng(seed: int, tag: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, tag, block])))


def _blocks(n: int) -> list[int]:
    full, rest = divmod(n, BLOCK_RUNS)
    return [BLOCK_RUNS] * full + ([rest] if rest else [])


def _run_blocks(n: int, draw, shards: int) -> np.ndarray:
    sizes = _blocks(n)
    jobs = list(enumerate(sizes))
    if shards <= 1 or len(jobs) <= 1:
        parts = [draw(i, size) for i, size in jobs]
    else:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            parts = list(pool.map(lambda job: draw(*job), jobs))
    return np.sum(np.array(parts, dtype=np.int64), axis=0) if parts else np.zeros(0, dtype=np.int64)


def _binomial(rng: np.random.Generator, n: int, p: float) -> int:
    if n == 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    return int(rng.binomial(n, p))


def simulate_double(state, cfg: DetectorConfig, N: int, seed: int, shards: int = 1) -> ClickTally:
    """Two-detector scheme: one multinomial draw of the three outcomes.

    The multinomial is sampled as a chain of conditional binomials.
    """
    N = _check_runs(N)
    seed = _check_seed(seed)
    p_none, p_b_only, _ = event_probabilities(state, cfg)
    rest = 1.0 - p_none
    cond_b = p_b_only / rest if rest > 0.0 else 0.0

    def draw(block: int, size: int):
        rng = _rng(seed, _DOUBLE, block)
        n_none = _binomial(rng, size, p_none)
        n_b = _binomial(rng, size - n_none, cond_b)
        return n_none, n_b, size - n_none - n_b

    n_none, n_b_only, n_a = (int(x) for x in _run_blocks(N, draw, shards))
    return ClickTally(n_none, n_b_only, n_a, N, seed)


def simulate_single(state, T: float, eta: float, N: int, K: int, seed: int,
                    shards: int = 1) -> SingleTally:
    """One-detector scheme: ``K`` runs at transmittance ``T``, ``N - K`` with the attenuator open.

    The detector efficiency ``eta`` applies to both settings.
    """
    if not 0.0 < T < 1.0:
        raise DomainError(f"transmittance must lie in (0, 1), got {T!r}")
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must lie in (0, 1], got {eta!r}")
    N = _check_runs(N)
    seed = _check_seed(seed)
    K = int(K)
    if not 0 < K < N:
        raise DomainError(f"split must satisfy 0 < K < N, got K={K}, N={N}")
    q_full = state.vacuum_after_loss(eta * T)
    q_open = state.vacuum_after_loss(eta)

    def drawer(tag: int, p: float):
        def draw(block: int, size: int):
            return (_binomial(_rng(seed, tag, block), size, p),)
        return draw

    (k0_full,) = _run_blocks(K, drawer(_SINGLE_FULL, q_full), shards)
    (k0_open,) = _run_blocks(N - K, drawer(_SINGLE_OPEN, q_open), shards)
    return SingleTally(int(k0_full), int(k0_open), K, N, seed)


def estimate_witness(tally: Union[ClickTally, SingleTally], lam: float
                     ) -> tuple[Optional[float], Optional[float]]:
    """Witness estimate ``q0_hat - lam p0_hat`` and its plug-in variance.

    The variance is ``None`` when a sample is empty and it cannot be formed;
    the estimate itself is ``None`` when there is no data at all.
    """
    if isinstance(tally, ClickTally):
        if tally.N == 0:
            return None, None
        p0, q0 = tally.estimates()
        return q0 - lam * p0, float(witness_variance(p0, q0, lam, "double", tally.N))
    if isinstance(tally, SingleTally):
        K, M = tally.K, tally.N - tally.K
        if K == 0 or M == 0:
            return None, None
        p0, q0 = tally.estimates()
        return q0 - lam * p0, q0 * (1.0 - q0) / K + lam * lam * p0 * (1.0 - p0) / M
    raise TypeError(f"unsupported tally type {type(tally).__name__}")
