import math

import numpy as np
import pytest

from qngcert.certification import VacuumPair, optimal_witness, witness_variance
from qngcert.errors import DomainError, NotCertifiableError
from qngcert.gaussian_boundary import boundary_lambda, boundary_p0, boundary_q0, boundary_wg, q0_threshold
from qngcert.planner import (
    LimitValue,
    k_opt,
    lambda0,
    optimal_split_variance,
    rds_min,
    required_runs,
    split_variance,
)
from qngcert.state_models import NoisySinglePhotonModel


def noisy_pair(eta=0.1, nbar=1e-3, T=0.5):
    m = NoisySinglePhotonModel(eta, nbar)
    return VacuumPair(m.vacuum_after_loss(1.0), m.vacuum_after_loss(T), T)


def test_required_runs_example():
    plan = required_runs(noisy_pair())
    assert math.isfinite(plan.N_S) and math.isfinite(plan.N_D)
    assert plan.N_S > 2 * plan.N_D
    assert plan.R_DS == pytest.approx(plan.N_D / plan.N_S)
    assert plan.R_DS <= 0.5 + 1e-9
    assert plan.R_DS_min <= plan.R_DS


def test_required_runs_matches_full_lambda_scan():
    pair = noisy_pair()
    plan = required_runs(pair)
    V = np.linspace(0.3, 0.999, 20000)
    lam = boundary_lambda(V, pair.T)
    diff = pair.q0 - lam * pair.p0 - boundary_wg(V, pair.T)
    for scheme, N in (("single", plan.N_S), ("double", plan.N_D)):
        per_run = witness_variance(pair.p0, pair.q0, lam, scheme, 1.0) / diff**2
        per_run = np.where(diff > 0, per_run, np.inf)
        assert N <= per_run.min() * (1 + 1e-9)
        assert N == pytest.approx(per_run.min(), rel=1e-4)


def test_plan_and_witness_agree():
    # N_D runs of the double scheme give one standard deviation by construction
    pair = noisy_pair()
    plan = required_runs(pair)
    assert optimal_witness(pair, "double", plan.N_D)[2] == pytest.approx(1.0, rel=1e-6)
    assert optimal_witness(pair, "single", plan.N_S)[2] == pytest.approx(1.0, rel=1e-6)


def test_runs_diverge_towards_the_boundary():
    T, p0 = 0.5, 0.8
    threshold = q0_threshold(p0, T)
    runs = [required_runs(VacuumPair(p0, threshold + gap, T)).N_D for gap in (1e-3, 1e-4, 1e-5)]
    assert runs[0] < runs[1] < runs[2]
    assert runs[2] > 1e6


def test_doubling_the_margin_quarters_runs():
    V, T, N = 0.8, 0.5, 1.0
    lam = float(boundary_lambda(V, T))
    p0, q0 = 0.7, 0.9
    var = witness_variance(p0, q0, lam, "double", N)
    margin = q0 - lam * p0 - float(boundary_wg(V, T))
    assert var / (2 * margin) ** 2 == pytest.approx(0.25 * var / margin**2)


def test_not_certifiable_has_no_plan():
    with pytest.raises(NotCertifiableError):
        required_runs(VacuumPair(1.0, 1.0, 0.5))
    with pytest.raises(NotCertifiableError):
        required_runs(VacuumPair(0.5, q0_threshold(0.5, 0.5) - 1e-6, 0.5))


def test_rds_min_examples():
    assert rds_min(0.4, 0.4) == 0.0
    assert rds_min(0.4, 1.0) == 0.5
    assert rds_min(0.4, 1.0).is_limit
    assert rds_min(0.0, 0.3) == 0.5
    assert isinstance(rds_min(0.0, 0.3), LimitValue)
    assert rds_min(1.0, 1.0) == 0.0 and rds_min(1.0, 1.0).is_limit
    value = rds_min(0.5, 0.75)
    assert value == pytest.approx(0.5 * (1 - math.sqrt(0.5 * 0.25 / (0.75 * 0.5))))
    assert not isinstance(value, LimitValue)
    with pytest.raises(DomainError):
        rds_min(0.6, 0.5)


@pytest.mark.parametrize("T", [0.25, 0.5, 0.75])
def test_rds_min_near_vacuum_limit(T):
    V = 0.999
    assert rds_min(float(boundary_p0(V, T)), float(boundary_q0(V, T))) == pytest.approx((1 - math.sqrt(T)) / 2, abs=1e-3)


@pytest.mark.parametrize("T", [0.25, 0.5, 0.75])
def test_rds_min_decreases_along_boundary(T):
    V = np.linspace(0.05, 0.999, 300)
    values = [rds_min(float(p), float(q)) for p, q in zip(boundary_p0(V, T), boundary_q0(V, T))]
    assert np.all(np.diff(values) <= 1e-15)


def test_rds_min_attained_at_lambda0():
    p0, q0 = 0.6, 0.8
    lam = np.linspace(0.01, 5, 200001)
    ratio = witness_variance(p0, q0, lam, "double", 1.0) / witness_variance(p0, q0, lam, "single", 1.0)
    assert ratio.min() == pytest.approx(rds_min(p0, q0), abs=1e-9)
    assert lam[np.argmin(ratio)] == pytest.approx(lambda0(p0, q0), abs=1e-3)


def test_k_opt_examples():
    p0, q0 = 0.5, 0.75
    assert k_opt(lambda0(p0, q0), p0, q0, 1000) == 500
    assert k_opt(0.0, p0, q0, 1000) == 999 or k_opt(0.0, p0, q0, 1000) == 1000 - 1
    assert k_opt(math.inf, p0, q0, 1000) == 1
    assert k_opt(1e12, p0, q0, 1000) == 1
    with pytest.raises(DomainError):
        k_opt(1.0, p0, q0, 1)


def test_split_variance_examples():
    p0, q0, lam, N = 0.5, 0.75, 1.2, 1000
    assert split_variance(lam, p0, q0, N, N / 2) == pytest.approx(witness_variance(p0, q0, lam, "single", N))
    assert split_variance(0.0, p0, q0, N, 300) == pytest.approx(q0 * (1 - q0) / 300)
    with pytest.raises(DomainError):
        split_variance(lam, p0, q0, N, N)


def test_optimal_split_matches_integer_minimum():
    p0, q0, N = 0.5, 0.75, 10**6
    lam = lambda0(p0, q0)
    K = np.arange(1, N)
    best = np.min(q0 * (1 - q0) / K + lam**2 * p0 * (1 - p0) / (N - K))
    assert optimal_split_variance(lam, p0, q0, N) == pytest.approx(best, rel=1e-12)
    assert split_variance(lam, p0, q0, N, k_opt(lam, p0, q0, N)) == pytest.approx(best, rel=1e-12)


def test_split_optimized_ratio_recovers_rds_min():
    p0, q0 = 0.6, 0.8
    lam = np.linspace(0.01, 5, 200001)
    double = witness_variance(p0, q0, lam, "double", 1.0)
    split = (np.sqrt(q0 * (1 - q0)) + lam * np.sqrt(p0 * (1 - p0))) ** 2
    assert np.min(double / split) == pytest.approx(rds_min(p0, q0), abs=1e-9)


def test_plan_serializes_to_floats():
    d = required_runs(noisy_pair()).to_dict()
    assert set(d) >= {"N_S", "N_D", "lambda_S", "lambda_D", "R_DS", "R_DS_min", "lambda0", "K_opt_fraction"}
    assert all(isinstance(v, float) for v in d.values())
