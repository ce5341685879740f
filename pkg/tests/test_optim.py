"""Budgeted optimizer interface and per-algorithm math helpers."""
from __future__ import annotations

import numpy as np
import pytest

from railcal.model import ConfigError
from railcal.optim import (
    ALGORITHMS,
    DETERMINISTIC_ALGORITHMS,
    EvalRecord,
    EvalTrace,
    OptimizerConfig,
    box_violation,
    check_box,
    from_unit,
    latin_hypercube,
    optimize,
    to_unit,
)
from railcal.optim import byo, cors, ga, mads, nmsa, sa, spsa

LOWER = np.full(7, -5.0)
UPPER = np.full(7, 5.0)
START = np.full(7, 3.0)


def sphere(x: np.ndarray) -> float:
    return float(np.sum((x - 1.0) ** 2))


def run_sphere(algorithm, budget=20, seed=0, **hp):
    config = OptimizerConfig(algorithm, budget=budget, seed=seed, hyperparams=hp)
    return optimize(sphere, LOWER, UPPER, START, config)


# ---------------------------------------------------------------- interface

@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_budget_exactly_consumed(algorithm):
    result = run_sphere(algorithm)
    assert result.n_evals == 20
    assert len(result.trace) == 20


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_start_point_scored_first(algorithm):
    result = run_sphere(algorithm)
    first = result.trace.records[0]
    assert first.index == 1
    assert np.array_equal(first.theta, START)
    assert first.value == sphere(START) == 28.0


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_best_is_argmin_over_trace(algorithm):
    result = run_sphere(algorithm)
    values = [r.value for r in result.trace.records]
    assert result.best_value == min(values)
    match = next(r for r in result.trace.records if r.value == result.best_value)
    assert np.array_equal(result.best_theta, match.theta)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_all_evaluations_inside_box(algorithm):
    result = run_sphere(algorithm, budget=60, seed=2)
    for record in result.trace.records:
        assert box_violation(record.theta, LOWER, UPPER) == 0.0


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_same_seed_same_trace(algorithm):
    a = run_sphere(algorithm, seed=7)
    b = run_sphere(algorithm, seed=7)
    assert [r.value for r in a.trace.records] == [r.value for r in b.trace.records]
    for ra, rb in zip(a.trace.records, b.trace.records):
        assert np.array_equal(ra.theta, rb.theta)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_budget_of_one_scores_only_the_start(algorithm):
    result = run_sphere(algorithm, budget=1)
    assert result.n_evals == 1
    assert result.best_value == 28.0


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_sphere_improves_within_budget(algorithm):
    result = run_sphere(algorithm, budget=100, seed=1)
    assert result.best_value < 28.0


def test_deterministic_algorithms_ignore_seed():
    assert DETERMINISTIC_ALGORITHMS == ("nmsa",)
    a = run_sphere("nmsa", budget=40, seed=1)
    b = run_sphere("nmsa", budget=40, seed=999)
    assert [r.value for r in a.trace.records] == [r.value for r in b.trace.records]


def test_cors_solves_the_sphere():
    result = run_sphere("cors", budget=100, seed=1)
    assert result.best_value < 0.5


def test_unknown_algorithm_rejected():
    with pytest.raises(ConfigError, match="unknown algorithm"):
        run_sphere("gradient_descent")


def test_unknown_hyperparameter_rejected():
    with pytest.raises(ConfigError, match="unknown hyperparameters"):
        run_sphere("ga", turbo=True)


def test_hyperparameter_override_applied():
    config = OptimizerConfig("ga", hyperparams={"pop_size": 9})
    merged = config.resolved_hyperparams()
    assert merged["pop_size"] == 9
    assert merged["crossover_prob"] == ga.DEFAULTS["crossover_prob"]


def test_nonpositive_budget_rejected():
    with pytest.raises(ConfigError, match="budget"):
        run_sphere("ga", budget=0)


@pytest.mark.parametrize("lower,upper,start", [
    (np.zeros(3), np.ones(2), np.zeros(3)),
    (np.ones(3), np.zeros(3), np.full(3, 0.5)),
    (np.zeros(3), np.ones(3), np.full(3, 2.0)),
])
def test_check_box_rejects(lower, upper, start):
    with pytest.raises(ConfigError):
        check_box(lower, upper, start)


# ------------------------------------------------------------------ common

def test_latin_hypercube_stratifies_each_axis():
    pts = latin_hypercube(8, 3, np.random.default_rng(0))
    assert pts.shape == (8, 3)
    for d in range(3):
        cells = sorted(int(v * 8) for v in pts[:, d])
        assert cells == list(range(8))


def test_unit_box_round_trip():
    lower = np.array([-2.0, 0.0, 10.0])
    upper = np.array([2.0, 1.0, 30.0])
    x = np.array([1.0, 0.25, 15.0])
    u = to_unit(x, lower, upper)
    assert u.tolist() == [0.75, 0.25, 0.25]
    assert np.allclose(from_unit(u, lower, upper), x)


def test_unit_box_degenerate_span():
    lower = np.array([1.0, 0.0])
    upper = np.array([1.0, 2.0])
    u = to_unit(np.array([1.0, 1.0]), lower, upper)
    assert np.all(np.isfinite(u))
    assert u[0] == 0.0


def test_box_violation_hand_computed():
    lower, upper = np.zeros(2), np.ones(2)
    assert box_violation(np.array([0.5, 0.5]), lower, upper) == 0.0
    assert box_violation(np.array([2.0, -1.0]), lower, upper) == 2.0


def test_trace_best_prefers_earliest_tie():
    trace = EvalTrace("x", 0)
    trace.records = [
        EvalRecord(1, np.array([1.0]), 5.0),
        EvalRecord(2, np.array([2.0]), 3.0),
        EvalRecord(3, np.array([3.0]), 3.0),
    ]
    assert trace.best().index == 2
    assert trace.best_so_far().tolist() == [5.0, 3.0, 3.0]
    with pytest.raises(ConfigError):
        EvalTrace("x", 0).best()


# -------------------------------------------------------------- algorithms

def test_blend_crossover_identical_parents_breed_true():
    rng = np.random.default_rng(0)
    p = np.array([0.2, 0.9, 0.5])
    c1, c2 = ga.blend_crossover(p, p.copy(), alpha=0.5, rng=rng)
    assert np.array_equal(c1, p) and np.array_equal(c2, p)


def test_blend_crossover_stays_on_stretched_segment():
    rng = np.random.default_rng(1)
    p1, p2 = np.zeros(4), np.ones(4)
    for _ in range(50):
        c1, c2 = ga.blend_crossover(p1, p2, alpha=0.5, rng=rng)
        assert np.all(c1 >= -0.5) and np.all(c1 <= 1.5)
        assert np.allclose(c1 + c2, p1 + p2)


def test_visiting_temperature_endpoints():
    assert sa.visiting_temperature(5230.0, 2.62, 0) == 5230.0
    assert sa.visiting_temperature(5230.0, 2.62, 1) == pytest.approx(5230.0)
    assert sa.visiting_temperature(5230.0, 2.62, 100) < 100.0


def test_acceptance_probability_hand_computed():
    assert sa.acceptance_probability(-1.0, 10.0, -5.0) == 1.0
    assert sa.acceptance_probability(0.0, 10.0, -5.0) == 1.0
    # base = 1 - 6*1/10 = 0.4, probability 0.4^(1/6)
    assert sa.acceptance_probability(1.0, 10.0, -5.0) == pytest.approx(0.4 ** (1 / 6))
    assert sa.acceptance_probability(100.0, 10.0, -5.0) == 0.0


def test_visit_steps_heavy_tailed_but_finite():
    rng = np.random.default_rng(0)
    steps = np.concatenate([sa.visit_steps(rng, 5230.0, 2.62, 7) for _ in range(200)])
    assert np.all(np.isfinite(steps))
    assert np.max(np.abs(steps)) > 1.0


def test_reflect_point_hand_computed():
    centroid = np.array([1.0, 1.0])
    worst = np.array([0.0, 0.0])
    assert nmsa.reflect_point(centroid, worst, 1.0).tolist() == [2.0, 2.0]
    assert nmsa.reflect_point(centroid, worst, -0.5).tolist() == [0.5, 0.5]


def test_halton_low_indices():
    assert mads.halton_point(1, 2).tolist() == [0.5, pytest.approx(1 / 3)]
    assert mads.halton_point(2, 2).tolist() == [0.25, pytest.approx(2 / 3)]
    assert mads.halton_point(3, 1).tolist() == [0.75]


def test_poll_directions_positively_span():
    for idx in (1, 5, 23):
        dirs = mads.poll_directions(7, idx)
        assert dirs.shape == (8, 7)
        basis = dirs[:7]
        assert np.allclose(basis @ basis.T, np.eye(7), atol=1e-12)
        rng = np.random.default_rng(idx)
        for _ in range(25):
            g = rng.standard_normal(7)
            assert np.max(dirs @ g) > 1e-12


def test_spsa_gains_hand_computed():
    assert spsa.gain_a(0, 0.001, 10.0, 0.602) == pytest.approx(0.001 / 11.0**0.602)
    assert spsa.gain_c(0, 0.007, 0.101) == 0.007
    assert spsa.gain_c(1, 0.007, 0.101) == pytest.approx(0.007 / 2.0**0.101)


def test_two_sided_gradient_exact_on_quadratic():
    grad = spsa.two_sided_gradient(sphere, np.array([3.0]), 0.1, np.array([1.0]))
    assert grad.tolist() == [pytest.approx(4.0)]  # d/dx (x-1)^2 at 3
    theta = np.array([2.0, -1.0, 0.5])
    delta = np.array([1.0, -1.0, 1.0])
    expected = (sphere(theta + 0.05 * delta) - sphere(theta - 0.05 * delta)) / (0.1 * delta)
    assert np.allclose(spsa.two_sided_gradient(sphere, theta, 0.05, delta), expected)


def _fitted_gp():
    rng = np.random.default_rng(3)
    X = rng.random((12, 2))
    y = np.sin(3 * X[:, 0]) + X[:, 1] ** 2
    gp = byo.GaussianProcess(jitter=1e-6)
    gp.fit(X, y, refit_hypers=False)
    return gp, X, y


def test_gp_posterior_interpolates_training_points():
    gp, X, y = _fitted_gp()
    mu, var = gp.posterior(X)
    assert np.allclose(mu, y, atol=1e-3)
    assert np.all(var >= 0.0)
    assert np.all(var < 1e-2)


def test_gp_ei_gradient_matches_finite_differences():
    gp, X, _ = _fitted_gp()
    rng = np.random.default_rng(4)
    Q = rng.random((5, 2))
    ei, dei = gp._ei_and_grad(Q)
    assert np.all(ei >= 0.0)
    eps = 1e-6
    for j in range(2):
        shift = np.zeros(2)
        shift[j] = eps
        hi, _ = gp._ei_and_grad(Q + shift)
        lo, _ = gp._ei_and_grad(Q - shift)
        assert np.allclose(dei[:, j], (hi - lo) / (2 * eps), rtol=1e-4, atol=1e-8)


def test_rbf_interpolates_exactly():
    rng = np.random.default_rng(5)
    X = rng.random((15, 3))
    y = np.cos(4 * X[:, 0]) + X[:, 1] * X[:, 2]
    model = cors.fit_rbf(X, y)
    assert np.allclose(model(X), y, atol=1e-6)


def test_mirror_fold_into_unit_box():
    pts = np.array([[1.2], [-0.3], [2.5], [0.7], [-1.4]])
    folded = cors._reflect(pts)
    assert folded.ravel().tolist() == [
        pytest.approx(0.8),
        pytest.approx(0.3),
        pytest.approx(0.5),
        pytest.approx(0.7),
        pytest.approx(0.6),
    ]
    assert np.array_equal(cors._reflect(folded), folded)
