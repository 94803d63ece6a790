import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from models.exceptions import EmptyLevelSet, InvalidGridPoint, NoLevelSetSampler, OracleFailure, UnknownSmoothness
from oracles.oracle import Oracle, SmoothnessTag, certify, certify_grad_holder, certify_holder
from oracles.test_functions import (SAMPLER_TOLERANCE, base_bump, base_bump_derivative, bump_grid, bump_grid_size,
                                    lookup_function, make_affine, make_bump_function, make_constant,
                                    make_quadratic_f0, make_spike)
from utils.geometry import grid_points


def test_queries_are_counted_values_are_not():
    oracle = make_quadratic_f0(0.0, 2)
    oracle.query([0.5, 0.5])
    oracle([0.0, 1.0])
    oracle.values(np.random.default_rng(0).random((50, 2)))
    assert oracle.query_count == 2
    oracle.reset_count()
    assert oracle.query_count == 0


def test_query_counter_thread_safe():
    oracle = make_constant(1, 0.0)
    with ThreadPoolExecutor(max_workers=4) as pool:
        list(pool.map(lambda i: oracle.query([i / 1000]), range(1000)))
    assert oracle.query_count == 1000


def test_oracle_failures():
    def broken(X):
        raise RuntimeError("boom")

    with pytest.raises(OracleFailure):
        Oracle("broken", 1, broken).query([0.5])
    with pytest.raises(OracleFailure):
        Oracle("nan", 1, lambda X: np.full(len(X), np.nan)).query([0.5])


def test_quadratic_values_and_sampler():
    oracle = make_quadratic_f0(0.0, 2)
    assert oracle.query([0.5, 0.5]) == pytest.approx(-0.25)
    assert oracle.query([0.5, 1.0]) == pytest.approx(0.0)
    points = oracle.sample_level_set(0.0, 200, np.random.default_rng(1))
    assert len(points) > 0
    assert np.all(np.abs(oracle.values(points)) <= SAMPLER_TOLERANCE)
    assert np.all((points >= 0.0) & (points <= 1.0))
    with pytest.raises(EmptyLevelSet):
        oracle.sample_level_set(-0.3, 10, np.random.default_rng(1))


def test_quadratic_on_the_line_has_no_sampler():
    oracle = make_quadratic_f0(0.0, 1)
    assert not oracle.has_sampler
    with pytest.raises(NoLevelSetSampler):
        oracle.sample_level_set(0.0, 10, np.random.default_rng(0))


def test_affine_sampler():
    oracle = make_affine(2, [0.5, 0.5])
    points = oracle.sample_level_set(0.5, 300, np.random.default_rng(2))
    assert len(points) == 300
    assert np.allclose(points.sum(axis=1), 1.0, atol=1e-11)
    with pytest.raises(EmptyLevelSet):
        oracle.sample_level_set(5.0, 10, np.random.default_rng(2))
    with pytest.raises(ValueError):
        make_affine(2, [0.0, 0.0])


def test_constant_sampler_only_at_its_value():
    oracle = make_constant(3, 0.25)
    points = oracle.sample_level_set(0.25, 20, np.random.default_rng(0))
    assert points.shape == (20, 3)
    with pytest.raises(EmptyLevelSet):
        oracle.sample_level_set(0.0, 20, np.random.default_rng(0))


def test_base_bump_values():
    assert base_bump(0.0) == 1.0
    assert base_bump(1.0) == 0.0
    assert base_bump(-1.5) == 0.0
    assert base_bump(0.5) == pytest.approx(math.exp(-1.0 / 3.0))


def test_base_bump_derivative_matches_finite_differences():
    h = 1e-6
    for x in (-0.8, -0.3, 0.0, 0.4, 0.9):
        numeric = (base_bump(x + h) - base_bump(x - h)) / (2 * h)
        assert base_bump_derivative(x) == pytest.approx(numeric, rel=1e-5, abs=1e-8)


def test_bump_grid():
    grid = bump_grid(0.1, 1)
    assert grid.ravel().tolist() == pytest.approx([0.0, 0.2, 0.4, 0.6, 0.8, 1.0])
    assert bump_grid_size(0.05, 1) == 11
    assert bump_grid_size(0.1, 2) == 36
    assert len(bump_grid(0.1, 2)) == 36
    with pytest.raises(ValueError):
        bump_grid(0.3, 1)


def test_bump_center_must_be_on_grid():
    oracle = make_bump_function(0.2, 0.1, [0.4])
    assert oracle.query([0.4]) == pytest.approx(0.2)
    assert oracle.query([0.5]) == 0.0
    with pytest.raises(InvalidGridPoint):
        make_bump_function(0.2, 0.1, [0.3])
    with pytest.raises(InvalidGridPoint):
        make_bump_function(0.2, 0.1, [1.2])


def test_bump_supports_are_disjoint():
    eta = 0.25
    scan = grid_points(2, 201)
    alive = np.zeros(len(scan), dtype=int)
    for z in bump_grid(eta, 2):
        alive += make_bump_function(1.0, eta, z).values(scan) > 0.0
    assert alive.max() == 1
    # A bump center lies in its own support only
    assert alive[np.all(np.isclose(scan, 0.5), axis=1)].tolist() == [1]


def test_bump_gradient_matches_finite_differences():
    oracle = make_bump_function(1.0, 0.25, [0.5, 0.5])
    x = np.array([[0.55, 0.6]])
    h = 1e-6
    grad = oracle.gradient(x)[0]
    for j in range(2):
        step = np.zeros(2)
        step[j] = h
        numeric = (oracle.values(x + step)[0] - oracle.values(x - step)[0]) / (2 * h)
        assert grad[j] == pytest.approx(numeric, rel=1e-5)


def test_certificates_pass_for_declared_tags():
    for oracle in (make_quadratic_f0(0.0, 2), make_affine(3, [0.2, -0.5, 0.3]), make_constant(2, 1.0)):
        results = certify(oracle, n_pairs=2000)
        assert results and all(r.passed for r in results)


def test_certificate_flags_violations():
    spike = make_spike(0.1, 1.0, 1.0, [0.5])
    result = certify_holder(spike, SmoothnessTag.holder(0.5, 1.0), n_pairs=4000)
    assert not result.passed
    assert result.max_ratio > 0.5


def test_certificate_rejects_wrong_tag():
    oracle = make_quadratic_f0(0.0, 2)
    with pytest.raises(UnknownSmoothness):
        certify_holder(oracle, SmoothnessTag.grad_holder(2.0, 1.0))
    with pytest.raises(UnknownSmoothness):
        certify_grad_holder(oracle, SmoothnessTag.holder(2.0, 1.0))


def test_smoothness_tag_validation():
    with pytest.raises(ValueError):
        SmoothnessTag.holder(1.0, 1.5)
    with pytest.raises(ValueError):
        SmoothnessTag.grad_holder(0.0, 1.0)
    assert SmoothnessTag.unknown().kind == "unknown"


def test_lookup_function():
    affine = lookup_function("affine", {"d": 2})
    assert affine.query([0.25, 0.5]) == pytest.approx(0.75)
    assert lookup_function("quadratic", {"d": 3, "a": 1.0}).dim == 3
    with pytest.raises(ValueError):
        lookup_function("quadratic", {})
    with pytest.raises(ValueError):
        lookup_function("sine", {"d": 1})
