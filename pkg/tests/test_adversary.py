import numpy as np
import pytest

from adversary.lower_bound import (BAAlgorithm, ConstantMembership, EmptySetAlgorithm, FullCubeAlgorithm,
                                   bump_scale, bump_scale_gradholder, bump_scale_holder, find_unqueried_center,
                                   grid_size, run_indistinguishability)
from models.exceptions import AccuracyTooLarge, NondeterministicAlgorithm, UnknownSmoothness
from models.results import DefeatBranch, Verdict
from oracles.oracle import SmoothnessTag, certify_grad_holder, certify_holder
from oracles.test_functions import bump_grid, make_bump_function
from strategies.bag_strategy import bag_strategy
from strategies.bah_strategy import bah_strategy

HOLDER_12 = SmoothnessTag.holder(12.0, 1.0)
GRAD_132 = SmoothnessTag.grad_holder(132.0, 1.0)


def test_bump_scales():
    assert bump_scale_holder(0.1, 1, 12.0, 1.0) == pytest.approx(0.05)
    assert grid_size(bump_scale_holder(0.1, 1, 12.0, 1.0), 1) == 11
    assert bump_scale_gradholder(0.01, 1, 132.0, 1.0) == pytest.approx(0.1)
    assert grid_size(bump_scale(GRAD_132, 0.01, 1), 1) == 6


def test_bump_scale_limits():
    with pytest.raises(AccuracyTooLarge):
        bump_scale_holder(1.0, 1, 1.0, 1.0)
    with pytest.raises(AccuracyTooLarge):
        bump_scale_holder(1.0, 1, 12.0, 1.0)
    with pytest.raises(AccuracyTooLarge):
        bump_scale_gradholder(0.1, 1, 132.0, 1.0)
    with pytest.raises(UnknownSmoothness):
        bump_scale(SmoothnessTag.unknown(), 0.1, 1)


def test_find_unqueried_center():
    grid = bump_grid(0.1, 1)
    queries = np.array([[0.0], [0.5], [1.0]])
    assert find_unqueried_center(grid, queries, 0.1).tolist() == pytest.approx([0.2])
    assert find_unqueried_center(grid, np.empty((0, 1)), 0.1).tolist() == [0.0]
    assert find_unqueried_center(grid, grid, 0.1) is None


def test_holder_strategy_defeated_under_budget():
    report = run_indistinguishability(BAAlgorithm(bah_strategy(12.0, 1.0)), 0.1, 1, HOLDER_12)
    assert report.verdict == Verdict.ALGORITHM_DEFEATED
    assert report.budget == 10 and report.grid_size == 11
    assert [float(x[0]) for x in report.queries] == [0.25, 0.75, 0.125, 0.375, 0.625, 0.875,
                                                     0.0625, 0.1875, 0.3125, 0.4375]
    assert report.unqueried_center.tolist() == [0.0]
    assert report.branch == DefeatBranch.EXCESS_BUMP
    assert report.failing_value == pytest.approx(0.2)
    assert report.witness_checked
    assert "verdict: AlgorithmDefeated" in report.to_text()


def test_gradient_holder_strategy_defeated_under_budget():
    report = run_indistinguishability(BAAlgorithm(bag_strategy(132.0, 1.0, 1)), 0.01, 1, GRAD_132)
    assert report.verdict == Verdict.ALGORITHM_DEFEATED
    assert report.budget == 5 and report.grid_size == 6
    assert [float(x[0]) for x in report.queries] == [0.0, 0.5, 0.5, 1.0, 0.0]
    assert report.unqueried_center.tolist() == pytest.approx([0.2])
    assert report.branch == DefeatBranch.EXCESS_BUMP
    assert report.witness_checked


def test_trivial_algorithms_defeated():
    full = run_indistinguishability(FullCubeAlgorithm(), 0.1, 1, HOLDER_12)
    assert full.branch == DefeatBranch.EXCESS_BUMP
    assert full.unqueried_center.tolist() == [0.0]
    assert full.witness_checked
    empty = run_indistinguishability(EmptySetAlgorithm(), 0.1, 2, HOLDER_12)
    assert empty.branch == DefeatBranch.CONTAINMENT_ZERO
    assert empty.failing_value == 0.0
    assert empty.witness_checked


SHIPPED_ALGORITHMS = [
    BAAlgorithm(bah_strategy(12.0, 1.0)),
    BAAlgorithm(bag_strategy(132.0, 1.0, 1)),
    FullCubeAlgorithm(),
    EmptySetAlgorithm(),
]


@pytest.mark.parametrize("algorithm", SHIPPED_ALGORITHMS, ids=lambda a: a.name)
@pytest.mark.parametrize("tag, epsilon", [(HOLDER_12, 0.1), (GRAD_132, 0.01)], ids=["holder", "grad_holder"])
def test_every_shipped_algorithm_defeated_one_query_short(algorithm, tag, epsilon):
    report = run_indistinguishability(algorithm, epsilon, 1, tag)
    assert report.budget == report.grid_size - 1
    assert report.verdict == Verdict.ALGORITHM_DEFEATED
    assert report.branch is not None
    assert report.witness_checked


def test_budget_covering_every_cell():
    report = run_indistinguishability(FullCubeAlgorithm(), 0.1, 1, HOLDER_12, budget=11)
    assert report.verdict == Verdict.BUDGET_SUFFICIENT
    assert report.branch is None
    assert "witness_z: none" in report.to_text()


class _DriftingAlgorithm:
    """Queries a different point on every run"""
    name = "drifting"

    def __init__(self):
        self.runs = 0

    def run(self, oracle, level, budget):
        self.runs += 1
        oracle.query([0.5 + 0.1 * self.runs])
        return ConstantMembership(True)


class _GreedyAlgorithm:
    name = "greedy"

    def run(self, oracle, level, budget):
        for _ in range(budget + 1):
            oracle.query([0.5])
        return ConstantMembership(True)


def test_nondeterminism_detected():
    with pytest.raises(NondeterministicAlgorithm):
        run_indistinguishability(_DriftingAlgorithm(), 0.1, 1, HOLDER_12)


def test_over_budget_algorithm_rejected():
    with pytest.raises(ValueError):
        run_indistinguishability(_GreedyAlgorithm(), 0.1, 1, HOLDER_12)


def test_bumps_stay_in_their_class():
    eta = bump_scale(HOLDER_12, 0.1, 1)
    bump = make_bump_function(0.2, eta, [0.5], smoothness=(HOLDER_12,))
    assert certify_holder(bump, HOLDER_12, n_pairs=10_000).passed

    eta = bump_scale(GRAD_132, 0.01, 1)
    bump = make_bump_function(0.02, eta, [0.4], smoothness=(GRAD_132,))
    assert certify_grad_holder(bump, GRAD_132, n_pairs=10_000).passed
