import numpy as np
import pytest

from ehlcp import (BlockMatrixSet, BoundLadder, BudgetExceeded, DenseMatrix,
                   EhlcpProblem, gen_example53, identity_matrix,
                   oracle_alpha_constants, oracle_solve)
from ehlcp.blockdata import EhlcpSolution
from ehlcp.transform import recover_solution


def test_oracle_example53_unique():
    gen = gen_example53(1.0)
    res = oracle_solve(gen.problem)
    assert len(res.solutions) == 1
    y, sol = res.solutions[0]
    assert np.allclose(y, [-1.0, 1.0], atol=1e-12)
    assert np.allclose(sol.w, [1.0, 0.0], atol=1e-12)
    assert np.allclose(sol.x[0], [0.0, 1.0], atol=1e-12)
    assert res.singular_regions == 0


def test_oracle_scalar_three_regions():
    problem = EhlcpProblem(
        BlockMatrixSet(identity_matrix(1),
                       (DenseMatrix([[2.0]]), identity_matrix(1))),
        np.array([-0.5]), BoundLadder((np.array([1.0]),), 1))
    res = oracle_solve(problem)
    assert len(res.solutions) == 1
    y, sol = res.solutions[0]
    assert y[0] == pytest.approx(0.25, abs=1e-12)
    assert sol.x[0][0] == pytest.approx(0.25, abs=1e-12)


def test_oracle_zero_q_returns_zero():
    gen = gen_example53(1.0)
    problem = EhlcpProblem(gen.problem.blocks, np.zeros(2), gen.problem.ladder)
    res = oracle_solve(problem)
    assert len(res.solutions) == 1
    assert np.allclose(res.solutions[0][0], 0.0, atol=1e-12)


def test_oracle_region_pattern_consistency():
    # the accepted region's active pattern must match the recovered tuple
    problem = EhlcpProblem(
        BlockMatrixSet(identity_matrix(2),
                       (DenseMatrix([[2.0, 0.1], [0.0, 1.5]]),
                        identity_matrix(2))),
        np.array([-0.5, 0.8]), BoundLadder((np.array([1.0, 0.5]),), 2))
    res = oracle_solve(problem)
    for y, sol in res.solutions:
        again = recover_solution(y, problem.ladder)
        assert np.allclose(again.w, sol.w, atol=1e-12)
        for a, b in zip(again.x, sol.x):
            assert np.allclose(a, b, atol=1e-12)


def test_oracle_without_w_property_counts():
    # M = I, H1 = -I: q = 1 admits two solutions, q = -1 admits none
    blocks = BlockMatrixSet(identity_matrix(1), (DenseMatrix([[-1.0]]),))
    ladder = BoundLadder((), 1)
    res = oracle_solve(EhlcpProblem(blocks, np.array([1.0]), ladder))
    assert len(res.solutions) == 2
    res = oracle_solve(EhlcpProblem(blocks, np.array([-1.0]), ladder))
    assert len(res.solutions) == 0


def test_oracle_budget():
    gen = __import__("ehlcp").gen_example51(5, 1.0, 1.0)
    with pytest.raises(BudgetExceeded):
        oracle_solve(gen.problem, budget=100)


def test_oracle_alpha_constants():
    eye = identity_matrix(2)
    under, over = oracle_alpha_constants(BlockMatrixSet(eye, (eye,)))
    assert under == pytest.approx(1.0)
    assert over == pytest.approx(1.0)
    blocks = gen_example53(1.0).problem.blocks
    under, over = oracle_alpha_constants(blocks, "inf")
    assert over == pytest.approx(2.0)  # matches the closed-form bound constant
    assert under == pytest.approx(2.0)
