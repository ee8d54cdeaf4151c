from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from gmak.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp, strict_sign_feasible
from gmak.rational import RationalMatrix, determinant, nullspace, primitive_integer, rank, rref, solve


def test_rref_and_rank():
    red, piv = rref([[2, 4, 6], [1, 2, 4]])
    assert piv == [0, 2]
    assert red == [[1, 2, 0], [0, 0, 1]]
    assert rank([[1, 1], [2, 2]]) == 1


def test_nullspace_exact():
    M = [[1, 2, 3], [4, 5, 6]]
    (k,) = nullspace(M, 3)
    assert k == [1, -2, 1]
    assert RationalMatrix(M) @ k == (0, 0)


def test_solve_and_inconsistency():
    assert solve([[1, 1], [1, -1]], [3, 1], 2) == [2, 1]
    assert solve([[1, 1], [2, 2]], [1, 3], 2) is None


def test_determinant_against_numpy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        M = rng.integers(-3, 4, (4, 4))
        assert float(determinant(M.tolist())) == pytest.approx(np.linalg.det(M), abs=1e-9)


def test_primitive_integer():
    assert primitive_integer([Fraction(1, 2), Fraction(-3, 4)]) == [2, -3]
    assert primitive_integer([0, 0]) == [0, 0]


def test_matrix_products_and_transpose():
    A = RationalMatrix([[1, "1/2"], [0, 3]])
    assert (A @ A.T).entries == ((Fraction(5, 4), Fraction(3, 2)), (Fraction(3, 2), Fraction(9)))
    with pytest.raises(AttributeError):
        A.rows = 4


def test_lp_optimum():
    # min x + y  s.t. x >= 1, y >= 2, x + y >= 4
    res = solve_lp([1, 1], [[-1, 0], [0, -1], [-1, -1]], [-1, -2, -4])
    assert res.status == OPTIMAL
    assert res.objective == 4


def test_lp_infeasible_and_unbounded():
    assert solve_lp(None, [[1], [-1]], [-1, -1]).status == INFEASIBLE
    assert solve_lp([-1], [[-1]], [0]).status == UNBOUNDED
    assert solve_lp(None, A_eq=[[1, 1]], b_eq=[2]).status == OPTIMAL


def test_strict_feasibility_matches_float_lp():
    rng = np.random.default_rng(3)
    for _ in range(150):
        n, d = int(rng.integers(2, 6)), int(rng.integers(1, 4))
        rows = rng.integers(-2, 3, (n, d)).tolist()
        signs = rng.integers(-1, 2, n).tolist()
        exact = strict_sign_feasible(rows, signs, d)
        A_ub, b_ub, A_eq = [], [], []
        for r, s in zip(rows, signs):
            if s > 0:
                A_ub.append([-v for v in r]); b_ub.append(-1)
            elif s < 0:
                A_ub.append(r); b_ub.append(-1)
            else:
                A_eq.append(r)
        ref = linprog(
            np.zeros(d), A_ub=A_ub or None, b_ub=b_ub or None,
            A_eq=A_eq or None, b_eq=[0] * len(A_eq) or None, bounds=[(None, None)] * d,
        )
        assert (exact is not None) == (ref.status == 0)
        if exact is not None:
            got = [int(np.sign(float(sum(Fraction(a) * b for a, b in zip(r, exact))))) for r in rows]
            assert got == signs
