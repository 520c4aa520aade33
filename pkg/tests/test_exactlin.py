import itertools
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from tfpvkit import build_matrices, load_fixture
from tfpvkit.errors import DegenerateConstantTerm
from tfpvkit.exactlin import (
    RationalMatrix,
    char_poly,
    det,
    extreme_rays,
    hurwitz_stable,
    independent_rows,
    inverse,
    kernel_basis,
    left_kernel_basis,
    rank,
    solve,
)

small_ints = st.integers(-4, 4)


@st.composite
def int_matrices(draw, max_rows=5, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return [[draw(small_ints) for _ in range(c)] for _ in range(r)]


def naive_rank(rows):
    """Rank by plain Gaussian elimination over Fractions, no pivoting tricks."""
    A = [[Fraction(x) for x in r] for r in rows]
    rk, col = 0, 0
    ncols = len(A[0])
    while rk < len(A) and col < ncols:
        piv = next((i for i in range(rk, len(A)) if A[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        A[rk], A[piv] = A[piv], A[rk]
        for i in range(rk + 1, len(A)):
            f = A[i][col] / A[rk][col]
            A[i] = [a - f * b for a, b in zip(A[i], A[rk])]
        rk += 1
        col += 1
    return rk


@given(int_matrices())
def test_rank_matches_naive_and_sympy(rows):
    assert rank(rows) == naive_rank(rows) == sympy.Matrix(rows).rank()


@given(int_matrices())
def test_kernel_basis(rows):
    basis = kernel_basis(rows)
    M = RationalMatrix(rows)
    assert len(basis) == M.ncols - rank(rows)
    for v in basis:
        assert all(x == 0 for x in M @ v)
        assert all(Fraction(x).denominator == 1 for x in v)
    if basis:
        assert rank([list(v) for v in basis]) == len(basis)


@given(int_matrices())
def test_left_kernel(rows):
    M = RationalMatrix(rows)
    for w in left_kernel_basis(rows):
        assert all(x == 0 for x in M.T @ w)


@given(int_matrices())
def test_independent_rows_are_lexicographically_first(rows):
    idx = independent_rows(rows)
    assert len(idx) == rank(rows)
    assert rank([rows[i] for i in idx]) == len(idx)
    # greedy: every skipped row depends on the kept rows before it
    for j in range(len(rows)):
        if j not in idx:
            before = [rows[i] for i in idx if i < j]
            assert rank(before + [rows[j]]) == len(before)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_inverse_solve(rows):
    d = det(rows)
    assert d == sympy.Matrix(rows).det()
    assume(d != 0)
    inv = inverse(rows)
    n = len(rows)
    assert RationalMatrix(rows) @ inv == RationalMatrix.identity(n)
    b = list(range(1, n + 1))
    x = solve(rows, b)
    assert tuple(RationalMatrix(rows) @ x) == tuple(Fraction(v) for v in b)


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_char_poly_matches_sympy(rows):
    t = sympy.Symbol("t")
    expected = sympy.Poly(sympy.Matrix(rows).charpoly(t).as_expr(), t).all_coeffs()[1:]
    assert list(char_poly(rows).coefficients) == [Fraction(int(c)) for c in expected]


def test_char_poly_printing_and_division():
    p = char_poly([[0, 0], [0, -3]])
    assert str(p) == "t^2 + 3*t"
    assert p.trailing_zeros() == 1
    assert str(p.divide_tau(1)) == "t + 3"
    with pytest.raises(ValueError):
        p.divide_tau(2)


@settings(max_examples=200)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=5))
def test_hurwitz_agrees_with_roots(coeffs):
    assume(coeffs[-1] != 0)
    roots = np.roots([1, *coeffs])
    margin = np.max(roots.real)
    assume(abs(margin) > 1e-6)
    assert hurwitz_stable(coeffs).stable == bool(margin < 0)


def test_hurwitz_zero_constant_term():
    with pytest.raises(DegenerateConstantTerm):
        hurwitz_stable([1, 0])


def brute_force_rays(N):
    """Extreme rays via supports: a support is extreme iff the columns on it have nullity one
    and the kernel vector there can be taken strictly positive."""
    N = sympy.Matrix(N)
    m = N.shape[1]
    rays = set()
    for size in range(1, m + 1):
        for S in itertools.combinations(range(m), size):
            ns = N[:, list(S)].nullspace()
            if len(ns) != 1:
                continue
            v = list(ns[0])
            if all(x > 0 for x in v) or all(x < 0 for x in v):
                v = [abs(x) for x in v]
                den = sympy.ilcm(1, *[sympy.fraction(x)[1] for x in v])
                ints = [int(x * den) for x in v]
                g = sympy.igcd(0, *ints)
                full = [0] * m
                for j, x in zip(S, ints):
                    full[j] = x // g
                rays.add(tuple(full))
    return rays


@settings(max_examples=60, deadline=None)
@given(int_matrices(max_rows=3, max_cols=6))
def test_extreme_rays_match_sign_support_oracle(rows):
    assert set(extreme_rays(rows)) == brute_force_rays(rows)


@pytest.mark.parametrize(
    "name, expected",
    [
        ("futile", {(1, 1, 0, 0, 0, 0), (1, 0, 1, 1, 0, 1), (0, 0, 0, 1, 1, 0)}),
        ("mm_rev", {(1, 1, 0, 0), (0, 0, 1, 1)}),
    ],
)
def test_extreme_rays_of_known_networks(name, expected):
    N = build_matrices(load_fixture(name)).N
    assert set(extreme_rays(N)) == expected == brute_force_rays(N.tolist())
