import itertools
from math import gcd

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from polgow.abelian import (
    FinAbelian,
    factorize,
    lattice_basis,
    smith_invariants,
    smith_normal_form,
    solve_linear_mod,
    sym2,
    sym2_mul,
    tensor,
    xgcd,
)
from polgow.groups import abelian_structure
from polgow.pol2 import sym2_cocycle, twisted_product


def _check_snf(M):
    U, D, V = smith_normal_form(M)
    M = np.asarray(M, dtype=object)
    assert (U.dot(M).dot(V) == D).all()
    assert abs(sympy.Matrix(U.tolist()).det()) == 1
    assert abs(sympy.Matrix(V.tolist()).det()) == 1
    diag = [int(D[i, i]) for i in range(min(D.shape))]
    off = D.copy()
    for i in range(min(D.shape)):
        off[i, i] = 0
    assert not off.any()
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b % a == 0) if a else b == 0
    return diag


def test_snf_examples():
    assert _check_snf([[1, 0], [0, 1]]) == [1, 1]
    assert _check_snf([[6]]) == [6]
    assert _check_snf([[2, 4], [6, 8]]) == [2, 4]


def test_snf_zero_and_rectangular():
    assert _check_snf([[0, 0, 0]]) == [0]
    assert _check_snf([[2, 0, 0], [0, 3, 0]]) == [1, 6]


int_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-30, 30), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=150, deadline=None)
@given(int_matrices)
def test_snf_against_sympy(M):
    diag = _check_snf(M)
    ref = sympy_snf(sympy.Matrix(M))
    ref_diag = [abs(int(ref[i, i])) for i in range(min(ref.shape))]
    assert diag == ref_diag
    assert smith_invariants(M) == diag


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert g == gcd(a, b)
    assert a * x + b * y == g


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}


def test_solve_linear_mod_examples():
    assert solve_linear_mod([[0]], 4).group == FinAbelian((4,))
    sol = solve_linear_mod([[2]], 4)
    assert sol.group == FinAbelian((2,))
    assert sorted(sol.elements()) == [(0,), (2,)]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=3))
def test_solve_linear_mod_by_enumeration(N, A):
    sol = solve_linear_mod(A, N, n=3)
    brute = {
        x for x in itertools.product(range(N), repeat=3)
        if all(sum(a * b for a, b in zip(row, x)) % N == 0 for row in A)
    }
    assert sol.count == len(brute)
    assert set(sol.elements()) == brute


def test_lattice_basis_row_space():
    B = lattice_basis([[2, 4], [6, 8]], 2)
    assert smith_invariants(B) == [2, 4]


def test_finabelian_normal_form_and_str():
    A = FinAbelian.from_cyclic([4, 6])
    assert A.invariant_factors == (2, 12)
    assert A.order == 24
    assert A.primary_components() == {2: [1, 2], 3: [1]}
    assert str(FinAbelian(())) == "0"
    assert FinAbelian.from_json(A.to_json()) == A


def test_sym2_examples():
    assert sym2(FinAbelian((2, 4)))[0] == FinAbelian.from_cyclic([2, 4, 2])
    for n in (2, 5, 12):
        assert sym2(FinAbelian((n,)))[0] == FinAbelian((n,))
    assert sym2(FinAbelian((2, 2)))[0] == FinAbelian((2, 2, 2))


def test_sym2_mul():
    A = FinAbelian((2,))
    assert sym2_mul(A, A.element([1]), A.element([1])).coords == (1,)
    B = FinAbelian((3, 3))
    S, slots = sym2(B)
    prod = sym2_mul(B, B.element([1, 0]), B.element([0, 1]))
    expect = [0] * S.rank
    expect[slots[(0, 1)]] = 1
    assert list(prod.coords) == expect


def test_sym2_mul_bilinear_symmetric():
    A = FinAbelian((2, 4))
    els = list(A.elements())
    for x, y, z in itertools.product(els, repeat=3):
        assert sym2_mul(A, x, y) == sym2_mul(A, y, x)
        assert sym2_mul(A, x + y, z) == sym2_mul(A, x, z) + sym2_mul(A, y, z)


def test_tensor():
    assert tensor(FinAbelian((2,)), FinAbelian((3,))).order == 1
    assert tensor(FinAbelian((4,)), FinAbelian((2,))) == FinAbelian((2,))
    assert tensor(FinAbelian((2, 2)), FinAbelian((4,))) == FinAbelian((2, 2))


@pytest.mark.parametrize("facs", [(3,), (5,), (9,), (3, 9)])
def test_symmetric_cocycle_splits_for_odd_groups(facs):
    # on odd groups gh is the coboundary of g^2/2, so the extension splits
    A = FinAbelian(facs)
    _, M, sigma = sym2_cocycle(A)
    P = twisted_product(M, sigma, max_order=None)
    S, _ = sym2(A)
    got, _ = abelian_structure(P.realized)
    assert got == FinAbelian.from_cyclic(S.invariant_factors + A.invariant_factors)
