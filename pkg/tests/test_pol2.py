import itertools

import numpy as np
import pytest

from polgow.abelian import FinAbelian
from polgow.groups import (
    GroupSizeError,
    GroupTable,
    abelian_structure,
    abelianization,
    alternating_group,
    brute_isomorphic,
    fingerprint,
    make_cyclic,
    parse_group_spec,
)
from polgow.modules import augmentation_module, trivial_module
from polgow.pol2 import (
    classify_quad,
    classify_quad_p,
    pol2,
    pol2_abelianization,
    pol2_cocycle,
    pol2_order,
    pol2_quotient,
    sym2_cocycle,
    twisted_orders_check,
    twisted_product,
    validate_cocycle,
    zero_cocycle,
)
from polgow.polymaps import GroupMap, quad_relation_check


def test_cocycle_validation():
    aug = augmentation_module(make_cyclic(3))
    assert validate_cocycle(zero_cocycle(aug.module)) == (True, None)
    psi = pol2_cocycle(aug)
    assert validate_cocycle(psi) == (True, None)
    bad = psi.with_entry(1, 2, psi(1, 2) + 1)
    ok, triple = validate_cocycle(bad)
    assert not ok
    # the corrupted entry appears in the reported identity
    a, b, c = triple
    assert (1, 2) in {(b, c), ((a + b) % 3, c), (a, (b + c) % 3), (a, b)}
    with pytest.raises(ValueError, match="2-cocycle"):
        twisted_product(aug.module, bad)


def test_trivial_module_semidirect_is_the_group():
    G = parse_group_spec("S3")
    M = trivial_module(G, FinAbelian(()))
    P = twisted_product(M, zero_cocycle(M))
    assert fingerprint(P.realized) == fingerprint(G)


def test_symmetric_extension_of_z2_is_z4():
    _, M, sigma = sym2_cocycle(FinAbelian((2,)))
    P = twisted_product(M, sigma)
    assert brute_isomorphic(P.realized, make_cyclic(4))
    assert P.element_order(P.encode([0], 1)) == 4


def test_lazy_arithmetic_matches_realized_table():
    P, _ = pol2(make_cyclic(4))
    R = P.realized
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, P.order, size=(2, 500))
    assert (P.mul_many(a, b) == R.table[a, b]).all()
    assert (P.inv_many(a) == R.inverse[a]).all()


def test_encode_decode_round_trip():
    P, _ = pol2(parse_group_spec("Z2xZ2"))
    idx = np.arange(P.order)
    X, g = P.decode_many(idx)
    assert (P.encode_many(X, g) == idx).all()
    with pytest.raises(ValueError):
        P.encode(P.module.zero(), P.group.order)


def test_pol2_small_groups():
    P2, _ = pol2(make_cyclic(2))
    assert brute_isomorphic(P2.realized, make_cyclic(4))
    for n in (2, 3, 4):
        assert pol2_order(make_cyclic(n)) == n**n
        assert pol2(make_cyclic(n))[0].order == n**n
    A5 = alternating_group(5)
    assert fingerprint(pol2(A5)[0].realized) == fingerprint(A5)


def test_pol2_z3_fingerprint():
    # measured: Z/9 twisted by Z/3, not the exponent-3 Heisenberg group
    fp = fingerprint(pol2(make_cyclic(3))[0].realized)
    assert (fp.order, fp.is_abelian, fp.center_order, fp.abelian_invariants) == (27, False, 3, (3, 3))
    assert fp.exponent == 9
    assert dict(fp.element_order_histogram) == {1: 1, 3: 8, 9: 18}


def _z9_by_z3() -> GroupTable:
    # (a, b)(c, d) = (a + 4^b c, b + d), 4 has order 3 mod 9
    els = [(a, b) for b in range(3) for a in range(9)]
    index = {x: i for i, x in enumerate(els)}
    table = [[index[((a + pow(4, b, 9) * c) % 9, (b + d) % 3)] for c, d in els] for a, b in els]
    return GroupTable.from_table(np.array(table))


def test_z3_has_a_quadratic_map_with_image_of_order_nine():
    # independent of the Pol2 construction: a unital quadratic map Z/3 -> H with
    # phi(1) of order 9 forces an element of order 9 in Pol2(Z/3)
    G, H = make_cyclic(3), _z9_by_z3()
    found = None
    for x, y in itertools.product(range(H.order), repeat=2):
        if H.element_order(x) != 9:
            continue
        phi = GroupMap(G, H, [H.identity, x, y])
        if quad_relation_check(phi)[0]:
            found = phi
            break
    assert found is not None


@pytest.mark.parametrize("spec", ["Z2", "Z3", "Z4", "Z2xZ2", "S3"])
def test_universal_map(spec):
    _, uq = pol2(parse_group_spec(spec))
    assert uq.check_quad_relation() == (True, None)
    assert uq.check_beta_formula() == (True, None)


def test_pol2_cap():
    with pytest.raises(GroupSizeError):
        pol2(parse_group_spec("Z2xZ4"))


@pytest.mark.parametrize("facs", [(2,), (3,), (4,), (2, 2)])
def test_abelianization_matches_symmetric_extension(facs):
    A = FinAbelian(facs)
    from polgow.groups import from_abelian

    P, _ = pol2(from_abelian(A))
    got = abelianization(P.realized)[0]
    assert got == abelian_structure(pol2_abelianization(A).realized)[0]
    assert got == classify_quad(A)


def test_presentation_abelianization_large():
    from polgow.groups import from_abelian

    A = FinAbelian((2, 4))
    P, _ = pol2(from_abelian(A), max_order=None)
    assert P.order == 2**24
    assert P.abelian_invariants() == abelian_structure(pol2_abelianization(A).realized)[0]


def test_presentation_route_agrees_with_table_route():
    for spec in ("Z3", "Z4", "S3"):
        P, _ = pol2(parse_group_spec(spec))
        assert P.abelian_invariants() == abelianization(P.realized)[0]


def test_pol2_abelianization_examples():
    assert abelian_structure(pol2_abelianization(FinAbelian((2,))).realized)[0] == FinAbelian((4,))
    B = abelian_structure(pol2_abelianization(FinAbelian((2, 2))).realized)[0]
    assert B == FinAbelian((2, 4, 4)) and B.order == 32
    assert abelian_structure(pol2_abelianization(FinAbelian((3,))).realized)[0] == FinAbelian((3, 3))


def test_pol2_quotient():
    for n, m, S, sigma in ((4, 2, [1, 3], [2]), (6, 3, [1, 5], [3])):
        P, uq = pol2(make_cyclic(n))
        Q = pol2_quotient(P, uq, S, sigma)
        assert fingerprint(Q) == fingerprint(pol2(make_cyclic(m))[0].realized)
    P, uq = pol2(make_cyclic(4))
    assert fingerprint(pol2_quotient(P, uq, [1], [0])) == fingerprint(P.realized)


def test_pol2_quotient_lazy_route():
    from polgow import pol2 as mod

    P, uq = pol2(make_cyclic(4))
    seeds = [int(uq.map[2])] + [P.mul(int(uq.map[(2 + s) % 4]), P.inv(int(uq.map[s]))) for s in (1, 3)]
    Q = mod.lazy_quotient(P, mod.lazy_normal_closure(P, seeds))
    assert fingerprint(Q) == fingerprint(pol2_quotient(P, uq, [1, 3], [2]))


def test_classify_quad_examples():
    assert classify_quad_p(2, [1]) == FinAbelian((4,))
    assert classify_quad_p(2, [2]) == FinAbelian((2, 8))
    C = classify_quad_p(3, [1, 1])
    assert C == FinAbelian((3,) * 5) and C.order == 243
    assert classify_quad(FinAbelian((6,))).invariant_factors == (3, 12)
    assert classify_quad(FinAbelian(())).order == 1
    assert classify_quad(FinAbelian((4,))) == FinAbelian((2, 8))
    with pytest.raises(ValueError):
        classify_quad_p(4, [1])


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_twisted_orders(n):
    r = twisted_orders_check(n)
    assert r["order_0g"] == 2 ** (n + 1)
    assert r["order_2g2_2g"] == 2 ** (n - 1)
    assert r["intersection"] == 1
