import numpy as np
import pytest

from polgow.abelian import FinAbelian
from polgow.groups import alternating_group, make_cyclic, parse_group_spec, symmetric_group
from polgow.modules import GModule, augmentation_module, trivial_module


def test_augmentation_z2():
    G = make_cyclic(2)
    aug = augmentation_module(G)
    M = aug.module
    assert M.underlying == FinAbelian((2,))
    # g: c(g) -> c(g g) - c(g) = -c(g)
    assert M.act(1, [1]).tolist() == [(-1) % 2]


def test_augmentation_perfect_group_is_zero():
    aug = augmentation_module(alternating_group(5))
    assert aug.module.rank == 0 and aug.module.order == 1


def test_augmentation_z3_action():
    G = make_cyclic(3)
    aug = augmentation_module(G)
    M = aug.module
    assert M.underlying == FinAbelian((3, 3))
    e = np.array([1])
    c1, c2 = aug.c_tensor(1, e), aug.c_tensor(2, e)
    assert M.act(1, c1).tolist() == M.reduce(c2 - c1).tolist()
    assert M.act(1, c2).tolist() == M.reduce(-c1).tolist()


@pytest.mark.parametrize("spec", ["Z2", "Z4", "Z2xZ2", "S3", "Z6"])
def test_augmentation_is_a_module_and_c_is_a_cocycle(spec):
    G = parse_group_spec(spec)
    aug = augmentation_module(G)
    M = aug.module
    ok, msg = M.check_action()
    assert ok, msg
    # g . c(h) x = c(gh) x - c(g) x for every abelianization generator x
    for j in range(aug.ab.rank):
        x = np.zeros(aug.ab.rank, dtype=np.int64)
        x[j] = 1
        for g in range(G.order):
            for h in range(G.order):
                lhs = M.act(g, aug.c_tensor(h, x))
                rhs = M.reduce(aug.c_tensor(G.mul(g, h), x) - aug.c_tensor(g, x))
                assert lhs.tolist() == rhs.tolist()


def test_augmentation_rank_counts_basis():
    G = symmetric_group(3)
    aug = augmentation_module(G)
    assert aug.module.moduli == (2,) * 5


def test_trivial_module():
    M = trivial_module(make_cyclic(4), FinAbelian((2, 6)))
    assert M.is_trivial_action() and M.order == 12


def test_bad_action_detected():
    G = make_cyclic(2)
    M = GModule(G, (3,), np.array([[[1]], [[2]]]))
    assert M.check_action()[0]  # -1 squared is 1
    M = GModule(G, (5,), np.array([[[1]], [[2]]]))
    ok, msg = M.check_action()
    assert not ok and "multiplicative" in msg
