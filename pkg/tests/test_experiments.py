import math

import numpy as np
import pytest

from polgow.experiments import (
    FROZEN_INVERSE,
    INVERSE_SEED,
    MetricGroupSpec,
    character_rep,
    defect_ratio,
    hs_norm,
    icosahedral_rep,
    perm_matrices,
    perturb,
    run_inverse,
    run_stability,
    uniform_defect,
)
from polgow.gowers import MatFunc, constant, random_unitary
from polgow.groups import alternating_group, make_cyclic, perm_group, perm_from_cycles, symmetric_group
from polgow.polymaps import GroupMap, PhaseMap, homomorphisms


def test_icosahedral_rep_is_a_real_orthogonal_homomorphism():
    G = alternating_group(5)
    rho = icosahedral_rep(G)
    assert np.abs(rho.values.imag).max() == 0
    eye = np.eye(3)
    assert max(np.abs(m @ m.T - eye).max() for m in rho.values.real) < 1e-12
    for a in range(0, 60, 7):
        for b in range(60):
            assert np.allclose(rho(G.mul(a, b)), rho(a) @ rho(b), atol=1e-12)


def test_perm_matrices_are_a_homomorphism():
    G = alternating_group(5)
    rho = perm_matrices(G, 5)
    for a in range(60):
        for b in range(0, 60, 11):
            assert np.array_equal(rho(G.mul(a, b)), rho(a) @ rho(b))


def test_defects_of_exact_maps():
    Z4 = make_cyclic(4)
    for hom in homomorphisms(make_cyclic(6), make_cyclic(3)):
        assert uniform_defect(hom, 1) == 0
    q = PhaseMap(Z4, 8, [0, 1, 4, 1]).as_group_map()
    assert uniform_defect(q, 2) == 0 and uniform_defect(q, 1) == 1
    f = MatFunc(Z4, PhaseMap(Z4, 8, [0, 1, 4, 1]).phases()[:, None, None])
    assert uniform_defect(f, 2) < 1e-12


def test_perturbed_character_defect():
    Z6 = make_cyclic(6)
    chi = character_rep(Z6)
    rho = MatFunc(Z6, np.stack([np.diag([chi(g)[0, 0], np.conj(chi(g)[0, 0])]) for g in range(6)]))
    eps = uniform_defect(perturb(rho, 0.01, 0), 1)
    assert 0 < eps < 0.05


def test_defect_is_conjugation_invariant():
    G = alternating_group(5)
    rho = perturb(icosahedral_rep(G), 0.02, 1)
    u = random_unitary(3, np.random.default_rng(2))
    conj = MatFunc(G, u @ rho.values @ u.conj().T)
    for d in (1, 2):
        assert abs(uniform_defect(rho, d) - uniform_defect(conj, d)) < 1e-12


def test_run_stability():
    G = alternating_group(5)
    H = MetricGroupSpec("unitary_hs", 3)
    rep = run_stability(G, H, icosahedral_rep(G), 2)
    assert rep.ratio == "exact" and rep.commutator_width == 1
    trivial = run_stability(G, MetricGroupSpec("unitary_hs", 1), constant(G, np.eye(1)), 2)
    assert trivial.epsilon_d == trivial.epsilon_1 == 0 and trivial.ratio == "exact"
    noisy = run_stability(G, H, perturb(icosahedral_rep(G), 0.01, 3), 2, mode="sampled", seed=4, trials=3000)
    assert isinstance(noisy.ratio, float) and math.isfinite(noisy.ratio)
    assert noisy.to_json()["seed"] == 4
    with pytest.raises(ValueError):
        run_stability(symmetric_group(3), H, constant(symmetric_group(3), np.eye(3)), 2)


def test_run_stability_finite_target():
    G = alternating_group(5)
    rep = run_stability(G, MetricGroupSpec("finite_discrete"), GroupMap(G, G, np.arange(60)), 2)
    assert rep.epsilon_1 == 0 and rep.ratio == "exact"


def test_defect_ratio():
    assert defect_ratio(0.0, 0.0) == "exact"
    assert defect_ratio(0.1, 0.0) == math.inf
    assert defect_ratio(0.1, 0.2) == 0.5
    assert defect_ratio(1e-15, 1e-16) == "exact"


def test_perturbation_scale():
    G = make_cyclic(5)
    rho = constant(G, np.eye(3))
    d = 1e-3
    out = perturb(rho, d, 0)
    dist = hs_norm(out.values - np.eye(3))
    assert np.allclose(dist, d, rtol=1e-2)
    assert out.is_unitary()


def test_run_inverse_zero_delta():
    G = alternating_group(5)
    for rho in (icosahedral_rep(G), perm_matrices(G, 5)):
        rep = run_inverse(G, rho, 0.0, 3, 0)
        assert all(abs(v - 1) < 1e-9 for v in rep.norm_k.values())
        assert rep.distance_to_hom < 1e-9


def test_z2_sign_rep_has_norm_one_but_is_not_perfect():
    from polgow.gowers import gowers_norm_exact

    Z2 = perm_group([perm_from_cycles(2, (0, 1))], 2)
    sign = character_rep(Z2)
    assert all(abs(gowers_norm_exact(sign, k) - 1) < 1e-12 for k in (2, 3))
    with pytest.raises(ValueError):
        run_inverse(Z2, sign, 0.0, 2, 0)


def test_calibrated_inverse_run_reproduces():
    G = alternating_group(5)
    rep = run_inverse(G, icosahedral_rep(G), 0.05, 3, INVERSE_SEED)
    assert abs(rep.norm_k[2] - FROZEN_INVERSE["norm_2"]) < 1e-6
    assert abs(rep.norm_k[3] - FROZEN_INVERSE["norm_3"]) < 1e-6
    assert abs(rep.distance_to_hom - FROZEN_INVERSE["distance"]) < 1e-6
    assert rep.note == "witness-based, not optimal"
