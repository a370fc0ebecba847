"""Desk-scale stability and inverse experiments on perfect groups, and the verification suite."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from .groups import (
    GroupTable,
    alternating_group,
    closure,
    commutator_width,
    find_isomorphism,
    is_perfect,
    table_from_elements,
)
from .gowers import MatFunc, _adj, _cube_indices, gowers_norm_exact, hs_distance, nearest_unital
from .polymaps import BudgetError, GroupMap

EXHAUSTIVE_DEFECT_CAP = 10**7


@dataclass(frozen=True)
class MetricGroupSpec:
    """``unitary_hs``: normalized Hilbert-Schmidt distance on ``U(dim)``; ``finite_discrete``: 0/1 metric."""

    kind: str
    dim: int | None = None

    def __post_init__(self):
        if self.kind not in ("unitary_hs", "finite_discrete"):
            raise ValueError(f"unknown metric group kind {self.kind!r}")


def hs_norm(a: np.ndarray) -> np.ndarray:
    """Normalized Hilbert-Schmidt norm over the last two axes."""
    return np.sqrt((np.abs(a) ** 2).sum(axis=(-2, -1)) / a.shape[-1])


# ---------------------------------------------------------------------------
# defects
# ---------------------------------------------------------------------------


def _difference_at_identity_unitary(f: MatFunc, tuples: np.ndarray) -> np.ndarray:
    """``(Δ_{g_1..g_m} f)(1)`` for each row, as matrices.

    The iterated difference at ``g_0`` is the alternating-adjoint product of
    ``f`` along the cube words; tuples range over all of ``G^m`` so the
    labeling of the arguments does not matter for the maximum.
    """
    G = f.group
    m = tuples.shape[1]
    idx = _cube_indices(G, m, tuples)
    prod = None
    for i in range(idx.shape[1]):
        x = f.values[idx[:, i]]
        if i % 2 == 1:
            x = _adj(x)
        prod = x if prod is None else prod @ x
    return prod


def _difference_at_identity_table(phi: GroupMap, tuples: np.ndarray) -> np.ndarray:
    G, T = phi.source, phi.target
    vals = np.broadcast_to(phi.values, (tuples.shape[0], G.order)).copy()
    for j in range(tuples.shape[1] - 1, -1, -1):
        k = tuples[:, j]
        shifted = np.take_along_axis(vals, G.table[k], axis=1)
        vals = T.table[shifted, T.inverse[vals]]
    return vals[:, G.identity]


def uniform_defect(phi, d: int, mode: str = "exhaustive", seed: int = 0, trials: int = 20_000, chunk: int = 50_000) -> float:
    """``max ∂((Δ_{g_1..g_{d+1}} φ)(1), 1)`` over all tuples or over seeded random ones."""
    G = phi.group if isinstance(phi, MatFunc) else phi.source
    m = d + 1
    if mode == "exhaustive":
        if G.order**m > EXHAUSTIVE_DEFECT_CAP:
            raise BudgetError(f"exhaustive defect needs {G.order ** m} tuples, above {EXHAUSTIVE_DEFECT_CAP}")
        total = G.order**m
        source = lambda s, e: np.stack(np.unravel_index(np.arange(s, e), (G.order,) * m), axis=1)  # noqa: E731
    elif mode == "sampled":
        total = trials
        all_t = np.random.default_rng(seed).integers(0, G.order, size=(trials, m))
        source = lambda s, e: all_t[s:e]  # noqa: E731
    else:
        raise ValueError(f"unknown mode {mode!r}")
    worst = 0.0
    for s in range(0, total, chunk):
        t = source(s, min(total, s + chunk))
        if isinstance(phi, MatFunc):
            diff = _difference_at_identity_unitary(phi, t) - np.eye(phi.dim)
            worst = max(worst, float(hs_norm(diff).max(initial=0.0)))
        else:
            worst = max(worst, float((_difference_at_identity_table(phi, t) != phi.target.identity).max(initial=0)))
    return worst


@dataclass(frozen=True)
class DefectReport:
    degree: int
    epsilon_d: float
    epsilon_1: float
    ratio: float | str
    commutator_width: int
    mode: str
    seed: int | None
    samples: int | None

    def to_json(self) -> dict:
        out = asdict(self)
        if isinstance(self.ratio, float) and math.isinf(self.ratio):
            out["ratio"] = "inf"
        return out


ZERO_DEFECT_TOL = 1e-12


def defect_ratio(eps_1: float, eps_d: float, zero_tol: float = ZERO_DEFECT_TOL) -> float | str:
    """``eps_1 / eps_d``; defects at or below ``zero_tol`` count as floating-point zeros."""
    if eps_d <= zero_tol:
        return "exact" if eps_1 <= zero_tol else math.inf
    return eps_1 / eps_d


def run_stability(
    G: GroupTable,
    H: MetricGroupSpec,
    phi,
    d: int,
    mode: str = "exhaustive",
    seed: int = 0,
    trials: int = 20_000,
    zero_tol: float = ZERO_DEFECT_TOL,
) -> DefectReport:
    """Measure the degree-``d`` defect and the homomorphism defect of ``phi`` on a perfect group."""
    if not is_perfect(G):
        raise ValueError("stability experiments need a perfect group")
    if H.kind == "unitary_hs" and not isinstance(phi, MatFunc):
        raise TypeError("unitary target needs a MatFunc")
    width = commutator_width(G)
    eps_d = uniform_defect(phi, d, mode, seed, trials)
    eps_1 = uniform_defect(phi, 1, mode, seed, trials)
    sampled = mode == "sampled"
    return DefectReport(d, eps_d, eps_1, defect_ratio(eps_1, eps_d, zero_tol), width, mode, seed if sampled else None, trials if sampled else None)


# ---------------------------------------------------------------------------
# representations and perturbations
# ---------------------------------------------------------------------------


def rotation(axis: Sequence[float], angle: float) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    K = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + math.sin(angle) * K + (1 - math.cos(angle)) * K @ K


def matrix_group_closure(gens: Sequence[np.ndarray], decimals: int = 8, cap: int = 10_000) -> list[np.ndarray]:
    """Finite matrix group generated by ``gens``; elements hashed by rounded entries.

    Products are always formed from stored matrices, so rounding error does
    not accumulate along words.
    """
    store: dict[tuple, np.ndarray] = {}

    def key(m):
        return tuple(np.round(m.real, decimals).ravel() + 0.0) + tuple(np.round(m.imag, decimals).ravel() + 0.0)

    def mul(a, b):
        p = store[a] @ store[b]
        k = key(p)
        store.setdefault(k, p)
        return k

    eye = np.eye(gens[0].shape[0], dtype=np.complex128)
    ids = [key(eye)]
    store[ids[0]] = eye
    gkeys = []
    for g in gens:
        k = key(np.asarray(g, dtype=np.complex128))
        store.setdefault(k, np.asarray(g, dtype=np.complex128))
        gkeys.append(k)
    elements = closure(gkeys, mul, ids[0], cap)
    return [store[k] for k in elements]


def matrix_rep_on(G: GroupTable, mats: Sequence[np.ndarray]) -> MatFunc:
    """Transport a matrix group onto ``G`` through an isomorphism of tables."""
    key = {}
    for i, m in enumerate(mats):
        key[tuple(np.round(m, 8).ravel() + 0.0)] = i
    mul = lambda a, b: key[tuple(np.round(mats[a] @ mats[b], 8).ravel() + 0.0)]  # noqa: E731
    M = table_from_elements(list(range(len(mats))), mul)
    iso = find_isomorphism(G, M)
    if iso is None:
        raise ValueError("matrix group is not isomorphic to the given group")
    return MatFunc(G, np.stack([mats[iso[x]] for x in range(G.order)]))


def icosahedral_rep(G: GroupTable | None = None) -> MatFunc:
    """The 3-dimensional rotation representation of ``A5`` (icosahedral symmetries)."""
    G = alternating_group(5) if G is None else G
    golden = (1 + math.sqrt(5)) / 2
    gens = [rotation((0, 1, golden), 2 * math.pi / 5), rotation((1, 1, 1), 2 * math.pi / 3)]
    mats = [m.real.copy() for m in matrix_group_closure(gens)]
    if len(mats) != 60:
        raise RuntimeError(f"icosahedral closure has {len(mats)} elements")
    return matrix_rep_on(G, mats)


def perm_matrices(G: GroupTable, degree: int) -> MatFunc:
    """Permutation representation of a group built by ``perm_group`` (labels are cycles)."""
    mats = np.zeros((G.order, degree, degree))
    for x in range(G.order):
        img = list(range(degree))
        for cyc in G.label(x).strip("()").split(")("):
            pts = [int(p) for p in cyc.split()] if cyc else []
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a] = b
        mats[x, img, list(range(degree))] = 1.0
    return MatFunc(G, mats)


def character_rep(G: GroupTable) -> MatFunc:
    """``x -> exp(2πi x / n)`` on a cyclic table ``make_cyclic(n)``."""
    return MatFunc(G, np.exp(2j * np.pi * np.arange(G.order) / G.order)[:, None, None])


def skew_hermitian_noise(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``i (A + A^*)/2`` for Gaussian ``A``, scaled to unit normalized HS norm."""
    A = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    X = 1j * (A + _adj(A)) / 2
    return X / hs_norm(X)[:, None, None]


def perturb(rho: MatFunc, delta: float, seed: int) -> MatFunc:
    """``g -> exp(δ X_g) ρ(g)`` with seeded skew-Hermitian ``X_g``."""
    if delta == 0:
        return rho
    X = skew_hermitian_noise(rho.dim, rho.group.order, np.random.default_rng(seed))
    U = np.stack([expm(delta * x) for x in X])
    return MatFunc(rho.group, U @ rho.values)


# ---------------------------------------------------------------------------
# inverse experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InverseReport:
    group: str
    n: int
    n_prime: int
    norm_k: dict
    distance_to_hom: float
    delta: float
    seed: int
    note: str = "witness-based, not optimal"

    def to_json(self) -> dict:
        out = asdict(self)
        out["norm_k"] = {str(k): v for k, v in self.norm_k.items()}
        return out


def run_inverse(G: GroupTable, rho: MatFunc, delta: float, k: int, seed: int, budget: int | None = None) -> InverseReport:
    """Perturb a homomorphism, measure its U^k norms, and its distance to the witness ``ρ``."""
    if not is_perfect(G):
        raise ValueError("inverse experiments need a perfect group")
    phi = perturb(rho, delta, seed)
    norms = {kk: gowers_norm_exact(phi, kk, budget) for kk in range(2, k + 1)}
    dist = hs_distance(nearest_unital(phi), rho)
    return InverseReport(G.name or f"order {G.order}", rho.dim, rho.dim, norms, dist, delta, seed)


# Frozen calibration of run_inverse(A5, icosahedral, δ=0.05, k=3, seed=INVERSE_SEED).
INVERSE_SEED = 2024
FROZEN_INVERSE = {"norm_2": 0.9988072481845507, "norm_3": 0.9988074437640582, "distance": 0.005417120220651373}
INVERSE_THRESHOLDS = {"norm_3_min": 0.8, "distance_max": 0.1}
