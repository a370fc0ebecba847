"""Matrix-valued functions on finite groups and their Gowers U^k norms.

Traces are normalized (``tr(I_n) = 1``) and ``‖a‖_2`` is the normalized
Hilbert-Schmidt norm ``sqrt(tr(a* a))``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import GroupTable
from .polymaps import BudgetError, op_budget

MAX_K = 6
UNITARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MatFunc:
    group: GroupTable = field(repr=False)
    values: np.ndarray = field(repr=False)  # (|G|, n, n) complex

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128)
        if vals.ndim == 1:
            vals = vals[:, None, None]
        if vals.shape[0] != self.group.order or vals.shape[1] != vals.shape[2]:
            raise ValueError(f"values of shape {vals.shape} do not fit a group of order {self.group.order}")
        if not np.isfinite(vals).all():
            raise ValueError("matrix function has non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __call__(self, g: int) -> np.ndarray:
        return self.values[g]

    def __add__(self, other: "MatFunc") -> "MatFunc":
        return MatFunc(self.group, self.values + other.values)

    def scale(self, lam: complex) -> "MatFunc":
        return MatFunc(self.group, lam * self.values)

    def adjoint(self) -> "MatFunc":
        return MatFunc(self.group, np.conj(np.swapaxes(self.values, 1, 2)))

    def is_unitary(self, tol: float = 1e-9) -> bool:
        eye = np.eye(self.dim)
        return bool(np.abs(self.values @ np.conj(np.swapaxes(self.values, 1, 2)) - eye).max() <= tol)

    def to_json(self, group_ref: str = "") -> dict:
        return {
            "group": group_ref,
            "dim": self.dim,
            "values": np.stack([self.values.real, self.values.imag], axis=-1).tolist(),
        }

    @classmethod
    def from_json(cls, data: dict, group: GroupTable) -> "MatFunc":
        arr = np.asarray(data["values"], dtype=float)
        return cls(group, arr[..., 0] + 1j * arr[..., 1])


def constant(G: GroupTable, c) -> MatFunc:
    c = np.atleast_2d(np.asarray(c, dtype=np.complex128))
    return MatFunc(G, np.broadcast_to(c, (G.order,) + c.shape))


def random_matfunc(G: GroupTable, n: int, rng: np.random.Generator, kind: str = "gaussian") -> MatFunc:
    if kind == "gaussian":
        vals = (rng.standard_normal((G.order, n, n)) + 1j * rng.standard_normal((G.order, n, n))) / np.sqrt(2)
    elif kind == "unitary":
        vals = np.stack([random_unitary(n, rng) for _ in range(G.order)])
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return MatFunc(G, vals)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def ntrace(a: np.ndarray) -> np.ndarray:
    """Normalized trace over the last two axes."""
    return np.trace(a, axis1=-2, axis2=-1) / a.shape[-1]


def _adj(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


# ---------------------------------------------------------------------------
# cubes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CubeList:
    """Cube words; each word lists 1-based argument positions multiplied left to right."""

    k: int
    words: tuple[tuple[int, ...], ...]

    def render(self) -> list[str]:
        return ["".join(f"g{i}" for i in w) or "1" for w in self.words]


def cube_words(k: int) -> CubeList:
    """``c_0 = (1)``, ``c_{k+1} = (c_k · g_{k+1}, reversed c_k)``."""
    if not 0 <= k <= MAX_K:
        raise ValueError(f"cube order must be between 0 and {MAX_K}")
    words: list[tuple[int, ...]] = [()]
    for j in range(1, k + 1):
        words = [w + (j,) for w in words] + list(reversed(words))
    return CubeList(k, tuple(words))


def cube_eval(G: GroupTable, k: int, gs: Sequence[int], g0: int) -> list[int]:
    out = []
    for w in cube_words(k).words:
        x = G.identity
        for i in w:
            x = G.mul(x, gs[i - 1])
        out.append(G.mul(x, g0))
    return out


def _cube_indices(G: GroupTable, k: int, tuples: np.ndarray) -> np.ndarray:
    """``(T, 2^k)`` element indices of the cube words for each argument tuple (no ``g0``)."""
    words = cube_words(k).words
    out = np.empty((tuples.shape[0], len(words)), dtype=np.int64)
    for j, w in enumerate(words):
        x = np.full(tuples.shape[0], G.identity, dtype=np.int64)
        for i in w:
            x = G.table[x, tuples[:, i - 1]]
        out[:, j] = x
    return out


def _cube_traces(fs: Sequence[MatFunc], k: int, tuples: np.ndarray, g0: np.ndarray) -> np.ndarray:
    """``tr(Π_i f_i(c_i g0)^{*^(i-1)})`` for matched rows of ``tuples`` and ``g0``."""
    G = fs[0].group
    idx = G.table[_cube_indices(G, k, tuples), g0[:, None]]
    prod = None
    for i, f in enumerate(fs):
        m = f.values[idx[:, i]]
        if i % 2 == 1:  # 1-based position i+1 is even
            m = _adj(m)
        prod = m if prod is None else prod @ m
    return ntrace(prod)


def _all_tuples(n: int, k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(n)] * k), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


# ---------------------------------------------------------------------------
# differences and norms
# ---------------------------------------------------------------------------


def delta(f: MatFunc, g: int) -> MatFunc:
    """``h -> f(gh) f(h)^*``."""
    return MatFunc(f.group, f.values[f.group.table[g]] @ _adj(f.values))


def exact_cost(order: int, k: int, n: int) -> int:
    """Matrix-multiply work of the recursive evaluation, in scalar multiplies."""
    return sum(order ** (j + 1) for j in range(1, k)) * n**3 + order * n * n


@dataclass(frozen=True)
class NormResult:
    norm: float
    moment: float
    imag_residual: float
    budget_used: int
    method: str = "exact"

    def to_json(self) -> dict:
        return {
            "norm": self.norm,
            "moment": self.moment,
            "method": self.method,
            "budget_used": self.budget_used,
            "imag_residual": self.imag_residual,
        }


def _moment_batch(vals: np.ndarray, table: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Per-function ``‖f‖^{2^k}`` for a batch ``(B, |G|, n, n)`` via ``E_g ‖Δ_g f‖^{2^(k-1)}``."""
    if k == 1:
        mean = vals.mean(axis=1)
        tr = ntrace(mean @ _adj(mean))
        return tr.real, float(np.abs(tr.imag).max(initial=0.0))
    B, order = vals.shape[:2]
    out = np.empty(B)
    resid = 0.0
    for b in range(B):
        # Δ_g f for all g at once: (|G|, |G|, n, n)
        diffs = vals[b][table] @ _adj(vals[b])[None]
        m, r = _moment_batch(diffs, table, k - 1)
        out[b] = m.mean()
        resid = max(resid, r)
    return out, resid


def gowers_moment_exact(f: MatFunc, k: int, budget: int | None = None) -> tuple[float, float, int]:
    """``E tr(Δ_{g_1..g_k} f(g_0))`` with its imaginary residual and work estimate."""
    if not 1 <= k <= MAX_K:
        raise ValueError(f"k must be between 1 and {MAX_K}")
    budget = op_budget() if budget is None else budget
    cost = exact_cost(f.group.order, k, f.dim)
    if cost > budget:
        raise BudgetError(f"exact U^{k} evaluation costs about {cost} multiplies, above the budget {budget}")
    m, resid = _moment_batch(f.values[None], f.group.table, k)
    return float(m[0]), resid, cost


def gowers_norm_exact(f: MatFunc, k: int, budget: int | None = None) -> float:
    return gowers_norm_report(f, k, budget).norm


def gowers_norm_report(f: MatFunc, k: int, budget: int | None = None) -> NormResult:
    m, resid, cost = gowers_moment_exact(f, k, budget)
    if resid > 1e-9:
        raise ArithmeticError(f"U^{k} moment has imaginary part {resid:.3g}; evaluation is inconsistent")
    return NormResult(max(m, 0.0) ** (1.0 / 2**k), m, resid, cost)


def gowers_moment_direct(f: MatFunc, k: int) -> complex:
    """Independent route: explicit iterated differences summed over all tuples."""
    G = f.group
    total = 0.0 + 0.0j
    for gs in itertools.product(range(G.order), repeat=k):
        h = f
        for g in gs:
            h = delta(h, g)
        total += ntrace(h.values).sum()
    return total / G.order ** (k + 1)


def gowers_inner(fs: Sequence[MatFunc], k: int | None = None, budget: int | None = None, chunk: int = 20_000) -> complex:
    """``E_{g_0..g_k} tr(Π_i f_i(c_{i,k} g_0)^{*^(i-1)})`` over all tuples."""
    if k is None:
        k = int(np.log2(len(fs)))
    if len(fs) != 2**k:
        raise ValueError(f"need 2^{k} functions, got {len(fs)}")
    G = fs[0].group
    if any(f.group is not G or f.dim != fs[0].dim for f in fs):
        raise ValueError("functions must share group and dimension")
    budget = op_budget() if budget is None else budget
    cost = G.order ** (k + 1) * fs[0].dim ** 3 * 2**k
    if cost > budget:
        raise BudgetError(f"Gowers inner product costs about {cost} multiplies, above the budget {budget}")
    tuples = _all_tuples(G.order, k + 1)  # columns g_1..g_k, g_0
    partial = []
    for s in range(0, tuples.shape[0], chunk):
        t = tuples[s : s + chunk]
        partial.append(_cube_traces(fs, k, t[:, :k], t[:, k]).sum())
    return complex(np.sum(partial) / tuples.shape[0])


def gowers_norm_mc(f: MatFunc, k: int, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of ``‖f‖_{U^k}`` and the standard error of the pre-root mean."""
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    G = f.group
    tuples = rng.integers(0, G.order, size=(samples, k + 1))
    vals = _cube_traces([f] * 2**k, k, tuples[:, :k], tuples[:, k]).real
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return float(np.sign(mean) * abs(mean) ** (1.0 / 2**k)), se


def gowers_moment_mc(f: MatFunc, k: int, samples: int, seed: int) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    tuples = rng.integers(0, f.group.order, size=(samples, k + 1))
    vals = _cube_traces([f] * 2**k, k, tuples[:, :k], tuples[:, k]).real
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0


def u2_quadruple_form(f: MatFunc, budget: int | None = None) -> float:
    """``E_{x y^-1 z w^-1 = 1} tr(f(x) f(y)^* f(z) f(w)^*)`` to the power 1/4."""
    G = f.group
    budget = op_budget() if budget is None else budget
    cost = G.order**3 * f.dim**3
    if cost > budget:
        raise BudgetError(f"quadruple form costs about {cost} multiplies, above the budget {budget}")
    v, va = f.values, _adj(f.values)
    t, iv = G.table, G.inverse
    ys = np.arange(G.order)
    total = 0.0 + 0.0j
    for x in range(G.order):
        xy = v[x][None] @ va  # f(x) f(y)^* for all y
        for z in range(G.order):
            w = t[t[x, iv[ys]], z]
            total += ntrace(xy @ v[z][None] @ va[w]).sum()
    m = (total / G.order**3).real
    return max(m, 0.0) ** 0.25


def u2_recursive(f: MatFunc) -> float:
    """``E_{g_1} ‖E_g f(g_1 g) f(g)^*‖_2^2``, the fourth power of the U^2 norm."""
    G = f.group
    inner = (f.values[G.table] @ _adj(f.values)[None]).mean(axis=1)
    return float(ntrace(inner @ _adj(inner)).real.mean())


def u1_norm(f: MatFunc) -> float:
    mean = f.values.mean(axis=0)
    return float(np.sqrt(max(ntrace(mean @ _adj(mean)).real, 0.0)))


# ---------------------------------------------------------------------------
# index assignments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndexAssignment:
    k: int
    map: tuple[int, ...]  # 1-based images of 1..2^k

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        if len(m) != 2**self.k or any(not 1 <= v <= 2**self.k for v in m):
            raise ValueError("assignment must map 1..2^k into 1..2^k")
        object.__setattr__(self, "map", m)

    def __call__(self, i: int) -> int:
        return self.map[i - 1]

    def compose(self, inner: Sequence[int]) -> "IndexAssignment":
        """``a ∘ inner`` for a 1-based index map ``inner``."""
        return IndexAssignment(self.k, tuple(self.map[j - 1] for j in inner))

    def is_bar_symmetric(self) -> bool:
        return self == index_transform(self, "bar")


def fold_left(k: int) -> tuple[int, ...]:
    half, top = 2 ** (k - 1), 2**k
    return tuple(i if i <= half else top + 1 - i for i in range(1, top + 1))


def fold_right(k: int) -> tuple[int, ...]:
    half, top = 2 ** (k - 1), 2**k
    return tuple(top + 1 - i if i <= half else i for i in range(1, top + 1))


def index_transform(a: IndexAssignment, which: str) -> IndexAssignment:
    """``L``: ``a∘L``; ``R``: ``a∘R``; ``S``: cyclic shift; ``bar``: ``i -> a(2^k + 1 - i)``."""
    k, top = a.k, 2**a.k
    if which == "L":
        return a.compose(fold_left(k))
    if which == "R":
        return a.compose(fold_right(k))
    if which == "S":
        return IndexAssignment(k, (a.map[-1],) + a.map[:-1])
    if which == "bar":
        return a.compose(tuple(top + 1 - i for i in range(1, top + 1)))
    raise ValueError(f"unknown transform {which!r}")


def shift(a: IndexAssignment, times: int) -> IndexAssignment:
    for _ in range(times % 2**a.k):
        a = index_transform(a, "S")
    return a


def gcs_chain(a: IndexAssignment) -> list[IndexAssignment]:
    """Assignments ``a_0 = a``, ``a_i = S^{2^(i-1)}(a_{i-1} ∘ L)``; ``a_k`` is constant ``a(1)``.

    After step ``i`` the first ``2^i`` entries equal ``a(1)``.
    """
    chain = [a]
    for i in range(1, a.k + 1):
        chain.append(shift(index_transform(chain[-1], "L"), 2 ** (i - 1)))
    return chain


def inner_of_assignment(fs: Sequence[MatFunc], a: IndexAssignment, budget: int | None = None) -> complex:
    return gowers_inner([fs[a(i) - 1] for i in range(1, 2**a.k + 1)], a.k, budget)


# ---------------------------------------------------------------------------
# unitaries and distances
# ---------------------------------------------------------------------------


def polar_unitarize(v: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """Unitary polar factor of ``v``.

    Directions with singular value below ``tol`` are completed by the unitary
    closest to the identity between the remaining left and right singular
    subspaces, so the result does not depend on the SVD's basis choice.
    """
    v = np.asarray(v, dtype=np.complex128)
    u, s, vh = np.linalg.svd(v)
    good = s >= tol
    w = u[:, good] @ vh[good]
    if not good.all():
        ub, vb = u[:, ~good], vh[~good].conj().T
        overlap = ub.conj().T @ vb
        q_u, q_s, q_vh = np.linalg.svd(overlap)
        q = q_u @ q_vh if (q_s > tol).all() else np.eye(overlap.shape[0])
        w = w + ub @ q @ vb.conj().T
    return w


def pad_identity(a: np.ndarray, n: int) -> np.ndarray:
    """``a ⊕ 1_{n - dim a}`` for a stack of square matrices."""
    d = a.shape[-1]
    if d == n:
        return a
    out = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape[:-2] + (n, n)).copy()
    out[..., :d, :d] = a
    return out


def hs_distance(f: MatFunc, g: MatFunc) -> float:
    """``E_x ‖f(x) - g(x)‖_2^2`` with the smaller dimension padded by an identity block."""
    if f.group.order != g.group.order:
        raise ValueError("functions live on different groups")
    n = max(f.dim, g.dim)
    diff = pad_identity(f.values, n) - pad_identity(g.values, n)
    return float((np.abs(diff) ** 2).sum(axis=(1, 2)).mean() / n)


def nearest_unital(f: MatFunc) -> MatFunc:
    """``x -> f(1)^* f(x)``."""
    e = f.group.identity
    return MatFunc(f.group, _adj(f.values[e])[None] @ f.values)


# ---------------------------------------------------------------------------
# property suite
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    ok: bool
    measured: float
    tolerance: float
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "measured": self.measured, "tolerance": self.tolerance, "detail": self.detail}


PRINTED_CUBES = {
    0: ["1"],
    1: ["g1", "1"],
    2: ["g1g2", "g2", "1", "g1"],
    3: ["g1g2g3", "g2g3", "g3", "g1g3", "g1", "1", "g2", "g1g2"],
}


def _corpus_groups() -> list[GroupTable]:
    from .groups import alternating_group, dihedral_group, make_cyclic, parse_group_spec, quaternion_group, symmetric_group

    gs = [make_cyclic(n) for n in (2, 3, 4, 5, 6, 7, 8, 12)]
    gs += [parse_group_spec("Z2xZ2"), symmetric_group(3), dihedral_group(4), quaternion_group(), alternating_group(4)]
    return gs


def appendix_suite(seed: int = 0, corpus: int = 200, tol: float = 1e-9) -> list[CheckResult]:
    """Seeded corpus check of the cube lists and the U^k inequalities and identities."""
    rng = np.random.default_rng(seed)
    groups = _corpus_groups()
    results: dict[str, list[float]] = {}
    details: dict[str, str] = {}

    def worst(name, value, detail=""):
        results.setdefault(name, []).append(value)
        if detail and value > 0 and name not in details:
            details[name] = detail

    printed = all(cube_words(k).render() == PRINTED_CUBES[k] for k in PRINTED_CUBES)
    worst("cube_lists", 0.0 if printed else 1.0)

    for trial in range(corpus):
        G = groups[int(rng.integers(len(groups)))]
        n = int(rng.integers(1, 4))
        kind = "unitary" if trial % 3 == 0 else "gaussian"
        f = random_matfunc(G, n, rng, kind)
        g = random_matfunc(G, n, rng, "gaussian")
        norms = {k: gowers_norm_exact(f, k) for k in (1, 2, 3)}
        ng = {k: gowers_norm_exact(g, k) for k in (2, 3)}
        tag = f"trial {trial} on {G.name}, n={n}"

        worst("u1_base", abs(norms[1] - u1_norm(f)), tag)
        k = 2 if G.order > 8 else 3
        inner = gowers_inner([f] * 2**k, k)
        worst("norm_inner_consistency", abs(inner - norms[k] ** (2**k)), tag)
        worst("u2_quadruple_form", abs(u2_quadruple_form(f) - norms[2]), tag)
        worst("u2_recursive_identity", abs(u2_recursive(f) - norms[2] ** 4), tag)
        worst("monotonicity", max(norms[1] - norms[2], norms[2] - norms[3], 0.0), tag)
        for kk in (2, 3):
            worst("triangle", max(gowers_norm_exact(f + g, kk) - norms[kk] - ng[kk], 0.0), tag)
            lam = complex(rng.standard_normal(), rng.standard_normal())
            worst("homogeneity", abs(gowers_norm_exact(f.scale(lam), kk) - abs(lam) * norms[kk]), tag)
        worst("faithfulness", 0.0 if norms[2] > 0 else 1.0, tag)

        for kk in (2, 3) if G.order <= 8 else (2,):
            m = 2**kk
            fs = [random_matfunc(G, n, rng, "gaussian") for _ in range(m)]
            fnorms = [gowers_norm_exact(h, kk) for h in fs]
            worst("gowers_cauchy_schwarz", max(abs(gowers_inner(fs, kk)) - float(np.prod(fnorms)), 0.0), tag)

            a = IndexAssignment(kk, tuple(int(v) for v in rng.integers(1, m + 1, size=m)))
            ia = inner_of_assignment(fs, a)
            il = inner_of_assignment(fs, index_transform(a, "L"))
            ir = inner_of_assignment(fs, index_transform(a, "R"))
            worst("halving_real_nonneg", max(-il.real, -ir.real, abs(il.imag), abs(ir.imag), 0.0), tag)
            worst("halving", max(abs(ia) - np.sqrt(max(il.real, 0.0) * max(ir.real, 0.0)), 0.0), tag)
            gap = abs(inner_of_assignment(fs, index_transform(a, "S")) - np.conj(ia))
            worst("shift_conjugation", gap, tag)
            if n == 1 and G.is_abelian:
                worst("shift_conjugation_scalar_abelian", gap, tag)
            worst("reversal_conjugation", abs(inner_of_assignment(fs, index_transform(a, "bar")) - np.conj(ia)), tag)
            sym = a.compose(fold_left(kk))
            isym = inner_of_assignment(fs, sym)
            worst("bar_symmetric_positive", max(-isym.real, abs(isym.imag), 0.0), tag)

    out = []
    for name, vals in results.items():
        m = float(max(vals))
        out.append(CheckResult(name, m <= tol, m, tol, details.get(name, "")))
    return out


def dumps_results(results: Sequence[CheckResult]) -> str:
    return json.dumps([r.to_json() for r in results], indent=2, sort_keys=True)
