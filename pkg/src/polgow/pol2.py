"""Twisted crossed products and the universal group of unital quadratic maps.

Elements of ``M ⋊_ψ G`` are pairs ``(ξ, g)`` encoded as a single integer
``code(ξ) * |G| + g`` where ``code`` is the mixed-radix index of ``ξ`` (last
coordinate fastest).  Products are evaluated lazily from the action matrices
and the cocycle table, so groups far too large to tabulate can still be
probed; :attr:`TwistedProduct.realized` materializes the dense table for
small orders.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .abelian import FinAbelian, is_prime, smith_invariants, sym2
from .groups import (
    GroupSizeError,
    GroupTable,
    abelian_structure,
    abelianization,
    from_abelian,
    fingerprint,
    normal_closure,
    quotient,
    _small_generating_set,
)
from .modules import EXHAUSTIVE_MODULE_CAP, AugmentationModule, GModule, augmentation_module

MAX_ORDER = 100_000
REALIZE_CAP = 4096


@dataclass(frozen=True, eq=False)
class Cocycle2:
    module: GModule = field(repr=False)
    values: np.ndarray = field(repr=False)  # (|G|, |G|, rank)

    def __post_init__(self):
        n, r = self.module.group.order, self.module.rank
        vals = np.asarray(self.values, dtype=np.int64).reshape(n, n, r)
        vals = vals % self.module.mod if r else vals
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, g: int, h: int) -> np.ndarray:
        return self.values[g, h]

    def is_normalized(self) -> bool:
        e = self.module.group.identity
        return not (self.values[e].any() or self.values[:, e].any())

    def normalized(self) -> "Cocycle2":
        """``ψ'(g, h) = ψ(g, h) - μ_g ψ(1, 1)``, which vanishes when either argument is 1."""
        e = self.module.group.identity
        shift = np.einsum("gij,j->gi", self.module.action, self.values[e, e])
        return Cocycle2(self.module, self.values - shift[:, None, :])

    def with_entry(self, g: int, h: int, value) -> "Cocycle2":
        vals = self.values.copy()
        vals[g, h] = value
        return Cocycle2(self.module, vals)


def zero_cocycle(M: GModule) -> Cocycle2:
    n = M.group.order
    return Cocycle2(M, np.zeros((n, n, M.rank), dtype=np.int64))


def validate_cocycle(psi: Cocycle2, samples: int = 20_000, seed: int = 0) -> tuple[bool, tuple[int, int, int] | None]:
    """Check ``μ_a ψ(b,c) - ψ(ab,c) + ψ(a,bc) - ψ(a,b) = 0``.

    Exhaustive up to order 64, sampled beyond.  Returns the first failing
    triple (lexicographic in the exhaustive case).
    """
    M, G = psi.module, psi.module.group
    if M.rank == 0:
        return True, None
    t, vals, mod = G.table, psi.values, M.mod
    if G.order <= EXHAUSTIVE_MODULE_CAP:
        for a in range(G.order):
            lhs = np.einsum("ij,bcj->bci", M.action[a], vals)
            lhs = lhs - vals[t[a]] + vals[a][t] - vals[a][:, None, :]
            bad = (lhs % mod).any(axis=2)
            if bad.any():
                b, c = np.argwhere(bad)[0]
                return False, (a, int(b), int(c))
        return True, None
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(0, G.order, size=(3, samples))
    lhs = np.einsum("nij,nj->ni", M.action[a], vals[b, c]) - vals[t[a, b], c] + vals[a, t[b, c]] - vals[a, b]
    bad = (lhs % mod).any(axis=1)
    if bad.any():
        i = int(np.argmax(bad))
        return False, (int(a[i]), int(b[i]), int(c[i]))
    return True, None


class TwistedProduct:
    """``M ⋊_{μ,ψ} G`` with ``(ξ1,g1)(ξ2,g2) = (ξ1 + μ_{g1} ξ2 + ψ(g1,g2), g1 g2)``."""

    def __init__(self, module: GModule, cocycle: Cocycle2, name: str = ""):
        self.module = module
        self.cocycle = cocycle
        self.group = module.group
        self.name = name
        self.order = module.order * self.group.order
        if self.order >= 2**62:
            raise GroupSizeError(f"twisted product of order {self.order} cannot be indexed")
        mods = module.moduli
        self._weights = np.array([int(np.prod(mods[i + 1 :], dtype=object)) for i in range(len(mods))], dtype=np.int64)
        self.identity = self.encode(module.zero(), self.group.identity)

    # -- encoding ----------------------------------------------------------

    def encode(self, xi, g) -> int:
        return int(self.encode_many(np.asarray(xi), [g])[0])

    def encode_many(self, X: np.ndarray, g: np.ndarray) -> np.ndarray:
        g = np.asarray(g, dtype=np.int64).ravel()
        if g.size and (g.min() < 0 or g.max() >= self.group.order):
            raise ValueError("group element index out of range")
        X = np.asarray(X, dtype=np.int64).reshape(g.size, self.module.rank) % self.module.mod
        return (X @ self._weights) * self.group.order + g

    def decode(self, idx: int) -> tuple[np.ndarray, int]:
        X, g = self.decode_many(np.asarray([idx]))
        return X[0], int(g[0])

    def decode_many(self, idx) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(idx, dtype=np.int64)
        g = idx % self.group.order
        code = idx // self.group.order
        X = np.empty((idx.size, self.module.rank), dtype=np.int64)
        for i, m in enumerate(self.module.moduli):
            X[:, i] = (code // self._weights[i]) % m
        return X, g

    def embed(self, xi, g: int) -> int:
        """Index of the pair ``(ξ, g)``; also its index in :attr:`realized`."""
        return self.encode(xi, g)

    # -- lazy arithmetic ---------------------------------------------------

    def mul_many(self, a, b) -> np.ndarray:
        """Elementwise products of index arrays (broadcast)."""
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        shape = a.shape
        X1, g1 = self.decode_many(a.ravel())
        X2, g2 = self.decode_many(b.ravel())
        acted = np.einsum("nij,nj->ni", self.module.action[g1], X2)
        X = X1 + acted + self.cocycle.values[g1, g2]
        return self.encode_many(X, self.group.table[g1, g2]).reshape(shape)

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_many(a, b))

    def inv_many(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        X, g = self.decode_many(a.ravel())
        gi = self.group.inverse[g]
        # (ξ, g)^{-1} = (-μ_{g^-1}(ξ + ψ(g, g^-1)), g^-1)
        Y = -np.einsum("nij,nj->ni", self.module.action[gi], X + self.cocycle.values[g, gi])
        return self.encode_many(Y, gi).reshape(a.shape)

    def inv(self, a: int) -> int:
        return int(self.inv_many(a))

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        out, base = self.identity, a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def cyclic_subgroup(self, a: int) -> set[int]:
        out, x = {self.identity}, a
        while x != self.identity:
            out.add(x)
            x = self.mul(x, a)
        return out

    def generators(self) -> list[int]:
        """Module basis vectors and ``(0, s)`` for a generating set ``s`` of ``G``."""
        eye = np.eye(self.module.rank, dtype=np.int64)
        gens = [self.encode(eye[i], self.group.identity) for i in range(self.module.rank)]
        gens += [self.encode(self.module.zero(), s) for s in _small_generating_set(self.group)]
        return gens

    def label(self, idx: int) -> str:
        X, g = self.decode(idx)
        return f"({tuple(int(v) for v in X)},{self.group.label(g)})"

    # -- realization -------------------------------------------------------

    @cached_property
    def realized(self) -> GroupTable:
        if self.order > REALIZE_CAP:
            raise GroupSizeError(
                f"twisted product has order {self.order}; dense tables are built only up to {REALIZE_CAP}"
            )
        n = self.order
        allidx = np.arange(n, dtype=np.int64)
        X, g = self.decode_many(allidx)
        table = np.empty((n, n), dtype=np.int64)
        for h in range(self.group.order):
            rows = np.nonzero(g == h)[0]
            acted = X @ self.module.action[h].T  # μ_h applied to every right factor
            base = acted + self.cocycle.values[h, g]
            prod_g = self.group.table[h, g]
            for a in rows:
                table[a] = self.encode_many(base + X[a], prod_g)
        labels = tuple(self.label(i) for i in range(n))
        return GroupTable(n, table, self.identity, self.inv_many(allidx), labels, self.name)

    def abelian_invariants(self) -> FinAbelian:
        """Abelianization from the presentation, without tabulating the group.

        Generators ``e_i`` (module basis) and ``s_g``; relations ``m_i e_i``,
        ``μ_g e_i - e_i`` and ``s_g + s_h - s_{gh} - ψ(g, h)``.
        """
        r, n = self.module.rank, self.group.order
        t = self.group.table
        rows = []
        for i, m in enumerate(self.module.moduli):
            v = [0] * (r + n)
            v[i] = m
            rows.append(v)
        for g in range(n):
            D = self.module.action[g] - np.eye(r, dtype=np.int64)
            for i in range(r):
                if D[:, i].any():
                    rows.append([int(x) for x in D[:, i]] + [0] * n)
        for g in range(n):
            for h in range(n):
                v = [-int(x) for x in self.cocycle.values[g, h]] + [0] * n
                v[r + g] += 1
                v[r + h] += 1
                v[r + int(t[g, h])] -= 1
                rows.append(v)
        inv = smith_invariants(rows)
        if len(inv) < r + n or 0 in inv:
            raise ValueError("presentation has infinite abelianization; the twisted product is not finite")
        return FinAbelian(tuple(d for d in inv if d != 1))


def twisted_product(M: GModule, psi: Cocycle2, max_order: int | None = MAX_ORDER, name: str = "") -> TwistedProduct:
    if psi.module is not M:
        raise ValueError("cocycle is defined on another module")
    ok, triple = validate_cocycle(psi)
    if not ok:
        raise ValueError(f"not a 2-cocycle: g.ψ(h,k) - ψ(gh,k) + ψ(g,hk) - ψ(g,h) = 0 fails at (g,h,k) = {triple}")
    order = M.order * M.group.order
    if max_order is not None and order > max_order:
        raise GroupSizeError(f"twisted product has order {order}, above the cap {max_order}")
    if not psi.is_normalized():
        psi = psi.normalized()
    return TwistedProduct(M, psi, name)


# ---------------------------------------------------------------------------
# the universal group
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UniversalQuadratic:
    source: GroupTable
    target: TwistedProduct
    map: np.ndarray  # g -> index of (0, g)
    augmentation: AugmentationModule | None = field(default=None, repr=False)

    def beta_prime(self, g: int, h: int) -> int:
        """``φ(g)^-1 φ(gh) φ(h)^-1``."""
        P, phi = self.target, self.map
        left = P.mul(P.inv(int(phi[g])), int(phi[self.source.table[g, h]]))
        return P.mul(left, P.inv(int(phi[h])))

    def check_beta_formula(self) -> tuple[bool, tuple[int, int] | None]:
        """``φ(g)^-1 φ(gh) φ(h)^-1 = (c(g^-1) ⊗ h̄, 1)`` for every pair."""
        if self.augmentation is None:
            raise ValueError("beta formula needs the augmentation module")
        G, P, aug, phi = self.source, self.target, self.augmentation, self.map
        hs = np.arange(G.order)
        for g in range(G.order):
            got = P.mul_many(P.mul_many(P.inv(int(phi[g])), phi[G.table[g]]), P.inv_many(phi[hs]))
            expect = P.encode_many(
                np.array([aug.c_tensor(G.inverse[g], aug.ab_coords[h]) for h in hs]).reshape(G.order, -1),
                np.full(G.order, G.identity),
            )
            bad = np.nonzero(got != expect)[0]
            if bad.size:
                return False, (g, int(bad[0]))
        return True, None

    def check_quad_relation(self) -> tuple[bool, tuple[int, int, int] | None]:
        """``φ(abc) = φ(ab) φ(b)^-1 φ(a)^-1 φ(ac) φ(c)^-1 φ(bc)`` on all triples, lazily."""
        G, P, phi = self.source, self.target, self.map
        t = G.table
        n = G.order
        cs = np.arange(n)
        phi_inv = P.inv_many(phi)
        for a in range(n):
            for b in range(n):
                ab = t[a, b]
                left = P.mul(P.mul(int(phi[ab]), int(phi_inv[b])), int(phi_inv[a]))
                rhs = P.mul_many(P.mul_many(P.mul_many(left, phi[t[a, cs]]), phi_inv[cs]), phi[t[b, cs]])
                lhs = phi[t[ab, cs]]
                bad = np.nonzero(lhs != rhs)[0]
                if bad.size:
                    return False, (a, b, int(bad[0]))
        return True, None


def pol2_cocycle(aug: AugmentationModule) -> Cocycle2:
    """``ψ(g, h) = c(g) ⊗ h̄``."""
    G = aug.module.group
    vals = np.zeros((G.order, G.order, aug.module.rank), dtype=np.int64)
    r = aug.ab.rank
    for g in range(G.order):
        s = aug.slot_of[g]
        if s >= 0 and r:
            vals[g, :, s : s + r] = aug.ab_coords
    return Cocycle2(aug.module, vals)


def pol2_order(G: GroupTable) -> int:
    A, _ = abelianization(G)
    return A.order ** (G.order - 1) * G.order


def pol2(G: GroupTable, max_order: int | None = MAX_ORDER) -> tuple[TwistedProduct, UniversalQuadratic]:
    """``(ω(G) ⊗ G^ab) ⋊_ψ G`` together with ``φ(g) = (0, g)``.

    ``max_order=None`` lifts the cap; the result is then usable lazily and
    through :meth:`TwistedProduct.abelian_invariants`.
    """
    order = pol2_order(G)
    if max_order is not None and order > max_order:
        raise GroupSizeError(f"Pol2 of this group has order {order}, above the cap {max_order}")
    aug = augmentation_module(G)
    P = twisted_product(aug.module, pol2_cocycle(aug), max_order=None, name=f"Pol2({G.name})" if G.name else "Pol2")
    phi = P.encode_many(np.zeros((G.order, aug.module.rank), dtype=np.int64), np.arange(G.order))
    return P, UniversalQuadratic(G, P, phi, aug)


def sym2_cocycle(A: FinAbelian) -> tuple[GroupTable, GModule, Cocycle2]:
    """Trivial module ``Sym^2(A)`` over ``A`` with ``σ(g, h) = gh``."""
    G = from_abelian(A)
    S, slots = sym2(A)
    coords = np.array([x.coords for x in A.elements()], dtype=np.int64).reshape(G.order, A.rank)
    r = S.rank
    M = GModule(G, S.invariant_factors, np.broadcast_to(np.eye(r, dtype=np.int64), (G.order, r, r)).copy())
    vals = np.zeros((G.order, G.order, r), dtype=np.int64)
    for (i, j), k in slots.items():
        a, b = coords[:, i], coords[:, j]
        vals[:, :, k] = np.outer(a, b) if i == j else np.outer(coords[:, i], coords[:, j]) + np.outer(coords[:, j], coords[:, i])
    return G, M, Cocycle2(M, vals)


def pol2_abelianization(A: FinAbelian, max_order: int | None = MAX_ORDER) -> TwistedProduct:
    """``Sym^2(A) ⋊_σ A``."""
    _, M, sigma = sym2_cocycle(A)
    return twisted_product(M, sigma, max_order=max_order, name=f"Sym2({A}) x| {A}")


def pol2_quotient(P: TwistedProduct, uq: UniversalQuadratic, S, Sigma) -> GroupTable:
    """Quotient of ``Pol2(G)`` by the normal closure of ``φ(σ)`` and ``φ(σ s) φ(s)^-1``."""
    G = uq.source
    phi = uq.map
    seeds = [int(phi[x]) for x in Sigma]
    seeds += [P.mul(int(phi[G.table[x, s]]), P.inv(int(phi[s]))) for x in Sigma for s in S]
    if P.order <= REALIZE_CAP:
        R = P.realized
        Q, _ = quotient(R, normal_closure(R, seeds))
        return Q
    K = lazy_normal_closure(P, seeds)
    return lazy_quotient(P, K)


def lazy_normal_closure(P: TwistedProduct, seeds, cap: int = 1_000_000) -> np.ndarray:
    """Sorted members of the normal closure of ``seeds``, by closure under
    right multiplication by seeds and conjugation by generators."""
    seeds = sorted({int(s) for s in seeds})
    gens = P.generators()
    gens_inv = [P.inv(t) for t in gens]
    seen = {P.identity}
    frontier = np.array([P.identity], dtype=np.int64)
    while frontier.size:
        cand = [P.mul_many(frontier, s) for s in seeds]
        cand += [P.mul_many(P.mul_many(t, frontier), ti) for t, ti in zip(gens, gens_inv)]
        new = np.setdiff1d(np.unique(np.concatenate(cand)), np.fromiter(seen, dtype=np.int64))
        seen.update(int(x) for x in new)
        if len(seen) > cap:
            raise GroupSizeError(f"normal closure exceeds {cap} elements")
        frontier = new
    return np.array(sorted(seen), dtype=np.int64)


def lazy_quotient(P: TwistedProduct, K: np.ndarray) -> GroupTable:
    """``P / K`` for a normal subgroup given by its members; cosets ordered by minimal index."""
    if P.order % len(K):
        raise ValueError("subgroup order does not divide the group order")
    # normality check: every conjugate of K by a generator stays inside K
    inK = np.zeros(P.order, dtype=bool)
    inK[K] = True
    for t in P.generators():
        if not inK[P.mul_many(P.mul_many(t, K), P.inv(t))].all():
            raise ValueError("subgroup is not normal")
    coset = np.full(P.order, -1, dtype=np.int64)
    reps = []
    x = 0
    while x < P.order:
        if coset[x] < 0:
            coset[P.mul_many(x, K)] = len(reps)
            reps.append(x)
        x += 1
    reps_arr = np.array(reps, dtype=np.int64)
    m = len(reps)
    prods = P.mul_many(reps_arr[:, None], reps_arr[None, :])
    table = coset[prods]
    labels = tuple(P.label(r) for r in reps)
    return GroupTable(m, table, int(coset[P.identity]), coset[P.inv_many(reps_arr)], labels)


# ---------------------------------------------------------------------------
# classification of unital quadratic phases
# ---------------------------------------------------------------------------


def classify_quad_p(p: int, n) -> FinAbelian:
    """Quadratic unital maps from ``⊕ Z/p^{n_i}`` to the circle, as an abstract group."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n = [int(e) for e in n]
    if any(e < 1 for e in n):
        raise ValueError("exponents must be >= 1")
    pairs = [min(n[i], n[j]) for i in range(len(n)) for j in range(i + 1, len(n))]
    if p == 2:
        orders = [2 ** (e - 1) for e in n] + [2**m for m in pairs] + [2 ** (e + 1) for e in n]
    else:
        orders = [p**e for e in n] + [p**m for m in pairs] + [p**e for e in n]
    return FinAbelian.from_cyclic(o for o in orders if o > 1)


def classify_quad(G: FinAbelian) -> FinAbelian:
    orders = []
    for p, exps in G.primary_components().items():
        orders.extend(classify_quad_p(p, exps).invariant_factors)
    return FinAbelian.from_cyclic(orders)


def twisted_orders_check(n: int) -> dict:
    """Orders of ``(0, g)`` and ``(2g^2, 2g)`` in ``Z/2^n ⋊_σ Z/2^n`` for the generator ``g``."""
    A = FinAbelian((2**n,))
    P = pol2_abelianization(A, max_order=None)
    g, m = 1, 2**n
    x = P.encode([0], g)
    y = P.encode([2 * g * g % m], 2 * g % m)
    ox, oy = P.element_order(x), P.element_order(y)
    meet = P.cyclic_subgroup(x) & P.cyclic_subgroup(y)
    return {"n": n, "order_0g": ox, "order_2g2_2g": oy, "intersection": len(meet)}


def realized_fingerprint(P: TwistedProduct):
    return fingerprint(P.realized)
