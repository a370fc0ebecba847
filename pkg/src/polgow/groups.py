"""Finite groups as explicit multiplication tables.

Elements are the dense indices ``0..n-1``; ``table[a, b]`` is the index of
``a*b``.  All constructions are deterministic so that element indexing is
reproducible across runs.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence, TypeVar

import numpy as np

from .abelian import FinAbelian, LatticeBasis, factorize, lcm, smith_normal_form

EXHAUSTIVE_AXIOM_CAP = 256
BRUTE_ISO_CAP = 128
CLOSURE_CAP = 10_000

T = TypeVar("T", bound=Hashable)


class GroupSizeError(ValueError):
    """A size cap was exceeded."""


@dataclass(frozen=True, eq=False)
class GroupTable:
    order: int
    table: np.ndarray
    identity: int
    inverse: np.ndarray
    labels: tuple[str, ...] | None = None
    name: str = ""

    def __post_init__(self):
        table = np.ascontiguousarray(self.table, dtype=np.int64)
        if table.shape != (self.order, self.order):
            raise ValueError(f"table shape {table.shape} does not match order {self.order}")
        table.setflags(write=False)
        inverse = np.ascontiguousarray(self.inverse, dtype=np.int64)
        inverse.setflags(write=False)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "inverse", inverse)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(s) for s in self.labels))

    @classmethod
    def from_table(cls, table, labels=None, name: str = "") -> "GroupTable":
        """Build from a bare multiplication table, deriving identity and inverses."""
        table = np.asarray(table, dtype=np.int64)
        n = table.shape[0]
        ar = np.arange(n)
        ids = [e for e in range(n) if np.array_equal(table[e], ar) and np.array_equal(table[:, e], ar)]
        if len(ids) != 1:
            raise ValueError("table has no two-sided identity")
        e = ids[0]
        rows, cols = np.nonzero(table == e)
        inverse = np.full(n, -1, dtype=np.int64)
        inverse[rows] = cols
        if (inverse < 0).any():
            raise ValueError("some element has no inverse")
        return cls(n, table, e, inverse, labels, name)

    # -- element arithmetic ------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

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

    def commutator(self, a: int, b: int) -> int:
        """``[a, b] = a^-1 b^-1 a b``."""
        t, iv = self.table, self.inverse
        return int(t[t[iv[a], iv[b]], t[a, b]])

    def conj(self, a: int, b: int) -> int:
        """``a^b = b^-1 a b``."""
        t = self.table
        return int(t[t[self.inverse[b], a], b])

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels is not None else str(a)

    def element_orders(self) -> np.ndarray:
        n = self.order
        ar = np.arange(n)
        orders = np.zeros(n, dtype=np.int64)
        pw = ar.copy()
        k = 1
        while (orders == 0).any():
            done = (pw == self.identity) & (orders == 0)
            orders[done] = k
            pw = self.table[pw, ar]
            k += 1
            if k > n + 1:
                raise ValueError("element order exceeds group order; table is not a group")
        return orders

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    @property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def center(self) -> list[int]:
        return [int(z) for z in range(self.order) if np.array_equal(self.table[z], self.table[:, z])]

    def check_axioms(self, samples: int = 20_000, seed: int = 0) -> tuple[bool, str]:
        """Identity, inverse and associativity; exhaustive up to order 256."""
        n, t, e = self.order, self.table, self.identity
        ar = np.arange(n)
        if not (np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)):
            return False, "identity law fails"
        if not (t[ar, self.inverse] == e).all():
            bad = int(np.nonzero(t[ar, self.inverse] != e)[0][0])
            return False, f"inverse law fails at {bad}"
        if n <= EXHAUSTIVE_AXIOM_CAP:
            for x in range(n):
                lhs = t[t[x]][:, ar]  # (x y) z for all y, z
                rhs = t[x][t]  # x (y z)
                if not np.array_equal(lhs, rhs):
                    y, z = np.argwhere(lhs != rhs)[0]
                    return False, f"associativity fails at ({x}, {y}, {z})"
        else:
            rng = np.random.default_rng(seed)
            x, y, z = rng.integers(0, n, size=(3, samples))
            bad = t[t[x, y], z] != t[x, t[y, z]]
            if bad.any():
                i = int(np.argmax(bad))
                return False, f"associativity fails at ({x[i]}, {y[i]}, {z[i]})"
        return True, ""

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        data = {"order": self.order, "identity": self.identity, "table": self.table.tolist()}
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":")) + "\n"

    @classmethod
    def from_json(cls, data: dict, name: str = "") -> "GroupTable":
        G = cls.from_table(data["table"], data.get("labels"), name)
        if G.order != data["order"] or G.identity != data["identity"]:
            raise ValueError("group file: order/identity do not match table")
        return G

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path: str | Path) -> "GroupTable":
        return cls.from_json(json.loads(Path(path).read_text()), name=Path(path).stem)

    def __repr__(self) -> str:
        return f"GroupTable({self.name or 'G'}, order={self.order})"


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: GroupTable = field(repr=False)
    members: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(int(m) for m in self.members)))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x: int) -> bool:
        return x in set(self.members)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.members)] = True
        return m

    def is_normal(self) -> bool:
        return _normality_violation(self.parent, self.mask()) is None


# ---------------------------------------------------------------------------
# generic closure
# ---------------------------------------------------------------------------


def closure(
    generators: Sequence[T],
    mul: Callable[[T, T], T],
    identity: T,
    cap: int = CLOSURE_CAP,
) -> list[T]:
    """Breadth-first closure of ``generators`` under right multiplication.

    The identity comes first; generators are tried in the given order, so the
    enumeration order is reproducible.
    """
    seen = {identity: 0}
    out = [identity]
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in generators:
            y = mul(x, g)
            if y not in seen:
                seen[y] = len(out)
                out.append(y)
                if len(out) > cap:
                    raise GroupSizeError(f"closure exceeds the size cap of {cap} elements")
                queue.append(y)
    return out


def table_from_elements(elements: Sequence[T], mul: Callable[[T, T], T], labels=None, name="") -> GroupTable:
    index = {x: i for i, x in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        table[i] = [index[mul(a, b)] for b in elements]
    return GroupTable.from_table(table, labels, name)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def make_cyclic(n: int) -> GroupTable:
    if n < 1:
        raise ValueError("cyclic group order must be >= 1")
    ar = np.arange(n)
    table = (ar[:, None] + ar[None, :]) % n
    return GroupTable(n, table, 0, (-ar) % n, tuple(str(i) for i in range(n)), f"Z{n}")


def trivial_group() -> GroupTable:
    return make_cyclic(1)


def direct_product(A: GroupTable, B: GroupTable) -> GroupTable:
    na, nb = A.order, B.order
    table = (A.table[:, None, :, None] * nb + B.table[None, :, None, :]).reshape(na * nb, na * nb)
    inverse = (A.inverse[:, None] * nb + B.inverse[None, :]).ravel()
    labels = tuple(f"({A.label(a)},{B.label(b)})" for a in range(na) for b in range(nb))
    name = f"{A.name}x{B.name}" if A.name and B.name else ""
    return GroupTable(na * nb, table, A.identity * nb + B.identity, inverse, labels, name)


def from_abelian(A: FinAbelian) -> GroupTable:
    """Table of ``⊕ Z/d_i``; index agrees with :meth:`FinAbelian.index`."""
    G = trivial_group()
    for d in A.invariant_factors:
        G = direct_product(G, make_cyclic(d)) if G.order > 1 else make_cyclic(d)
    labels = tuple(str(x.coords) for x in A.elements())
    return GroupTable(G.order, G.table, G.identity, G.inverse, labels, "x".join(f"Z{d}" for d in A.invariant_factors) or "Z1")


def perm_from_cycles(degree: int, *cycles: Sequence[int]) -> tuple[int, ...]:
    img = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            img[a] = b
    return tuple(img)


def perm_cycles(p: Sequence[int]) -> str:
    seen, parts = set(), []
    for s in range(len(p)):
        if s in seen or p[s] == s:
            continue
        cyc, x = [], s
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = p[x]
        parts.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(parts) or "()"


def perm_group(generators: Sequence[Sequence[int]], degree: int, cap: int = CLOSURE_CAP, name: str = "") -> GroupTable:
    """Subgroup of ``Sym(degree)`` generated by image lists.

    Products compose as functions: ``(a*b)[i] = a[b[i]]``.
    """
    gens = [tuple(int(v) for v in g) for g in generators]
    for g in gens:
        if sorted(g) != list(range(degree)):
            raise ValueError(f"not a permutation of 0..{degree - 1}: {g}")
    mul = lambda a, b: tuple(a[i] for i in b)  # noqa: E731
    elements = closure(gens, mul, tuple(range(degree)), cap)
    return table_from_elements(elements, mul, [perm_cycles(p) for p in elements], name)


def symmetric_group(n: int) -> GroupTable:
    gens = [] if n < 2 else [perm_from_cycles(n, (0, 1))] + ([perm_from_cycles(n, tuple(range(n)))] if n > 2 else [])
    return perm_group(gens, max(n, 1), name=f"S{n}")


def alternating_group(n: int) -> GroupTable:
    gens = [perm_from_cycles(n, (0, 1, i)) for i in range(2, n)]
    return perm_group(gens, max(n, 1), name=f"A{n}")


def dihedral_group(n: int) -> GroupTable:
    """Symmetries of the regular n-gon, order ``2n``."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return perm_group([rot, ref], n, name=f"D{n}")


def _matrix_group(gens: Sequence[np.ndarray], p: int, name: str) -> GroupTable:
    key = lambda m: tuple(int(v) for v in np.asarray(m).ravel())  # noqa: E731
    dim = np.asarray(gens[0]).shape[0]

    def mul(a, b):
        A = np.array(a, dtype=np.int64).reshape(dim, dim)
        B = np.array(b, dtype=np.int64).reshape(dim, dim)
        return key((A @ B) % p)

    elements = closure([key(np.asarray(g) % p) for g in gens], mul, key(np.eye(dim, dtype=np.int64)))
    labels = [str(np.array(e).reshape(dim, dim).tolist()) for e in elements]
    return table_from_elements(elements, mul, labels, name)


def quaternion_group() -> GroupTable:
    # unit quaternions ±1, ±i, ±j, ±k as 2x2 matrices over F_3
    i = np.array([[0, 2], [1, 0]])  # squares to -1
    j = np.array([[1, 1], [1, 2]])
    return _matrix_group([i, j], 3, "Q8")


def heisenberg_group(p: int) -> GroupTable:
    """Upper unitriangular 3x3 matrices over ``Z/p``."""
    x = np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]])
    y = np.array([[1, 0, 0], [0, 1, 1], [0, 0, 1]])
    return _matrix_group([x, y], p, f"Heis{p}")


def sl2_perm_group(p: int) -> GroupTable:
    """``SL(2, p)`` acting on the ``p^2 - 1`` nonzero vectors of ``F_p^2``."""
    vecs = [(a, b) for a in range(p) for b in range(p) if (a, b) != (0, 0)]
    index = {v: i for i, v in enumerate(vecs)}

    def as_perm(m):
        return [index[((m[0][0] * a + m[0][1] * b) % p, (m[1][0] * a + m[1][1] * b) % p)] for a, b in vecs]

    return perm_group([as_perm([[1, 1], [0, 1]]), as_perm([[0, p - 1], [1, 0]])], len(vecs), name=f"SL2_{p}")


# ---------------------------------------------------------------------------
# subgroups and quotients
# ---------------------------------------------------------------------------


def generated_subgroup(G: GroupTable, gens: Iterable[int]) -> Subgroup:
    gens = np.unique(np.asarray(list(gens), dtype=np.int64))
    mask = np.zeros(G.order, dtype=bool)
    mask[G.identity] = True
    frontier = np.array([G.identity])
    while frontier.size and gens.size:
        new = np.unique(G.table[np.ix_(frontier, gens)].ravel())
        new = new[~mask[new]]
        mask[new] = True
        frontier = new
    return Subgroup(G, tuple(np.nonzero(mask)[0]))


def _conjugates(G: GroupTable, xs: np.ndarray) -> np.ndarray:
    # g^-1 x g for every g
    t = G.table
    return np.unique(t[t[G.inverse[:, None], xs[None, :]], np.arange(G.order)[:, None]].ravel())


def _normality_violation(G: GroupTable, mask: np.ndarray):
    members = np.nonzero(mask)[0]
    t = G.table
    conj = t[t[G.inverse[:, None], members[None, :]], np.arange(G.order)[:, None]]
    bad = np.argwhere(~mask[conj])
    if bad.size:
        g, k = bad[0]
        return int(g), int(members[k]), int(conj[g, k])
    return None


def normal_closure(G: GroupTable, seeds: Iterable[int]) -> Subgroup:
    """Smallest normal subgroup containing ``seeds``."""
    gens = np.unique(np.asarray(list(seeds) + [G.identity], dtype=np.int64))
    while True:
        gens = _conjugates(G, gens)
        H = generated_subgroup(G, gens)
        if _normality_violation(G, H.mask()) is None:
            return H
        gens = np.asarray(H.members, dtype=np.int64)


def quotient(G: GroupTable, N: Subgroup) -> tuple[GroupTable, np.ndarray]:
    """Coset group ``G/N`` and the projection ``G -> G/N``.

    Cosets are represented by their minimal element index and listed in
    increasing order of representative.
    """
    if N.parent is not G:
        raise ValueError("subgroup belongs to another group")
    bad = _normality_violation(G, N.mask())
    if bad is not None:
        g, n, c = bad
        raise ValueError(
            f"subgroup is not normal: conjugating {G.label(n)} by {G.label(g)} gives {G.label(c)} outside it"
        )
    members = np.asarray(N.members, dtype=np.int64)
    reps_of = G.table[:, members].min(axis=1)
    reps = np.unique(reps_of)
    coset_index = np.full(G.order, -1, dtype=np.int64)
    coset_index[reps] = np.arange(len(reps))
    proj = coset_index[reps_of]
    Q = proj[G.table[np.ix_(reps, reps)]]
    labels = tuple(G.label(r) for r in reps) if G.labels is not None else None
    inverse = proj[G.inverse[reps]]
    return GroupTable(len(reps), Q, int(proj[G.identity]), inverse, labels), proj


def commutator_set(G: GroupTable) -> np.ndarray:
    t, iv = G.table, G.inverse
    ar = np.arange(G.order)
    return np.unique(t[t[iv[:, None], iv[None, :]], t[ar[:, None], ar[None, :]]])


def derived_subgroup(G: GroupTable) -> Subgroup:
    return normal_closure(G, commutator_set(G))


def _small_generating_set(G: GroupTable) -> list[int]:
    orders = G.element_orders()
    candidates = sorted(range(G.order), key=lambda x: (-orders[x], x))
    gens: list[int] = []
    mask = np.zeros(G.order, dtype=bool)
    mask[G.identity] = True
    for x in candidates:
        if mask.all():
            break
        if not mask[x]:
            gens.append(x)
            mask = generated_subgroup(G, gens).mask()
    return gens


def abelian_structure(Q: GroupTable) -> tuple[FinAbelian, np.ndarray]:
    """Invariant factors of an abelian table and invariant-factor coordinates of each element."""
    if not Q.is_abelian:
        raise ValueError("abelian_structure needs an abelian group")
    n = Q.order
    if n == 1:
        return FinAbelian(()), np.zeros((1, 0), dtype=np.int64)
    gens = _small_generating_set(Q)
    r = len(gens)
    word = {Q.identity: (0,) * r}
    lattice = LatticeBasis(r, modulus=n)
    queue = deque([Q.identity])
    while queue:
        x = queue.popleft()
        for i, g in enumerate(gens):
            y = int(Q.table[x, g])
            step = tuple(w + (j == i) for j, w in enumerate(word[x]))
            if y not in word:
                word[y] = step
                queue.append(y)
            else:
                lattice.insert([a - b for a, b in zip(step, word[y])])
    _, D, V = smith_normal_form(lattice.matrix())
    diag = [int(D[i, i]) for i in range(r)]
    keep = [i for i, d in enumerate(diag) if d != 1]
    A = FinAbelian(tuple(diag[i] for i in keep))
    W = np.array([word[x] for x in range(n)], dtype=object)
    Y = W.dot(V)
    coords = np.array([[int(Y[x, i]) % diag[i] for i in keep] for x in range(n)], dtype=np.int64).reshape(n, len(keep))
    return A, coords


def abelianization(G: GroupTable) -> tuple[FinAbelian, np.ndarray]:
    """``G^ab`` in invariant-factor form with projection as coordinate rows."""
    K = derived_subgroup(G)
    Q, proj = quotient(G, K)
    A, coords = abelian_structure(Q)
    return A, coords[proj]


def is_perfect(G: GroupTable) -> bool:
    return derived_subgroup(G).order == G.order


def commutator_width(G: GroupTable) -> int:
    """Least ``k`` such that every element is a product of ``k`` commutators.

    Only defined for perfect groups; the trivial group has width 0 (empty
    product).
    """
    if not is_perfect(G):
        raise ValueError("commutator width is only defined here for perfect groups")
    if G.order == 1:
        return 0
    C = commutator_set(G)
    mask = np.zeros(G.order, dtype=bool)
    mask[C] = True
    k = 1
    while not mask.all():
        cur = np.nonzero(mask)[0]
        mask[np.unique(G.table[np.ix_(cur, C)])] = True
        k += 1
    return k


# ---------------------------------------------------------------------------
# identification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupFingerprint:
    order: int
    abelian_invariants: tuple[int, ...]
    exponent: int
    center_order: int
    element_order_histogram: tuple[tuple[int, int], ...]
    is_abelian: bool
    is_perfect: bool

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "abelian_invariants": list(self.abelian_invariants),
            "exponent": self.exponent,
            "center_order": self.center_order,
            "element_order_histogram": {str(k): v for k, v in self.element_order_histogram},
            "is_abelian": self.is_abelian,
            "is_perfect": self.is_perfect,
        }


def fingerprint(G: GroupTable) -> GroupFingerprint:
    orders = G.element_orders()
    A, _ = abelianization(G)
    return GroupFingerprint(
        order=G.order,
        abelian_invariants=A.invariant_factors,
        exponent=lcm(*(int(o) for o in orders)),
        center_order=len(G.center()),
        element_order_histogram=tuple(sorted(Counter(int(o) for o in orders).items())),
        is_abelian=G.is_abelian,
        is_perfect=A.order == 1,
    )


def find_isomorphism(G: GroupTable, H: GroupTable) -> np.ndarray | None:
    """Isomorphism ``G -> H`` as an index array, or ``None``.

    Backtracks over images of a small generating set, pruning by element
    order and checking consistency on each partial generated subgroup.
    """
    if G.order != H.order:
        return None
    if G.order > BRUTE_ISO_CAP:
        raise GroupSizeError(
            f"brute-force isomorphism is capped at order {BRUTE_ISO_CAP}; compare fingerprints instead"
        )
    if fingerprint(G) != fingerprint(H):
        return None
    gens = _small_generating_set(G)
    og, oh = G.element_orders(), H.element_orders()
    by_order: dict[int, list[int]] = {}
    for h in range(H.order):
        by_order.setdefault(int(oh[h]), []).append(h)

    def search(images: list[int]) -> dict[int, int] | None:
        if len(images) == len(gens):
            return _extend_partial(G, H, gens, images)
        for h in by_order.get(int(og[gens[len(images)]]), []):
            trial = images + [h]
            # prefix consistency: restrict to the subgroup of the assigned generators
            phi = _extend_partial(G, H, gens[: len(trial)], trial)
            if phi is None:
                continue
            found = search(trial)
            if found is not None:
                return found
        return None

    phi = search([])
    if phi is None:
        return None
    return np.array([phi[x] for x in range(G.order)], dtype=np.int64)


def _extend_partial(G, H, gens, images):
    phi = {G.identity: H.identity}
    queue = deque([G.identity])
    while queue:
        x = queue.popleft()
        for g, h in zip(gens, images):
            y, hy = int(G.table[x, g]), int(H.table[phi[x], h])
            if y in phi:
                if phi[y] != hy:
                    return None
            else:
                phi[y] = hy
                queue.append(y)
    if len(set(phi.values())) != len(phi):
        return None
    return phi


def brute_isomorphic(G: GroupTable, H: GroupTable) -> bool:
    return find_isomorphism(G, H) is not None


# ---------------------------------------------------------------------------
# group specs
# ---------------------------------------------------------------------------


def parse_group_spec(spec: str) -> GroupTable:
    """Parse ``Z6``, ``Z2xZ4``, ``S3``, ``A5``, ``D4``, ``Q8``, ``Heis3``, ``SL2_5`` or a JSON path."""
    path = Path(spec)
    if spec.endswith(".json") or path.is_file():
        return GroupTable.load(path)
    parts = [s for s in spec.replace("*", "x").split("x") if s]
    if not parts:
        raise ValueError(f"empty group spec {spec!r}")
    groups = [_parse_atom(p) for p in parts]
    G = groups[0]
    for H in groups[1:]:
        G = direct_product(G, H)
    return G


def _parse_atom(tok: str) -> GroupTable:
    t = tok.strip()
    low = t.lower()
    if low in ("1", "trivial", "e"):
        return trivial_group()
    if low == "q8":
        return quaternion_group()
    if low.startswith("heis"):
        return heisenberg_group(int(t[4:]))
    if low.startswith("sl2_"):
        return sl2_perm_group(int(t[4:]))
    builders = {"z": make_cyclic, "c": make_cyclic, "s": symmetric_group, "a": alternating_group, "d": dihedral_group}
    if low[0] in builders and low[1:].isdigit():
        return builders[low[0]](int(low[1:]))
    raise ValueError(f"unrecognized group token {tok!r}")


def all_abelian_groups(max_order: int) -> list[FinAbelian]:
    """Every finite abelian group of order ``<= max_order`` up to isomorphism."""
    out = []
    for n in range(1, max_order + 1):
        per_prime = []
        for p, e in factorize(n).items() if n > 1 else []:
            per_prime.append([[p**k for k in part] for part in _partitions(e)])
        for choice in product(*per_prime):
            out.append(FinAbelian.from_cyclic([o for part in choice for o in part]))
    return out


def _partitions(n: int, max_part: int | None = None):
    if max_part is None:
        max_part = n
    if n == 0:
        yield []
        return
    for k in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k] + rest
