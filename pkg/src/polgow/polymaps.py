"""Maps between groups: finite differences, polynomial degree, and quadratic phases."""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, log2
from typing import Callable, Iterable, Sequence

import numpy as np

from .abelian import FinAbelian, LinearSolution, lcm, solve_linear_mod
from .groups import GroupTable, abelian_structure, make_cyclic

DEFAULT_BUDGET = 10**9


def op_budget() -> int:
    return int(os.environ.get("POLGOW_BUDGET", DEFAULT_BUDGET))


class BudgetError(RuntimeError):
    """Requested computation exceeds the operation budget."""


@dataclass(frozen=True, eq=False)
class GroupMap:
    source: GroupTable = field(repr=False)
    target: GroupTable = field(repr=False)
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64).reshape(self.source.order)
        if vals.size and (vals.min() < 0 or vals.max() >= self.target.order):
            raise ValueError("map values out of range of the target")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, g: int) -> int:
        return int(self.values[g])

    @property
    def is_unital(self) -> bool:
        return int(self.values[self.source.identity]) == self.target.identity

    def to_json(self, source_ref: str = "", target_ref: str = "") -> dict:
        return {"source": source_ref, "target": target_ref, "values": self.values.tolist()}


@dataclass(frozen=True, eq=False)
class PhaseMap:
    """``g -> exp(2πi exponents[g] / N)`` on an abelian group."""

    source: GroupTable = field(repr=False)
    modulus: int
    exponents: np.ndarray

    def __post_init__(self):
        ex = np.asarray(self.exponents, dtype=np.int64).reshape(self.source.order) % self.modulus
        ex.setflags(write=False)
        object.__setattr__(self, "exponents", ex)

    @property
    def is_unital(self) -> bool:
        return int(self.exponents[self.source.identity]) == 0

    def as_group_map(self) -> GroupMap:
        return GroupMap(self.source, make_cyclic(self.modulus), self.exponents)

    def phases(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.exponents / self.modulus)

    def to_json(self, source_ref: str = "") -> dict:
        return {"source": source_ref, "modulus": self.modulus, "exponents": self.exponents.tolist()}


def constant_map(G: GroupTable, H: GroupTable, c: int) -> GroupMap:
    return GroupMap(G, H, np.full(G.order, c))


# ---------------------------------------------------------------------------
# differences and degree
# ---------------------------------------------------------------------------


def finite_difference(phi: GroupMap, k: int) -> GroupMap:
    """``g -> φ(kg) φ(g)^-1``."""
    T, v = phi.target, phi.values
    return GroupMap(phi.source, T, T.table[v[phi.source.table[k]], T.inverse[v]])


def _degree_rec(G: GroupTable, T: GroupTable, vals: tuple, d: int, memo: dict) -> bool:
    key = (vals, d)
    if key in memo:
        return memo[key]
    arr = np.asarray(vals, dtype=np.int64)
    if d == -1:
        out = bool((arr == T.identity).all())
    else:
        out = True
        for k in range(G.order):
            diff = T.table[arr[G.table[k]], T.inverse[arr]]
            if not _degree_rec(G, T, tuple(diff.tolist()), d - 1, memo):
                out = False
                break
    memo[key] = out
    return out


def degree_at_most(phi: GroupMap, d: int, budget: int | None = None) -> bool:
    """Every ``(d+1)``-fold difference is identically ``1``; degree ``-1`` means ``φ ≡ 1``."""
    if d < -1:
        raise ValueError("degree must be >= -1")
    budget = op_budget() if budget is None else budget
    cost = phi.source.order ** (d + 2)
    if cost > budget:
        raise BudgetError(f"degree check costs {cost} operations, above the budget {budget}")
    return _degree_rec(phi.source, phi.target, tuple(phi.values.tolist()), d, {})


def is_homomorphism(phi: GroupMap) -> tuple[bool, tuple[int, int] | None]:
    G, T, v = phi.source, phi.target, phi.values
    lhs = v[G.table]
    rhs = T.table[v[:, None], v[None, :]]
    bad = np.argwhere(lhs != rhs)
    if bad.size:
        return False, (int(bad[0][0]), int(bad[0][1]))
    return True, None


def decompose_degree_one(phi: GroupMap) -> tuple[GroupMap, int]:
    """Split a degree-one map as ``φ(g) = ψ(g) c`` with ``ψ`` a homomorphism and ``c = φ(1)``."""
    T = phi.target
    c = int(phi.values[phi.source.identity])
    psi = GroupMap(phi.source, T, T.table[phi.values, T.inverse[c]])
    ok, witness = is_homomorphism(psi)
    if not ok:
        raise ValueError(f"map is not of degree <= 1: φ(g)φ(1)^-1 fails multiplicativity at {witness}")
    return psi, c


def beta(phi: GroupMap, k: int) -> GroupMap:
    """``g -> φ(k)^-1 φ(kg) φ(g)^-1``."""
    if not phi.is_unital:
        raise ValueError("beta needs a unital map")
    T = phi.target
    d = finite_difference(phi, k).values
    return GroupMap(phi.source, T, T.table[T.inverse[phi.values[k]], d])


def quad_relation_check(phi: GroupMap) -> tuple[bool, tuple[int, int, int] | None]:
    """``φ(abc) = φ(ab) φ(b)^-1 φ(a)^-1 φ(ac) φ(c)^-1 φ(bc)`` for all triples."""
    if not phi.is_unital:
        raise ValueError("quadratic relations are stated for unital maps")
    G, T, v = phi.source, phi.target, phi.values
    t, tt, iv = G.table, T.table, T.inverse
    vi = iv[v]
    cs = np.arange(G.order)
    for a in range(G.order):
        for b in range(G.order):
            ab = t[a, b]
            left = tt[tt[v[ab], vi[b]], vi[a]]
            rhs = tt[tt[tt[left, v[t[a, cs]]], vi[cs]], v[t[b, cs]]]
            bad = np.nonzero(v[t[ab, cs]] != rhs)[0]
            if bad.size:
                return False, (a, b, int(bad[0]))
    return True, None


def ranges_commute(alpha: GroupMap, beta_: GroupMap) -> bool:
    T = alpha.target
    ra, rb = np.unique(alpha.values), np.unique(beta_.values)
    return bool((T.table[np.ix_(ra, rb)] == T.table[np.ix_(rb, ra)].T).all())


def pointwise_product(alpha: GroupMap, beta_: GroupMap) -> GroupMap:
    return GroupMap(alpha.source, alpha.target, alpha.target.table[alpha.values, beta_.values])


def homomorphisms(G: GroupTable, H: GroupTable, gens: Sequence[int] | None = None) -> list[GroupMap]:
    """All homomorphisms ``G -> H`` by extending every assignment on a generating set."""
    from .groups import _small_generating_set

    gens = list(gens) if gens is not None else _small_generating_set(G)
    out = []
    for images in itertools.product(range(H.order), repeat=len(gens)):
        phi = {G.identity: H.identity}
        queue, ok = [G.identity], True
        while queue and ok:
            x = queue.pop()
            for g, h in zip(gens, images):
                y, hy = int(G.table[x, g]), int(H.table[phi[x], h])
                if y in phi:
                    if phi[y] != hy:
                        ok = False
                        break
                else:
                    phi[y] = hy
                    queue.append(y)
        if ok:
            out.append(GroupMap(G, H, [phi[x] for x in range(G.order)]))
    return out


# ---------------------------------------------------------------------------
# quadratic phases on finite abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadOracleResult:
    count: int
    structure: FinAbelian
    modulus: int
    saturated: bool
    generators: tuple[PhaseMap, ...] = field(repr=False)
    exhaustive_count: int | None = None

    def all_maps(self):
        """Every solution, as integer combinations of the generators."""
        G = self.generators[0].source if self.generators else None
        orders = self.structure.invariant_factors
        for coeffs in itertools.product(*(range(d) for d in orders)):
            ex = sum((c * g.exponents for c, g in zip(coeffs, self.generators)), np.zeros(G.order, dtype=np.int64))
            yield PhaseMap(G, self.modulus, ex)

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "invariant_factors": list(self.structure.invariant_factors),
            "modulus": self.modulus,
            "saturated": self.saturated,
            "exhaustive_count": self.exhaustive_count,
        }


def default_modulus(A: FinAbelian) -> int:
    """``lcm_p p^(n_max + 1)`` over the primary parts."""
    return lcm(*(p ** (max(exps) + 1) for p, exps in A.primary_components().items()))


def third_difference_rows(G: GroupTable) -> list[list[int]]:
    """Linear conditions on exponent vectors ``q`` for a unital quadratic phase."""
    n, t, e = G.order, G.table, G.identity
    rows = []
    r0 = [0] * n
    r0[e] = 1
    rows.append(r0)
    for x in range(n):
        for y in range(x, n):
            xy = t[x, y]
            for z in range(y, n):
                row = [0] * n
                for idx, s in ((t[xy, z], 1), (xy, -1), (t[x, z], -1), (t[y, z], -1), (x, 1), (y, 1), (z, 1), (e, -1)):
                    row[idx] += s
                if any(row):
                    rows.append(row)
    return rows


def _solve_quad(G: GroupTable, N: int) -> LinearSolution:
    return solve_linear_mod(third_difference_rows(G), N, n=G.order)


def _exhaustive_quad_count(G: GroupTable, N: int) -> int:
    n, t, e = G.order, G.table, G.identity
    others = [x for x in range(n) if x != e]
    count = 0
    triples = np.array([(x, y, z) for x in range(n) for y in range(n) for z in range(n)])
    x, y, z = triples.T
    for vals in itertools.product(range(N), repeat=len(others)):
        q = np.zeros(n, dtype=np.int64)
        q[others] = vals
        d = q[t[t[x, y], z]] - q[t[x, y]] - q[t[x, z]] - q[t[y, z]] + q[x] + q[y] + q[z] - q[e]
        if not (d % N).any():
            count += 1
    return count


def enumerate_quad_phase(G: GroupTable, N: int | None = None, exhaustive_limit: float = 20.0) -> QuadOracleResult:
    """Unital quadratic maps ``G -> μ_N`` as the solution group of the third-difference system."""
    if not G.is_abelian:
        raise ValueError("quadratic phase oracle needs an abelian source")
    if G.order > 64:
        raise BudgetError("quadratic phase oracle is limited to order 64")
    A, _ = abelian_structure(G)
    if N is None:
        N = default_modulus(A) if A.order > 1 else 1
    sol = _solve_quad(G, N)
    doubled = _solve_quad(G, 2 * N)
    gens = tuple(PhaseMap(G, N, v) for v in sol.generators)
    exhaustive = None
    if G.order * log2(max(N, 2)) <= exhaustive_limit:
        exhaustive = _exhaustive_quad_count(G, N)
    return QuadOracleResult(sol.count, sol.group, N, doubled.count == sol.count, gens, exhaustive)


# ---------------------------------------------------------------------------
# free groups and Z^d
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeWord:
    """Reduced word in a free group; letters are ``(generator, ±1)``."""

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        out: list[tuple[int, int]] = []
        for gen, e in self.letters:
            if e not in (1, -1):
                raise ValueError("letter exponents must be ±1")
            if out and out[-1] == (gen, -e):
                out.pop()
            else:
                out.append((int(gen), int(e)))
        object.__setattr__(self, "letters", tuple(out))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    @classmethod
    def parse(cls, s: str) -> "FreeWord":
        """Parse words like ``"a b A B"`` or ``"abAB"``; capitals are inverses."""
        letters = []
        for ch in s.replace(" ", ""):
            gen = ord(ch.lower()) - ord("a")
            letters.append((gen, -1 if ch.isupper() else 1))
        return cls(tuple(letters))

    def __str__(self) -> str:
        return "".join(chr(ord("a") + g) if e > 0 else chr(ord("A") + g) for g, e in self.letters) or "1"


def exotic_free_word_eval(w: FreeWord) -> int:
    """``Σ_{i<j} m_i n_j`` for ``w = a^{n_1} b^{m_1} ... a^{n_k} b^{m_k}``: signed count of b's left of a's."""
    total = running_b = 0
    for gen, e in w.letters:
        if gen == 1:
            running_b += e
        elif gen == 0:
            total += e * running_b
        else:
            raise ValueError("exotic map is defined on words in a and b")
    return total


def random_free_word(rng: np.random.Generator, max_len: int = 8, rank: int = 2) -> FreeWord:
    length = int(rng.integers(0, max_len + 1))
    gens = rng.integers(0, rank, size=length)
    signs = rng.choice([-1, 1], size=length)
    return FreeWord(tuple(zip(gens.tolist(), signs.tolist())))


def binom(n: int, k: int) -> Fraction:
    """Generalized binomial ``n(n-1)...(n-k+1)/k!`` valid for negative ``n``."""
    num = 1
    for i in range(k):
        num *= n - i
    return Fraction(num, factorial(k))


def quadratic_multi_indices(d: int) -> list[tuple[int, ...]]:
    """Multi-indices of total degree 1 or 2 in ``d`` variables; ``(d^2+3d)/2`` of them."""
    out = []
    for total in (1, 2):
        for j in itertools.product(range(total + 1), repeat=d):
            if sum(j) == total:
                out.append(j)
    return sorted(out, key=lambda j: (sum(j), tuple(-x for x in j)))


def taylor_quadratic_eval(c: dict[tuple[int, ...], Fraction], n: Sequence[int]) -> Fraction:
    """``Σ_j c_j Π_i binom(n_i, j_i)`` reduced mod 1."""
    total = Fraction(0)
    for j, cj in c.items():
        if len(j) != len(n):
            raise ValueError("multi-index and argument dimensions differ")
        term = Fraction(cj)
        for ni, ji in zip(n, j):
            term *= binom(int(ni), ji)
        total += term
    return total % 1


@dataclass(frozen=True)
class SampledCheck:
    ok: bool
    trials: int
    seed: int
    witness: tuple | None = None
    value: object = None


def iterated_difference(evaluate: Callable, mul: Callable, steps: Sequence, x, sub: Callable = lambda a, b: a - b):
    """``(Δ_{s_1} Δ_{s_2} ... Δ_{s_m} f)(x)`` with ``(Δ_s f)(x) = f(s x) - f(x)`` in an additive target."""
    if not steps:
        return evaluate(x)
    inner = steps[1:]
    return sub(iterated_difference(evaluate, mul, inner, mul(steps[0], x), sub), iterated_difference(evaluate, mul, inner, x, sub))


def sampled_degree_check(
    evaluate: Callable,
    sampler: Callable[[np.random.Generator], object],
    mul: Callable,
    d: int,
    trials: int,
    seed: int = 0,
    is_zero: Callable[[object], bool] = lambda v: v == 0,
    sub: Callable = lambda a, b: a - b,
) -> SampledCheck:
    """Check that ``d+1``-fold differences vanish at random points."""
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        steps = [sampler(rng) for _ in range(d + 1)]
        x = sampler(rng)
        v = iterated_difference(evaluate, mul, steps, x, sub)
        if not is_zero(v):
            return SampledCheck(False, trial + 1, seed, (tuple(steps), x), v)
    return SampledCheck(True, trials, seed)


def exotic_degree_check(d: int, trials: int = 500, seed: int = 0, max_len: int = 8) -> SampledCheck:
    return sampled_degree_check(
        exotic_free_word_eval, lambda r: random_free_word(r, max_len), lambda u, v: u * v, d, trials, seed
    )


def exotic_degree_one_witness() -> tuple[FreeWord, FreeWord, int]:
    """``Δ_a Δ_b φ(1) = φ(ba) - φ(a) - φ(b) + φ(1)``, which is ``1`` although ``ab`` and ``ba`` agree in the abelianization."""
    a, b = FreeWord.parse("a"), FreeWord.parse("b")
    value = iterated_difference(exotic_free_word_eval, lambda u, v: u * v, [a, b], FreeWord())
    return a, b, value


def taylor_degree_check(c: dict, d: int, trials: int = 500, seed: int = 0, box: int = 20) -> SampledCheck:
    dim = len(next(iter(c)))
    return sampled_degree_check(
        lambda n: taylor_quadratic_eval(c, n),
        lambda r: tuple(int(v) for v in r.integers(-box, box + 1, size=dim)),
        lambda u, v: tuple(a + b for a, b in zip(u, v)),
        d,
        trials,
        seed,
        is_zero=lambda v: v % 1 == 0,
        sub=lambda a, b: (a - b) % 1,
    )


# ---------------------------------------------------------------------------
# randomized search on perfect groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadSearchReport:
    trials: int
    seed: int
    passed: int
    homomorphisms: int
    non_homomorphisms: int
    targets: tuple[str, ...]


def _relation_defect(vals: np.ndarray, G: GroupTable, T: GroupTable, a, b, c) -> np.ndarray:
    """Boolean (maps x triples) array: quadratic relation fails."""
    t, tt, iv = G.table, T.table, T.inverse
    ab, ac, bc = t[a, b], t[a, c], t[b, c]
    abc = t[ab, c]
    v = lambda x: vals[:, x]  # noqa: E731
    rhs = tt[tt[tt[tt[tt[v(ab), iv[v(b)]], iv[v(a)]], v(ac)], iv[v(c)]], v(bc)]
    return v(abc) != rhs


def random_quadratic_search(
    G: GroupTable, targets: Sequence[GroupTable], trials: int, seed: int, batch: int = 2000, probe: int = 48
) -> QuadSearchReport:
    """Seeded random unital maps ``G -> H``; count those passing the quadratic relations.

    Half the candidates are uniform, half are sparse edits of a homomorphism
    (the trivial one or, when present, others), which is where near-misses
    live.  Candidates are screened on random triples before the full check.
    """
    rng = np.random.default_rng(seed)
    n = G.order
    triples = np.array(list(itertools.product(range(n), repeat=3)))
    passed = homs = non_homs = 0
    verdicts: dict[tuple, tuple[bool, bool]] = {}
    done = 0
    ti = -1
    while done < trials:
        ti = (ti + 1) % len(targets)
        T = targets[ti]
        m = min(batch, trials - done)
        vals = rng.integers(0, T.order, size=(m, n))
        sparse = np.arange(m) >= m // 2
        base = np.full(n, T.identity)
        vals[sparse] = base
        k = rng.integers(1, 4, size=m)
        for i in np.nonzero(sparse)[0]:
            pts = rng.choice(n, size=k[i], replace=False)
            vals[i, pts] = rng.integers(0, T.order, size=k[i])
        vals[:, G.identity] = T.identity
        pr = rng.integers(0, n, size=(3, probe))
        alive = ~_relation_defect(vals, G, T, *pr).any(axis=1)
        for i in np.nonzero(alive)[0]:
            row = vals[i : i + 1]
            key = (ti, tuple(row[0].tolist()))
            if key not in verdicts:
                ok = True
                for chunk in np.array_split(triples, 8):
                    if _relation_defect(row, G, T, *chunk.T).any():
                        ok = False
                        break
                verdicts[key] = (ok, ok and is_homomorphism(GroupMap(G, T, row[0]))[0])
            ok, hom = verdicts[key]
            if ok:
                passed += 1
                homs += hom
                non_homs += not hom
        done += m
    return QuadSearchReport(trials, seed, passed, homs, non_homs, tuple(T.name for T in targets))
