"""Exact integer linear algebra and finite abelian groups.

Everything here works over Python integers, so no intermediate overflow
can occur.  Matrices are returned as ``numpy`` object arrays so that
``U @ M @ V`` stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from math import gcd
from typing import Iterable, Iterator, Sequence

import numpy as np

IntMatrix = np.ndarray  # dtype=object, exact integers


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) = x*a + y*b`` and ``g >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def lcm(*values: int) -> int:
    return reduce(lambda a, b: a * b // gcd(a, b), values, 1)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; inputs here are small group orders."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def as_int_matrix(rows: Sequence[Sequence[int]] | np.ndarray, ncols: int | None = None) -> IntMatrix:
    arr = np.array([[int(v) for v in row] for row in rows], dtype=object)
    if arr.size == 0:
        arr = np.zeros((len(rows), ncols or 0), dtype=object)
    return arr


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def _snf(A: list[list[int]], m: int, n: int, track_u: bool, track_v: bool):
    U = _identity(m) if track_u else None
    V = _identity(n) if track_v else None

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        if U is not None:
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in A:
            row[dst] += q * row[src]
        if V is not None:
            for row in V:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = A[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
            rest = [(abs(A[i][t]), i, None) for i in range(t + 1, m) if A[i][t]]
            rest += [(abs(A[t][j]), None, j) for j in range(t + 1, n) if A[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda r: r[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            if U is not None:
                U[t] = [-a for a in U[t]]
    return U, A, V


def smith_normal_form(M: Sequence[Sequence[int]] | np.ndarray) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``U @ M @ V == D``.

    ``U`` and ``V`` are unimodular, ``D`` has the shape of ``M`` with a
    non-negative diagonal ``d1 | d2 | ...`` and zeros elsewhere.
    """
    M = np.asarray(M, dtype=object)
    if M.ndim != 2:
        raise ValueError("expected a 2-d integer matrix")
    m, n = M.shape
    U, D, V = _snf([[int(v) for v in row] for row in M], m, n, True, True)
    return (
        np.array(U, dtype=object).reshape(m, m),
        np.array(D, dtype=object).reshape(m, n),
        np.array(V, dtype=object).reshape(n, n),
    )


def smith_invariants(M: Sequence[Sequence[int]] | np.ndarray) -> list[int]:
    """Diagonal of the Smith form (including zeros and ones), no transforms."""
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return []
    m, n = M.shape
    _, D, _ = _snf([[int(v) for v in row] for row in M], m, n, False, False)
    return [D[i][i] for i in range(min(m, n))]


class LatticeBasis:
    """Incremental echelon basis of a sublattice of ``Z^n``.

    With ``modulus=N`` the lattice always contains ``N Z^n``; it is then full
    rank and every pivot divides ``N``, which keeps entries bounded.
    """

    def __init__(self, n: int, modulus: int | None = None):
        self.n = n
        self.modulus = modulus
        self.rows: dict[int, list[int]] = {}
        if modulus is not None:
            for c in range(n):
                self.rows[c] = [modulus * int(c == j) for j in range(n)]

    def insert(self, vec: Iterable[int]) -> None:
        v = [int(x) for x in vec]
        N = self.modulus
        for c in range(self.n):
            if N is not None:
                v = [x % N for x in v]
            if v[c] == 0:
                continue
            b = self.rows.get(c)
            if b is None:
                if v[c] < 0:
                    v = [-x for x in v]
                self.rows[c] = v
                self._reduce_above(c)
                return
            g, x, y = xgcd(b[c], v[c])
            bc, vc = b[c] // g, v[c] // g
            self.rows[c] = [x * bi + y * vi for bi, vi in zip(b, v)]
            v = [bc * vi - vc * bi for bi, vi in zip(b, v)]
            self._reduce_below(c)
            self._reduce_above(c)

    def _reduce_below(self, c: int) -> None:
        # reduce row c's entries to the right of its pivot by later pivots
        row = self.rows[c]
        for j in range(c + 1, self.n):
            r = self.rows.get(j)
            if r is not None and row[j]:
                q = row[j] // r[j]
                if q:
                    row = [a - q * b for a, b in zip(row, r)]
        self.rows[c] = row

    def _reduce_above(self, c: int) -> None:
        r = self.rows[c]
        for i in range(c):
            row = self.rows.get(i)
            if row is not None and row[c]:
                q = row[c] // r[c]
                if q:
                    self.rows[i] = [a - q * b for a, b in zip(row, r)]

    def matrix(self) -> IntMatrix:
        rows = [self.rows[c] for c in sorted(self.rows)]
        return as_int_matrix(rows, self.n)


def lattice_basis(rows: Iterable[Sequence[int]], n: int, modulus: int | None = None) -> IntMatrix:
    lb = LatticeBasis(n, modulus)
    for r in rows:
        lb.insert(r)
    return lb.matrix()


@dataclass(frozen=True)
class LinearSolution:
    """Solutions of ``A x = 0 (mod N)`` as ``⊕ Z/orders[i]`` with explicit generators."""

    group: "FinAbelian"
    modulus: int
    generators: tuple[tuple[int, ...], ...]
    orders: tuple[int, ...]
    unknowns: int = 0

    @property
    def count(self) -> int:
        return self.group.order

    def elements(self) -> Iterator[tuple[int, ...]]:
        n = self.unknowns
        N = self.modulus
        for coeffs in product(*(range(o) for o in self.orders)):
            x = [0] * n
            for c, gen in zip(coeffs, self.generators):
                if c:
                    x = [(a + c * b) % N for a, b in zip(x, gen)]
            yield tuple(x)


def solve_linear_mod(A: Iterable[Sequence[int]], N: int, n: int | None = None) -> LinearSolution:
    """Describe ``{x in (Z/N)^n : A x = 0 mod N}`` via Smith normal form."""
    if N < 1:
        raise ValueError("modulus must be >= 1")
    rows = [list(r) for r in A]
    if n is None:
        if not rows:
            raise ValueError("number of unknowns required for an empty system")
        n = len(rows[0])
    B = lattice_basis(rows, n, modulus=N)
    if n == 0:
        return LinearSolution(FinAbelian(()), N, (), (), 0)
    _, D, V = smith_normal_form(B)
    gens, orders = [], []
    for i in range(n):
        d = int(D[i, i])
        if d == 1:
            continue
        step = N // d
        gens.append(tuple(int(step * V[j, i]) % N for j in range(n)))
        orders.append(d)
    return LinearSolution(FinAbelian.from_cyclic(orders), N, tuple(gens), tuple(orders), n)


# ---------------------------------------------------------------------------
# Finite abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinAbelian:
    """Finite abelian group ``⊕ Z/d_i`` in invariant-factor form ``d_1 | d_2 | ...``."""

    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        facs = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", facs)
        for d in facs:
            if d < 2:
                raise ValueError(f"invariant factors must be >= 2, got {facs}")
        for a, b in zip(facs, facs[1:]):
            if b % a:
                raise ValueError(f"not a divisibility chain: {facs}")

    @classmethod
    def from_cyclic(cls, orders: Iterable[int]) -> "FinAbelian":
        """Normalize an arbitrary direct sum of cyclic groups."""
        by_prime: dict[int, list[int]] = {}
        for o in orders:
            o = int(o)
            if o < 1:
                raise ValueError(f"cyclic order must be positive, got {o}")
            for p, e in factorize(o).items():
                by_prime.setdefault(p, []).append(e)
        if not by_prime:
            return cls(())
        for exps in by_prime.values():
            exps.sort(reverse=True)
        r = max(len(v) for v in by_prime.values())
        facs = []
        for i in range(r):
            facs.append(
                reduce(lambda acc, p: acc * p ** (by_prime[p][i] if i < len(by_prime[p]) else 0), by_prime, 1)
            )
        return cls(tuple(reversed(facs)))

    @classmethod
    def from_primary(cls, p: int, exponents: Iterable[int]) -> "FinAbelian":
        return cls.from_cyclic(p**e for e in exponents)

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.invariant_factors, 1)

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def primary_components(self) -> dict[int, list[int]]:
        """``{p: [n_1, n_2, ...]}`` with ``G_(p) = ⊕ Z/p^{n_i}``, exponents ascending."""
        out: dict[int, list[int]] = {}
        for d in self.invariant_factors:
            for p, e in factorize(d).items():
                out.setdefault(p, []).append(e)
        return {p: sorted(v) for p, v in sorted(out.items())}

    def zero(self) -> "AbElement":
        return AbElement(self, (0,) * self.rank)

    def element(self, coords: Sequence[int]) -> "AbElement":
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return AbElement(self, tuple(int(c) % d for c, d in zip(coords, self.invariant_factors)))

    def basis(self) -> list["AbElement"]:
        return [self.element([int(i == j) for j in range(self.rank)]) for i in range(self.rank)]

    def elements(self) -> Iterator["AbElement"]:
        for coords in product(*(range(d) for d in self.invariant_factors)):
            yield AbElement(self, coords)

    def index(self, x: "AbElement") -> int:
        """Mixed-radix index, last coordinate fastest."""
        idx = 0
        for c, d in zip(x.coords, self.invariant_factors):
            idx = idx * d + c
        return idx

    def from_index(self, idx: int) -> "AbElement":
        coords = []
        for d in reversed(self.invariant_factors):
            idx, c = divmod(idx, d)
            coords.append(c)
        return AbElement(self, tuple(reversed(coords)))

    def to_json(self) -> dict:
        return {"invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, data: dict) -> "FinAbelian":
        return cls(tuple(data["invariant_factors"]))

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)


@dataclass(frozen=True)
class AbElement:
    parent: FinAbelian = field(repr=False)
    coords: tuple[int, ...]

    def _check(self, other: "AbElement") -> None:
        if other.parent != self.parent:
            raise ValueError("elements of different groups")

    def __add__(self, other: "AbElement") -> "AbElement":
        self._check(other)
        return self.parent.element([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "AbElement") -> "AbElement":
        self._check(other)
        return self.parent.element([a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self) -> "AbElement":
        return self.parent.element([-a for a in self.coords])

    def __rmul__(self, k: int) -> "AbElement":
        return self.parent.element([k * a for a in self.coords])

    def is_zero(self) -> bool:
        return not any(self.coords)

    def order(self) -> int:
        return lcm(*(d // gcd(d, c) for c, d in zip(self.coords, self.parent.invariant_factors)))


# ---------------------------------------------------------------------------
# Symmetric square and tensor product
# ---------------------------------------------------------------------------


def sym2(A: FinAbelian) -> tuple[FinAbelian, dict[tuple[int, int], int]]:
    """Symmetric square ``⊕_{i<=j} Z/gcd(d_i, d_j)`` with basis map ``(i, j) -> slot``.

    For an invariant-factor input every ``gcd(d_i, d_j)`` is ``d_min(i,j)``,
    so sorting the slots by order already gives a divisibility chain.
    """
    d = A.invariant_factors
    slots = sorted(
        ((gcd(d[i], d[j]), i, j) for i in range(len(d)) for j in range(i, len(d))),
    )
    S = FinAbelian(tuple(o for o, _, _ in slots))
    return S, {(i, j): k for k, (_, i, j) in enumerate(slots)}


def sym2_mul(A: FinAbelian, x: AbElement, y: AbElement) -> AbElement:
    """Symmetric product ``x*y`` in ``Sym^2(A)``."""
    if x.parent != A or y.parent != A:
        raise ValueError("sym2_mul: element does not belong to the given group")
    S, basis = sym2(A)
    coords = [0] * S.rank
    a, b = x.coords, y.coords
    for (i, j), slot in basis.items():
        coords[slot] = a[i] * b[i] if i == j else a[i] * b[j] + a[j] * b[i]
    return S.element(coords)


def tensor(A: FinAbelian, B: FinAbelian) -> FinAbelian:
    return FinAbelian.from_cyclic(
        g for d in A.invariant_factors for e in B.invariant_factors if (g := gcd(d, e)) > 1
    )
