"""Finite G-modules given by integer action matrices on a product of cyclic groups."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .abelian import FinAbelian
from .groups import GroupTable, abelianization

EXHAUSTIVE_MODULE_CAP = 64


@dataclass(frozen=True, eq=False)
class GModule:
    """``⊕ Z/moduli[i]`` with ``G`` acting through ``action[g]`` (column convention).

    Coordinates are the given cyclic factors, which need not form a
    divisibility chain; :attr:`underlying` gives the invariant-factor form.
    """

    group: GroupTable = field(repr=False)
    moduli: tuple[int, ...]
    action: np.ndarray = field(repr=False)
    basis_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        if any(m < 2 for m in moduli):
            raise ValueError("module coordinates must have modulus >= 2")
        r = len(moduli)
        action = np.asarray(self.action, dtype=np.int64).reshape(self.group.order, r, r)
        action = action % np.asarray(moduli, dtype=np.int64)[None, :, None] if r else action
        action.setflags(write=False)
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "action", action)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def mod(self) -> np.ndarray:
        return np.asarray(self.moduli, dtype=np.int64)

    @property
    def underlying(self) -> FinAbelian:
        return FinAbelian.from_cyclic(self.moduli)

    @property
    def order(self) -> int:
        out = 1
        for m in self.moduli:
            out *= m
        return out

    def zero(self) -> np.ndarray:
        return np.zeros(self.rank, dtype=np.int64)

    def reduce(self, v) -> np.ndarray:
        return np.asarray(v, dtype=np.int64) % self.mod

    def act(self, g: int, v) -> np.ndarray:
        return (self.action[g] @ np.asarray(v, dtype=np.int64)) % self.mod

    def is_trivial_action(self) -> bool:
        eye = np.eye(self.rank, dtype=np.int64)
        return bool((self.action == eye).all())

    def check_action(self) -> tuple[bool, str]:
        """Identity acts trivially and ``action(gh) = action(g) action(h)`` on all pairs."""
        G = self.group
        if G.order > EXHAUSTIVE_MODULE_CAP:
            pairs = np.random.default_rng(0).integers(0, G.order, size=(4096, 2))
        else:
            pairs = np.array([(g, h) for g in range(G.order) for h in range(G.order)])
        eye = np.eye(self.rank, dtype=np.int64)
        if not np.array_equal(self.action[G.identity], eye):
            return False, "identity does not act trivially"
        m = self.mod[:, None]
        for g, h in pairs:
            lhs = self.action[G.table[g, h]]
            rhs = (self.action[g] @ self.action[h]) % m
            if not np.array_equal(lhs, rhs):
                return False, f"action is not multiplicative at ({g}, {h})"
        return True, ""

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli), "action": self.action.tolist()}


def trivial_module(G: GroupTable, A: FinAbelian) -> GModule:
    r = A.rank
    action = np.broadcast_to(np.eye(r, dtype=np.int64), (G.order, r, r)).copy()
    return GModule(G, A.invariant_factors, action)


@dataclass(frozen=True, eq=False)
class AugmentationModule:
    """``ω(G) ⊗ G^ab`` with its basis bookkeeping.

    Basis vectors are ``c(h) ⊗ e_j`` for ``h != 1`` (in index order) and
    ``e_j`` the invariant-factor generators of ``G^ab``.  ``c(1)`` is the zero
    vector and never gets a slot.
    """

    module: GModule
    ab: FinAbelian
    ab_coords: np.ndarray = field(repr=False)  # projection G -> G^ab, one coordinate row per element
    slot_of: np.ndarray = field(repr=False)  # group element -> first slot of its block, or -1 for identity

    def c_tensor(self, g: int, x) -> np.ndarray:
        """Coordinates of ``c(g) ⊗ x`` for ``x`` in ``G^ab`` coordinates."""
        v = self.module.zero()
        s = self.slot_of[g]
        if s >= 0:
            v[s : s + self.ab.rank] = x
        return self.module.reduce(v)


def augmentation_module(G: GroupTable) -> AugmentationModule:
    A, coords = abelianization(G)
    r = A.rank
    others = [h for h in range(G.order) if h != G.identity]
    slot_of = np.full(G.order, -1, dtype=np.int64)
    for b, h in enumerate(others):
        slot_of[h] = b * r
    dim = len(others) * r
    action = np.zeros((G.order, dim, dim), dtype=np.int64)
    for g in range(G.order):
        for h in others:
            gh = G.table[g, h]
            for j in range(r):
                col = slot_of[h] + j
                # g . c(h)⊗e_j = c(gh)⊗e_j - c(g)⊗e_j
                if slot_of[gh] >= 0:
                    action[g, slot_of[gh] + j, col] += 1
                if slot_of[g] >= 0:
                    action[g, slot_of[g] + j, col] -= 1
    labels = tuple(f"c({G.label(h)})(x)e{j}" for h in others for j in range(r))
    module = GModule(G, A.invariant_factors * len(others), action, labels)
    return AugmentationModule(module, A, coords, slot_of)
