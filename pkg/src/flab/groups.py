"""Finite groups with explicit multiplication tables, and their automorphisms.

Elements are referred to by index; labels are only for I/O.  Presets cover
the groups used by the example families: cyclic groups, the Klein
four-group, the dihedral group of order 8 and the quaternion group.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Sequence


class FiniteGroup:
    __slots__ = ("name", "labels", "table", "identity", "inverse", "_index")

    def __init__(self, name: str, labels: Sequence[str], table: Sequence[Sequence[int]]):
        n = len(labels)
        if len(set(labels)) != n:
            raise ValueError("duplicate element labels")
        tab = tuple(tuple(row) for row in table)
        if len(tab) != n or any(len(r) != n for r in tab):
            raise ValueError("multiplication table has wrong shape")
        ident = None
        for e in range(n):
            if all(tab[e][x] == x and tab[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise ValueError("table has no identity")
        inverse = [None] * n
        for x in range(n):
            for y in range(n):
                if tab[x][y] == ident:
                    inverse[x] = y
        if any(v is None for v in inverse):
            raise ValueError("table has a non-invertible element")
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if tab[tab[x][y]][z] != tab[x][tab[y][z]]:
                        raise ValueError("table is not associative")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "table", tab)
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inverse", tuple(inverse))
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    def __setattr__(self, name, value):
        raise AttributeError("FiniteGroup is immutable")

    def order(self) -> int:
        return len(self.labels)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self.inverse[x]

    def index(self, label: str) -> int:
        return self._index[label]

    def is_abelian(self) -> bool:
        n = self.order()
        return all(
            self.table[x][y] == self.table[y][x] for x in range(n) for y in range(n)
        )

    def subgroup_closure(self, gens: Sequence[int]) -> frozenset[int]:
        out = {self.identity}
        frontier = list(gens)
        while frontier:
            x = frontier.pop()
            if x in out:
                continue
            out.add(x)
            for y in list(out):
                for z in (self.mul(x, y), self.mul(y, x), self.inv(x)):
                    if z not in out:
                        frontier.append(z)
        return frozenset(out)

    def is_subgroup(self, elems: frozenset[int]) -> bool:
        if self.identity not in elems:
            return False
        return all(
            self.mul(x, y) in elems and self.inv(x) in elems
            for x in elems
            for y in elems
        )

    def is_normal(self, sub: frozenset[int]) -> bool:
        if not self.is_subgroup(sub):
            return False
        n = self.order()
        return all(
            self.mul(self.mul(g, h), self.inv(g)) in sub
            for g in range(n)
            for h in sub
        )

    def left_cosets(self, sub: frozenset[int]) -> list[frozenset[int]]:
        seen: set[frozenset[int]] = set()
        out = []
        for g in range(self.order()):
            coset = frozenset(self.mul(g, h) for h in sub)
            if coset not in seen:
                seen.add(coset)
                out.append(coset)
        return out

    def is_automorphism(self, perm: Sequence[int]) -> bool:
        n = self.order()
        if sorted(perm) != list(range(n)):
            return False
        return all(
            perm[self.mul(x, y)] == self.mul(perm[x], perm[y])
            for x in range(n)
            for y in range(n)
        )

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order {self.order()})"


def cyclic(n: int) -> FiniteGroup:
    labels = [str(i) for i in range(n)]
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return FiniteGroup(f"Z/{n}", labels, table)


def klein_four() -> FiniteGroup:
    labels = ["(0,0)", "(1,0)", "(0,1)", "(1,1)"]
    def enc(a, b):
        return a + 2 * b
    table = [[0] * 4 for _ in range(4)]
    for a1 in range(2):
        for b1 in range(2):
            for a2 in range(2):
                for b2 in range(2):
                    table[enc(a1, b1)][enc(a2, b2)] = enc((a1 + a2) % 2, (b1 + b2) % 2)
    return FiniteGroup("Z/2xZ/2", labels, table)


def dihedral4() -> FiniteGroup:
    # elements r^k s^f, 0 <= k < 4, f in {0,1}; s r = r^-1 s
    def enc(k, f):
        return k + 4 * f
    labels = [f"r{k}" for k in range(4)] + [f"r{k}s" for k in range(4)]
    table = [[0] * 8 for _ in range(8)]
    for k1 in range(4):
        for f1 in range(2):
            for k2 in range(4):
                for f2 in range(2):
                    k = (k1 + (k2 if f1 == 0 else -k2)) % 4
                    table[enc(k1, f1)][enc(k2, f2)] = enc(k, (f1 + f2) % 2)
    return FiniteGroup("D4", labels, table)


def quaternion8() -> FiniteGroup:
    labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    base = {"1": 0, "i": 1, "j": 2, "k": 3}
    # (sign, axis) products for the quaternion units
    rules = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }
    def enc(sign, axis):
        return 2 * axis + (0 if sign > 0 else 1)
    def dec(idx):
        return (1 if idx % 2 == 0 else -1, idx // 2)
    table = [[0] * 8 for _ in range(8)]
    for x in range(8):
        for y in range(8):
            sx, ax = dec(x)
            sy, ay = dec(y)
            sp, axis = rules[(ax, ay)]
            table[x][y] = enc(sx * sy * sp, axis)
    return FiniteGroup("Q8", labels, table)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    labels = [f"({a},{b})" for a in g.labels for b in h.labels]
    ng, nh = g.order(), h.order()
    def enc(a, b):
        return a * nh + b
    table = [[0] * (ng * nh) for _ in range(ng * nh)]
    for a1 in range(ng):
        for b1 in range(nh):
            for a2 in range(ng):
                for b2 in range(nh):
                    table[enc(a1, b1)][enc(a2, b2)] = enc(g.mul(a1, a2), h.mul(b1, b2))
    return FiniteGroup(f"{g.name}x{h.name}", labels, table)


_PRESETS = {
    "Z/2": lambda: cyclic(2),
    "Z/3": lambda: cyclic(3),
    "Z/4": lambda: cyclic(4),
    "Z/5": lambda: cyclic(5),
    "Z/6": lambda: cyclic(6),
    "Z/8": lambda: cyclic(8),
    "Z/2xZ/2": klein_four,
    "D4": dihedral4,
    "Q8": quaternion8,
}


def preset_group(name: str) -> FiniteGroup:
    try:
        return _PRESETS[name]()
    except KeyError:
        raise ValueError(
            f"unknown group preset {name!r}; available: {sorted(_PRESETS)}"
        ) from None


def group_from_json(data: dict) -> FiniteGroup:
    """{"preset": "Z/4"} or {"name": ..., "elements": [...], "table": [[...]]}."""
    if "preset" in data:
        return preset_group(data["preset"])
    return FiniteGroup(data.get("name", "custom"), data["elements"], data["table"])


@lru_cache(maxsize=None)
def _automorphisms_cached(group_key) -> tuple[tuple[int, ...], ...]:
    labels, table = group_key
    g = FiniteGroup("tmp", labels, table)
    n = g.order()
    others = [x for x in range(n) if x != g.identity]
    out = []
    for images in permutations(others):
        perm = [0] * n
        perm[g.identity] = g.identity
        for x, y in zip(others, images):
            perm[x] = y
        if g.is_automorphism(perm):
            out.append(tuple(perm))
    out.sort()
    return tuple(out)


def all_automorphisms(g: FiniteGroup) -> list[tuple[int, ...]]:
    """Every automorphism, as a permutation tuple, in a deterministic order."""
    if g.order() > 8:
        raise ValueError("automorphism enumeration capped at order 8")
    return list(_automorphisms_cached((g.labels, g.table)))


def compose_perms(outer: Sequence[int], inner: Sequence[int]) -> tuple[int, ...]:
    return tuple(outer[inner[x]] for x in range(len(inner)))


def invert_perm(perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(perm)
    for x, y in enumerate(perm):
        out[y] = x
    return tuple(out)
