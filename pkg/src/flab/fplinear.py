"""Exact linear algebra over Z/pZ: rank, solving, and coordinate projection.

Two representations coexist: dense FpMatrix with labelled-coordinate
AffineSolutionSet results for the module API and test oracles, and a
sparse row form (dicts keyed by column label) used to project very large
translation-invariant systems onto small coordinate windows by
eliminating the non-kept columns first.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Hashable, Iterable, Sequence

MAX_PRIME = 1 << 15


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def check_modulus(p: int):
    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if p > MAX_PRIME:
        raise ValueError(f"modulus {p} exceeds the 2^15 guard")


class FpMatrix:
    """A dense matrix over Z/pZ with entries reduced to [0, p)."""

    __slots__ = ("p", "rows", "cols", "entries")

    def __init__(self, p: int, entries: Sequence[Sequence[int]], cols: int | None = None):
        check_modulus(p)
        rows = [tuple(x % p for x in row) for row in entries]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
        else:
            width = cols or 0
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "entries", tuple(rows))

    def __setattr__(self, name, value):
        raise AttributeError("FpMatrix is immutable")

    def transpose(self) -> "FpMatrix":
        return FpMatrix(
            self.p,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            cols=self.rows,
        )

    def mul_vector(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        p = self.p
        return tuple(sum(a * x for a, x in zip(row, v)) % p for row in self.entries)


def _rref(p: int, rows: list[list[int]]) -> tuple[list[list[int]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot column list)."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] % p), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(x * inv) % p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return [row for row in rows if any(row)], pivots


def rank(m: FpMatrix) -> int:
    rows, _ = _rref(m.p, [list(r) for r in m.entries])
    return len(rows)


class AffineSolutionSet:
    """A (possibly empty) affine subspace of (Z/pZ)^keys in canonical form.

    basis rows are in reduced row echelon form over the key order, and the
    particular point is reduced to zero on all pivot coordinates, so two
    equal sets have identical representations.
    """

    __slots__ = ("p", "keys", "particular", "basis", "pivots")

    def __init__(
        self,
        p: int,
        keys: Sequence[Hashable],
        particular: Sequence[int] | None,
        basis: Sequence[Sequence[int]],
    ):
        check_modulus(p)
        keys = tuple(keys)
        if particular is None:
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "keys", keys)
            object.__setattr__(self, "particular", None)
            object.__setattr__(self, "basis", ())
            object.__setattr__(self, "pivots", ())
            return
        rows, pivots = _rref(p, [[x % p for x in row] for row in basis])
        point = [x % p for x in particular]
        if len(point) != len(keys):
            raise ValueError("particular point has wrong length")
        for row, c in zip(rows, pivots):
            if point[c]:
                f = point[c]
                point = [(a - f * b) % p for a, b in zip(point, row)]
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "particular", tuple(point))
        object.__setattr__(self, "basis", tuple(tuple(r) for r in rows))
        object.__setattr__(self, "pivots", tuple(pivots))

    def __setattr__(self, name, value):
        raise AttributeError("AffineSolutionSet is immutable")

    @staticmethod
    def empty(p: int, keys: Sequence[Hashable]) -> "AffineSolutionSet":
        return AffineSolutionSet(p, keys, None, ())

    def is_empty(self) -> bool:
        return self.particular is None

    @property
    def dimension(self) -> int:
        if self.is_empty():
            raise ValueError("empty solution set has no dimension")
        return len(self.basis)

    def size(self) -> int:
        return 0 if self.is_empty() else self.p ** self.dimension

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AffineSolutionSet)
            and self.p == other.p
            and self.keys == other.keys
            and self.particular == other.particular
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.p, self.keys, self.particular, self.basis))

    def contains(self, vector: Sequence[int]) -> bool:
        if self.is_empty():
            return False
        p = self.p
        diff = [(a - b) % p for a, b in zip(vector, self.particular)]
        for row, c in zip(self.basis, self.pivots):
            if diff[c]:
                f = diff[c]
                diff = [(a - f * b) % p for a, b in zip(diff, row)]
        return not any(diff)

    def members(self, limit: int = 1 << 12) -> list[tuple[int, ...]]:
        """Exhaustive enumeration; refuses to expand more than `limit` points."""
        if self.is_empty():
            return []
        if self.size() > limit:
            raise ValueError(f"solution set too large to enumerate ({self.size()})")
        p = self.p
        out = []
        for coeffs in product(range(p), repeat=self.dimension):
            v = list(self.particular)
            for f, row in zip(coeffs, self.basis):
                if f:
                    v = [(a + f * b) % p for a, b in zip(v, row)]
            out.append(tuple(v))
        return out

    def project(self, keep: Sequence[Hashable]) -> "AffineSolutionSet":
        """Image under the coordinate projection onto `keep` (a key subset)."""
        index = {k: i for i, k in enumerate(self.keys)}
        for k in keep:
            if k not in index:
                raise IndexError(f"projection coordinate {k!r} out of range")
        cols = [index[k] for k in keep]
        if self.is_empty():
            return AffineSolutionSet.empty(self.p, keep)
        return AffineSolutionSet(
            self.p,
            tuple(keep),
            [self.particular[c] for c in cols],
            [[row[c] for c in cols] for row in self.basis],
        )


def project_solution_set(s: AffineSolutionSet, coords) -> AffineSolutionSet:
    """Image of an affine solution set under projection onto a key subset."""
    return s.project(coords)


def nullspace_basis(m: FpMatrix) -> list[tuple[int, ...]]:
    rows, pivots = _rref(m.p, [list(r) for r in m.entries])
    p = m.p
    free_cols = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free_cols:
        v = [0] * m.cols
        v[fc] = 1
        for row, pc in zip(rows, pivots):
            v[pc] = (-row[fc]) % p
        basis.append(tuple(v))
    return basis


def solve(m: FpMatrix, b: Sequence[int], keys: Sequence[Hashable] | None = None) -> AffineSolutionSet:
    """Full solution set of m x = b as an AffineSolutionSet."""
    if len(b) != m.rows:
        raise ValueError("dimension mismatch between matrix and right-hand side")
    keys = tuple(keys) if keys is not None else tuple(range(m.cols))
    if len(keys) != m.cols:
        raise ValueError("key count must match column count")
    p = m.p
    aug = [list(row) + [bv % p] for row, bv in zip(m.entries, b)]
    if not aug:
        return AffineSolutionSet(p, keys, [0] * m.cols, nullspace_basis(m))
    rows, pivots = _rref(p, aug)
    for row, c in zip(rows, pivots):
        if c == m.cols:
            return AffineSolutionSet.empty(p, keys)
    point = [0] * m.cols
    for row, c in zip(rows, pivots):
        point[c] = row[-1]
    return AffineSolutionSet(p, keys, point, nullspace_basis(m))


# -- sparse constraint rows ------------------------------------------------

SparseRow = dict


def sparse_normalize(row: SparseRow, p: int) -> SparseRow:
    return {k: v % p for k, v in row.items() if v % p}


def sparse_axpy(target: SparseRow, factor: int, source: SparseRow, p: int) -> SparseRow:
    """target - factor * source, dropping zeros."""
    out = dict(target)
    for k, v in source.items():
        w = (out.get(k, 0) - factor * v) % p
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def eliminate_columns(
    rows: Iterable[SparseRow],
    eliminate_order: Sequence[Hashable],
    p: int,
) -> list[SparseRow]:
    """Gaussian elimination of the given columns from a sparse homogeneous system.

    Returns rows spanning the induced constraints on the remaining columns:
    exactly the constraint system of the projected solution set.  Pivoting
    is deterministic (first row in insertion order touching the column).
    """
    check_modulus(p)
    active: dict[int, SparseRow] = {}
    by_col: dict[Hashable, set[int]] = {}
    for idx, row in enumerate(rows):
        row = sparse_normalize(row, p)
        if not row:
            continue
        active[idx] = row
        for k in row:
            by_col.setdefault(k, set()).add(idx)

    def detach(idx: int):
        for k in active[idx]:
            by_col[k].discard(idx)
        del active[idx]

    def attach(idx: int, row: SparseRow):
        active[idx] = row
        for k in row:
            by_col.setdefault(k, set()).add(idx)

    for col in eliminate_order:
        touching = sorted(by_col.get(col, ()))
        if not touching:
            continue
        pivot_idx = touching[0]
        pivot = active[pivot_idx]
        inv = pow(pivot[col], -1, p)
        pivot = {k: (v * inv) % p for k, v in pivot.items()}
        detach(pivot_idx)
        for idx in touching[1:]:
            row = active[idx]
            detach(idx)
            row = sparse_axpy(row, row[col], pivot, p)
            if row:
                attach(idx, row)
    return [active[i] for i in sorted(active)]


def dense_from_sparse(
    rows: Sequence[SparseRow], keys: Sequence[Hashable], p: int
) -> FpMatrix:
    index = {k: i for i, k in enumerate(keys)}
    out = []
    for row in rows:
        dense = [0] * len(keys)
        for k, v in row.items():
            dense[index[k]] = v % p
        out.append(dense)
    return FpMatrix(p, out, cols=len(keys))


def solution_space_from_constraints(
    rows: Sequence[SparseRow], keys: Sequence[Hashable], p: int
) -> AffineSolutionSet:
    """Homogeneous solution set over the given keys."""
    m = dense_from_sparse(rows, keys, p)
    return solve(m, [0] * m.rows, keys=keys)


def cardinality_fraction(p: int, dimension: int, total: int) -> Fraction:
    """|set| / p^total for a subspace of dimension `dimension`."""
    return Fraction(p**dimension, p**total)
