"""Exact integer linear algebra.

Matrices are 2-D numpy arrays with ``dtype=object`` holding Python ints, so
every product is computed in arbitrary precision.  The Smith normal form is
the workhorse: kernels, images, solving and cokernels are all read off from
its unimodular change-of-basis matrices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

_JSON_SAFE = 2**53


def intmat(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce ``data`` to an object-dtype integer matrix.

    ``rows``/``cols`` fix the shape of empty input (``intmat([], 0, 3)``).
    """
    if isinstance(data, np.ndarray) and data.ndim == 2 and data.dtype == object:
        a = data
    else:
        a = np.array(data, dtype=object)
        if a.size == 0:
            r = 0 if rows is None else rows
            c = 0 if cols is None else cols
            return np.zeros((r, c), dtype=object)
        if a.ndim == 1:
            a = a.reshape(1, -1)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if rows is not None and a.shape[0] != rows or cols is not None and a.shape[1] != cols:
        raise ValueError(f"matrix has shape {a.shape}, expected ({rows}, {cols})")
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = int(x)
    return out


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=object)


def identity(n: int) -> np.ndarray:
    a = zeros(n, n)
    for i in range(n):
        a[i, i] = 1
    return a


def is_zero(a: np.ndarray) -> bool:
    return not any(x != 0 for x in a.flat)


def mat_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def hstack(*mats: np.ndarray) -> np.ndarray:
    return np.concatenate(mats, axis=1).astype(object)


def vstack(*mats: np.ndarray) -> np.ndarray:
    return np.concatenate(mats, axis=0).astype(object)


def determinant(a: np.ndarray) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = [[int(x) for x in row] for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True, eq=False)
class SmithDecomposition:
    """``u @ a @ v == d`` with ``u``, ``v`` unimodular and ``d`` in Smith form."""

    u: np.ndarray
    d: np.ndarray
    v: np.ndarray
    invariant_factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def _min_pivot(A, t, m, n):
    best = None
    best_abs = 0
    for i in range(t, m):
        row = A[i]
        for j in range(t, n):
            x = row[j]
            if x:
                ax = -x if x < 0 else x
                if best is None or ax < best_abs:
                    best, best_abs = (i, j), ax
                    if ax == 1:
                        return best
    return best


def _smith(a: np.ndarray, want_u: bool, want_v: bool):
    """Core elimination on Python lists.

    Returns (diagonal entries, U rows or None, V columns or None).  V is kept
    transposed so column operations become list operations.
    """
    m, n = a.shape
    A = [[int(x) for x in row] for row in a]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if want_u else None
    VT = [[int(i == j) for j in range(n)] for i in range(n)] if want_v else None
    t = 0
    while t < min(m, n):
        piv = _min_pivot(A, t, m, n)
        if piv is None:
            break
        while True:
            i, j = piv
            if i != t:
                A[t], A[i] = A[i], A[t]
                if U is not None:
                    U[t], U[i] = U[i], U[t]
            if j != t:
                for row in A:
                    row[t], row[j] = row[j], row[t]
                if VT is not None:
                    VT[t], VT[j] = VT[j], VT[t]
            p = A[t][t]
            dirty = False
            pivot_row = A[t]
            for r in range(t + 1, m):
                x = A[r][t]
                if x:
                    q = x // p
                    A[r] = [y - q * z for y, z in zip(A[r], pivot_row)]
                    if U is not None:
                        U[r] = [y - q * z for y, z in zip(U[r], U[t])]
                    if A[r][t]:
                        dirty = True
            for c in range(t + 1, n):
                x = pivot_row[c]
                if x:
                    q = x // p
                    for r in range(t, m):
                        A[r][c] -= q * A[r][t]
                    if VT is not None:
                        VT[c] = [y - q * z for y, z in zip(VT[c], VT[t])]
                    if A[t][c]:
                        dirty = True
            if dirty:
                piv = _min_pivot(A, t, m, n)
                continue
            bad = None
            for r in range(t + 1, m):
                row = A[r]
                for c in range(t + 1, n):
                    if row[c] % p:
                        bad = r
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [y + z for y, z in zip(A[t], A[bad])]
            if U is not None:
                U[t] = [y + z for y, z in zip(U[t], U[bad])]
            piv = (t, t)
        if A[t][t] < 0:
            A[t] = [-y for y in A[t]]
            if U is not None:
                U[t] = [-y for y in U[t]]
        t += 1
    diag = [A[k][k] for k in range(t)]
    return diag, U, VT


def snf(a: np.ndarray) -> SmithDecomposition:
    """Smith normal form of an integer matrix.

    Pivots are chosen as the entry of smallest nonzero absolute value in the
    remaining block (ties go to the lowest row, then column), which makes the
    result deterministic.

    >>> snf(intmat([[2, 0], [0, 3]])).invariant_factors
    (1, 6)
    """
    a = intmat(a)
    m, n = a.shape
    diag, U, VT = _smith(a, True, True)
    d = zeros(m, n)
    for k, x in enumerate(diag):
        d[k, k] = x
    u = intmat(U, m, m) if m else zeros(0, 0)
    v = intmat(VT, n, n).T.copy() if n else zeros(0, 0)
    return SmithDecomposition(u=u, d=d, v=v, invariant_factors=tuple(diag))


def rank(a: np.ndarray) -> int:
    return len(_smith(intmat(a), False, False)[0])


def kernel_basis(a: np.ndarray) -> np.ndarray:
    """Columns form a basis of the integer kernel lattice of ``a``.

    The basis is saturated: every integer vector killed by ``a`` is an integer
    combination of the columns.
    """
    a = intmat(a)
    m, n = a.shape
    if n == 0:
        return zeros(0, 0)
    diag, _, VT = _smith(a, False, True)
    r = len(diag)
    if r == n:
        return zeros(n, 0)
    return intmat(VT[r:], n - r, n).T.copy()


def image_basis(a: np.ndarray) -> np.ndarray:
    """Columns form a basis of the lattice spanned by the columns of ``a``."""
    a = intmat(a)
    m, n = a.shape
    if n == 0:
        return zeros(m, 0)
    diag, _, VT = _smith(a, False, True)
    r = len(diag)
    if r == 0:
        return zeros(m, 0)
    v = intmat(VT[:r], r, n).T
    return a @ v


class Solver:
    """Reusable solver for ``a @ x == b`` over the integers."""

    def __init__(self, a: np.ndarray):
        self.a = intmat(a)
        m, n = self.a.shape
        diag, U, VT = _smith(self.a, True, True)
        self.rows, self.cols = m, n
        self._diag = diag
        self._u = intmat(U, m, m) if m else zeros(0, 0)
        self._v = intmat(VT, n, n).T.copy() if n else zeros(0, 0)

    def solve_many(self, b: np.ndarray) -> np.ndarray | None:
        """Solve for every column of ``b`` at once; ``None`` if any column fails."""
        b = intmat(b)
        if b.shape[0] != self.rows:
            raise ValueError(f"right-hand side has {b.shape[0]} rows, matrix has {self.rows}")
        k = b.shape[1]
        c = self._u @ b if self.rows else zeros(0, k)
        r = len(self._diag)
        y = zeros(self.cols, k)
        for i in range(r):
            di = self._diag[i]
            for j in range(k):
                q, rem = divmod(c[i, j], di)
                if rem:
                    return None
                y[i, j] = q
        for i in range(r, self.rows):
            for j in range(k):
                if c[i, j]:
                    return None
        return self._v @ y if self.cols else zeros(0, k)

    def solve(self, b: Sequence[int]) -> list[int] | None:
        b = list(b)
        if len(b) != self.rows:
            raise ValueError(f"right-hand side has length {len(b)}, matrix has {self.rows} rows")
        x = self.solve_many(intmat(b, rows=1).T if b else zeros(0, 1))
        return None if x is None else [int(v) for v in x[:, 0]]


def solve(a: np.ndarray, b: Sequence[int]) -> list[int] | None:
    """Integer solution of ``a @ x == b``, or ``None`` when there is none.

    >>> solve(intmat([[1, 2], [3, 4]]), [5, 11])
    [1, 2]
    >>> solve(intmat([[2]]), [3]) is None
    True
    """
    return Solver(a).solve(b)


def solve_many(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    return Solver(a).solve_many(b)


# --------------------------------------------------------------------------
# finitely generated abelian groups

_GROUP_TERM = re.compile(r"^\s*(?:Z(?:\^(\d+))?|Z/(\d+)|(0))\s*$")


@dataclass(frozen=True, order=True)
class FgAbGroup:
    """Z^rank + Z/t_1 + ... + Z/t_k with t_1 | t_2 | ... and every t_i >= 2."""

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be non-negative")
        t = tuple(int(x) for x in self.torsion)
        object.__setattr__(self, "torsion", t)
        for x in t:
            if x < 2:
                raise ValueError(f"torsion coefficient {x} < 2")
        for x, y in zip(t, t[1:]):
            if y % x:
                raise ValueError(f"torsion {t} is not a divisibility chain")

    @classmethod
    def from_invariants(cls, rank: int, factors: Iterable[int]) -> "FgAbGroup":
        """Canonical form of Z^rank + sum Z/f for arbitrary positive ``f``."""
        factors = [abs(int(f)) for f in factors]
        free = rank + sum(1 for f in factors if f == 0)
        factors = [f for f in factors if f > 1]
        if not factors:
            return cls(free)
        k = len(factors)
        d = zeros(k, k)
        for i, f in enumerate(factors):
            d[i, i] = f
        return cls(free, tuple(x for x in _smith(d, False, False)[0] if x > 1))

    @classmethod
    def parse(cls, spec: str) -> "FgAbGroup":
        """Parse strings such as ``"Z"``, ``"Z/6"``, ``"Z^2+Z/2"`` or ``"0"``."""
        rank, factors = 0, []
        for term in spec.replace(" ", "").split("+"):
            mt = _GROUP_TERM.match(term)
            if not mt:
                raise ValueError(f"cannot parse group term {term!r} in {spec!r}")
            if mt.group(3):
                continue
            if mt.group(2):
                factors.append(int(mt.group(2)))
            else:
                rank += int(mt.group(1) or 1)
        return cls.from_invariants(rank, factors)

    def __add__(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_invariants(self.rank + other.rank, self.torsion + other.torsion)

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def __str__(self):
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


def cokernel_invariants(a: np.ndarray) -> FgAbGroup:
    """The cokernel Z^rows / im(a), in canonical form."""
    a = intmat(a)
    diag = _smith(a, False, False)[0]
    return FgAbGroup(a.shape[0] - len(diag), tuple(x for x in diag if x > 1))


# --------------------------------------------------------------------------
# incremental lattices


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _axpy(v: dict, w: dict, c: int) -> dict:
    out = dict(v)
    for k, x in w.items():
        y = out.get(k, 0) + c * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return out


def _combine(c1: int, v: dict, c2: int, w: dict) -> dict:
    out = {}
    for k in v.keys() | w.keys():
        y = c1 * v.get(k, 0) + c2 * w.get(k, 0)
        if y:
            out[k] = y
    return out


class Lattice:
    """A sublattice of Z^n grown one generator at a time.

    Generators are kept as sparse dict vectors in reduced echelon form:
    distinct leading indices, positive pivots, and every other row reduced
    modulo each pivot in that pivot's column.  The reduction keeps entries
    small on the 0/1 boundary data this is used for, and makes membership
    an exact top-down reduction.
    """

    def __init__(self):
        self._rows: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce_by_later(self, j: int, row: dict) -> dict:
        for k in sorted(c for c in row if c > j and c in self._rows):
            x = row.get(k, 0)
            b = self._rows[k]
            q = x // b[k]
            if q:
                row = _axpy(row, b, -q)
        return row

    def _install(self, j: int, row: dict) -> None:
        row = self._reduce_by_later(j, row)
        self._rows[j] = row
        pj = row[j]
        for i, other in list(self._rows.items()):
            if i < j and j in other:
                q = other[j] // pj
                if q:
                    self._rows[i] = _axpy(other, row, -q)

    def add(self, v: dict[int, int]) -> bool:
        """Add a generator; returns whether the lattice changed."""
        v = {k: x for k, x in v.items() if x}
        changed = False
        while v:
            j = min(v)
            b = self._rows.get(j)
            if b is None:
                if v[j] < 0:
                    v = {k: -x for k, x in v.items()}
                self._install(j, v)
                return True
            bj, vj = b[j], v[j]
            if vj % bj == 0:
                v = _axpy(v, b, -(vj // bj))
                continue
            g, s, t = _xgcd(bj, vj)
            merged = _combine(s, b, t, v)
            if merged[j] < 0:
                merged = {k: -x for k, x in merged.items()}
            v = _combine(bj // g, v, -(vj // g), b)
            self._install(j, merged)
            changed = True
        return changed

    def __contains__(self, v: dict[int, int]) -> bool:
        v = {k: x for k, x in v.items() if x}
        while v:
            j = min(v)
            b = self._rows.get(j)
            if b is None or v[j] % b[j]:
                return False
            v = _axpy(v, b, -(v[j] // b[j]))
        return True


def columns_as_dicts(a: np.ndarray) -> list[dict[int, int]]:
    out = []
    for j in range(a.shape[1]):
        col = a[:, j]
        out.append({i: int(x) for i, x in enumerate(col) if x})
    return out


def lattice_covers(generators: Iterable[dict[int, int]], targets: list[dict[int, int]],
                   check_every: int = 16) -> bool:
    """Whether the lattice spanned by ``generators`` contains every target.

    Generators are consumed lazily and the check stops as soon as the targets
    are covered, so huge generator families are fine when they cover early.
    """
    targets = [t for t in targets if any(t.values())]
    if not targets:
        return True
    lat = Lattice()
    pending = 0
    for g in generators:
        if lat.add(g):
            pending += 1
            if pending < check_every:
                continue
        if pending:
            # check after a batch of changes, or once the lattice stalls
            pending = 0
            if all(t in lat for t in targets):
                return True
    return all(t in lat for t in targets)


# --------------------------------------------------------------------------
# JSON


def matrix_to_json(a: np.ndarray) -> dict:
    def enc(x):
        x = int(x)
        return str(x) if abs(x) > _JSON_SAFE else x

    return {"rows": a.shape[0], "cols": a.shape[1], "entries": [[enc(x) for x in row] for row in a]}


def matrix_from_json(d: dict) -> np.ndarray:
    rows, cols = int(d["rows"]), int(d["cols"])
    entries = d.get("entries", [])
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ValueError(f"matrix entries do not match declared shape {rows}x{cols}")
    return intmat([[int(x) for x in row] for row in entries], rows, cols)
