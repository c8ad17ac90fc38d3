"""Finite presimplicial and pseudocubical sets.

Cells are strings and every structure map is an explicit dict, so shapes
round-trip through JSON and can be audited by hand.  A shape carries a hard
dimension bound (its truncation); identities are only checked where both
sides exist.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations, product
from typing import Mapping, Sequence

FaceKey = tuple[int, int]  # (i, epsilon) for cubical faces


def max_dim() -> int:
    """Truncation cap, overridable through ``CUBIX_MAX_DIM``."""
    return int(os.environ.get("CUBIX_MAX_DIM", "4"))


@dataclass(frozen=True, eq=False)
class FinPresimplicialSet:
    """``cells[n]`` with faces ``faces[n][i]: cells[n] -> cells[n-1]``, ``0 <= i <= n``."""

    cells: tuple[tuple[str, ...], ...]
    faces: tuple[tuple[Mapping[str, str], ...], ...]
    complete: bool = True

    @property
    def truncation(self) -> int:
        return len(self.cells) - 1

    def face(self, n: int, i: int, x: str) -> str:
        return self.faces[n][i][x]


@dataclass(frozen=True, eq=False)
class FinPseudocubicalSet:
    """Faces ``faces[n][(i, e)]`` for ``1 <= i <= n`` and pseudodegeneracies
    ``degeneracies[n][i]: cells[n-1] -> cells[n]`` for ``1 <= i <= n``.

    ``degeneracies is None`` is precubical mode.  ``complete`` marks shapes
    with no cells above the truncation.
    """

    cells: tuple[tuple[str, ...], ...]
    faces: tuple[Mapping[FaceKey, Mapping[str, str]], ...]
    degeneracies: tuple[Mapping[int, Mapping[str, str]], ...] | None = None
    complete: bool = False

    @property
    def truncation(self) -> int:
        return len(self.cells) - 1

    @property
    def has_degeneracies(self) -> bool:
        return self.degeneracies is not None

    def face(self, n: int, i: int, e: int, x: str) -> str:
        return self.faces[n][(i, e)][x]


Shape = FinPresimplicialSet | FinPseudocubicalSet


@dataclass(frozen=True, eq=False)
class AugmentedShape:
    shape: Shape
    target: tuple[str, ...]
    aug: Mapping[str, str]

    @property
    def kind(self) -> str:
        return "presimplicial" if isinstance(self.shape, FinPresimplicialSet) else "pseudocubical"


@dataclass(frozen=True)
class ShapeViolation:
    cell: str
    indices: tuple
    message: str

    def __str__(self):
        return f"{self.message} at cell {self.cell!r} indices {self.indices}"


# --------------------------------------------------------------------------
# validation


def _check_map(table, domain, codomain, what) -> ShapeViolation | None:
    if table is None:
        return ShapeViolation("", (), f"{what} missing")
    cod = set(codomain)
    for x in domain:
        if x not in table:
            return ShapeViolation(x, (), f"{what} undefined")
        if table[x] not in cod:
            return ShapeViolation(x, (), f"{what} hits nonexistent cell {table[x]!r}")
    return None


def validate_presimplicial(s: FinPresimplicialSet, aug: AugmentedShape | None = None) -> ShapeViolation | None:
    """Exhaustive check of ``d_i d_j = d_{j-1} d_i`` for ``i < j``."""
    D = s.truncation
    for n in range(1, D + 1):
        for i in range(n + 1):
            v = _check_map(s.faces[n][i] if i < len(s.faces[n]) else None,
                           s.cells[n], s.cells[n - 1], f"face d_{i} in dimension {n}")
            if v:
                return v
    for n in range(2, D + 1):
        for x in s.cells[n]:
            for j in range(n + 1):
                for i in range(j):
                    lhs = s.faces[n - 1][i][s.faces[n][j][x]]
                    rhs = s.faces[n - 1][j - 1][s.faces[n][i][x]]
                    if lhs != rhs:
                        return ShapeViolation(x, (i, j), "presimplicial identity fails")
    if aug is not None:
        return _validate_aug(aug)
    return None


def validate_pseudocubical(x: FinPseudocubicalSet, aug: AugmentedShape | None = None) -> ShapeViolation | None:
    """Exhaustive check of the face identities and, when present, the
    face/degeneracy identities."""
    D = x.truncation
    for n in range(1, D + 1):
        for i in range(1, n + 1):
            for e in (0, 1):
                v = _check_map(x.faces[n].get((i, e)), x.cells[n], x.cells[n - 1],
                               f"face d_{i}^{e} in dimension {n}")
                if v:
                    return v
    if x.degeneracies is not None:
        for n in range(1, D + 1):
            for j in range(1, n + 1):
                v = _check_map(x.degeneracies[n].get(j), x.cells[n - 1], x.cells[n],
                               f"degeneracy s_{j} into dimension {n}")
                if v:
                    return v
    F = x.faces
    for n in range(2, D + 1):
        for c in x.cells[n]:
            for j in range(2, n + 1):
                for i in range(1, j):
                    for a in (0, 1):
                        for e in (0, 1):
                            lhs = F[n - 1][(i, a)][F[n][(j, e)][c]]
                            rhs = F[n - 1][(j - 1, e)][F[n][(i, a)][c]]
                            if lhs != rhs:
                                return ShapeViolation(c, (i, j, a, e), "pseudocubical face identity fails")
    if x.degeneracies is not None:
        S = x.degeneracies
        for n in range(1, D + 1):
            for y in x.cells[n - 1]:
                for j in range(1, n + 1):
                    sy = S[n][j][y]
                    for i in range(1, n + 1):
                        for a in (0, 1):
                            lhs = F[n][(i, a)][sy]
                            if i == j:
                                rhs = y
                            elif i < j:
                                rhs = S[n - 1][j - 1][F[n - 1][(i, a)][y]]
                            else:
                                rhs = S[n - 1][j][F[n - 1][(i - 1, a)][y]]
                            if lhs != rhs:
                                return ShapeViolation(y, (i, j, a), "face/degeneracy identity fails")
    if aug is not None:
        return _validate_aug(aug)
    return None


def _validate_aug(a: AugmentedShape) -> ShapeViolation | None:
    s = a.shape
    v = _check_map(a.aug, s.cells[0], a.target, "augmentation")
    if v or s.truncation < 1:
        return v
    for c in s.cells[1]:
        if isinstance(s, FinPresimplicialSet):
            ends = (s.faces[1][0][c], s.faces[1][1][c])
        else:
            ends = (s.faces[1][(1, 0)][c], s.faces[1][(1, 1)][c])
        if a.aug[ends[0]] != a.aug[ends[1]]:
            return ShapeViolation(c, (), "augmentation does not equalize the two vertex faces")
    return None


def validate(obj: Shape | AugmentedShape) -> ShapeViolation | None:
    if isinstance(obj, AugmentedShape):
        s = obj.shape
        if isinstance(s, FinPresimplicialSet):
            return validate_presimplicial(s, obj)
        return validate_pseudocubical(s, obj)
    if isinstance(obj, FinPresimplicialSet):
        return validate_presimplicial(obj)
    return validate_pseudocubical(obj)


# --------------------------------------------------------------------------
# builtin models


def _presimplicial(cells: Sequence[Sequence[str]], faces: Mapping[str, Sequence[str]]) -> FinPresimplicialSet:
    """``faces[x]`` lists ``d_0 x, ..., d_n x``."""
    fs = [()]
    for n in range(1, len(cells)):
        fs.append(tuple({x: faces[x][i] for x in cells[n]} for i in range(n + 1)))
    return FinPresimplicialSet(tuple(tuple(c) for c in cells), tuple(fs), complete=True)


def cubical_closure(generators: Sequence[Sequence[str]], faces: Mapping[str, Mapping[FaceKey, str]],
                    truncation: int) -> FinPseudocubicalSet:
    """The cubical set generated by nondegenerate cells, truncated.

    ``generators[k]`` are the nondegenerate ``k``-cells and ``faces[y][(r, e)]``
    their faces, which must again be generators.  An ``n``-cell is a pair
    ``(y, S)`` where ``S`` lists the ``dim y`` coordinates of the ``n``-cube
    that ``y`` occupies; the remaining coordinates are degenerate.  The id of
    a degenerate cell is ``"s<coords>(y)"``, e.g. ``"s13(Q)"``.
    """
    D = truncation

    def cid(y, S, n):
        if len(S) == n:
            return y
        rest = "".join(str(k) for k in range(1, n + 1) if k not in S)
        return f"s{rest}({y})"

    cells, index = [], []
    for n in range(D + 1):
        level = []
        for k in range(min(n, len(generators) - 1) + 1):
            for y in generators[k]:
                for S in combinations(range(1, n + 1), k):
                    level.append((y, S))
        cells.append(level)
        index.append({cid(y, S, n): (y, S) for y, S in level})

    def face(y, S, i, e):
        if i not in S:
            return y, tuple(k if k < i else k - 1 for k in S)
        r = S.index(i) + 1
        z = faces[y][(r, e)]
        return z, tuple(k if k < i else k - 1 for k in S if k != i)

    fs = [{}]
    degs = [{}]
    for n in range(1, D + 1):
        fn = {}
        for i in range(1, n + 1):
            for e in (0, 1):
                fn[(i, e)] = {cid(y, S, n): cid(*face(y, S, i, e), n - 1) for y, S in cells[n]}
        fs.append(fn)
        dn = {}
        for j in range(1, n + 1):
            dn[j] = {cid(y, S, n - 1): cid(y, tuple(k if k < j else k + 1 for k in S), n)
                     for y, S in cells[n - 1]}
        degs.append(dn)
    ids = tuple(tuple(cid(y, S, n) for y, S in cells[n]) for n in range(D + 1))
    return FinPseudocubicalSet(ids, tuple(fs), tuple(degs), complete=False)


_DELTA_MODELS = {
    "point-Δ": ([["v"]], {}),
    "s1-Δ": ([["v"], ["e"]], {"e": ["v", "v"]}),
    "s2-Δ": (
        [["a", "b", "c"], ["ab", "bc", "ac"], ["U", "L"]],
        {"ab": ["b", "a"], "bc": ["c", "b"], "ac": ["c", "a"],
         "U": ["bc", "ac", "ab"], "L": ["bc", "ac", "ab"]},
    ),
    "torus-Δ": (
        [["v"], ["a", "b", "c"], ["U", "L"]],
        {"a": ["v", "v"], "b": ["v", "v"], "c": ["v", "v"],
         "U": ["a", "c", "b"], "L": ["b", "c", "a"]},
    ),
    "rp2-Δ": (
        [["v", "w"], ["a", "b", "c"], ["U", "L"]],
        {"a": ["w", "v"], "b": ["w", "v"], "c": ["v", "v"],
         "U": ["b", "a", "c"], "L": ["a", "b", "c"]},
    ),
    "klein-Δ": (
        [["v"], ["a", "b", "c"], ["U", "L"]],
        {"a": ["v", "v"], "b": ["v", "v"], "c": ["v", "v"],
         "U": ["b", "a", "c"], "L": ["a", "c", "b"]},
    ),
}

_CUBE_MODELS = {
    "point-□": ([["p"]], {}),
    "s1-□": ([["p"], ["e"]], {"e": {(1, 0): "p", (1, 1): "p"}}),
    "torus-□": (
        [["p"], ["a", "b"], ["Q"]],
        {"a": {(1, 0): "p", (1, 1): "p"}, "b": {(1, 0): "p", (1, 1): "p"},
         "Q": {(1, 0): "a", (1, 1): "a", (2, 0): "b", (2, 1): "b"}},
    ),
    # two squares glued along a middle circle m; the left/right edges f1, f2
    # are swapped between the squares, which produces the twist
    "klein-□": (
        [["v", "w"], ["a", "m", "f1", "f2"], ["Q1", "Q2"]],
        {"a": {(1, 0): "v", (1, 1): "v"}, "m": {(1, 0): "w", (1, 1): "w"},
         "f1": {(1, 0): "v", (1, 1): "w"}, "f2": {(1, 0): "v", (1, 1): "w"},
         "Q1": {(1, 0): "f1", (1, 1): "f2", (2, 0): "a", (2, 1): "m"},
         "Q2": {(1, 0): "f2", (1, 1): "f1", (2, 0): "a", (2, 1): "m"}},
    ),
}

BUILTIN_MODELS = tuple(_DELTA_MODELS) + tuple(_CUBE_MODELS)

# ASCII spellings accepted on the command line
_ALIASES = {name.replace("Δ", "D").replace("□", "C"): name for name in BUILTIN_MODELS}


def canonical_model_name(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in BUILTIN_MODELS:
        raise KeyError(f"unknown model {name!r}; choose from {', '.join(BUILTIN_MODELS)}")
    return name


def builtin_model(name: str, truncation: int | None = None) -> Shape:
    """A named finite model.

    Δ-models are complete presimplicial sets.  □-models are cubical closures
    of their nondegenerate cells, truncated by default at
    ``max(dim + 1, 3)`` and never above :func:`max_dim`.
    """
    name = canonical_model_name(name)
    if name in _DELTA_MODELS:
        cells, faces = _DELTA_MODELS[name]
        return _presimplicial(cells, faces)
    gens, faces = _CUBE_MODELS[name]
    dim = len(gens) - 1
    D = max(dim + 1, 3) if truncation is None else truncation
    return cubical_closure(gens, faces, min(D, max_dim()))


# --------------------------------------------------------------------------
# Čech constructions of finite surjections


def _fibers(f: Mapping[str, str], target: Sequence[str] | None):
    target = tuple(sorted(set(f.values()))) if target is None else tuple(target)
    fib = {b: [e for e in f if f[e] == b] for b in target}
    missing = [b for b in target if not fib[b]]
    if missing:
        raise ValueError(f"map is not surjective: nothing hits {missing}")
    stray = set(f.values()) - set(target)
    if stray:
        raise ValueError(f"map has values outside the target: {sorted(stray)}")
    return target, fib


def _tid(t) -> str:
    return ",".join(t)


def cech_presimplicial(f: Mapping[str, str], depth: int, target: Sequence[str] | None = None) -> AugmentedShape:
    """``S_n`` = fiberwise ``(n+1)``-tuples; ``d_i`` deletes coordinate ``i``."""
    target, fib = _fibers(f, target)
    tuples = [[t for b in target for t in product(fib[b], repeat=n + 1)] for n in range(depth + 1)]
    cells = tuple(tuple(_tid(t) for t in level) for level in tuples)
    fs = [()]
    for n in range(1, depth + 1):
        fs.append(tuple({_tid(t): _tid(t[:i] + t[i + 1:]) for t in tuples[n]} for i in range(n + 1)))
    s = FinPresimplicialSet(cells, tuple(fs), complete=False)
    return AugmentedShape(s, target, {e: f[e] for e in cells[0]})


def _words(n):
    return list(product((0, 1), repeat=n))


def cech_pseudocubical(f: Mapping[str, str], depth: int, target: Sequence[str] | None = None) -> AugmentedShape:
    """``X_n`` = fiberwise families ``(e_w)`` indexed by ``w in {0,1}^n``.

    ``d_i^e`` restricts to the words with ``w_i = e``; ``s_i`` duplicates
    coordinate ``i``.
    """
    target, fib = _fibers(f, target)
    levels = []
    for n in range(depth + 1):
        k = 2 ** n
        levels.append([t for b in target for t in product(fib[b], repeat=k)])
    cells = tuple(tuple(_tid(t) for t in lv) for lv in levels)
    fs, degs = [{}], [{}]
    for n in range(1, depth + 1):
        words = _words(n)
        pos = {w: k for k, w in enumerate(words)}
        sub = _words(n - 1)
        fn = {}
        for i in range(1, n + 1):
            for e in (0, 1):
                idx = [pos[u[: i - 1] + (e,) + u[i - 1:]] for u in sub]
                fn[(i, e)] = {_tid(t): _tid(tuple(t[k] for k in idx)) for t in levels[n]}
        fs.append(fn)
        subpos = {u: k for k, u in enumerate(sub)}
        dn = {}
        for j in range(1, n + 1):
            idx = [subpos[w[: j - 1] + w[j:]] for w in words]
            dn[j] = {_tid(t): _tid(tuple(t[k] for k in idx)) for t in levels[n - 1]}
        degs.append(dn)
    x = FinPseudocubicalSet(cells, tuple(fs), tuple(degs), complete=False)
    return AugmentedShape(x, target, {e: f[e] for e in cells[0]})


# --------------------------------------------------------------------------
# extension conditions


def _index_by(cells, key):
    out: dict = {}
    for c in cells:
        out.setdefault(key(c), []).append(c)
    return out


def check_simplicial_extension(a: AugmentedShape, through: int) -> bool:
    """Brute-force check of the filler condition for contractibility.

    The augmentation must be onto, and for every ``n`` with ``n + 1 <= through``
    each compatible family ``x_0..x_{n+1}`` in ``S_n`` (``d_i x_j = d_{j-1} x_i``)
    must be the face family of some ``(n+1)``-cell.
    """
    s = a.shape
    if set(a.aug[c] for c in s.cells[0]) != set(a.target):
        return False
    for n in range(0, through):
        if n + 1 > s.truncation:
            return False

        def dface(i, c, n=n):
            return a.aug[c] if n == 0 else s.faces[n][i][c]

        fillers = {tuple(s.faces[n + 1][i][y] for i in range(n + 2)) for y in s.cells[n + 1]}
        by_d0 = _index_by(s.cells[n], lambda c: dface(0, c))
        m = n + 2

        def extend(prefix):
            j = len(prefix)
            if j == m:
                return tuple(prefix) in fillers
            if j == 0:
                cands = s.cells[n]
            else:
                cands = by_d0.get(dface(j - 1, prefix[0]), [])
            for c in cands:
                if all(dface(i, c) == dface(j - 1, prefix[i]) for i in range(1, j)):
                    if not extend(prefix + [c]):
                        return False
            return True

        if not extend([]):
            return False
    return True


def check_cubical_extension(a: AugmentedShape, through: int) -> bool:
    """Brute-force check of the two cubical filler conditions.

    (i) ``x, y`` over the same point bound an edge ``z`` with
    ``d_1^0 z = x``, ``d_1^1 z = y``; (ii) for ``1 <= n < through`` every
    compatible family ``x_i^e`` (``d_i^a x_j^e = d_{j-1}^e x_i^a``) is the
    face family of an ``(n+1)``-cell.
    """
    x = a.shape
    if set(a.aug[c] for c in x.cells[0]) != set(a.target):
        return False
    if through >= 1:
        if x.truncation < 1:
            return False
        edges = {(x.faces[1][(1, 0)][z], x.faces[1][(1, 1)][z]) for z in x.cells[1]}
        for u in x.cells[0]:
            for v in x.cells[0]:
                if a.aug[u] == a.aug[v] and (u, v) not in edges:
                    return False
    F = x.faces
    for n in range(1, through):
        if n + 1 > x.truncation:
            return False
        slots = [(i, e) for i in range(1, n + 2) for e in (0, 1)]
        fillers = {tuple(F[n + 1][s][y] for s in slots) for y in x.cells[n + 1]}
        by_first = _index_by(x.cells[n], lambda c: (F[n][(1, 0)][c], F[n][(1, 1)][c]))

        def compatible(c, j, e, chosen):
            for (i, a_), xi in chosen.items():
                if i < j and F[n][(i, a_)][c] != F[n][(j - 1, e)][xi]:
                    return False
            return True

        def extend(k, chosen):
            if k == len(slots):
                return tuple(chosen[s] for s in slots) in fillers
            j, e = slots[k]
            if j == 1:
                cands = x.cells[n]
            else:
                key = (F[n][(j - 1, e)][chosen[(1, 0)]], F[n][(j - 1, e)][chosen[(1, 1)]])
                cands = by_first.get(key, [])
            for c in cands:
                if compatible(c, j, e, chosen):
                    chosen[(j, e)] = c
                    ok = extend(k + 1, chosen)
                    del chosen[(j, e)]
                    if not ok:
                        return False
            return True

        if not extend(0, {}):
            return False
    return True


# --------------------------------------------------------------------------
# JSON


def shape_to_json(obj: Shape | AugmentedShape) -> dict:
    aug = obj if isinstance(obj, AugmentedShape) else None
    s = obj.shape if aug else obj
    d: dict = {"truncation": s.truncation, "complete": s.complete,
               "cells": {str(n): list(c) for n, c in enumerate(s.cells)}}
    if isinstance(s, FinPresimplicialSet):
        d["kind"] = "presimplicial"
        d["faces"] = {str(n): {str(i): dict(m) for i, m in enumerate(s.faces[n])}
                      for n in range(1, s.truncation + 1)}
    else:
        d["kind"] = "pseudocubical"
        d["faces"] = {str(n): {f"{i},{e}": dict(m) for (i, e), m in sorted(s.faces[n].items())}
                      for n in range(1, s.truncation + 1)}
        if s.degeneracies is not None:
            d["degeneracies"] = {str(n): {str(j): dict(m) for j, m in sorted(s.degeneracies[n].items())}
                                 for n in range(1, s.truncation + 1)}
    if aug:
        d["augmentation"] = {"target": list(aug.target), "map": dict(aug.aug)}
    return d


def shape_from_json(d: dict) -> Shape | AugmentedShape:
    """Inverse of :func:`shape_to_json`; raises ``ValueError`` on malformed input."""
    try:
        kind = d["kind"]
        D = int(d["truncation"])
        cells = tuple(tuple(str(c) for c in d["cells"].get(str(n), [])) for n in range(D + 1))
        faces_in = d.get("faces", {})
        if kind == "presimplicial":
            fs = [()]
            for n in range(1, D + 1):
                level = faces_in.get(str(n), {})
                fs.append(tuple(dict(level.get(str(i), {})) for i in range(n + 1)))
            s = FinPresimplicialSet(cells, tuple(fs), bool(d.get("complete", True)))
        elif kind == "pseudocubical":
            fs = [{}]
            for n in range(1, D + 1):
                level = faces_in.get(str(n), {})
                fn = {}
                for key, m in level.items():
                    k = tuple(int(t) for t in key.split(","))
                    if len(k) != 2 or not 1 <= k[0] <= n or k[1] not in (0, 1):
                        raise ValueError(f"bad cubical face key {key!r} in dimension {n}")
                    fn[k] = dict(m)
                fs.append(fn)
            degs = None
            if "degeneracies" in d:
                degs = [{}]
                for n in range(1, D + 1):
                    level = d["degeneracies"].get(str(n), {})
                    degs.append({int(j): dict(m) for j, m in level.items()})
                degs = tuple(degs)
            s = FinPseudocubicalSet(cells, tuple(fs), degs, bool(d.get("complete", degs is None)))
        else:
            raise ValueError(f"unknown shape kind {kind!r}")
        if "augmentation" in d:
            a = d["augmentation"]
            return AugmentedShape(s, tuple(a["target"]), dict(a["map"]))
        return s
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed shape JSON: {exc}") from exc
