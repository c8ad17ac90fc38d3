"""Chain complexes attached to presimplicial and pseudocubical objects.

Shapes are first linearized into modules: graded presented groups with face
(and degeneracy) matrices.  Everything below works on modules, so the same
code builds ``K``, ``C`` and both normalizations for a finite shape, for a
shape tensored with a coefficient group, and for a free resolution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .chains import (
    AugmentedComplex,
    ChainComplex,
    ChainMap,
    PresentedGroup,
    Splitting,
    TensorFunctor,
    _lift,
    congruent,
    cycle_basis,
    exact_at,
    in_span,
    split_idempotent,
)
from .exactla import columns_as_dicts, identity, lattice_covers, vstack, zeros
from .shapes import AugmentedShape, FinPresimplicialSet, FinPseudocubicalSet, validate

FaceKey = tuple[int, int]


@dataclass(frozen=True, eq=False)
class PresimplicialModule:
    """``faces[n][i]`` is the matrix of ``d_i: levels[n] -> levels[n-1]``."""

    levels: tuple[PresentedGroup, ...]
    faces: tuple[tuple[np.ndarray, ...], ...]
    target: PresentedGroup | None = None
    augmentation: np.ndarray | None = None
    exact_above: bool = False

    @property
    def top(self) -> int:
        return len(self.levels) - 1


@dataclass(frozen=True, eq=False)
class PseudocubicalModule:
    """Face matrices ``faces[n][(i, e)]`` and degeneracies ``degeneracies[n][j]:
    levels[n-1] -> levels[n]`` (``None`` in precubical mode)."""

    levels: tuple[PresentedGroup, ...]
    faces: tuple[Mapping[FaceKey, np.ndarray], ...]
    degeneracies: tuple[Mapping[int, np.ndarray], ...] | None = None
    target: PresentedGroup | None = None
    augmentation: np.ndarray | None = None
    exact_above: bool = False

    @property
    def top(self) -> int:
        return len(self.levels) - 1


Module = PresimplicialModule | PseudocubicalModule


def _function_matrix(table: Mapping[str, str], src: tuple[str, ...], dst: tuple[str, ...]) -> np.ndarray:
    pos = {c: k for k, c in enumerate(dst)}
    m = zeros(len(dst), len(src))
    for k, c in enumerate(src):
        m[pos[table[c]], k] = 1
    return m


def linearize(obj) -> Module:
    """Apply the free abelian group functor to a shape, cell order preserved."""
    if isinstance(obj, (PresimplicialModule, PseudocubicalModule)):
        return obj
    aug = obj if isinstance(obj, AugmentedShape) else None
    s = aug.shape if aug else obj
    v = validate(obj)
    if v is not None:
        raise ValueError(f"invalid shape: {v}")
    levels = tuple(PresentedGroup(len(c)) for c in s.cells)
    target = augm = None
    if aug is not None:
        target = PresentedGroup(len(aug.target))
        augm = _function_matrix(aug.aug, s.cells[0], aug.target)
    if isinstance(s, FinPresimplicialSet):
        faces = [()] + [
            tuple(_function_matrix(s.faces[n][i], s.cells[n], s.cells[n - 1]) for i in range(n + 1))
            for n in range(1, s.truncation + 1)
        ]
        return PresimplicialModule(levels, tuple(faces), target, augm, s.complete)
    faces = [{}] + [
        {k: _function_matrix(t, s.cells[n], s.cells[n - 1]) for k, t in s.faces[n].items()}
        for n in range(1, s.truncation + 1)
    ]
    degs = None
    if s.degeneracies is not None:
        degs = tuple([{}] + [
            {j: _function_matrix(t, s.cells[n - 1], s.cells[n]) for j, t in s.degeneracies[n].items()}
            for n in range(1, s.truncation + 1)
        ])
    return PseudocubicalModule(levels, tuple(faces), degs, target, augm, s.complete)


def apply_functor(f: TensorFunctor, m: Module) -> Module:
    """``F`` applied levelwise to every group and structure matrix."""
    levels = tuple(f.on_group(g) for g in m.levels)
    target = None if m.target is None else f.on_group(m.target)
    augm = None if m.augmentation is None else f.on_matrix(m.augmentation)
    if isinstance(m, PresimplicialModule):
        faces = tuple(tuple(f.on_matrix(d) for d in lv) for lv in m.faces)
        return PresimplicialModule(levels, faces, target, augm, m.exact_above)
    faces = tuple({k: f.on_matrix(d) for k, d in lv.items()} for lv in m.faces)
    degs = None
    if m.degeneracies is not None:
        degs = tuple({k: f.on_matrix(d) for k, d in lv.items()} for lv in m.degeneracies)
    return PseudocubicalModule(levels, faces, degs, target, augm, m.exact_above)


def _wrap(c: ChainComplex, m: Module) -> ChainComplex | AugmentedComplex:
    if m.target is None:
        return c
    return AugmentedComplex(c, m.target, m.augmentation)


# --------------------------------------------------------------------------
# unnormalized complexes


def boundary_K(m: PresimplicialModule, n: int) -> np.ndarray:
    d = zeros(m.levels[n - 1].generators, m.levels[n].generators)
    for i, f in enumerate(m.faces[n]):
        d = d + f if i % 2 == 0 else d - f
    return d


def unnormalized_K(s) -> ChainComplex | AugmentedComplex:
    """``K(S)`` with ``d = sum (-1)^i d_i``; augmented when the input is."""
    m = linearize(s)
    if not isinstance(m, PresimplicialModule):
        raise TypeError("K needs a presimplicial input")
    c = ChainComplex(m.levels, tuple(boundary_K(m, n) for n in range(1, m.top + 1)), m.exact_above)
    return _wrap(c, m)


def boundary_C(m: PseudocubicalModule, n: int) -> np.ndarray:
    d = zeros(m.levels[n - 1].generators, m.levels[n].generators)
    for i in range(1, n + 1):
        diff = m.faces[n][(i, 1)] - m.faces[n][(i, 0)]
        d = d + diff if i % 2 == 0 else d - diff
    return d


def unnormalized_C(x) -> ChainComplex | AugmentedComplex:
    """``C(X)`` with ``d = sum (-1)^i (d_i^1 - d_i^0)``."""
    m = linearize(x)
    if not isinstance(m, PseudocubicalModule):
        raise TypeError("C needs a pseudocubical input")
    c = ChainComplex(m.levels, tuple(boundary_C(m, n) for n in range(1, m.top + 1)), m.exact_above)
    return _wrap(c, m)


# --------------------------------------------------------------------------
# the idempotent sigma


@dataclass(frozen=True, eq=False)
class SigmaEndomorphism:
    components: tuple[np.ndarray, ...]

    def __getitem__(self, n: int) -> np.ndarray:
        return self.components[n]

    def as_chain_map(self, c: ChainComplex) -> ChainMap:
        return ChainMap(c, c, self.components)


def sigma_matrices(m: PseudocubicalModule) -> tuple[np.ndarray, ...]:
    """``sigma_n = (1 - s_1 d_1^1)(1 - s_2 d_2^1) ... (1 - s_n d_n^1)``, ``sigma_0 = 1``."""
    if m.degeneracies is None:
        raise ValueError("sigma needs pseudodegeneracies; use normalized_kernel in precubical mode")
    out = []
    for n in range(m.top + 1):
        one = identity(m.levels[n].generators)
        s = one
        for i in range(1, n + 1):
            s = s @ (one - m.degeneracies[n][i] @ m.faces[n][(i, 1)])
        out.append(s)
    return tuple(out)


def sigma_endomorphism(x, check: bool = True) -> SigmaEndomorphism:
    """The idempotent chain endomorphism of ``C(X)``.

    With ``check`` the idempotency and chain-map identities are verified
    (modulo relations for presented levels) before returning.
    """
    m = linearize(x)
    if not isinstance(m, PseudocubicalModule):
        raise TypeError("sigma needs a pseudocubical input")
    sig = SigmaEndomorphism(sigma_matrices(m))
    if check:
        for n in range(m.top + 1):
            if not congruent(sig[n] @ sig[n], sig[n], m.levels[n]):
                raise ArithmeticError(f"sigma_{n} is not idempotent")
            if n >= 1 and not congruent(sig[n - 1] @ boundary_C(m, n), boundary_C(m, n) @ sig[n],
                                        m.levels[n - 1]):
                raise ArithmeticError(f"sigma does not commute with d_{n}")
    return sig


@dataclass(frozen=True, eq=False)
class Normalized:
    """A normalized complex with the basis of each term inside the ambient level.

    ``inclusion[n]`` has one column per generator of ``N_n`` written in the
    generators of ``X_n``.  ``splitting`` is kept for the sigma form.
    """

    complex: ChainComplex
    inclusion: tuple[np.ndarray, ...]
    splitting: Splitting | None = None
    target: PresentedGroup | None = None
    augmentation: np.ndarray | None = None

    @property
    def augmented(self) -> AugmentedComplex:
        if self.target is None:
            raise ValueError("shape is not augmented")
        return AugmentedComplex(self.complex, self.target, self.augmentation @ self.inclusion[0])


def normalized_sigma(x) -> Normalized:
    """``N(X) = Ker(1 - sigma)`` via the splitting of ``sigma`` on ``C(X)``."""
    m = linearize(x)
    sig = sigma_endomorphism(m)
    c = unnormalized_C(m)
    c = c.complex if isinstance(c, AugmentedComplex) else c
    sp = split_idempotent(c, sig.as_chain_map(c))
    return Normalized(sp.sub, sp.inclusion.components, sp, m.target, m.augmentation)


def boundary_N(m: PseudocubicalModule, n: int) -> np.ndarray:
    """``sum (-1)^(i+1) d_i^0`` on ``X_n``; the kernel-form boundary before restriction."""
    d = zeros(m.levels[n - 1].generators, m.levels[n].generators)
    for i in range(1, n + 1):
        f = m.faces[n][(i, 0)]
        d = d - f if i % 2 == 0 else d + f
    return d


def kernel_lattice(m: PseudocubicalModule, n: int) -> np.ndarray:
    """Basis of ``{x : d_i^1 x = 0 (mod relations) for all i}`` in ``X_n`` coordinates."""
    g = m.levels[n].generators
    if n == 0:
        return identity(g)
    stacked = vstack(*[m.faces[n][(i, 1)] for i in range(1, n + 1)])
    rel = m.levels[n - 1].relations
    block = zeros(stacked.shape[0], n * rel.shape[1])
    r, k = rel.shape
    for i in range(n):
        block[i * r:(i + 1) * r, i * k:(i + 1) * k] = rel
    return cycle_basis(stacked, block)


def normalized_kernel(x) -> Normalized:
    """``N(X)_n = cap_i Ker(d_i^1)`` with boundary ``sum (-1)^(i+1) d_i^0``.

    Needs no degeneracies.  Presented levels are handled through preimage
    lattices: ``N_n`` is presented on a basis of the preimage with the
    relations of ``X_n`` rewritten in that basis.
    """
    m = linearize(x)
    if not isinstance(m, PseudocubicalModule):
        raise TypeError("N needs a pseudocubical input")
    bases = [kernel_lattice(m, n) for n in range(m.top + 1)]
    terms = []
    for n, b in enumerate(bases):
        rel = m.levels[n].relations
        coords = _lift(b, zeros(b.shape[0], 0), rel)
        if coords is None:
            raise ArithmeticError(f"relations of X_{n} escape the face kernels")
        terms.append(PresentedGroup(b.shape[1], coords))
    bds = []
    for n in range(1, m.top + 1):
        img = boundary_N(m, n) @ bases[n]
        coords = _lift(bases[n - 1], zeros(bases[n - 1].shape[0], 0), img)
        if coords is None:
            raise ArithmeticError(f"boundary leaves the normalized subgroup in degree {n}")
        bds.append(coords)
    c = ChainComplex(tuple(terms), tuple(bds), m.exact_above)
    return Normalized(c, tuple(bases), None, m.target, m.augmentation)


@dataclass(frozen=True)
class AgreementReport:
    ok: bool
    degree: int | None = None
    message: str = ""


def normalizations_agree(x) -> AgreementReport:
    """Mutual membership of ``Ker(1 - sigma_n)`` and ``cap Ker(d_i^1)`` and
    agreement of the induced boundaries, degree by degree."""
    m = linearize(x)
    ns, nk = normalized_sigma(m), normalized_kernel(m)
    c = unnormalized_C(m)
    c = c.complex if isinstance(c, AugmentedComplex) else c
    trans = []
    for n in range(m.top + 1):
        a, b = ns.inclusion[n], nk.inclusion[n]
        if not (in_span(b, a) and in_span(a, b)):
            return AgreementReport(False, n, "subgroups differ")
        # a = b @ t with t unimodular
        t = _lift(b, zeros(b.shape[0], 0), a) if a.shape[1] else zeros(b.shape[1], 0)
        trans.append(t)
        if n >= 1:
            if not np.array_equal(c.d(n) @ a, boundary_N(m, n) @ a):
                return AgreementReport(False, n, "boundary of C differs from the kernel-form boundary on N")
            if not np.array_equal(trans[n - 1] @ ns.complex.d(n), nk.complex.d(n) @ t):
                return AgreementReport(False, n, "induced boundaries differ")
    return AgreementReport(True)


# --------------------------------------------------------------------------
# acyclicity of large shapes


def _cell_boundary(s, n: int, c: str, theory: str) -> dict:
    """Image of a single cell under ``K``'s or kernel-form ``N``'s boundary, as a sparse vector."""
    out: dict = {}
    if theory == "K":
        for i in range(n + 1):
            y = s.faces[n][i][c]
            out[y] = out.get(y, 0) + (-1) ** i
    else:
        for i in range(1, n + 1):
            y = s.faces[n][(i, 0)][c]
            out[y] = out.get(y, 0) + (-1) ** (i + 1)
    return {k: v for k, v in out.items() if v}


def sigma_of_cell(x: FinPseudocubicalSet, n: int, c: str) -> dict:
    """``sigma_n(c)`` as a sparse combination of cells (at most ``2^n`` terms)."""
    vec = {c: 1}
    for i in range(n, 0, -1):
        nxt = dict(vec)
        for y, k in vec.items():
            z = x.degeneracies[n][i][x.faces[n][(i, 1)][y]]
            nxt[z] = nxt.get(z, 0) - k
        vec = {y: k for y, k in nxt.items() if k}
    return vec


def _sparse_apply(s, n: int, vec: dict, theory: str) -> dict:
    out: dict = {}
    for c, k in vec.items():
        for y, v in _cell_boundary(s, n, c, theory).items():
            out[y] = out.get(y, 0) + k * v
    return {y: v for y, v in out.items() if v}


def lazy_boundaries(a: AugmentedShape, n: int, theory: str, seed: int = 0) -> Iterator[dict]:
    """Boundaries of degree-``n`` generators, in ``X_{n-1}`` cell coordinates,
    visited in a seeded random order.

    For ``N`` the generators are ``sigma(c)`` for every cell ``c``; these span
    ``N_n`` because ``sigma`` projects onto it.
    """
    s = a.shape
    cells = list(s.cells[n])
    random.Random(seed).shuffle(cells)
    for c in cells:
        if theory == "K":
            yield _cell_boundary(s, n, c, "K")
        else:
            yield _sparse_apply(s, n, sigma_of_cell(s, n, c), "N")


def shape_is_acyclic(a: AugmentedShape, through: int, seed: int = 0) -> bool:
    """Exactness of ``K(S) -> Z[B]`` or kernel-form ``N(X) -> Z[B]`` in degrees ``-1..through``.

    Degrees up to ``through`` are built densely; the boundaries from degree
    ``through + 1`` are streamed cell by cell and the check stops as soon as
    they cover the cycles.  This keeps shapes with tens of thousands of top
    cells within reach.
    """
    s = a.shape
    if through + 1 > s.truncation:
        raise ValueError(f"shape truncated at {s.truncation}; cannot certify degree {through}")
    theory = "K" if isinstance(s, FinPresimplicialSet) else "N"
    small = _truncate(a, through)
    m = linearize(small)
    if theory == "K":
        c = unnormalized_K(m)
        incl = [identity(g.generators) for g in m.levels]
    else:
        nz = normalized_kernel(m)
        c, incl = nz.augmented, nz.inclusion
    e = c.extended()
    for k in range(0, through + 1):
        if not exact_at(e, k):
            return False
    # degree `through` of c sits in degree through + 1 of the extended complex;
    # compare in ambient cell coordinates, where the inclusion is injective
    k = through + 1
    z = cycle_basis(e.d(k), e.relations(k - 1))
    if z.shape[1] == 0:
        return True
    pos = {cell: j for j, cell in enumerate(s.cells[through])}
    targets = columns_as_dicts(incl[through] @ z)
    gens = ({pos[y]: v for y, v in b.items()} for b in lazy_boundaries(a, k, theory, seed))
    return lattice_covers(gens, targets)


def _truncate(a: AugmentedShape, depth: int) -> AugmentedShape:
    s = a.shape
    cells = s.cells[: depth + 1]
    faces = s.faces[: depth + 1]
    if isinstance(s, FinPresimplicialSet):
        t = FinPresimplicialSet(cells, faces, False)
    else:
        degs = None if s.degeneracies is None else s.degeneracies[: depth + 1]
        t = FinPseudocubicalSet(cells, faces, degs, False)
    return AugmentedShape(t, a.target, a.aug)
