"""The free preadditive category on finite sets, additive extensions of
functors into abelian groups, and idempotent splitting.

A base map ``f: S -> T`` between finite sets is a tuple listing ``f(s)`` for
``s`` in the order of ``S``.  A :class:`FormalMorphism` is a finite integer
combination of base maps, i.e. a morphism of the free preadditive category.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Mapping, Sequence

import numpy as np

from .chains import (
    ChainComplex,
    PresentedGroup,
    TensorFunctor,
    congruent,
    homology,
    split_presented,
)
from .exactla import FgAbGroup, identity, zeros
from .normalize import (
    apply_functor,
    boundary_C,
    linearize,
    normalized_kernel,
    sigma_matrices,
    unnormalized_K,
)
from .shapes import AugmentedShape, FinPresimplicialSet, FinPseudocubicalSet

FinSet = tuple[str, ...]
BaseMap = tuple[str, ...]


def compose_maps(g: BaseMap, f: BaseMap, middle: FinSet) -> BaseMap:
    """``g . f`` where ``f`` lands in ``middle``."""
    pos = {x: k for k, x in enumerate(middle)}
    return tuple(g[pos[y]] for y in f)


def identity_map(s: FinSet) -> BaseMap:
    return tuple(s)


@dataclass(frozen=True)
class FormalMorphism:
    """``sum c_f f`` over base maps ``f: source -> target``; zero terms are pruned."""

    source: FinSet
    target: FinSet
    terms: Mapping[BaseMap, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        tset = set(self.target)
        clean = {}
        for f, c in self.terms.items():
            f = tuple(f)
            if len(f) != len(self.source) or not set(f) <= tset:
                raise ValueError(f"{f} is not a map {self.source} -> {self.target}")
            if c:
                clean[f] = int(c)
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def of(cls, source: FinSet, target: FinSet, f: BaseMap, c: int = 1) -> "FormalMorphism":
        return cls(source, target, {tuple(f): c})

    @classmethod
    def identity(cls, s: FinSet) -> "FormalMorphism":
        return cls.of(s, s, identity_map(s))

    @classmethod
    def zero(cls, source: FinSet, target: FinSet) -> "FormalMorphism":
        return cls(source, target, {})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, FormalMorphism):
            return NotImplemented
        return (self.source, self.target, self.terms) == (other.source, other.target, other.terms)

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.terms.items())))

    def __add__(self, other: "FormalMorphism") -> "FormalMorphism":
        return formal_add(self, other)

    def __neg__(self) -> "FormalMorphism":
        return FormalMorphism(self.source, self.target, {f: -c for f, c in self.terms.items()})

    def __sub__(self, other: "FormalMorphism") -> "FormalMorphism":
        return formal_add(self, -other)

    def __rmul__(self, k: int) -> "FormalMorphism":
        return FormalMorphism(self.source, self.target, {f: k * c for f, c in self.terms.items()})

    def __matmul__(self, other: "FormalMorphism") -> "FormalMorphism":
        return formal_compose(self, other)


def formal_add(f: FormalMorphism, g: FormalMorphism) -> FormalMorphism:
    if (f.source, f.target) != (g.source, g.target):
        raise ValueError("formal_add needs parallel morphisms")
    terms = dict(f.terms)
    for m, c in g.terms.items():
        terms[m] = terms.get(m, 0) + c
    return FormalMorphism(f.source, f.target, terms)


def formal_compose(g: FormalMorphism, f: FormalMorphism) -> FormalMorphism:
    """``g . f``, expanded bilinearly.

    >>> s = ("a", "b")
    >>> swap = FormalMorphism.of(s, s, ("b", "a"))
    >>> (swap @ swap) == FormalMorphism.identity(s)
    True
    """
    if f.target != g.source:
        raise ValueError("formal_compose: target of f is not the source of g")
    terms: dict = {}
    for gm, gc in g.terms.items():
        for fm, fc in f.terms.items():
            h = compose_maps(gm, fm, f.target)
            terms[h] = terms.get(h, 0) + gc * fc
    return FormalMorphism(f.source, g.target, terms)


@dataclass(frozen=True)
class KaroubiObject:
    """A finite set with a formal idempotent endomorphism."""

    base: FinSet
    idem: FormalMorphism

    def __post_init__(self):
        if self.idem.source != tuple(self.base) or self.idem.target != tuple(self.base):
            raise ValueError("idempotent must be an endomorphism of the base")
        if formal_compose(self.idem, self.idem) != self.idem:
            raise ValueError("not idempotent")


# --------------------------------------------------------------------------
# functors into abelian groups


@dataclass(frozen=True, eq=False)
class AdditiveFunctorSpec:
    """A functor from finite sets to finitely presented abelian groups.

    ``on_objects`` gives the group of a set, ``on_maps(f, S, T)`` the matrix
    of a base map.  Functoriality is checked exhaustively on all sets of size
    at most ``check_size`` when the spec is built.
    """

    name: str
    on_objects: Callable[[FinSet], PresentedGroup]
    on_maps: Callable[[BaseMap, FinSet, FinSet], np.ndarray]
    tensor: TensorFunctor | None = None
    check_size: int = 2

    def __post_init__(self):
        problem = functoriality_defect(self, self.check_size)
        if problem:
            raise ValueError(f"functor {self.name!r} is not functorial: {problem}")

    @classmethod
    def tensor_free(cls, coeff: TensorFunctor, name: str) -> "AdditiveFunctorSpec":
        """``S |-> Z[S] (x) A``."""

        def obj(s):
            return coeff.on_group(PresentedGroup(len(s)))

        def mor(f, s, t):
            return coeff.on_matrix(_function_matrix(f, t))

        return cls(name, obj, mor, coeff)

    def group(self, s: FinSet) -> PresentedGroup:
        return self.on_objects(tuple(s))

    def matrix(self, f: BaseMap, s: FinSet, t: FinSet) -> np.ndarray:
        return self.on_maps(tuple(f), tuple(s), tuple(t))


def _function_matrix(f: BaseMap, t: FinSet) -> np.ndarray:
    pos = {x: k for k, x in enumerate(t)}
    m = zeros(len(t), len(f))
    for k, y in enumerate(f):
        m[pos[y], k] = 1
    return m


def functoriality_defect(F: AdditiveFunctorSpec, size: int = 2) -> str | None:
    """First failure of ``F(id) = 1`` or ``F(g f) = F(g) F(f)`` over all maps
    between the standard sets of size ``1..size``."""
    sets = [tuple(f"e{k}" for k in range(n)) for n in range(1, size + 1)]
    maps = {(s, t): [tuple(m) for m in product(t, repeat=len(s))] for s in sets for t in sets}
    for s in sets:
        g = F.group(s)
        if not congruent(F.matrix(identity_map(s), s, s), identity(g.generators), g):
            return f"F(id) != 1 on a set of size {len(s)}"
    for a, b, c in product(sets, repeat=3):
        gc = F.group(c)
        for f in maps[(a, b)]:
            Ff = F.matrix(f, a, b)
            for g in maps[(b, c)]:
                lhs = F.matrix(compose_maps(g, f, b), a, c)
                if not congruent(lhs, F.matrix(g, b, c) @ Ff, gc):
                    return f"F(g f) != F(g) F(f) for f={f}, g={g}"
    return None


def functor_from_tag(tag: str) -> AdditiveFunctorSpec:
    """``free`` is ``Z[-]``; ``free-mod:m`` is ``Z[-] (x) Z/m``."""
    if tag == "free":
        return AdditiveFunctorSpec.tensor_free(TensorFunctor(), "free")
    if tag.startswith("free-mod:"):
        try:
            m = int(tag.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad modulus in {tag!r}") from None
        if m < 2:
            raise ValueError("modulus must be at least 2")
        return AdditiveFunctorSpec.tensor_free(TensorFunctor.mod(m), tag)
    raise ValueError(f"unknown functor tag {tag!r}")


def extend_additive(F: AdditiveFunctorSpec, m: FormalMorphism) -> np.ndarray:
    """``F_ad(sum c_i f_i) = sum c_i F(f_i)``."""
    out = zeros(F.group(m.target).generators, F.group(m.source).generators)
    for f, c in m.terms.items():
        out = out + c * F.matrix(f, m.source, m.target)
    return out


@dataclass(frozen=True, eq=False)
class KaroubiImage:
    """``F~(A, p)``: the summand ``Ker(1 - F_ad(p))`` of ``F(A)``."""

    group: PresentedGroup
    inclusion: np.ndarray
    projection: np.ndarray


def extend_to_karoubi(F: AdditiveFunctorSpec, k: KaroubiObject) -> KaroubiImage:
    """Split ``F_ad(idem)`` in the target: ``pi i = 1`` and ``i pi = F_ad(idem)``."""
    p = extend_additive(F, k.idem)
    sub, i, pi = split_presented(F.group(k.base), p)
    return KaroubiImage(sub, i, pi)


# --------------------------------------------------------------------------
# Hom(Q, -) applied to shapes


def _tup(cells: Sequence[str]) -> str:
    return "|".join(cells)


def hom_shape(q: FinSet, a: AugmentedShape, depth: int | None = None) -> AugmentedShape:
    """``Hom(Q, -)`` applied cellwise: ``n``-cells are ``Q``-indexed families of
    ``n``-cells, structure maps act pointwise.  Ids join the family with ``|``,
    so a one-point ``Q`` reproduces the shape's own ids."""
    s = a.shape
    D = s.truncation if depth is None else min(depth, s.truncation)
    k = len(q)
    fams = [list(product(s.cells[n], repeat=k)) for n in range(D + 1)]
    cells = tuple(tuple(_tup(t) for t in lv) for lv in fams)

    def pointwise(table, lv):
        return {_tup(t): _tup(tuple(table[x] for x in t)) for t in lv}

    if isinstance(s, FinPresimplicialSet):
        faces = [()] + [tuple(pointwise(s.faces[n][i], fams[n]) for i in range(n + 1))
                        for n in range(1, D + 1)]
        shape = FinPresimplicialSet(cells, tuple(faces), s.complete and D == s.truncation)
    else:
        faces = [{}] + [{key: pointwise(t, fams[n]) for key, t in s.faces[n].items()}
                        for n in range(1, D + 1)]
        degs = None
        if s.degeneracies is not None:
            degs = tuple([{}] + [{j: pointwise(t, fams[n - 1]) for j, t in s.degeneracies[n].items()}
                                 for n in range(1, D + 1)])
        shape = FinPseudocubicalSet(cells, tuple(faces), degs, s.complete and D == s.truncation)
    targets = list(product(a.target, repeat=k))
    return AugmentedShape(shape, tuple(_tup(t) for t in targets), pointwise(a.aug, fams[0]))


def hom_complex(q: FinSet, a: AugmentedShape, depth: int | None = None):
    """``K(Z[Hom(Q, S)])`` or kernel-form ``N(Z[Hom(Q, X)])``, augmented to ``Z[Hom(Q, B)]``."""
    h = hom_shape(q, a, depth)
    if isinstance(h.shape, FinPresimplicialSet):
        return unnormalized_K(h)
    return normalized_kernel(h).augmented


# --------------------------------------------------------------------------
# F(N(X)) versus N(F(X))


def formal_faces(x: FinPseudocubicalSet, n: int, key) -> FormalMorphism:
    src, tgt = x.cells[n], x.cells[n - 1]
    return FormalMorphism.of(src, tgt, tuple(x.faces[n][key][c] for c in src))


def formal_degeneracy(x: FinPseudocubicalSet, n: int, j: int) -> FormalMorphism:
    src, tgt = x.cells[n - 1], x.cells[n]
    return FormalMorphism.of(src, tgt, tuple(x.degeneracies[n][j][c] for c in src))


def formal_sigma(x: FinPseudocubicalSet, n: int) -> FormalMorphism:
    """``sigma_n`` as a formal endomorphism of ``X_n``, expanded over subsets."""
    one = FormalMorphism.identity(x.cells[n])
    s = one
    for i in range(1, n + 1):
        s = s @ (one - formal_degeneracy(x, n, i) @ formal_faces(x, n, (i, 1)))
    return s


def formal_boundary_C(x: FinPseudocubicalSet, n: int) -> FormalMorphism:
    d = FormalMorphism.zero(x.cells[n], x.cells[n - 1])
    for i in range(1, n + 1):
        diff = formal_faces(x, n, (i, 1)) - formal_faces(x, n, (i, 0))
        d = d + diff if i % 2 == 0 else d - diff
    return d


@dataclass(frozen=True, eq=False)
class NaturalityReport:
    ok: bool
    homology_formal: tuple[FgAbGroup, ...]
    homology_direct: tuple[FgAbGroup, ...]
    failure: str = ""


def _split_complex(levels, sigmas, boundaries):
    """Split ``sigma`` degreewise in presented groups and conjugate the boundary."""
    pieces = [split_presented(g, p) for g, p in zip(levels, sigmas)]
    terms = tuple(sub for sub, _, _ in pieces)
    bds = tuple(pieces[n - 1][2] @ boundaries[n - 1] @ pieces[n][1] for n in range(1, len(levels)))
    return ChainComplex(terms, bds), pieces


def verify_functor_normalization(F: AdditiveFunctorSpec, x: FinPseudocubicalSet) -> NaturalityReport:
    """Check ``F(N(X)) ~= N(F(X))`` with an explicit commuting isomorphism.

    The left side splits the formal idempotents ``sigma_n`` after applying
    ``F_ad`` (one Karoubi image per degree) and carries the boundary
    ``pi F_ad(d) i``.  The right side applies ``F`` to the faces and
    degeneracies, rebuilds ``sigma`` from those matrices and splits it.  The
    comparison map is ``phi_n = pi^R_n i^L_n``.
    """
    if x.degeneracies is None:
        raise ValueError("needs pseudodegeneracies")
    D = x.truncation
    # left: formal sigma, then F_ad
    kar = [extend_to_karoubi(F, KaroubiObject(x.cells[n], formal_sigma(x, n))) for n in range(D + 1)]
    left_bd = [kar[n - 1].projection @ extend_additive(F, formal_boundary_C(x, n)) @ kar[n].inclusion
               for n in range(1, D + 1)]
    left = ChainComplex(tuple(k.group for k in kar), tuple(left_bd))
    # right: F(X) as a module, sigma from its matrices
    if F.tensor is None:
        raise ValueError("direct side needs a tensor-type functor")
    fx = apply_functor(F.tensor, linearize(x))
    sig = sigma_matrices(fx)
    right, pieces = _split_complex(fx.levels, sig, [boundary_C(fx, n) for n in range(1, D + 1)])

    def report(ok, msg=""):
        hl = tuple(homology(left, n) for n in range(D))
        hr = tuple(homology(right, n) for n in range(D))
        return NaturalityReport(ok and hl == hr, hl, hr, msg or ("" if hl == hr else "homology differs"))

    for n in range(D + 1):
        if not congruent(extend_additive(F, formal_sigma(x, n)), sig[n], fx.levels[n]):
            return report(False, f"F(sigma_{n}) != sigma of F(X)")
    phis, psis = [], []
    for n in range(D + 1):
        _, i_r, pi_r = pieces[n]
        phi = pi_r @ kar[n].inclusion
        psi = kar[n].projection @ i_r
        L, R = left.terms[n], right.terms[n]
        if not congruent(psi @ phi, identity(L.generators), L):
            return report(False, f"psi phi != 1 in degree {n}")
        if not congruent(phi @ psi, identity(R.generators), R):
            return report(False, f"phi psi != 1 in degree {n}")
        phis.append(phi)
        psis.append(psi)
    for n in range(1, D + 1):
        if not congruent(phis[n - 1] @ left.d(n), right.d(n) @ phis[n], right.terms[n - 1]):
            return report(False, f"phi does not commute with d_{n}")
    return report(True)
