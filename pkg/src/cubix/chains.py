"""Chain complexes of finitely presented abelian groups.

A term is a :class:`PresentedGroup` ``Z^n / im(R)``; a map between terms is a
plain integer matrix acting on generators, and two maps are equal when their
difference lands in the relation lattice of the target.  Homology uses the
stacked-relations method, so free terms and torsion terms go through the same
code.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .exactla import (
    FgAbGroup,
    Solver,
    columns_as_dicts,
    cokernel_invariants,
    hstack,
    identity,
    image_basis,
    intmat,
    is_zero,
    kernel_basis,
    lattice_covers,
    matrix_from_json,
    matrix_to_json,
    zeros,
)


@dataclass(frozen=True, eq=False)
class PresentedGroup:
    """``Z^generators`` modulo the column span of ``relations``."""

    generators: int
    relations: np.ndarray = None

    def __post_init__(self):
        rel = self.relations
        rel = zeros(self.generators, 0) if rel is None else intmat(rel, rows=self.generators)
        object.__setattr__(self, "relations", rel)

    @classmethod
    def free(cls, n: int) -> "PresentedGroup":
        return cls(n)

    @classmethod
    def cyclic(cls, m: int) -> "PresentedGroup":
        return cls(1, intmat([[m]]))

    @classmethod
    def from_group(cls, g: FgAbGroup) -> "PresentedGroup":
        n = g.rank + len(g.torsion)
        rel = zeros(n, len(g.torsion))
        for k, t in enumerate(g.torsion):
            rel[g.rank + k, k] = t
        return cls(n, rel)

    @property
    def is_free(self) -> bool:
        return is_zero(self.relations)

    def canonical(self) -> FgAbGroup:
        return cokernel_invariants(self.relations)

    def direct_sum(self, other: "PresentedGroup") -> "PresentedGroup":
        a, b = self.relations, other.relations
        rel = zeros(self.generators + other.generators, a.shape[1] + b.shape[1])
        rel[: self.generators, : a.shape[1]] = a
        rel[self.generators :, a.shape[1] :] = b
        return PresentedGroup(self.generators + other.generators, rel)

    def to_json(self) -> dict:
        return {"generators": self.generators, "relations": matrix_to_json(self.relations)}

    @classmethod
    def from_json(cls, d: dict) -> "PresentedGroup":
        n = int(d["generators"])
        rel = d.get("relations")
        return cls(n, None if rel is None else matrix_from_json(rel))

    def __repr__(self):
        return f"PresentedGroup({self.generators}, relations={self.relations.shape[1]} cols)"


def in_span(gens: np.ndarray, vecs: np.ndarray) -> bool:
    """Every column of ``vecs`` is an integer combination of columns of ``gens``."""
    if vecs.shape[1] == 0 or is_zero(vecs):
        return True
    if gens.shape[1] == 0:
        return False
    return Solver(gens).solve_many(vecs) is not None


def congruent(a: np.ndarray, b: np.ndarray, target: PresentedGroup) -> bool:
    """``a == b`` as maps into ``target`` (difference inside the relations)."""
    if a.shape != b.shape:
        return False
    return in_span(target.relations, a - b)


def is_morphism(m: np.ndarray, source: PresentedGroup, target: PresentedGroup) -> bool:
    """``m`` sends every relation of ``source`` into the relations of ``target``."""
    if m.shape != (target.generators, source.generators):
        return False
    return in_span(target.relations, m @ source.relations)


# --------------------------------------------------------------------------
# complexes


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """``C_0 <- C_1 <- ... <- C_D``; ``boundaries[n-1]`` is ``d_n: C_n -> C_{n-1}``.

    ``exact_above`` records that the complex really stops at ``D`` (a finite
    presimplicial set, say) rather than being a truncation, so homology is
    certified in the top degree too.
    """

    terms: tuple[PresentedGroup, ...]
    boundaries: tuple[np.ndarray, ...]
    exact_above: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "boundaries", tuple(intmat(b) for b in self.boundaries))
        if len(self.boundaries) != max(len(self.terms) - 1, 0):
            raise ValueError(
                f"{len(self.terms)} terms need {max(len(self.terms) - 1, 0)} boundaries, "
                f"got {len(self.boundaries)}"
            )

    @classmethod
    def free(cls, ranks: Sequence[int], boundaries: Sequence, exact_above: bool = False):
        return cls(tuple(PresentedGroup(r) for r in ranks), tuple(boundaries), exact_above)

    @property
    def top(self) -> int:
        return len(self.terms) - 1

    @property
    def certified_through(self) -> int:
        return self.top if self.exact_above else self.top - 1

    def rank(self, n: int) -> int:
        return self.terms[n].generators if 0 <= n <= self.top else 0

    def d(self, n: int) -> np.ndarray:
        """``d_n``, with zero maps outside ``1..top``."""
        if 1 <= n <= self.top:
            return self.boundaries[n - 1]
        return zeros(self.rank(n - 1), self.rank(n))

    def relations(self, n: int) -> np.ndarray:
        return self.terms[n].relations if 0 <= n <= self.top else zeros(0, 0)

    def to_json(self) -> dict:
        return {
            "terms": [t.to_json() for t in self.terms],
            "boundaries": [matrix_to_json(b) for b in self.boundaries],
            "exact_above": self.exact_above,
        }


@dataclass(frozen=True, eq=False)
class AugmentedComplex:
    complex: ChainComplex
    target: PresentedGroup
    augmentation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "augmentation", intmat(self.augmentation))

    def extended(self) -> ChainComplex:
        """The complex with the target placed in degree 0 and everything shifted up."""
        c = self.complex
        return ChainComplex((self.target,) + c.terms, (self.augmentation,) + c.boundaries)

    def to_json(self) -> dict:
        d = self.complex.to_json()
        d["target"] = self.target.to_json()
        d["augmentation"] = matrix_to_json(self.augmentation)
        return d


def complex_from_json(d: dict) -> ChainComplex | AugmentedComplex:
    terms = tuple(PresentedGroup.from_json(t) for t in d["terms"])
    bds = tuple(matrix_from_json(b) for b in d.get("boundaries", []))
    c = ChainComplex(terms, bds, bool(d.get("exact_above", False)))
    if "augmentation" in d:
        target = PresentedGroup.from_json(d["target"])
        return AugmentedComplex(c, target, matrix_from_json(d["augmentation"]))
    return c


@dataclass(frozen=True)
class Violation:
    degree: int
    message: str

    def __str__(self):
        return f"degree {self.degree}: {self.message}"


def validate_complex(c: ChainComplex | AugmentedComplex) -> Violation | None:
    """First degree where a boundary is ill defined or ``d d != 0``; ``None`` if fine.

    Raises ``ValueError`` when consecutive boundary shapes do not fit.
    """
    if isinstance(c, AugmentedComplex):
        e = c.extended()
        v = validate_complex(e)
        return None if v is None else Violation(v.degree - 1, v.message)
    for n in range(1, c.top + 1):
        d = c.d(n)
        if d.shape != (c.rank(n - 1), c.rank(n)):
            raise ValueError(
                f"d_{n} has shape {d.shape}, expected ({c.rank(n - 1)}, {c.rank(n)})"
            )
    for n in range(1, c.top + 1):
        if not is_morphism(c.d(n), c.terms[n], c.terms[n - 1]):
            return Violation(n, f"d_{n} does not respect the relations of C_{n}")
        if n >= 2 and not in_span(c.relations(n - 2), c.d(n - 1) @ c.d(n)):
            return Violation(n, f"d_{n - 1} d_{n} != 0")
    return None


def cycle_basis(d: np.ndarray, relations_below: np.ndarray) -> np.ndarray:
    """Basis of ``{x : d x in im(relations_below)}``."""
    g = d.shape[1]
    if relations_below.shape[1] == 0 or is_zero(relations_below):
        return kernel_basis(d) if g else zeros(0, 0)
    k = kernel_basis(hstack(d, relations_below))
    return image_basis(k[:g, :])


def homology(c: ChainComplex, n: int) -> FgAbGroup:
    """``H_n = ker d_n / (im d_{n+1} + relations of C_n)`` in canonical form."""
    if not 0 <= n <= c.top:
        raise ValueError(f"degree {n} outside 0..{c.top}")
    z = cycle_basis(c.d(n), c.relations(n - 1) if n >= 1 else zeros(0, 0))
    gens = hstack(c.d(n + 1), c.relations(n))
    if z.shape[1] == 0:
        return FgAbGroup()
    if gens.shape[1] == 0:
        return FgAbGroup(z.shape[1])
    coords = Solver(z).solve_many(gens)
    if coords is None:
        raise ValueError(f"boundaries into degree {n} are not cycles; validate the complex")
    return cokernel_invariants(coords)


def homology_all(c: ChainComplex) -> list[FgAbGroup]:
    """Homology in every certified degree."""
    return [homology(c, n) for n in range(c.certified_through + 1)]


def exact_at(c: ChainComplex, n: int, generators: Iterable[dict] | None = None) -> bool:
    """Whether ``H_n(c)`` vanishes.

    ``generators`` may replace the columns of ``d_{n+1}`` by any lazily
    produced family of boundaries (sparse vectors in the coordinates of
    ``C_n``); the check stops as soon as the cycles are covered.
    """
    z = cycle_basis(c.d(n), c.relations(n - 1) if n >= 1 else zeros(0, 0))
    if z.shape[1] == 0:
        return True
    rel = columns_as_dicts(c.relations(n))
    if generators is None:
        generators = columns_as_dicts(c.d(n + 1))

    def gens():
        yield from rel
        yield from generators

    return lattice_covers(gens(), columns_as_dicts(z))


def is_acyclic(c: AugmentedComplex, through: int) -> bool:
    """``... -> C_1 -> C_0 -> target -> 0`` is exact in degrees ``-1..through``."""
    e = c.extended()
    return all(exact_at(e, k) for k in range(0, through + 2))


# --------------------------------------------------------------------------
# maps, homotopies, splittings


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(intmat(f) for f in self.components))

    def __getitem__(self, n: int) -> np.ndarray:
        if 0 <= n < len(self.components):
            return self.components[n]
        return zeros(self.target.rank(n), self.source.rank(n))

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return cls(c, c, tuple(identity(c.rank(n)) for n in range(c.top + 1)))

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self . other``."""
        k = min(len(self.components), len(other.components))
        return ChainMap(other.source, self.target, tuple(self[n] @ other[n] for n in range(k)))


@dataclass(frozen=True, eq=False)
class ChainHomotopy:
    """``h_n: C_n -> C'_{n+1}``."""

    components: tuple[np.ndarray, ...]

    def __getitem__(self, n: int) -> np.ndarray:
        return self.components[n] if 0 <= n < len(self.components) else None


def verify_chain_map(f: ChainMap) -> bool:
    s, t = f.source, f.target
    top = min(s.top, t.top, len(f.components) - 1)
    for n in range(top + 1):
        if not is_morphism(f[n], s.terms[n], t.terms[n]):
            return False
    for n in range(1, top + 1):
        if not congruent(f[n - 1] @ s.d(n), t.d(n) @ f[n], t.terms[n - 1]):
            return False
    return True


def verify_homotopy(f: ChainMap, g: ChainMap, h: ChainHomotopy) -> bool:
    """``f_n - g_n == d'_{n+1} h_n + h_{n-1} d_n`` wherever all terms exist."""
    s, t = f.source, f.target
    top = min(s.top, t.top - 1, len(f.components) - 1, len(g.components) - 1)
    for n in range(top + 1):
        hn = h[n] if h[n] is not None else zeros(t.rank(n + 1), s.rank(n))
        rhs = t.d(n + 1) @ hn
        if n >= 1 and h[n - 1] is not None:
            rhs = rhs + h[n - 1] @ s.d(n)
        if not congruent(f[n] - g[n], rhs, t.terms[n]):
            return False
    return True


def _lift(through: np.ndarray, relations: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """Solve ``through @ x == rhs`` modulo ``relations``."""
    k = through.shape[1]
    if rhs.shape[1] == 0:
        return zeros(k, 0)
    sol = Solver(hstack(through, relations)).solve_many(rhs)
    return None if sol is None else sol[:k, :]


def extend_map(p: AugmentedComplex, s: AugmentedComplex, f: np.ndarray) -> ChainMap:
    """Extend ``f: p.target -> s.target`` to a chain map ``p -> s``.

    ``p`` should have free terms and ``s`` should be exact; the lift is built
    degree by degree with :class:`~cubix.exactla.Solver`.
    """
    P, S = p.complex, s.complex
    comps = []
    f0 = _lift(s.augmentation, s.target.relations, f @ p.augmentation)
    if f0 is None:
        raise ValueError("cannot lift through the augmentation; is the target complex exact?")
    comps.append(f0)
    for n in range(1, min(P.top, S.top) + 1):
        fn = _lift(S.d(n), S.relations(n - 1), comps[-1] @ P.d(n))
        if fn is None:
            raise ValueError(f"cannot lift in degree {n}; is the target complex exact?")
        comps.append(fn)
    return ChainMap(P, S, tuple(comps))


def construct_homotopy(f: ChainMap, g: ChainMap) -> ChainHomotopy:
    """A homotopy between two extensions of the same map (exact target)."""
    P, S = f.source, f.target
    hs = []
    prev = zeros(S.rank(1), P.rank(0))
    for n in range(0, min(P.top, S.top - 1) + 1):
        rhs = f[n] - g[n]
        if n >= 1:
            rhs = rhs - prev @ P.d(n)
        hn = _lift(S.d(n + 1), S.relations(n), rhs)
        if hn is None:
            raise ValueError(f"no homotopy component in degree {n}")
        hs.append(hn)
        prev = hn
    return ChainHomotopy(tuple(hs))


def equal_on_homology(f: ChainMap, g: ChainMap, n: int) -> bool:
    """``H_n(f) == H_n(g)``: ``(f - g)`` sends cycles into boundaries."""
    s, t = f.source, f.target
    z = cycle_basis(s.d(n), s.relations(n - 1) if n >= 1 else zeros(0, 0))
    return in_span(hstack(t.d(n + 1), t.relations(n)), (f[n] - g[n]) @ z)


@dataclass(frozen=True, eq=False)
class Splitting:
    """``C = complement (+) sub`` for an idempotent chain endomorphism ``p``.

    ``sub`` realizes ``Ker(1 - p)`` through ``inclusion``/``projection``;
    ``complement`` realizes ``Ker(p)`` through ``i1``/``pi1``.
    """

    sub: ChainComplex
    inclusion: ChainMap
    projection: ChainMap
    complement: ChainComplex
    i1: ChainMap
    pi1: ChainMap

    def identities_hold(self, p: ChainMap) -> bool:
        c = self.inclusion.target
        for n in range(c.top + 1):
            i2, pi2, i1, pi1 = self.inclusion[n], self.projection[n], self.i1[n], self.pi1[n]
            one_sub, one_co = identity(i2.shape[1]), identity(i1.shape[1])
            checks = [
                (pi1 @ i1, one_co),
                (pi2 @ i2, one_sub),
                (pi1 @ i2, zeros(i1.shape[1], i2.shape[1])),
                (pi2 @ i1, zeros(i2.shape[1], i1.shape[1])),
                (i1 @ pi1, identity(c.rank(n)) - p[n]),
                (i2 @ pi2, p[n]),
            ]
            if any(not np.array_equal(a, b) for a, b in checks):
                return False
        return True


def _coords(basis: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    if basis.shape[1] == 0:
        return zeros(0, vecs.shape[1])
    x = Solver(basis).solve_many(vecs)
    if x is None:
        raise ValueError("vectors do not lie in the lattice")
    return x


def split_presented(group: PresentedGroup, p: np.ndarray):
    """Split an idempotent ``p`` of a presented group.

    Returns ``(sub, i, pi)`` with ``sub = Ker(1 - p)`` presented on a basis of
    its preimage lattice, ``pi @ i == 1`` and ``i @ pi == p`` modulo relations.
    """
    p = intmat(p)
    n = group.generators
    rel = group.relations
    q = identity(n) - p
    if not congruent(p @ p, p, group):
        raise ValueError("map is not idempotent")
    basis = cycle_basis(q, rel)
    # p x lies in Ker(1 - p) only modulo the relations
    pi = _lift(basis, rel, p)
    if pi is None:
        raise ValueError("image of p is not inside Ker(1 - p)")
    sub_rel = _lift(basis, zeros(n, 0), rel)
    return PresentedGroup(basis.shape[1], sub_rel), basis, pi


def split_idempotent(c: ChainComplex, p: ChainMap) -> Splitting:
    """Split a chain idempotent on a complex with free terms."""
    if any(not t.is_free for t in c.terms):
        raise ValueError("split_idempotent needs free terms")
    if not verify_chain_map(p):
        raise ValueError("p is not a chain map")
    for n in range(c.top + 1):
        if not np.array_equal(p[n] @ p[n], p[n]):
            raise ValueError(f"p is not idempotent in degree {n}")
    i2s, pi2s, i1s, pi1s = [], [], [], []
    for n in range(c.top + 1):
        one = identity(c.rank(n))
        b2 = kernel_basis(one - p[n])
        b1 = kernel_basis(p[n])
        i2s.append(b2)
        i1s.append(b1)
        pi2s.append(_coords(b2, p[n]) if b2.shape[1] else zeros(0, c.rank(n)))
        pi1s.append(_coords(b1, one - p[n]) if b1.shape[1] else zeros(0, c.rank(n)))
    sub_d = [pi2s[n - 1] @ c.d(n) @ i2s[n] for n in range(1, c.top + 1)]
    co_d = [pi1s[n - 1] @ c.d(n) @ i1s[n] for n in range(1, c.top + 1)]
    sub = ChainComplex.free([b.shape[1] for b in i2s], sub_d, c.exact_above)
    co = ChainComplex.free([b.shape[1] for b in i1s], co_d, c.exact_above)
    return Splitting(
        sub=sub,
        inclusion=ChainMap(sub, c, tuple(i2s)),
        projection=ChainMap(c, sub, tuple(pi2s)),
        complement=co,
        i1=ChainMap(co, c, tuple(i1s)),
        pi1=ChainMap(c, co, tuple(pi1s)),
    )


# --------------------------------------------------------------------------
# additive functors Z^r |-> A^r


@dataclass(frozen=True, eq=False)
class TensorFunctor:
    """``- (x) A`` for a finitely presented coefficient group ``A``."""

    coeff: PresentedGroup = field(default_factory=lambda: PresentedGroup(1))
    name: str = "id"

    @classmethod
    def mod(cls, m: int) -> "TensorFunctor":
        return cls(PresentedGroup.cyclic(m), f"Z/{m}")

    def on_matrix(self, m: np.ndarray) -> np.ndarray:
        return np.kron(intmat(m), identity(self.coeff.generators)).astype(object)

    def on_group(self, g: PresentedGroup) -> PresentedGroup:
        k = self.coeff.generators
        rel = hstack(
            self.on_matrix(g.relations),
            np.kron(identity(g.generators), self.coeff.relations).astype(object),
        )
        return PresentedGroup(g.generators * k, rel)

    def on_complex(self, c: ChainComplex) -> ChainComplex:
        return ChainComplex(
            tuple(self.on_group(t) for t in c.terms),
            tuple(self.on_matrix(b) for b in c.boundaries),
            c.exact_above,
        )
