"""The acceptance suite, shared by ``pytest`` and ``cubix selftest``.

Each ``criterion_*`` function returns a :class:`CriterionResult`; nothing
here raises on a mathematical failure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .chains import homology, verify_chain_map
from .derive import FpModule, compare_theorem, parse_functor
from .exactla import FgAbGroup, determinant, identity, intmat, snf
from .freecat import functor_from_tag, hom_shape, verify_functor_normalization
from .normalize import (
    normalizations_agree,
    normalized_kernel,
    normalized_sigma,
    shape_is_acyclic,
    sigma_endomorphism,
    unnormalized_C,
    unnormalized_K,
)
from .shapes import (
    BUILTIN_MODELS,
    AugmentedShape,
    FinPresimplicialSet,
    FinPseudocubicalSet,
    builtin_model,
    cech_presimplicial,
    cech_pseudocubical,
    check_cubical_extension,
    check_simplicial_extension,
    validate,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number:>2} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number, title):
    def wrap(fn):
        def run() -> CriterionResult:
            t = time.perf_counter()
            ok, detail = fn()
            return CriterionResult(number, title, ok, detail, time.perf_counter() - t)
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


CUBE_MODELS = tuple(n for n in BUILTIN_MODELS if n.endswith("□"))
DELTA_MODELS = tuple(n for n in BUILTIN_MODELS if n.endswith("Δ"))


def surjections(max_e: int = 4, max_b: int = 2):
    """One surjection per isomorphism class with ``|E| <= max_e``, ``|B| <= max_b``.

    The Čech constructions only see the fiber sizes, so sorted fiber-size
    tuples cover every case.
    """
    out = []
    for b in range(1, max_b + 1):
        for sizes in product(range(1, max_e + 1), repeat=b):
            if list(sizes) != sorted(sizes) or sum(sizes) > max_e:
                continue
            f, k = {}, 0
            for j, size in enumerate(sizes):
                for _ in range(size):
                    f[f"e{k}"] = f"b{j}"
                    k += 1
            out.append(f)
    return out


# --------------------------------------------------------------------------


@_timed(1, "exact Smith normal form")
def criterion_1():
    rng = np.random.default_rng(1)
    for trial in range(1000):
        r, c = (int(x) for x in rng.integers(0, 7, size=2))
        a = intmat(rng.integers(-9, 10, size=(r, c)).tolist(), rows=r, cols=c)
        s = snf(a)
        if not np.array_equal(s.u @ a @ s.v, s.d):
            return False, f"UAV != D on trial {trial}"
        if abs(determinant(s.u)) != 1 or abs(determinant(s.v)) != 1:
            return False, f"non-unimodular factor on trial {trial}"
        diag = [int(s.d[i, i]) for i in range(min(r, c))]
        off = s.d.copy()
        for i in range(min(r, c)):
            off[i, i] = 0
        nz = [x for x in diag if x]
        if any(off.flatten()) or any(x < 0 for x in diag) or diag[: len(nz)] != nz:
            return False, f"D not in normal shape on trial {trial}"
        if any(nz[k + 1] % nz[k] for k in range(len(nz) - 1)) or nz != list(s.invariant_factors):
            return False, f"divisibility fails on trial {trial}"
    return True, "1000/1000 random matrices satisfy UAV = D, unimodularity, divisibility"


def brute_force_identities(s) -> bool:
    """Independent evaluator of every identity, by composing face tables as functions."""
    def comp(*tables):
        def f(x):
            for t in reversed(tables):
                x = t[x]
            return x
        return f

    if isinstance(s, FinPresimplicialSet):
        F = s.faces
        return all(
            comp(F[n - 1][i], F[n][j])(x) == comp(F[n - 1][j - 1], F[n][i])(x)
            for n in range(2, s.truncation + 1)
            for x in s.cells[n] for j in range(n + 1) for i in range(j)
        )
    F, S = s.faces, s.degeneracies
    for n in range(2, s.truncation + 1):
        for x in s.cells[n]:
            for i, j, a, e in product(range(1, n + 1), range(1, n + 1), (0, 1), (0, 1)):
                if i < j and comp(F[n - 1][(i, a)], F[n][(j, e)])(x) != comp(F[n - 1][(j - 1, e)], F[n][(i, a)])(x):
                    return False
    if S is None:
        return True
    for n in range(1, s.truncation + 1):
        for y in s.cells[n - 1]:
            for i, j, a in product(range(1, n + 1), range(1, n + 1), (0, 1)):
                lhs = comp(F[n][(i, a)], S[n][j])(y)
                if i == j:
                    rhs = y
                elif i < j:
                    rhs = comp(S[n - 1][j - 1], F[n - 1][(i, a)])(y)
                else:
                    rhs = comp(S[n - 1][j], F[n - 1][(i - 1, a)])(y)
                if lhs != rhs:
                    return False
    return True


def _rewired(s, n, key, cell, new):
    """Copy of ``s`` with one face value replaced."""
    faces = list(s.faces)
    if isinstance(s, FinPresimplicialSet):
        level = list(faces[n])
        level[key] = {**level[key], cell: new}
        faces[n] = tuple(level)
        return FinPresimplicialSet(s.cells, tuple(faces), s.complete)
    level = dict(faces[n])
    level[key] = {**level[key], cell: new}
    faces[n] = level
    return FinPseudocubicalSet(s.cells, tuple(faces), s.degeneracies, s.complete)


def mutation_suite(s, rng, per_shape: int = 6):
    """Rewire single faces of ``s`` and validate each mutant.

    Returns ``(defective, rejected, benign, benign_accepted)``: a mutant is
    defective when it dangles or the brute-force oracle finds a broken
    identity, and benign when the rewiring happens to keep every identity.
    """
    defective = rejected = benign = benign_ok = 0
    D = s.truncation
    for _ in range(per_shape):
        if D < 1:
            break
        n = int(rng.integers(1, D + 1))
        if not s.cells[n]:
            continue
        cell = s.cells[n][int(rng.integers(len(s.cells[n])))]
        keys = list(range(n + 1)) if isinstance(s, FinPresimplicialSet) else sorted(s.faces[n])
        key = keys[int(rng.integers(len(keys)))]
        old = s.faces[n][key][cell]
        others = [c for c in s.cells[n - 1] if c != old]
        # sometimes a wrong-dimension id, as in a miswired table
        new = others[int(rng.integers(len(others)))] if others and rng.integers(3) else s.cells[n][0] + "#"
        m = _rewired(s, n, key, cell, new)
        flagged = validate(m) is not None
        if new not in set(s.cells[n - 1]) or not brute_force_identities(m):
            defective += 1
            rejected += flagged
        else:
            benign += 1
            benign_ok += not flagged
    return defective, rejected, benign, benign_ok


@_timed(2, "identity systems and mutation suite")
def criterion_2():
    shapes = [builtin_model(n) for n in BUILTIN_MODELS]
    for f in surjections():
        shapes.append(cech_presimplicial(f, 3))
        shapes.append(cech_pseudocubical(f, 3))
    bad = sum(validate(s) is not None for s in shapes)
    if bad:
        return False, f"{bad} valid shapes rejected"
    rng = np.random.default_rng(2)
    tot = [0, 0, 0, 0]
    for s in shapes:
        base = s.shape if isinstance(s, AugmentedShape) else s
        if sum(len(c) for c in base.cells) > 2000:
            continue
        tot = [x + y for x, y in zip(tot, mutation_suite(base, rng))]
    defective, rejected, benign, benign_ok = tot
    ok = defective > 0 and rejected == defective and benign_ok == benign
    return ok, (f"{len(shapes)} shapes valid; {rejected}/{defective} defective rewirings rejected; "
                f"{benign_ok}/{benign} identity-preserving rewirings accepted")


def degeneracy_models():
    """Builtin cube models plus small Čech cubical shapes."""
    out = [(n, builtin_model(n)) for n in CUBE_MODELS]
    for f in surjections(3, 2):
        out.append((f"cech{sorted(f.values())}", cech_pseudocubical(f, 2).shape))
    return out


@_timed(3, "sigma idempotent chain endomorphism")
def criterion_3():
    for name, x in degeneracy_models():
        sig = sigma_endomorphism(x, check=False)
        c = unnormalized_C(x)
        if not np.array_equal(sig[0], identity(len(x.cells[0]))):
            return False, f"sigma_0 != 1 on {name}"
        for n in range(x.truncation + 1):
            if not np.array_equal(sig[n] @ sig[n], sig[n]):
                return False, f"sigma_{n}^2 != sigma_{n} on {name}"
        if not verify_chain_map(sig.as_chain_map(c)):
            return False, f"sigma is not a chain map on {name}"
    return True, f"sigma^2 = sigma, chain map, sigma_0 = 1 on {len(degeneracy_models())} models"


@_timed(4, "normalization agreement")
def criterion_4():
    models = degeneracy_models()
    for name, x in models:
        r = normalizations_agree(x)
        if not r.ok:
            return False, f"{name}: {r.message} in degree {r.degree}"
    return True, f"Ker(1 - sigma) = cap Ker(d_i^1) with equal boundaries on {len(models)} models"


@_timed(5, "unnormalized failure witness")
def criterion_5():
    x = builtin_model("point-□", 3)
    hc = [homology(unnormalized_C(x), n) for n in (1, 2)]
    hs = [homology(normalized_sigma(x).complex, n) for n in (1, 2)]
    hk = [homology(normalized_kernel(x).complex, n) for n in (1, 2)]
    ok = hc == [FgAbGroup(1)] * 2 and all(g.is_trivial for g in hs + hk)
    return ok, f"point: H_1,2(C) = {', '.join(map(str, hc))}; H_1,2(N) = {', '.join(map(str, hs))}"


# hom probes are capped by cell counts so every case stays at desk scale
DENSE_BUDGET = 300
STREAM_BUDGET = 70000


def probe_depth(a: AugmentedShape, k: int, want: int = 2) -> int:
    """Deepest ``t <= want`` with ``|Hom(Q, X)_t|`` dense-sized and ``t + 1`` streamable."""
    sizes = [len(c) ** k for c in a.shape.cells]
    t = 0
    for cand in range(want, -1, -1):
        if cand + 1 < len(sizes) and sizes[cand] <= DENSE_BUDGET and sizes[cand + 1] <= STREAM_BUDGET:
            t = cand
            break
    return t


@_timed(6, "contractibility lemmas")
def criterion_6():
    fs = surjections()
    probes = 0
    shallow = []
    for f in fs:
        sa, ca = cech_presimplicial(f, 3), cech_pseudocubical(f, 3)
        if not check_simplicial_extension(sa, 3):
            return False, f"simplicial extension fails for fibers {sorted(f.values())}"
        if not check_cubical_extension(ca, 3):
            return False, f"cubical extension fails for fibers {sorted(f.values())}"
        for a in (sa, ca):
            if not shape_is_acyclic(a, 2):
                return False, f"augmented complex not acyclic for {sorted(f.values())}"
        for k in (1, 2, 3):
            q = tuple(f"q{j}" for j in range(k))
            for a in (sa, ca):
                t = probe_depth(a, k)
                if t < 2:
                    shallow.append(t)
                if not shape_is_acyclic(hom_shape(q, a, t + 1), t):
                    return False, f"Hom({k}, -) complex not acyclic for {sorted(f.values())}"
                probes += 1
    return True, (f"{len(fs)} surjections: extension conditions hold through 3 and K, N acyclic through 2; "
                  f"{probes} Hom probes acyclic ({len(shallow)} capped below degree 2 by size)")


@_timed(7, "F(N(X)) = N(F(X))")
def criterion_7():
    count = 0
    for name in CUBE_MODELS:
        x = builtin_model(name)
        for tag in ("free-mod:2", "free-mod:3", "free-mod:4"):
            r = verify_functor_normalization(functor_from_tag(tag), x)
            if not r.ok:
                return False, f"{name} with {tag}: {r.failure}"
            count += 1
    return True, f"explicit commuting isomorphism on {count} (model, functor) pairs"


GOLDEN_TABLE = {
    "point": ["Z"],
    "s1": ["Z", "Z"],
    "torus": ["Z", "Z^2", "Z"],
    "klein": ["Z", "Z+Z/2", "0"],
}


def compare_models(delta: str, cube: str, coeff=None) -> tuple[list[FgAbGroup], list[FgAbGroup], int]:
    """Homology of a Δ-model via ``K`` and of a □-model via kernel-form ``N``."""
    from .normalize import apply_functor, linearize

    s, x = builtin_model(delta), builtin_model(cube)
    ms, mx = linearize(s), linearize(x)
    if coeff is not None:
        ms, mx = apply_functor(coeff, ms), apply_functor(coeff, mx)
    cs = unnormalized_K(ms)
    cx = normalized_kernel(mx).complex
    through = cx.certified_through
    if not cs.exact_above:
        through = min(through, cs.certified_through)
    hs = [homology(cs, n) if n <= cs.top else FgAbGroup() for n in range(through + 1)]
    hx = [homology(cx, n) for n in range(through + 1)]
    return hs, hx, through


@_timed(8, "simplicial vs cubical homology table")
def criterion_8():
    rows = []
    for name, expect in GOLDEN_TABLE.items():
        hs, hx, through = compare_models(f"{name}-Δ", f"{name}-□")
        want = [FgAbGroup.parse(g) for g in expect] + [FgAbGroup()] * (through + 1 - len(expect))
        if hs != hx or hs != want:
            return False, f"{name}: Δ {list(map(str, hs))} vs □ {list(map(str, hx))}"
        rows.append(f"{name} ({', '.join(map(str, hs[:len(expect)]))})")
    return True, "; ".join(rows)


GRID_GROUPS = ("Z", "Z/2", "Z/4", "Z/6", "Z+Z/2")
GRID_FUNCTORS = ("tensor:Z/2", "tensor:Z/3", "tensor:Z/4")
GRID_SEEDS = (0, 1, 2)


@lru_cache(maxsize=1)
def theorem_grid():
    t = time.perf_counter()
    reports = {}
    for g in GRID_GROUPS:
        for tag in GRID_FUNCTORS:
            reports[(g, tag)] = compare_theorem(FpModule.parse(g), parse_functor(tag), 2, GRID_SEEDS, g, tag)
    return reports, time.perf_counter() - t


@_timed(9, "derived functor comparison grid")
def criterion_9():
    reports, secs = theorem_grid()
    cells = 0
    for (g, tag), rep in reports.items():
        for d in rep.degrees:
            vals = d.simplicial + d.cubical
            if any(v != d.oracle for v in vals):
                return False, f"{g}, {tag}, n={d.degree}: values {list(map(str, vals))} vs Tor {d.oracle}"
            cells += 1
    ok = secs <= 120
    return ok, f"{cells} (group, functor, degree) cells x {len(GRID_SEEDS)} seeds agree with Tor; grid built in {secs:.1f}s (limit 120s)"


@_timed(10, "projective-class path identities")
def criterion_10():
    reports, _ = theorem_grid()
    n = 0
    for (g, tag), rep in reports.items():
        if g not in ("Z/2", "Z/6"):
            continue
        for d in rep.degrees:
            if not d.termwise_simplicial_identical:
                return False, f"{g}, {tag}: F(K(P)) and K(F(P)) differ"
            if not all(d.termwise_cubical):
                return False, f"{g}, {tag}, n={d.degree}: H(N(F(X))) differs from H(F(N(X)))"
            n += 1
    return True, f"F(K(P)) entry-identical to K(F(P)) and H(N(F X)) = H(F N(X)) on {n} cells"


@_timed(11, "resolution independence")
def criterion_11():
    reports, _ = theorem_grid()
    n = 0
    for (g, tag), rep in reports.items():
        for d in rep.degrees:
            if len(set(d.simplicial)) != 1 or len(set(d.cubical)) != 1:
                return False, f"{g}, {tag}, n={d.degree}: seeds disagree"
            n += 1
    return True, f"seeds {list(GRID_SEEDS)} give identical values on all {n} cells"


CRITERIA = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
    criterion_7, criterion_8, criterion_9, criterion_10, criterion_11,
)


def run_all(echo=print) -> list[CriterionResult]:
    out = []
    for crit in CRITERIA:
        r = crit()
        echo(r.line())
        out.append(r)
    return out
