from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubix.chains import AugmentedComplex, homology, is_acyclic
from cubix.derive import (
    FpModule,
    build_presimplicial_resolution,
    build_pseudocubical_resolution,
    compare_theorem,
    default_depth,
    derived_cubical,
    derived_simplicial,
    parse_functor,
    tor_oracle,
)
from cubix.exactla import FgAbGroup, cokernel_invariants
from cubix.normalize import linearize, normalizations_agree, normalized_kernel, unnormalized_K

ZERO = FgAbGroup()


def closed_form(group: FgAbGroup, coeff: FgAbGroup, n: int) -> FgAbGroup:
    """Tor_n(M, A) for cyclic decompositions, from Z (x) Z/b = Z/b, Tor_1(Z/a, Z/b) = Z/gcd."""
    if n >= 2:
        return ZERO
    ms = [0] * group.rank + list(group.torsion)
    cs = [0] * coeff.rank + list(coeff.torsion)
    rank, tors = 0, []
    for a in ms:
        for b in cs:
            if n == 0:
                g = gcd(a, b)
                if g == 0:
                    rank += 1
                else:
                    tors.append(g)
            elif a and b:
                tors.append(gcd(a, b))
    return FgAbGroup.from_invariants(rank, tors)


def cyclic_sums():
    return st.tuples(st.integers(0, 1), st.lists(st.integers(2, 8), max_size=2)).map(
        lambda t: FgAbGroup.from_invariants(t[0], t[1])
    )


def spell(g: FgAbGroup) -> str:
    parts = ["Z"] * g.rank + [f"Z/{t}" for t in g.torsion]
    return "+".join(parts) or "0"


def test_parse():
    assert FpModule.parse("Z+Z/2").canonical() == FgAbGroup(1, (2,))
    assert FpModule.parse("0").canonical().is_trivial
    assert parse_functor("id").coeff.generators == 1
    assert parse_functor("tensor:Z/4").name == "Z/4"
    for bad in ("hom:Z", "tensor:", "tensor:Q"):
        with pytest.raises(ValueError):
            parse_functor(bad)
    with pytest.raises(ValueError):
        FpModule.parse("Z/")


def test_default_depth():
    assert default_depth(0) == 2 and default_depth(2) == 4
    assert default_depth(5) == 6


def test_resolution_ranks_examples():
    z = build_presimplicial_resolution(FpModule.parse("Z"), 3)
    assert z.ranks == (1, 1, 1, 1)
    assert build_presimplicial_resolution(FpModule.parse("Z/2"), 2).ranks[:2] == (1, 2)
    assert build_presimplicial_resolution(FpModule.parse("0"), 2).ranks == (0, 0, 0)
    assert build_pseudocubical_resolution(FpModule.parse("Z"), 3).ranks == (1, 1, 1, 1)
    assert build_pseudocubical_resolution(FpModule.parse("Z/2"), 3).ranks == (1, 2, 4, 8)


@pytest.mark.parametrize("group", ["Z", "Z/2", "Z/6", "Z+Z/2", "0"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_resolutions_are_resolutions(group, seed):
    m = FpModule.parse(group)
    p = build_presimplicial_resolution(m, 3, seed)
    x = build_pseudocubical_resolution(m, 3, seed)
    # augmentation cokernel is zero and exactness holds below the top
    assert cokernel_invariants(np.hstack([p.augmentation, m.presentation.relations])).is_trivial
    k = unnormalized_K(p.as_module())
    assert isinstance(k, AugmentedComplex) and is_acyclic(k, 1)
    nk = normalized_kernel(x.as_module()).augmented
    assert is_acyclic(nk, 1)
    assert normalizations_agree(x.as_module(False)).ok


def test_seeds_change_the_resolution():
    m = FpModule.parse("Z/3")
    a = build_pseudocubical_resolution(m, 2, 0)
    b = build_pseudocubical_resolution(m, 2, 1)
    assert a.ranks != b.ranks
    assert build_pseudocubical_resolution(m, 2, 1) is b


@pytest.mark.parametrize("group,coeff", [("Z", "Z/2"), ("Z/6", "Z/4"), ("Z/2", "Z/2"), ("Z+Z/2", "Z/4"),
                                         ("Z/3", "Z/2"), ("0", "Z/5"), ("Z/4", "Z")])
def test_derived_examples(group, coeff):
    m, f = FpModule.parse(group), parse_functor(f"tensor:{coeff}")
    g, c = FgAbGroup.parse(group), FgAbGroup.parse(coeff)
    for n in range(3):
        want = closed_form(g, c, n)
        assert tor_oracle(m, f, n) == want
        assert derived_simplicial(m, f, n) == want
        assert derived_cubical(m, f, n) == want


def test_identity_functor_is_concentrated_in_degree_zero():
    m = FpModule.parse("Z+Z/6")
    f = parse_functor("id")
    assert derived_cubical(m, f, 0) == FgAbGroup(1, (6,))
    assert derived_cubical(m, f, 1) == ZERO
    assert derived_simplicial(m, f, 1) == ZERO


def test_degree_beyond_depth_rejected():
    m, f = FpModule.parse("Z/2"), parse_functor("id")
    with pytest.raises(ValueError):
        derived_simplicial(m, f, 3, depth=3)
    with pytest.raises(ValueError):
        derived_cubical(m, f, 2, depth=2)
    with pytest.raises(ValueError):
        tor_oracle(m, f, -1)


@settings(max_examples=60, deadline=None)
@given(cyclic_sums(), cyclic_sums(), st.integers(0, 3))
def test_tor_oracle_matches_closed_form(g, c, n):
    m, f = FpModule.parse(spell(g)), parse_functor(f"tensor:{spell(c)}")
    assert tor_oracle(m, f, n) == closed_form(g, c, n)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["Z", "Z/2", "Z/3", "Z/4"]), st.sampled_from(["Z/2", "Z/4", "Z/3"]), st.integers(0, 2))
def test_additivity(a, b, seed):
    # L_n(M (+) M') = L_n(M) (+) L_n(M'), both sides from cubical resolutions
    f = parse_functor("tensor:Z/2")
    whole = derived_cubical(FpModule.parse(f"{a}+{b}"), f, 1, seed)
    pa, pb = derived_cubical(FpModule.parse(a), f, 1, seed), derived_cubical(FpModule.parse(b), f, 1, seed)
    assert whole == FgAbGroup.from_invariants(pa.rank + pb.rank, list(pa.torsion) + list(pb.torsion))


@pytest.mark.parametrize("m", [2, 3, 6])
def test_compare_theorem_z_tensor_zm(m):
    rep = compare_theorem(FpModule.parse("Z"), parse_functor(f"tensor:Z/{m}"), 1)
    assert rep.passed
    assert rep.degrees[0].oracle == FgAbGroup(0, (m,)) and rep.degrees[1].oracle == ZERO
    js = rep.to_json()
    assert js["pass"] and js["seeds"] == [0, 1, 2] and len(js["degrees"]) == 2


def test_compare_theorem_torsion_and_zero():
    rep = compare_theorem(FpModule.parse("Z/6"), parse_functor("tensor:Z/4"), 2)
    assert rep.passed
    assert [d.oracle for d in rep.degrees] == [FgAbGroup(0, (2,)), FgAbGroup(0, (2,)), ZERO]
    assert all(d.termwise_simplicial_identical and all(d.termwise_cubical) for d in rep.degrees)
    z = compare_theorem(FpModule.parse("0"), parse_functor("tensor:Z/2"), 1, seeds=(0,))
    assert z.passed and all(d.oracle == ZERO for d in z.degrees)


def test_report_flags_a_mismatch():
    rep = compare_theorem(FpModule.parse("Z/2"), parse_functor("tensor:Z/2"), 0, seeds=(0,))
    d = rep.degrees[0]
    d.cubical = [ZERO]
    assert not d.passed and not rep.passed
    assert d.to_json()["pass"] is False


def test_resolution_homology_is_the_module():
    m = FpModule.parse("Z^2+Z/4")
    p = build_presimplicial_resolution(m, 3, 1)
    c = unnormalized_K(p.as_module(False))
    assert homology(c, 0) == FgAbGroup(2, (4,))
    assert homology(c, 1) == ZERO and homology(c, 2) == ZERO
    x = build_pseudocubical_resolution(m, 3, 2)
    nk = normalized_kernel(linearize(x.as_module(False))).complex
    assert [homology(nk, n) for n in range(3)] == [FgAbGroup(2, (4,)), ZERO, ZERO]
