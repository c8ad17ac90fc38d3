import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubix.chains import PresentedGroup, congruent, homology, is_acyclic
from cubix.exactla import FgAbGroup, identity, zeros
from cubix.freecat import (
    AdditiveFunctorSpec,
    FormalMorphism,
    KaroubiObject,
    compose_maps,
    extend_additive,
    extend_to_karoubi,
    formal_add,
    formal_boundary_C,
    formal_compose,
    formal_sigma,
    functor_from_tag,
    hom_complex,
    hom_shape,
    verify_functor_normalization,
)
from cubix.normalize import boundary_C, linearize, sigma_matrices
from cubix.shapes import (
    AugmentedShape,
    FinPseudocubicalSet,
    builtin_model,
    cech_presimplicial,
    cech_pseudocubical,
    shape_to_json,
)

S2 = ("a", "b")
S3 = ("x", "y", "z")
FUNCTORS = ("free", "free-mod:2", "free-mod:3", "free-mod:4")


def maps(s, t):
    return st.tuples(*[st.sampled_from(t) for _ in s])


def formal(s, t):
    return st.dictionaries(maps(s, t), st.integers(-4, 4), max_size=4).map(
        lambda terms: FormalMorphism(s, t, terms)
    )


def test_formal_basics():
    f = FormalMorphism.of(S2, S3, ("x", "y"))
    assert (f - f).is_zero
    assert f + FormalMorphism.zero(S2, S3) == f
    assert 3 * f == f + f + f
    assert -f == (-1) * f
    with pytest.raises(ValueError):
        formal_add(f, FormalMorphism.identity(S2))
    with pytest.raises(ValueError):
        formal_compose(f, f)


def test_compose_maps():
    assert compose_maps(("z", "z", "x"), ("a", "c"), ("a", "b", "c")) == ("z", "x")


def test_swap_squared():
    swap = FormalMorphism.of(S2, S2, ("b", "a"))
    assert swap @ swap == FormalMorphism.identity(S2)
    # (1 - swap)^2 = 2 (1 - swap): not idempotent
    one = FormalMorphism.identity(S2)
    assert (one - swap) @ (one - swap) == 2 * (one - swap)


@settings(max_examples=120, deadline=None)
@given(formal(S2, S3), formal(S2, S3), formal(S3, S2), formal(S2, S2))
def test_bilinear_and_associative(f, g, h, k):
    assert h @ (f + g) == h @ f + h @ g
    assert (f + g) @ k == f @ k + g @ k
    assert (h @ f) @ k == h @ (f @ k)
    assert FormalMorphism.identity(S3) @ f == f == f @ FormalMorphism.identity(S2)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(FUNCTORS), formal(S2, S3), formal(S3, S2))
def test_additive_extension_is_functorial(tag, f, g):
    F = functor_from_tag(tag)
    target = F.group(S2)
    assert congruent(extend_additive(F, g @ f), extend_additive(F, g) @ extend_additive(F, f), target)
    assert congruent(extend_additive(F, g + g), 2 * extend_additive(F, g), target)


def test_mod_two_collapse():
    F = functor_from_tag("free-mod:2")
    f = FormalMorphism.of(S2, S3, ("x", "z"))
    assert congruent(extend_additive(F, 2 * f), zeros(3, 2), F.group(S3))
    assert not congruent(extend_additive(functor_from_tag("free"), 2 * f), zeros(3, 2), PresentedGroup(3))


def test_free_functor_matrix():
    F = functor_from_tag("free")
    m = extend_additive(F, FormalMorphism.of(S2, S3, ("y", "y")) - FormalMorphism.of(S2, S3, ("x", "y")))
    assert m.tolist() == [[-1, 0], [1, 0], [0, 0]]


def test_bad_tags_and_specs():
    for tag in ("cofree", "free-mod:1", "free-mod:x"):
        with pytest.raises(ValueError):
            functor_from_tag(tag)
    # F(S) = Z[S] with every map sent to zero fails F(id) = 1
    with pytest.raises(ValueError):
        AdditiveFunctorSpec("zero-maps", lambda s: PresentedGroup(len(s)),
                            lambda f, s, t: zeros(len(t), len(s)))
    # transpose-style contravariance fails composition
    def bad(f, s, t):
        m = zeros(len(t), len(s))
        for k, y in enumerate(f):
            m[t.index(y), k] = 1
        return m if len(s) == len(t) else zeros(len(t), len(s))

    with pytest.raises(ValueError):
        AdditiveFunctorSpec("bad", lambda s: PresentedGroup(len(s)), bad)


@st.composite
def idempotent_functions(draw, size=4):
    base = tuple(f"e{k}" for k in range(size))
    image = draw(st.sets(st.sampled_from(base), min_size=1))
    ims = sorted(image)
    f = tuple(x if x in image else draw(st.sampled_from(ims)) for x in base)
    return base, f, len(image)


@settings(max_examples=60, deadline=None)
@given(idempotent_functions())
def test_karoubi_rank_equals_image_size(data):
    base, f, size = data
    k = KaroubiObject(base, FormalMorphism.of(base, base, f))
    img = extend_to_karoubi(functor_from_tag("free"), k)
    assert img.group.canonical() == FgAbGroup(size)
    assert np.array_equal(img.projection @ img.inclusion, identity(size))


def test_karoubi_rejects_non_idempotent():
    with pytest.raises(ValueError):
        KaroubiObject(S2, FormalMorphism.of(S2, S2, ("b", "a")))


@pytest.mark.parametrize("name", ["point-□", "s1-□", "torus-□", "klein-□"])
def test_formal_sigma_matches_matrices(name):
    x = builtin_model(name)
    m = linearize(x)
    sig = sigma_matrices(m)
    F = functor_from_tag("free")
    for n in range(x.truncation + 1):
        s = formal_sigma(x, n)
        assert s @ s == s
        assert np.array_equal(extend_additive(F, s), sig[n])
        # rank of the normalized term is the trace of the idempotent
        k = extend_to_karoubi(F, KaroubiObject(x.cells[n], s))
        assert k.group.generators == int(np.trace(sig[n]))
        if n:
            assert np.array_equal(extend_additive(F, formal_boundary_C(x, n)), boundary_C(m, n))


@pytest.mark.parametrize("name", ["point-□", "s1-□", "torus-□", "klein-□"])
@pytest.mark.parametrize("tag", FUNCTORS)
def test_functor_commutes_with_normalization(name, tag):
    r = verify_functor_normalization(functor_from_tag(tag), builtin_model(name))
    assert r.ok, r.failure
    assert r.homology_formal == r.homology_direct


def test_normalization_with_coefficients_values():
    r = verify_functor_normalization(functor_from_tag("free-mod:2"), builtin_model("klein-□"))
    z2 = FgAbGroup(0, (2,))
    assert list(r.homology_formal) == [z2, FgAbGroup(0, (2, 2)), z2]


def test_functor_normalization_needs_degeneracies():
    x = builtin_model("s1-□", truncation=2)
    with pytest.raises(ValueError):
        verify_functor_normalization(functor_from_tag("free"), FinPseudocubicalSet(x.cells, x.faces, None))


def test_hom_from_singleton_is_identity():
    a = cech_pseudocubical({"x": "b", "y": "b"}, 2)
    h = hom_shape(("q",), a)
    assert shape_to_json(h) == shape_to_json(a)
    s = cech_presimplicial({"x": "b", "y": "c"}, 2)
    assert shape_to_json(hom_shape(("q",), s)) == shape_to_json(s)


@pytest.mark.parametrize("q", [("q1", "q2"), ("q1", "q2", "q3")])
def test_hom_cell_counts(q):
    a = cech_presimplicial({"x": "b", "y": "b", "z": "c"}, 2)
    h = hom_shape(q, a)
    for n in range(3):
        assert len(h.shape.cells[n]) == len(a.shape.cells[n]) ** len(q)
    assert len(h.target) == 2 ** len(q)


@pytest.mark.parametrize("f", [{"x": "b", "y": "b"}, {"x": "b", "y": "b", "z": "c"}])
def test_hom_of_cech_is_acyclic(f):
    q = ("q1", "q2")
    assert is_acyclic(hom_complex(q, cech_presimplicial(f, 2)), 1)
    c = hom_complex(q, cech_pseudocubical(f, 2))
    assert is_acyclic(c, 1)


def test_hom_of_circle():
    a = AugmentedShape(builtin_model("s1-Δ"), ("*",), {"v": "*"})
    h = hom_shape(("q1", "q2"), a)
    # without degeneracies the levelwise square of one vertex and one loop is
    # again one vertex and one loop (the diagonal), not a torus
    assert h.shape.cells == (("v|v",), ("e|e",))
    assert homology(hom_complex(("q1", "q2"), a).complex, 1) == FgAbGroup(1)
