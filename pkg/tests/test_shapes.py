from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubix.shapes import (
    AugmentedShape,
    FinPresimplicialSet,
    FinPseudocubicalSet,
    builtin_model,
    canonical_model_name,
    cech_presimplicial,
    cech_pseudocubical,
    check_cubical_extension,
    check_simplicial_extension,
    cubical_closure,
    shape_from_json,
    shape_to_json,
    validate,
)

DELTA = ("point-Δ", "s1-Δ", "s2-Δ", "torus-Δ", "rp2-Δ", "klein-Δ")
CUBE = ("point-□", "s1-□", "torus-□", "klein-□")


# An independent identity oracle: every face composite is compared as a whole
# function rather than cell by cell.
def simplicial_ok(s):
    for n in range(2, s.truncation + 1):
        for j in range(n + 1):
            for i in range(j):
                a = {x: s.faces[n - 1][i][s.faces[n][j][x]] for x in s.cells[n]}
                b = {x: s.faces[n - 1][j - 1][s.faces[n][i][x]] for x in s.cells[n]}
                if a != b:
                    return False
    return True


def cubical_ok(x):
    F, S = x.faces, x.degeneracies
    for n in range(2, x.truncation + 1):
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for a in (0, 1):
                    for e in (0, 1):
                        lhs = {c: F[n - 1][(i, a)][F[n][(j, e)][c]] for c in x.cells[n]}
                        rhs = {c: F[n - 1][(j - 1, e)][F[n][(i, a)][c]] for c in x.cells[n]}
                        if lhs != rhs:
                            return False
    if S is None:
        return True
    for n in range(1, x.truncation + 1):
        for j in range(1, n + 1):
            for i in range(1, n + 1):
                for a in (0, 1):
                    got = {y: F[n][(i, a)][S[n][j][y]] for y in x.cells[n - 1]}
                    if i == j:
                        want = {y: y for y in x.cells[n - 1]}
                    elif i < j:
                        want = {y: S[n - 1][j - 1][F[n - 1][(i, a)][y]] for y in x.cells[n - 1]}
                    else:
                        want = {y: S[n - 1][j][F[n - 1][(i - 1, a)][y]] for y in x.cells[n - 1]}
                    if got != want:
                        return False
    return True


@pytest.mark.parametrize("name", DELTA)
def test_delta_models_valid(name):
    s = builtin_model(name)
    assert isinstance(s, FinPresimplicialSet) and s.complete
    assert validate(s) is None and simplicial_ok(s)


@pytest.mark.parametrize("name", CUBE)
def test_cube_models_valid(name):
    x = builtin_model(name)
    assert isinstance(x, FinPseudocubicalSet) and x.has_degeneracies
    assert validate(x) is None and cubical_ok(x)


def test_default_truncation():
    assert builtin_model("point-□").truncation == 3
    assert builtin_model("s1-□").truncation == 3
    assert builtin_model("torus-□").truncation == 3
    assert builtin_model("torus-□", truncation=2).truncation == 2


def test_max_dim_caps_truncation(monkeypatch):
    monkeypatch.setenv("CUBIX_MAX_DIM", "2")
    assert builtin_model("torus-□").truncation == 2


@pytest.mark.parametrize("name", CUBE)
def test_closure_cell_counts(name):
    # n-cells of the closure: each nondegenerate k-cell sits in C(n, k) positions
    x = builtin_model(name)
    nondeg = [[c for c in x.cells[k] if not c.startswith("s")] for k in range(x.truncation + 1)]
    for n in range(x.truncation + 1):
        assert len(x.cells[n]) == sum(len(nondeg[k]) * comb(n, k) for k in range(n + 1))


def test_point_cube_cells_are_degenerate_points():
    x = builtin_model("point-□", truncation=2)
    assert x.cells == (("p",), ("s1(p)",), ("s12(p)",))


def test_aliases_and_unknown():
    assert canonical_model_name("torus-C") == "torus-□"
    assert canonical_model_name("rp2-D") == "rp2-Δ"
    with pytest.raises(KeyError):
        builtin_model("moebius-Δ")


def test_broken_face_identity_detected():
    x = builtin_model("klein-□", truncation=2)
    faces = list(x.faces)
    faces[2] = {k: dict(v) for k, v in faces[2].items()}
    faces[2][(2, 1)]["Q1"] = "a"
    bad = FinPseudocubicalSet(x.cells, tuple(faces), x.degeneracies)
    v = validate(bad)
    assert v is not None and v.cell == "Q1" and v.message == "pseudocubical face identity fails"
    assert not cubical_ok(bad)


def test_dangling_face_reported():
    s = FinPresimplicialSet((("v",), ("e",)), ((), ({"e": "v"}, {"e": "nowhere"})))
    v = validate(s)
    assert v is not None and "nonexistent" in v.message


def test_precubical_mode():
    x = builtin_model("torus-□", truncation=2)
    pre = FinPseudocubicalSet(x.cells, x.faces, None)
    assert not pre.has_degeneracies and validate(pre) is None


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(DELTA[1:]), st.data())
def test_validator_matches_oracle_on_rewired_delta(name, data):
    s = builtin_model(name)
    n = data.draw(st.integers(1, s.truncation))
    i = data.draw(st.integers(0, n))
    cell = data.draw(st.sampled_from(s.cells[n]))
    new = data.draw(st.sampled_from(s.cells[n - 1]))
    faces = list(s.faces)
    level = [dict(m) for m in faces[n]]
    level[i][cell] = new
    faces[n] = tuple(level)
    t = FinPresimplicialSet(s.cells, tuple(faces))
    assert (validate(t) is None) == simplicial_ok(t)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(CUBE[1:]), st.booleans(), st.data())
def test_validator_matches_oracle_on_rewired_cube(name, degen, data):
    x = builtin_model(name, truncation=2)
    faces = [{k: dict(v) for k, v in lvl.items()} for lvl in x.faces]
    degs = [{k: dict(v) for k, v in lvl.items()} for lvl in x.degeneracies]
    n = data.draw(st.integers(1, x.truncation))
    if degen:
        j = data.draw(st.integers(1, n))
        y = data.draw(st.sampled_from(x.cells[n - 1]))
        degs[n][j][y] = data.draw(st.sampled_from(x.cells[n]))
    else:
        key = (data.draw(st.integers(1, n)), data.draw(st.sampled_from((0, 1))))
        c = data.draw(st.sampled_from(x.cells[n]))
        faces[n][key][c] = data.draw(st.sampled_from(x.cells[n - 1]))
    t = FinPseudocubicalSet(x.cells, tuple(faces), tuple(degs))
    assert (validate(t) is None) == cubical_ok(t)


SURJ = [
    {"e": "b"},
    {"e1": "b", "e2": "b"},
    {"e1": "b", "e2": "b", "e3": "c"},
    {"e1": "b", "e2": "c"},
]


@pytest.mark.parametrize("f", SURJ)
def test_cech_cell_counts(f):
    fib = {}
    for e, b in f.items():
        fib[b] = fib.get(b, 0) + 1
    a = cech_presimplicial(f, 3)
    for n in range(4):
        assert len(a.shape.cells[n]) == sum(k ** (n + 1) for k in fib.values())
    c = cech_pseudocubical(f, 2)
    for n in range(3):
        assert len(c.shape.cells[n]) == sum(k ** (2 ** n) for k in fib.values())


def test_cech_two_point_fiber():
    a = cech_presimplicial({"x": "b", "y": "b"}, 1)
    assert len(a.shape.cells[1]) == 4
    c = cech_pseudocubical({"x": "b", "y": "b"}, 1)
    assert len(c.shape.cells[1]) == 4
    # (x, y, z) over one point plus a singleton fiber: 2^2 + 1 edges
    assert len(cech_presimplicial({"x": "b", "y": "b", "z": "c"}, 1).shape.cells[1]) == 5


@pytest.mark.parametrize("f", SURJ)
def test_cech_valid_and_extends(f):
    a = cech_presimplicial(f, 3)
    assert validate(a) is None and simplicial_ok(a.shape)
    assert check_simplicial_extension(a, 2)
    c = cech_pseudocubical(f, 2)
    assert validate(c) is None and cubical_ok(c.shape)
    assert check_cubical_extension(c, 1)


def test_cech_rejects_non_surjection():
    with pytest.raises(ValueError):
        cech_presimplicial({"x": "b"}, 1, target=("b", "c"))


def test_extension_fails_without_fillers():
    # two points over one base point joined by a single edge w -> v: the loop at v is missing
    s = FinPresimplicialSet((("v", "w"), ("e",)), ((), ({"e": "w"}, {"e": "v"})), complete=False)
    a = AugmentedShape(s, ("*",), {"v": "*", "w": "*"})
    assert validate(a) is None
    assert check_simplicial_extension(a, 0)
    assert not check_simplicial_extension(a, 1)
    # the circle fills every pair of vertices but stops at dimension 1
    c = AugmentedShape(builtin_model("s1-Δ"), ("*",), {"v": "*"})
    assert check_simplicial_extension(c, 1)
    assert not check_simplicial_extension(c, 2)
    x = builtin_model("s1-□", truncation=2)
    b = AugmentedShape(x, ("*",), {"p": "*"})
    assert check_cubical_extension(b, 1)
    assert not check_cubical_extension(b, 2)
    # augmentation that misses a target point
    assert not check_simplicial_extension(AugmentedShape(c.shape, ("*", "o"), {"v": "*"}), 0)


def test_closure_of_square_edge():
    x = cubical_closure([["p", "q"], ["e"]], {"e": {(1, 0): "p", (1, 1): "q"}}, 2)
    assert validate(x) is None
    assert x.face(2, 1, 0, "s2(e)") == "s1(p)"
    assert x.face(2, 2, 1, "s2(e)") == "e"


@pytest.mark.parametrize("name", DELTA + CUBE)
def test_json_round_trip(name):
    s = builtin_model(name)
    d = shape_to_json(s)
    back = shape_from_json(d)
    assert shape_to_json(back) == d
    assert back.cells == s.cells


def test_json_round_trip_augmented():
    a = cech_pseudocubical({"x": "b", "y": "b"}, 2)
    d = shape_to_json(a)
    back = shape_from_json(d)
    assert isinstance(back, AugmentedShape) and shape_to_json(back) == d


@pytest.mark.parametrize("bad", [{}, {"kind": "globular", "truncation": 0, "cells": {}},
                                 {"kind": "presimplicial", "truncation": "x"},
                                 {"kind": "pseudocubical", "truncation": 1, "cells": {}, "faces": {"1": {"1": {}}}}])
def test_json_malformed(bad):
    with pytest.raises(ValueError):
        shape_from_json(bad)
