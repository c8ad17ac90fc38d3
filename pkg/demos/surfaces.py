"""Homology of small surfaces, built once from triangles and once from squares.

Run with ``python3 demos/surfaces.py``.  Each surface has a presimplicial
model (triangles glued along edges) and a cubical model (squares plus all
their degenerate cells).  The first is read with the alternating face sum,
the second with the normalized cubical complex; the groups must agree.
"""

from cubix.chains import homology_all
from cubix.normalize import normalized_kernel, unnormalized_C, unnormalized_K
from cubix.shapes import builtin_model


def fmt(groups):
    return ", ".join(str(g) for g in groups)


def main():
    for name in ("point", "s1", "torus", "klein"):
        delta = builtin_model(f"{name}-Δ")
        cube = builtin_model(f"{name}-□")
        hk = homology_all(unnormalized_K(delta))
        hn = homology_all(normalized_kernel(cube).complex)
        print(f"{name:6s} triangles: {fmt(hk)}")
        print(f"{'':6s} squares:   {fmt(hn)}   ({len(cube.cells[2])} two-cells, most degenerate)")

    # the degenerate cells are what the normalization removes: without it a
    # single point already has homology in every degree
    point = builtin_model("point-□")
    print()
    print("point, unnormalized cubical chains:", fmt(homology_all(unnormalized_C(point))))
    print("point, normalized:                 ", fmt(homology_all(normalized_kernel(point).complex)))


if __name__ == "__main__":
    main()
