"""Command-line interface.

Exit codes: 0 success, 1 mathematical failure (invalid input object or a
comparison mismatch), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .chains import (
    PresentedGroup,
    TensorFunctor,
    complex_from_json,
    homology,
    validate_complex,
)
from .derive import (
    FpModule,
    compare_theorem,
    derived_cubical,
    derived_simplicial,
    parse_functor,
    tor_oracle,
)
from .exactla import FgAbGroup
from .normalize import apply_functor, linearize, normalized_kernel, unnormalized_C, unnormalized_K
from .shapes import (
    AugmentedShape,
    FinPresimplicialSet,
    builtin_model,
    shape_from_json,
    validate,
)

OK, MATH_FAILURE, USAGE = 0, 1, 2

FIXTURE_DIR = Path(__file__).resolve().parents[2] / "tests" / "fixtures"


class UsageError(Exception):
    pass


def _emit(report: dict, args) -> None:
    if not getattr(args, "timing", False):
        report.pop("wall_time", None)
    print(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False))


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_shape(spec: str, truncation: int | None = None):
    """A builtin model name or a JSON shape file."""
    try:
        return builtin_model(spec, truncation)
    except KeyError:
        pass
    if not Path(spec).exists():
        raise UsageError(f"{spec!r} is neither a builtin model nor a file")
    try:
        return shape_from_json(_load_json(spec))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _coeff(tag: str | None) -> TensorFunctor | None:
    if tag is None:
        return None
    try:
        g = FgAbGroup.parse(tag)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return TensorFunctor(PresentedGroup.from_group(g), str(g))


def _groups(gs) -> list[dict]:
    return [g.to_json() for g in gs]


# --------------------------------------------------------------------------


def cmd_validate(args) -> int:
    d = _load_json(args.file)
    if not isinstance(d, dict):
        raise UsageError("expected a JSON object")
    if "kind" in d:
        try:
            obj = shape_from_json(d)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        v = validate(obj)
        report = {"object": "shape", "kind": d["kind"], "ok": v is None}
        if v is not None:
            report["violation"] = {"cell": v.cell, "indices": list(v.indices), "message": v.message}
    elif "terms" in d:
        try:
            c = complex_from_json(d)
            v = validate_complex(c)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed complex: {exc}") from None
        report = {"object": "complex", "ok": v is None}
        if v is not None:
            report["violation"] = {"degree": v.degree, "message": v.message}
    else:
        raise UsageError("JSON is neither a shape (needs 'kind') nor a complex (needs 'terms')")
    _emit(report, args)
    return OK if report["ok"] else MATH_FAILURE


def shape_homology(shape, theory: str | None = None, coeff: TensorFunctor | None = None):
    """``(groups, certified_through, theory)`` for a shape."""
    if isinstance(shape, AugmentedShape):
        shape = shape.shape
    simplicial = isinstance(shape, FinPresimplicialSet)
    theory = theory or ("K" if simplicial else "N")
    if simplicial != (theory == "K"):
        raise UsageError(f"theory {theory} does not apply to a {'presimplicial' if simplicial else 'pseudocubical'} shape")
    m = linearize(shape)
    if coeff is not None:
        m = apply_functor(coeff, m)
    if theory == "K":
        c = unnormalized_K(m)
    elif theory == "C":
        c = unnormalized_C(m)
    else:
        c = normalized_kernel(m).complex
    through = c.certified_through
    return [homology(c, n) for n in range(through + 1)], through, theory


def cmd_homology(args) -> int:
    t = time.perf_counter()
    try:
        shape = _load_shape(args.model, args.truncation)
        v = validate(shape)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if v is not None:
        _emit({"ok": False, "violation": str(v)}, args)
        return MATH_FAILURE
    hs, through, theory = shape_homology(shape, args.theory, _coeff(args.coeff))
    report = {
        "command": "homology", "model": args.model, "theory": theory, "coeff": args.coeff,
        "H": _groups(hs), "certified_through": through, "wall_time": time.perf_counter() - t,
    }
    _emit(report, args)
    return OK


def compare_shapes(delta, cube, coeff=None):
    hs, ts, _ = shape_homology(delta, "K", coeff)
    hx, tx, _ = shape_homology(cube, "N", coeff)
    s = delta.shape if isinstance(delta, AugmentedShape) else delta
    # a complete presimplicial set has zero homology above its top dimension
    through = tx if s.complete else min(ts, tx)
    hs = (hs + [FgAbGroup()] * (through + 1))[: through + 1]
    return hs, hx[: through + 1], through


def cmd_compare(args) -> int:
    t = time.perf_counter()
    delta = _load_shape(args.delta)
    cube = _load_shape(args.cube)
    if not isinstance(delta, FinPresimplicialSet) or isinstance(cube, FinPresimplicialSet):
        raise UsageError("compare takes a presimplicial model followed by a pseudocubical one")
    hs, hx, through = compare_shapes(delta, cube, _coeff(args.coeff))
    verdicts = [a == b for a, b in zip(hs, hx)]
    report = {
        "command": "compare", "delta": args.delta, "cube": args.cube, "coeff": args.coeff,
        "H_delta": _groups(hs), "H_cube": _groups(hx), "certified_through": through,
        "verdicts": verdicts, "pass": all(verdicts), "wall_time": time.perf_counter() - t,
    }
    _emit(report, args)
    return OK if report["pass"] else MATH_FAILURE


def cmd_derived(args) -> int:
    t = time.perf_counter()
    try:
        m = FpModule.parse(args.group)
        f = parse_functor(args.functor)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.degree < 0:
        raise UsageError("degree must be non-negative")
    report = {"command": "derived", "group": args.group, "functor": args.functor,
              "method": args.method, "seed": args.seed}
    ok = True
    if args.method == "both":
        rep = compare_theorem(m, f, args.degree, (args.seed,), args.group, args.functor)
        report["degrees"] = [d.to_json() for d in rep.degrees]
        ok = rep.passed
    else:
        fn = {"simplicial": lambda n: derived_simplicial(m, f, n, args.seed),
              "cubical": lambda n: derived_cubical(m, f, n, args.seed),
              "oracle": lambda n: tor_oracle(m, f, n)}[args.method]
        report["L"] = _groups(fn(n) for n in range(args.degree + 1))
    report["pass"] = ok
    report["wall_time"] = time.perf_counter() - t
    _emit(report, args)
    return OK if ok else MATH_FAILURE


def cmd_selftest(args) -> int:
    from .acceptance import run_all

    results = run_all(lambda line: print(line, flush=True))
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return OK if passed == len(results) else MATH_FAILURE


# --------------------------------------------------------------------------
# golden tables


def golden_tables() -> dict:
    """Every number the golden fixtures pin down."""
    from .acceptance import GRID_FUNCTORS, GRID_GROUPS

    models = {}
    for name in ("point-Δ", "s1-Δ", "s2-Δ", "torus-Δ", "rp2-Δ", "klein-Δ"):
        hs, through, _ = shape_homology(builtin_model(name))
        models[name] = {"K": {"H": _groups(hs), "certified_through": through}}
    for name in ("point-□", "s1-□", "torus-□", "klein-□"):
        x = builtin_model(name)
        models[name] = {}
        for theory in ("C", "N"):
            hs, through, _ = shape_homology(x, theory)
            models[name][theory] = {"H": _groups(hs), "certified_through": through}
    derived = {}
    for g in GRID_GROUPS:
        for tag in GRID_FUNCTORS:
            m, f = FpModule.parse(g), parse_functor(tag)
            derived[f"{g} {tag}"] = _groups(tor_oracle(m, f, n) for n in range(3))
    return {"homology": models, "tor": derived}


def cmd_golden(args) -> int:
    path = Path(args.dir) / "golden.json"
    tables = golden_tables()
    text = json.dumps(tables, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.emit_golden:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        print(f"wrote {path}")
        return OK
    if not path.exists():
        raise UsageError(f"{path} missing; run with --emit-golden first")
    same = path.read_text(encoding="utf-8") == text
    print("golden tables match" if same else "golden tables differ from fixture")
    return OK if same else MATH_FAILURE


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubix", description=__doc__.splitlines()[0])
    p.add_argument("--timing", action="store_true", help="include wall time in JSON reports")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a JSON shape or chain complex")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    h = sub.add_parser("homology", help="homology of a builtin model or JSON shape")
    h.add_argument("model")
    h.add_argument("--theory", choices=("K", "N", "C"))
    h.add_argument("--coeff", help="coefficient group, e.g. Z/2")
    h.add_argument("--truncation", type=int, help="truncation for cubical builtin models")
    h.set_defaults(func=cmd_homology)

    c = sub.add_parser("compare", help="Δ-model homology against □-model homology")
    c.add_argument("delta")
    c.add_argument("cube")
    c.add_argument("--coeff")
    c.set_defaults(func=cmd_compare)

    d = sub.add_parser("derived", help="derived functors of - (x) A")
    d.add_argument("group", help='e.g. "Z/6" or "Z+Z/2"')
    d.add_argument("functor", help='"id" or "tensor:<group>"')
    d.add_argument("--degree", type=int, required=True)
    d.add_argument("--method", choices=("simplicial", "cubical", "both", "oracle"), default="both")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_derived)

    s = sub.add_parser("selftest", help="run the acceptance suite")
    s.set_defaults(func=cmd_selftest)

    g = sub.add_parser("golden", help="diff (or regenerate) the golden fixture")
    g.add_argument("--emit-golden", action="store_true", help="rewrite the fixture instead of diffing")
    g.add_argument("--dir", default=str(FIXTURE_DIR))
    g.set_defaults(func=cmd_golden)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"cubix: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
