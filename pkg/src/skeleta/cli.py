"""Command-line interface.

Subcommands: validate, betti, straight, slices, basis, genfam, package,
cross, kirwan, preimage, report.  Instances are built-in names or JSON
files.  Output is UTF-8 JSON on stdout (SVG with --format svg).

Exit codes: 0 success, 1 mathematically negative verdict (e.g. the Morse
package is absent), 2 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from typing import Optional

from . import cohomology as co
from . import crosssection as cs
from .instances import (
    InstanceSpec,
    build_instance,
    instance_names,
    load_instance,
    skeleton_to_obj,
)
from .morse import MorseData, PolarizationError, find_polarization
from .polynomial import Vector
from .skeleton import Skeleton, SkeletonError
from .svg import emit_svg

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2


def _parse_xi(text: str) -> Vector:
    return Vector([Fraction(part.strip()) for part in text.split(",")])


def _load(name: str) -> InstanceSpec:
    if name.endswith(".json"):
        sk, positions = load_instance(name)
        return InstanceSpec(name, sk, positions=positions)
    return build_instance(name)


def _morse_for(spec: InstanceSpec, xi_text: Optional[str]) -> MorseData:
    sk = spec.skeleton
    if xi_text:
        return find_polarization(sk, _parse_xi(xi_text))
    if spec.default_xi is not None:
        return find_polarization(sk, spec.default_xi)
    return find_polarization(sk)


def _emit(obj, args) -> None:
    out = json.dumps(obj, indent=1, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _emit_svg(spec: InstanceSpec, morse: Optional[MorseData], args) -> int:
    text = emit_svg(spec.skeleton, spec.positions, morse)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_validate(args) -> int:
    spec = _load(args.instance)
    sk = spec.skeleton
    if args.format == "svg":
        return _emit_svg(spec, None, args)
    _emit({
        "instance": spec.name,
        "valid": True,
        "dimension": sk.dimension,
        "valency": sk.valency,
        "vertices": len(sk.vertices),
        "gkm": sk.is_gkm(),
    }, args)
    return EXIT_OK


def cmd_betti(args) -> int:
    spec = _load(args.instance)
    morse = _morse_for(spec, args.xi)
    if args.format == "svg":
        return _emit_svg(spec, morse, args)
    _emit({
        "instance": spec.name,
        "xi": [str(c) for c in morse.xi],
        "betti": morse.betti_numbers(),
        "indices": {v: morse.index[v] for v in spec.skeleton.vertices},
        "pointed": morse.is_pointed(),
    }, args)
    return EXIT_OK


def cmd_straight(args) -> int:
    spec = _load(args.instance)
    report = spec.skeleton.straightness()
    obj = {"instance": spec.name, "straight": report.is_straight}
    if report.is_straight:
        obj["constants"] = {v: str(c) for v, c in sorted(report.constants.items())}
    else:
        obj["counterexample_loop"] = report.counterexample
    _emit(obj, args)
    return EXIT_OK if report.is_straight else EXIT_NEGATIVE


def cmd_slices(args) -> int:
    spec = _load(args.instance)
    out = []
    for s in spec.skeleton.slices(2):
        out.append({
            "vertices": list(s.vertices),
            "edges": sorted([list(e) for e in s.edge_set if e[0] < e[1]]),
            "valency": s.valency,
            "normally_straight": s.is_normally_straight(),
        })
    _emit({"instance": spec.name, "two_slices": out}, args)
    return EXIT_OK


def cmd_basis(args) -> int:
    spec = _load(args.instance)
    degrees = {}
    for m in range(args.max_degree + 1):
        basis = co.basis_by_degree(spec.skeleton, m)
        degrees[str(m)] = {
            "dimension": len(basis),
            "classes": [cls.to_obj() for cls in basis] if args.classes else None,
        }
        if not args.classes:
            degrees[str(m)].pop("classes")
    _emit({"instance": spec.name, "by_degree": degrees}, args)
    return EXIT_OK


def cmd_genfam(args) -> int:
    spec = _load(args.instance)
    morse = _morse_for(spec, args.xi)
    data = co.IntegralData.for_skeleton(spec.skeleton, morse)
    try:
        family = co.generating_family(spec.skeleton, morse, data)
    except co.PipelineFailure as exc:
        _emit({
            "instance": spec.name,
            "generating_family": None,
            "failure": {"vertex": exc.vertex, "stage": exc.stage, "detail": exc.detail},
        }, args)
        return EXIT_NEGATIVE
    _emit({
        "instance": spec.name,
        "generating_family": {
            v: cls.to_obj()
            for v, cls in sorted(family.items(), key=lambda kv: morse.phi[kv[0]])
        },
    }, args)
    return EXIT_OK


def cmd_package(args) -> int:
    started = time.monotonic()
    spec = _load(args.instance)
    morse = _morse_for(spec, args.xi)
    report = co.morse_package(spec.skeleton, morse)
    obj = _package_obj(spec, morse, report)
    obj["elapsed_seconds"] = round(time.monotonic() - started, 3)
    if args.format == "svg":
        return _emit_svg(spec, morse, args)
    _emit(obj, args)
    return EXIT_OK if report.has_package else EXIT_NEGATIVE


def _package_obj(spec: InstanceSpec, morse: MorseData, report) -> dict:
    obj = {
        "instance": spec.name,
        "xi": [str(c) for c in morse.xi],
        "straight": report.straight,
        "noncyclic": report.noncyclic,
        "pointed": report.pointed,
        "betti": report.betti,
        "has_morse_package": report.has_package,
        "two_slice_verdicts": report.slice_verdicts,
        "theorem_agreement": report.theorem_agreement,
    }
    if report.failure:
        obj["certificate"] = report.failure
    if report.oracle_failures:
        obj["oracle_obstructions"] = report.oracle_failures
    if report.family is not None:
        obj["family_degrees"] = {
            v: cls.degree for v, cls in sorted(report.family.items())
        }
    return obj


def cmd_cross(args) -> int:
    spec = _load(args.instance)
    morse = _morse_for(spec, args.xi)
    data = co.IntegralData.for_skeleton(spec.skeleton, morse)
    ctx = cs.LevelContext(spec.skeleton, morse, data)
    csd = ctx.section_at_value(Fraction(args.level))
    _emit({
        "instance": spec.name,
        "level": args.level,
        "crossing_edges": [list(e) for e in csd.edges],
        "delta_minus": [list(e) for e in csd.delta_minus],
        "delta_plus": [list(e) for e in csd.delta_plus],
        "beta": {
            f"{p}->{q}": ctx.edge_form((p, q)).beta.to_obj()
            for (p, q) in csd.edges
        },
    }, args)
    return EXIT_OK


def cmd_kirwan(args) -> int:
    spec = _load(args.instance)
    morse = _morse_for(spec, args.xi)
    data = co.IntegralData.for_skeleton(spec.skeleton, morse)
    ctx = cs.LevelContext(spec.skeleton, morse, data)
    csd = ctx.section_at_value(Fraction(args.level))
    with open(args.cls, encoding="utf-8") as fh:
        cls = co.EquivariantClass.from_obj(spec.skeleton, json.load(fh))
    ok, witness = co.is_class(spec.skeleton, cls)
    if not ok:
        print(f"error: input is not a class (edge {witness})", file=sys.stderr)
        return EXIT_INPUT
    image = cs.kirwan_map(ctx, cls, csd)
    _emit({"instance": spec.name, "level": args.level, "image": image.to_obj()}, args)
    return EXIT_OK


def cmd_preimage(args) -> int:
    spec = _load(args.instance)
    morse = _morse_for(spec, args.xi)
    data = co.IntegralData.for_skeleton(spec.skeleton, morse)
    ctx = cs.LevelContext(spec.skeleton, morse, data)
    level_value = Fraction(args.level)
    k = _nearest_canonical(ctx, level_value)
    csd = ctx.cross_section(k)
    with open(args.cls, encoding="utf-8") as fh:
        obj = json.load(fh)
    n = spec.skeleton.dimension
    from .polynomial import Polynomial
    values = {}
    for key, terms in obj["values"].items():
        p, q = key.split("->")
        values[(p, q)] = Polynomial.from_obj(n, terms)
    for e in csd.edges:
        values.setdefault(e, Polynomial.zero(n))
    g = cs.CrossSectionClass(csd, values)
    try:
        cls = cs.kirwan_preimage(ctx, g, k)
    except cs.ExpansionError as exc:
        _emit({"instance": spec.name, "preimage": None, "failure": str(exc)}, args)
        return EXIT_NEGATIVE
    _emit({"instance": spec.name, "level": str(ctx.levels[k]),
           "preimage": cls.to_obj()}, args)
    return EXIT_OK


def _nearest_canonical(ctx: cs.LevelContext, c: Fraction) -> int:
    morse = ctx.morse
    for v in ctx.order:
        if morse.phi[v] == c:
            raise SkeletonError(f"level {c} is critical (vertex {v})")
    below = sum(1 for v in ctx.order if morse.phi[v] < c)
    return below


def cmd_report(args) -> int:
    names = instance_names() if args.all else [args.instance]
    if not names or names == [None]:
        print("error: give an instance or --all", file=sys.stderr)
        return EXIT_INPUT
    out = []
    worst = EXIT_OK
    for name in names:
        started = time.monotonic()
        spec = _load(name)
        try:
            morse = _morse_for(spec, args.xi if not args.all else None)
        except PolarizationError as exc:
            out.append({"instance": name, "error": str(exc)})
            worst = max(worst, EXIT_NEGATIVE)
            continue
        report = co.morse_package(spec.skeleton, morse)
        obj = _package_obj(spec, morse, report)
        obj["elapsed_seconds"] = round(time.monotonic() - started, 3)
        out.append(obj)
        if not report.has_package:
            worst = max(worst, EXIT_NEGATIVE)
    _emit(out if args.all else out[0], args)
    return worst


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="skeleta",
        description="Exact invariants of 1-skeleta: validation, holonomy, "
                    "Betti numbers, equivariant cohomology, Morse package.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_instance=True):
        if needs_instance:
            p.add_argument("instance",
                           help=f"built-in name ({', '.join(instance_names())}) "
                                "or a .json file")
        p.add_argument("--xi", help="polarizing covector as comma-separated rationals")
        p.add_argument("--out", help="write output to this path")
        p.add_argument("--format", choices=["json", "svg"], default="json")

    p = sub.add_parser("validate", help="check the axioms")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("betti", help="indices and Betti numbers")
    common(p)
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("straight", help="decide straightness")
    common(p)
    p.set_defaults(func=cmd_straight)

    p = sub.add_parser("slices", help="enumerate 2-slices")
    common(p)
    p.set_defaults(func=cmd_slices)

    p = sub.add_parser("basis", help="degree-wise class bases (oracle)")
    common(p)
    p.add_argument("--max-degree", type=int, default=4)
    p.add_argument("--classes", action="store_true", help="include class values")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("genfam", help="construct the generating family")
    common(p)
    p.set_defaults(func=cmd_genfam)

    p = sub.add_parser("package", help="full Morse-package verdict")
    common(p)
    p.set_defaults(func=cmd_package)

    p = sub.add_parser("cross", help="cross section at a regular level")
    common(p)
    p.add_argument("--level", required=True, help="regular value (rational)")
    p.set_defaults(func=cmd_cross)

    p = sub.add_parser("kirwan", help="Kirwan image of a class file")
    common(p)
    p.add_argument("--level", required=True)
    p.add_argument("--class", dest="cls", required=True, help="class JSON file")
    p.set_defaults(func=cmd_kirwan)

    p = sub.add_parser("preimage", help="Kirwan preimage of a cross-section class")
    common(p)
    p.add_argument("--level", required=True)
    p.add_argument("--class", dest="cls", required=True,
                   help="cross-section class JSON file")
    p.set_defaults(func=cmd_preimage)

    p = sub.add_parser("report", help="full pipeline report")
    p.add_argument("instance", nargs="?")
    p.add_argument("--all", action="store_true", help="report on all built-ins")
    p.add_argument("--xi")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "svg"], default="json")
    p.set_defaults(func=cmd_report)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (SkeletonError, PolarizationError, co.ClassError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
