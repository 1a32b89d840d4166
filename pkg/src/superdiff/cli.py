"""Command-line front end.

Verbs operate on text files in the package's expression and morphism
formats ("-" reads stdin).  Results print to stdout either as canonical
text (default) or as a JSON document (--format doc).  Exit codes: 0
success, 1 property-check failure, 2 malformed input, 3 invertibility
could not be certified, 4 dimension/parity/domain mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional, Sequence

from . import parser as fmt
from . import sampling
from .derivation import SuperDerivation, exp_nilpotent, log_unipotent
from .errors import (
    DimensionError,
    DomainError,
    InvertibilityError,
    ParityError,
    ParseError,
)
from .grassmann import GrassmannMorphism
from .morphism import SuperMorphism
from .sdiff import (
    SDiffPoint,
    compose,
    compose_factored,
    differential_action,
    functor_map,
    invert,
    recombine,
    split,
)
from .sections import section_basis
from .substitution import UnderlyingMorphism
from .superfn import Superfunction


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def _parse_args_dims(args: argparse.Namespace) -> tuple[Optional[int], Optional[int], Optional[int]]:
    return (
        getattr(args, "m", None),
        getattr(args, "n", None),
        getattr(args, "p", None),
    )


def _load_point(text: str, args: argparse.Namespace) -> SDiffPoint:
    kind, value = fmt.parse_any(text)
    if kind == "factored":
        body, fields, p = value  # type: ignore[misc]
        return SDiffPoint.from_factored(body, fields, p)
    if kind == "morphism":
        morphism = value
        assert isinstance(morphism, SuperMorphism)
        forced = getattr(args, "p", None)
        if forced is not None and forced != morphism.p:
            morphism = _lift_morphism(morphism, forced)
        return SDiffPoint.from_morphism(morphism)
    raise ParseError(0, (), f"expected a morphism or factored form, found {kind}")


def _lift_morphism(phi: SuperMorphism, p: int) -> SuperMorphism:
    if p < phi.p:
        raise DimensionError(f"cannot lower the rank from {phi.p} to {p}")
    return SuperMorphism(
        phi.m,
        phi.n,
        p,
        [g.lift(p) for g in phi.images_x],
        [g.lift(p) for g in phi.images_th],
        inverse_hint=phi.inverse_hint,
    )


def _align(a: SDiffPoint, b: SDiffPoint) -> tuple[SDiffPoint, SDiffPoint]:
    if (a.m, a.n) != (b.m, b.n):
        raise DimensionError(
            f"operands live on different superdomains: "
            f"{a.m}|{a.n} versus {b.m}|{b.n}"
        )
    p = max(a.p, b.p)
    if a.p < p:
        a = SDiffPoint(_lift_morphism(a.morphism, p), a.body)
    if b.p < p:
        b = SDiffPoint(_lift_morphism(b.morphism, p), b.body)
    return a, b


def _point_morphism(point: SDiffPoint) -> SuperMorphism:
    """The expanded morphism, with the certified body inverse attached."""
    phi = point.morphism
    if phi.inverse_hint is None and point.body.inverse is not None:
        phi = SuperMorphism(
            phi.m,
            phi.n,
            phi.p,
            phi.images_x,
            phi.images_th,
            inverse_hint=point.body.inverse,
        )
    return phi


def _images_doc(images_x: Sequence[Superfunction], images_th: Sequence[Superfunction]) -> dict:
    images = {}
    for i, g in enumerate(images_x, 1):
        images[f"x{i}"] = fmt.format_superfunction(g)
    for j, g in enumerate(images_th, 1):
        images[f"th{j}"] = fmt.format_superfunction(g)
    return images


def _morphism_doc(phi: SuperMorphism) -> dict:
    doc: dict = {
        "kind": "morphism",
        "m": phi.m,
        "n": phi.n,
        "p": phi.p,
        "images": _images_doc(phi.images_x, phi.images_th),
    }
    if phi.inverse_hint is not None:
        doc["inverse"] = _images_doc(
            phi.inverse_hint.images_x, phi.inverse_hint.images_th
        )
    return doc


def _underlying_doc(u: UnderlyingMorphism) -> dict:
    doc: dict = {
        "kind": "substitution",
        "m": u.m,
        "n": u.n,
        "images": _images_doc(u.images_x, u.images_th),
    }
    if u.inverse is not None:
        doc["inverse"] = _images_doc(u.inverse.images_x, u.inverse.images_th)
    return doc


def _factored_doc(point: SDiffPoint) -> dict:
    fields = {
        "[" + ",".join(str(i) for i in key) + "]": fmt.format_derivation(field)
        for key, field in point.fields.items()
    }
    return {
        "kind": "factored",
        "p": point.p,
        "body": _underlying_doc(point.body),
        "fields": fields,
    }


def _emit(args: argparse.Namespace, text: str, doc: dict) -> None:
    if args.format == "doc":
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(text)


def _emit_point(args: argparse.Namespace, point: SDiffPoint) -> None:
    phi = _point_morphism(point)
    _emit(args, fmt.format_morphism(phi), _morphism_doc(phi))


# -- verbs -------------------------------------------------------------------


def cmd_compose(args: argparse.Namespace) -> int:
    outer = _load_point(_read(args.outer), args)
    inner = _load_point(_read(args.inner), args)
    outer, inner = _align(outer, inner)
    result = compose(outer, inner)
    if args.check_factored:
        alt = compose_factored(outer, inner)
        if alt != result.morphism:
            print("composition cross-check failed", file=sys.stderr)
            return 1
    _emit_point(args, result)
    return 0


def cmd_invert(args: argparse.Namespace) -> int:
    point = _load_point(_read(args.input), args)
    _emit_point(args, invert(point))
    return 0


def cmd_factorize(args: argparse.Namespace) -> int:
    point = _load_point(_read(args.input), args)
    text = fmt.format_factored(point.body, point.fields, point.p)
    _emit(args, text, _factored_doc(point))
    return 0


def cmd_expand(args: argparse.Namespace) -> int:
    kind, value = fmt.parse_any(_read(args.input))
    if kind != "factored":
        raise ParseError(0, (), f"expected a factored form, found {kind}")
    body, fields, p = value  # type: ignore[misc]
    point = SDiffPoint.from_factored(body, fields, p)
    _emit_point(args, point)
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    point = _load_point(_read(args.input), args)
    parts = split(point)
    if recombine(parts) != point:
        print("split failed to recombine", file=sys.stderr)
        return 1
    kernel_phi = _point_morphism(parts.kernel)
    text = "\n".join(
        [
            "kernel: {",
            fmt.format_morphism(kernel_phi),
            "}",
            "body: {",
            fmt.format_underlying(parts.body),
            "}",
        ]
    )
    doc = {
        "kind": "split",
        "kernel": _morphism_doc(kernel_phi),
        "body": _underlying_doc(parts.body),
    }
    _emit(args, text, doc)
    return 0


def cmd_push(args: argparse.Namespace) -> int:
    kind, relabel = fmt.parse_any(_read(args.relabel))
    if kind != "grassmann_morphism":
        raise ParseError(0, (), f"expected a Grassmann morphism, found {kind}")
    assert isinstance(relabel, GrassmannMorphism)
    point = _load_point(_read(args.input), args)
    if point.p != relabel.source_n:
        point = SDiffPoint(
            _lift_morphism(point.morphism, relabel.source_n), point.body
        )
    _emit_point(args, functor_map(relabel, point))
    return 0


def cmd_apply(args: argparse.Namespace) -> int:
    kind, op = fmt.parse_any(_read(args.operator))
    m, n, p = _parse_args_dims(args)
    f = fmt.parse_superfunction(_read(args.argument), m, n, p)
    if kind == "factored":
        body, fields, rank = op  # type: ignore[misc]
        point = SDiffPoint.from_factored(body, fields, rank)
        op, kind = point.morphism, "morphism"
    if kind == "morphism":
        assert isinstance(op, SuperMorphism)
        if (f.m, f.n) != (op.m, op.n):
            f = f.embed(op.m, op.n, f.p)
        target = max(f.p, op.p)
        phi = _lift_morphism(op, target) if op.p < target else op
        result = phi.apply_extended(f.lift(target))
    elif kind == "derivation":
        assert isinstance(op, SuperDerivation)
        if (f.m, f.n) != (op.m, op.n):
            f = f.embed(op.m, op.n, f.p)
        target = max(f.p, op.p)
        result = op.lift(target).apply(f.lift(target))
    else:
        raise ParseError(0, (), f"cannot apply a {kind}")
    _emit(
        args,
        fmt.format_superfunction(result),
        {"kind": "superfunction", "value": fmt.format_superfunction(result)},
    )
    return 0


def cmd_bracket(args: argparse.Namespace) -> int:
    m, n, p = _parse_args_dims(args)
    left = fmt.parse_derivation(_read(args.left), m, n, p)
    right = fmt.parse_derivation(_read(args.right), m, n, p)
    mm = max(left.m, right.m)
    nn = max(left.n, right.n)
    pp = max(left.p, right.p)

    def pad(d: SuperDerivation) -> SuperDerivation:
        return SuperDerivation(
            mm,
            nn,
            pp,
            [g.embed(mm, nn, pp) for g in d.x_coeffs]
            + [Superfunction.zero(mm, nn, pp)] * (mm - d.m),
            [g.embed(mm, nn, pp) for g in d.th_coeffs]
            + [Superfunction.zero(mm, nn, pp)] * (nn - d.n),
        )

    result = pad(left).bracket(pad(right))
    _emit(
        args,
        fmt.format_derivation(result),
        {"kind": "derivation", "value": fmt.format_derivation(result)},
    )
    return 0


def cmd_exp(args: argparse.Namespace) -> int:
    m, n, p = _parse_args_dims(args)
    field = fmt.parse_derivation(_read(args.input), m, n, p)
    morphism = exp_nilpotent(field)
    _emit(args, fmt.format_underlying(morphism), _underlying_doc(morphism))
    return 0


def cmd_log(args: argparse.Namespace) -> int:
    kind, value = fmt.parse_any(_read(args.input))
    if kind != "morphism":
        raise ParseError(0, (), f"expected a morphism, found {kind}")
    assert isinstance(value, SuperMorphism)
    if value.p != 0:
        raise DimensionError("logarithm expects a rank-0 substitution")
    field = log_unipotent(value.underlying())
    _emit(
        args,
        fmt.format_derivation(field),
        {"kind": "derivation", "value": fmt.format_derivation(field)},
    )
    return 0


def cmd_sections(args: argparse.Namespace) -> int:
    basis = section_basis(args.m, args.n, args.p, args.degree)
    lines = [fmt.format_derivation(sec.field) for sec in basis]
    text = "\n".join([f"count: {len(basis)}"] + lines)
    doc = {
        "kind": "sections",
        "m": args.m,
        "n": args.n,
        "p": args.p,
        "degree": args.degree,
        "count": len(basis),
        "basis": lines,
    }
    _emit(args, text, doc)
    return 0


# -- selftest ----------------------------------------------------------------


def _selftest_checks(rng: random.Random, count: int) -> list[tuple[str, bool]]:
    results: list[tuple[str, bool]] = []

    ok = True
    for _ in range(count):
        body = sampling.random_body(rng, 2, 2, degree=1)
        fields = sampling.random_field_family(rng, 2, 2, 2, degree=1)
        point = SDiffPoint.from_factored(body, fields, 2)
        rebody, refields = point.body, point.fields
        ok = ok and refields == fields and rebody.images_x == body.images_x
    results.append(("factor round trip", ok))

    ident = SDiffPoint.identity(2, 2, 2)
    ok = True
    for _ in range(count):
        point = sampling.random_point(rng, 2, 2, 2, degree=1)
        other = invert(point)
        ok = ok and compose(other, point) == ident
        ok = ok and compose(point, other) == ident
    results.append(("inverse round trip", ok))

    ok = True
    for _ in range(count):
        a = sampling.random_point(rng, 2, 2, 2, degree=1)
        b = sampling.random_point(rng, 2, 2, 2, degree=1)
        ok = ok and compose(a, b).morphism == compose_factored(a, b)
    results.append(("composition routes", ok))

    ok = True
    for _ in range(count):
        point = sampling.random_point(rng, 2, 2, 2, degree=1)
        parts = split(point)
        ok = ok and parts.kernel.in_kernel() and recombine(parts) == point
    results.append(("semidirect split", ok))

    ok = True
    for _ in range(count):
        field = sampling.random_filtration_field(rng, 2, 3, degree=1)
        if field.filtration_degree() < 2:
            continue
        morphism = exp_nilpotent(field)
        ok = ok and log_unipotent(morphism) == field
    results.append(("exp/log round trip", ok))

    ok = True
    for _ in range(count):
        f = sampling.random_superfunction(rng, 2, 2, 2)
        text = fmt.format_superfunction(f)
        ok = ok and fmt.format_superfunction(fmt.parse_superfunction(text)) == text
        d = sampling.random_derivation(rng, 2, 2, 2)
        dtext = fmt.format_derivation(d)
        ok = ok and fmt.format_derivation(fmt.parse_derivation(dtext)) == dtext
    results.append(("printer fixpoint", ok))

    return results


def cmd_selftest(args: argparse.Namespace) -> int:
    rng = random.Random(args.seed)
    failures = 0
    for label, passed in _selftest_checks(rng, args.count):
        print(f"{'ok' if passed else 'fail'} {label} x{args.count}")
        failures += 0 if passed else 1
    if failures:
        print(f"{failures} check(s) failed")
        return 1
    print("all checks passed")
    return 0


# -- wiring ------------------------------------------------------------------


def _add_format(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--format", choices=("text", "doc"), default="text", help="output style"
    )


def _add_dims(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--m", type=int, default=None, help="even coordinate count")
    sub.add_argument("--n", type=int, default=None, help="odd coordinate count")
    sub.add_argument("--p", type=int, default=None, help="external rank")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="superdiff",
        description="exact calculus on families of superdomain morphisms",
    )
    sub = root.add_subparsers(dest="verb", required=True)

    sp = sub.add_parser("compose", help="multiply two invertible families")
    sp.add_argument("outer")
    sp.add_argument("inner")
    sp.add_argument(
        "--check-factored",
        action="store_true",
        help="cross-check through the factored route",
    )
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_compose)

    sp = sub.add_parser("invert", help="group inverse of an invertible family")
    sp.add_argument("input")
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_invert)

    sp = sub.add_parser("factorize", help="split into body and component fields")
    sp.add_argument("input")
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_factorize)

    sp = sub.add_parser("expand", help="rebuild the morphism from factored data")
    sp.add_argument("input")
    _add_format(sp)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("split", help="separate kernel part and constant part")
    sp.add_argument("input")
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("push", help="relabel external generators along a map")
    sp.add_argument("relabel", help="Grassmann morphism file")
    sp.add_argument("input", help="morphism or factored file")
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_push)

    sp = sub.add_parser("apply", help="apply a morphism or operator to a function")
    sp.add_argument("operator")
    sp.add_argument("argument")
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_apply)

    sp = sub.add_parser("bracket", help="graded commutator of two operators")
    sp.add_argument("left")
    sp.add_argument("right")
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_bracket)

    sp = sub.add_parser("exp", help="exponentiate a filtration-raising field")
    sp.add_argument("input")
    _add_format(sp)
    _add_dims(sp)
    sp.set_defaults(func=cmd_exp)

    sp = sub.add_parser("log", help="logarithm of a unipotent substitution")
    sp.add_argument("input")
    _add_format(sp)
    sp.set_defaults(func=cmd_log)

    sp = sub.add_parser("sections", help="basis of even field families")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--degree", type=int, default=1, help="max polynomial degree")
    _add_format(sp)
    sp.set_defaults(func=cmd_sections)

    sp = sub.add_parser("selftest", help="seeded property checks")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=10)
    sp.set_defaults(func=cmd_selftest)

    return root


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except InvertibilityError as exc:
        print(f"not certifiable: {exc}", file=sys.stderr)
        return 3
    except (DimensionError, ParityError, DomainError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
