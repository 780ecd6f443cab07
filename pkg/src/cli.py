# src/cli.py
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import jsonschema
import regex as re

from .augment_search import (
    TABLE_ALIASES,
    TABLES,
    SearchBounds,
    default_jobs,
    has_augmentation_corner,
    random_two_round_blowup,
    reproduce_table,
    search_strongly_exceptional,
    standard_systems,
    two_round_system,
)
from .cohomology import (
    cohomology,
    degree_bound_check,
    is_left_orthogonal,
    is_straightened,
    is_strongly_left_orthogonal,
    straighten,
)
from .expressions import ExpressionError, parse_int_list
from .pic_lattice import DivisorClass, MinimalModelBasis
from .svg_figure import render_report, save_svg
from .tables import NEF_SURFACES
from .toric_surface import (
    ToricSurface,
    anticanonical_status,
    basis_from_underlines,
    canonical_form,
    class_from_c,
    enumerate_surfaces,
    from_a_sequence,
    from_rays,
    iter_contraction_sequences,
    minimal_model_basis,
    two_step_blowdown,
)
from .toric_systems import (
    ToricSystem,
    de_augment,
    gale_dual,
    is_cyclic_strongly_exceptional,
    is_exceptional,
    is_strongly_exceptional,
    normal_form,
    standard_augmentation_chain,
    validate,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

_INT_ARRAY = {"type": "array", "items": {"type": "integer"}}

INPUT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "properties": {
        "a": {**_INT_ARRAY, "minItems": 3},
        "rays": {
            "type": "array",
            "items": {**_INT_ARRAY, "minItems": 2, "maxItems": 2},
            "minItems": 3,
        },
        "underlined": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "q_ray": {"type": "integer", "minimum": 0},
        "divisor": {
            "oneOf": [
                {"type": "string", "minLength": 1},
                {
                    "type": "object",
                    "properties": {
                        "d": _INT_ARRAY,
                        "c": _INT_ARRAY,
                        "coeffs": {"type": "string", "minLength": 1},
                    },
                    "additionalProperties": False,
                    "minProperties": 1,
                    "maxProperties": 1,
                },
            ]
        },
        "system": {
            "type": "array",
            "items": {"anyOf": [{"type": "string", "minLength": 1}, _INT_ARRAY]},
            "minItems": 3,
        },
    },
    "oneOf": [{"required": ["a"]}, {"required": ["rays"]}],
    "additionalProperties": False,
}

# flags whose values may start with a minus sign
VALUE_FLAGS = ("--a", "--rays", "--d", "--c", "--coeffs", "--underlined", "--system")

HIRZEBRUCH_NAME_RE = re.compile(r"f(\p{N}+)")


class UsageError(Exception):
    pass


# ---------- input documents ----------

def surface_from_name(name: str) -> List[int]:
    key = name.strip().lower()
    named = {n.lower(): list(a) for n, a in NEF_SURFACES}
    named["f0"] = [0, 0, 0, 0]
    if key in named:
        return named[key]
    m = HIRZEBRUCH_NAME_RE.fullmatch(key)
    if m:
        a = int(m.group(1))
        return [0, a, 0, -a]
    raise UsageError(f"unknown surface name {name!r}")


def _ints(text: str, flag: str) -> List[int]:
    try:
        return parse_int_list(text)
    except ExpressionError as e:
        raise UsageError(f"{flag}: {e}") from e


def doc_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Input document from --input or from the individual flags, checked against
    INPUT_SCHEMA.
    """
    if getattr(args, "input", None):
        path = Path(args.input)
        if not path.exists():
            raise FileNotFoundError(f"input file not found: {path}")
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: invalid JSON ({e})") from e
    else:
        doc: Dict[str, Any] = {}
        if getattr(args, "surface", None):
            doc["a"] = surface_from_name(args.surface)
        if getattr(args, "a", None):
            doc["a"] = _ints(args.a, "--a")
        if getattr(args, "rays", None):
            vals = _ints(args.rays, "--rays")
            if len(vals) % 2:
                raise UsageError(f"--rays needs an even number of integers, got {len(vals)}")
            doc["rays"] = [vals[i:i + 2] for i in range(0, len(vals), 2)]
        if getattr(args, "underlined", None):
            doc["underlined"] = _ints(args.underlined, "--underlined")
        if getattr(args, "q_ray", None) is not None:
            doc["q_ray"] = args.q_ray
        if getattr(args, "coeffs", None):
            doc["divisor"] = {"coeffs": args.coeffs}
        elif getattr(args, "d", None):
            doc["divisor"] = {"d": _ints(args.d, "--d")}
        elif getattr(args, "c", None):
            doc["divisor"] = {"c": _ints(args.c, "--c")}
        if getattr(args, "system", None):
            doc["system"] = [s.strip() for s in args.system.split(";") if s.strip()]
    try:
        jsonschema.validate(instance=doc, schema=INPUT_SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise UsageError(f"schema: {e.message} (at {where})") from e
    return doc


def _surface(doc: Dict[str, Any]) -> ToricSurface:
    if "a" in doc:
        return from_a_sequence(doc["a"])
    return from_rays(doc["rays"])


def _basis(X: ToricSurface, doc: Dict[str, Any], required: bool = False) -> Optional[MinimalModelBasis]:
    q = doc.get("q_ray")
    try:
        if q is not None and q >= X.n:
            raise ValueError(f"q_ray {q} outside [0, {X.n})")
        if "underlined" in doc:
            return basis_from_underlines(X, doc["underlined"], q)
        seq = next(iter_contraction_sequences(X), None)
        if seq is None:
            raise ValueError("surface has no contraction sequence")
        return minimal_model_basis(X, seq, q_ray=X.rays[q] if q is not None else None)
    except ValueError:
        if required:
            raise
        return None


def _divisor(X: ToricSurface, doc: Dict[str, Any]) -> DivisorClass:
    entry = doc.get("divisor")
    if entry is None:
        raise UsageError("a divisor is required (--coeffs, --d or --c)")
    if isinstance(entry, str):
        entry = {"coeffs": entry}
    if "d" in entry:
        return X.element(entry["d"])
    if "c" in entry:
        if len(entry["c"]) != X.n:
            raise ValueError(f"c-vector has length {len(entry['c'])}, surface has {X.n} rays")
        return class_from_c(X, entry["c"])
    return _basis(X, doc, required=True).parse(entry["coeffs"])


def _system(X: ToricSurface, doc: Dict[str, Any]) -> ToricSystem:
    items = doc.get("system")
    if items is None:
        raise UsageError("a toric system is required (--system)")
    basis = None
    classes = []
    for item in items:
        if isinstance(item, str):
            basis = basis or _basis(X, doc, required=True)
            classes.append(basis.parse(item))
        else:
            classes.append(X.element(item))
    return ToricSystem(tuple(classes))


def _fmt(D: DivisorClass, basis: Optional[MinimalModelBasis]):
    if basis is not None and basis.owner == D.owner:
        return basis.format(D)
    return list(D.coords)


def _surface_doc(X: ToricSurface) -> Dict[str, Any]:
    return {"a": list(X.a_sequence), "rays": [list(r) for r in X.rays]}


# ---------- handlers ----------

def cmd_surface(args, doc) -> Dict[str, Any]:
    if args.action == "enumerate":
        found = enumerate_surfaces(args.n, args.a_min, args.a_max)
        return {
            "n": args.n,
            "a_min": args.a_min,
            "a_max": args.a_max,
            "count": len(found),
            "surfaces": [list(X.a_sequence) for X in found],
        }
    X = _surface(doc)
    if args.action == "new":
        return {
            **_surface_doc(X),
            "n": X.n,
            "rank": X.rank,
            "canonical_form": list(canonical_form(X.a_sequence)),
            "anticanonical": anticanonical_status(X),
        }
    if args.action == "check-two-step":
        verdict, witness = two_step_blowdown(X)
        return {
            "a": list(X.a_sequence),
            "two_step": verdict,
            "witness": None if witness is None else [list(w) for w in witness],
        }
    status = anticanonical_status(X)
    return {"a": list(X.a_sequence), "anticanonical": status, "nef": status != "not-nef"}


def cmd_divisor(args, doc) -> Dict[str, Any]:
    X = _surface(doc)
    D = _divisor(X, doc)
    basis = _basis(X, doc)
    if args.action == "cohomology":
        return {**cohomology(X, D).as_dict(), "d": list(D.coords), "divisor": _fmt(D, basis)}
    if args.action == "straighten":
        res = straighten(X, D)
        return {
            "surface": _surface_doc(res.surface),
            "d": list(res.divisor.coords),
            "contracted": [list(r) for r in res.contracted],
            "flipped": res.flipped,
        }
    return {
        "d": list(D.coords),
        "divisor": _fmt(D, basis),
        "left_orthogonal": is_left_orthogonal(X, D),
        "strongly_left_orthogonal": is_strongly_left_orthogonal(X, D),
        "degree_bound": degree_bound_check(X, D),
        "straightened": is_straightened(X, D),
        "augmentation_corner": has_augmentation_corner(X, D),
    }


def _deaug_doc(d) -> Dict[str, Any]:
    return {
        "surface": _surface_doc(d.surface) if isinstance(d.surface, ToricSurface) else None,
        "system": [list(A.coords) for A in d.system.classes],
        "slot": d.slot,
        "ray": None if d.ray is None else list(d.ray),
    }


def cmd_system(args, doc) -> Dict[str, Any]:
    X = _surface(doc)
    S = _system(X, doc)
    if args.action == "validate":
        rep = validate(S)
        return {"ok": rep.ok, "violations": list(rep.violations)}
    if args.action == "check":
        return {
            "exceptional": is_exceptional(X, S),
            "strongly_exceptional": is_strongly_exceptional(X, S),
            "cyclic_strongly_exceptional": is_cyclic_strongly_exceptional(X, S),
        }
    if args.action == "gale-dual":
        Y = gale_dual(S)
        return {
            **_surface_doc(Y),
            "canonical_form": list(canonical_form(Y.a_sequence)),
            "anticanonical": anticanonical_status(Y),
        }
    if args.action == "normal-form":
        basis = _basis(X, doc, required=True)
        nf = normal_form(X, S, basis, cyclic=args.cyclic)
        return {"system": [_fmt(A, basis) for A in nf.classes]}
    if args.chain:
        chain = standard_augmentation_chain(X, S)
        return {"found": chain is not None, "steps": [_deaug_doc(d) for d in chain or []]}
    d = de_augment(X, S, cyclic=args.cyclic)
    return {"found": d is not None, **(_deaug_doc(d) if d is not None else {})}


def cmd_augment(args, doc) -> Dict[str, Any]:
    if args.action == "standard":
        X = _surface(doc)
        basis = minimal_model_basis(X, []) if X.n in (3, 4) else None
        out = []
        for st in standard_systems(X, basis, (args.s_min, args.s_max)):
            out.append({
                "kind": st.kind,
                "s": st.s,
                "system": [_fmt(A, basis) for A in st.system.classes],
                "exceptional": st.exceptional,
                "strong": st.strong,
                "cyclic": st.cyclic,
            })
        return {"a": list(X.a_sequence), "systems": out}
    rng = random.Random(args.seed)
    items = []
    for _ in range(args.count):
        blowup = random_two_round_blowup(rng, args.max_rank)
        S = two_round_system(blowup, args.hirzebruch_n)
        items.append({
            "base": list(blowup.base.a_sequence),
            "first": list(blowup.first),
            "second": list(blowup.second),
            "a": list(blowup.surface.a_sequence),
            "system": [_fmt(A, blowup.basis) for A in S.classes],
            "strongly_exceptional": is_strongly_exceptional(blowup.surface, S),
        })
    return {"seed": args.seed, "max_rank": args.max_rank, "surfaces": items}


def cmd_search(args, doc) -> Dict[str, Any]:
    X = _surface(doc)
    bounds = SearchBounds(d_floor=args.d_floor, slack=args.slack)
    cyclic = args.action == "cyclic"
    jobs = args.jobs if args.jobs is not None else default_jobs()
    hits = search_strongly_exceptional(X, bounds, cyclic=cyclic, jobs=jobs)
    basis = _basis(X, doc)
    try:
        verdict, _ = two_step_blowdown(X)
    except ValueError:
        verdict = None
    return {
        "a": list(X.a_sequence),
        "bounds": bounds.as_dict(),
        "cyclic": cyclic,
        "two_step": verdict,
        "count": len(hits),
        "hits": [[_fmt(A, basis) for A in S.classes] for S in hits],
    }


# ---------- parser ----------

def _input_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("Input")
    g.add_argument("--input", type=str, help="JSON document with a / rays, divisor, system.")
    g.add_argument("--surface", type=str, help="Named surface: p2, f<a>, p1xp1, 5a .. 9.")
    g.add_argument("--a", type=str, help="Self-intersection sequence, e.g. -2,-2,-1,-3,-2,0,1.")
    g.add_argument("--rays", type=str, help="Ray coordinates x1,y1,x2,y2,...")
    g.add_argument("--underlined", type=str, help="0-based rays contracted to the minimal model (named R1, R2, ... in the order listed).")
    g.add_argument("--q_ray", type=int, help="0-based index of the ray giving Q on a Hirzebruch model.")
    return p


def _divisor_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("Divisor")
    g.add_argument("--coeffs", type=str, help="Minimal-model expression such as 3H-2R1-R2.")
    g.add_argument("--d", type=str, help="d-vector (intersection numbers with D_1..D_n).")
    g.add_argument("--c", type=str, help="c-vector (coefficients of D_1..D_n).")
    return p


def _system_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--system", type=str, help="Members separated by ';', e.g. 'H;H;H'.")
    p.add_argument("--cyclic", action="store_true", help="Use the cyclic variant (normal form, de-augmentation).")
    return p


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="python -m src.cli", description="Toric surfaces and toric systems.")
    verbs = ap.add_subparsers(dest="verb", required=True)
    inp, div, sysp = _input_parent(), _divisor_parent(), _system_parent()

    surface = verbs.add_parser("surface", help="Construct and inspect surfaces.")
    sa = surface.add_subparsers(dest="action", required=True)
    for name in ("new", "check-two-step", "nef"):
        sa.add_parser(name, parents=[inp])
    en = sa.add_parser("enumerate")
    en.add_argument("--n", type=int, required=True)
    en.add_argument("--a_min", type=int, default=-2)
    en.add_argument("--a_max", type=int, default=None)

    divisor = verbs.add_parser("divisor", help="Cohomology and left-orthogonality of a divisor.")
    da = divisor.add_subparsers(dest="action", required=True)
    for name in ("cohomology", "straighten", "check-slo"):
        da.add_parser(name, parents=[inp, div])

    system = verbs.add_parser("system", help="Toric system checks.")
    ya = system.add_subparsers(dest="action", required=True)
    for name in ("validate", "check", "gale-dual", "normal-form"):
        ya.add_parser(name, parents=[inp, sysp])
    de = ya.add_parser("de-augment", parents=[inp, sysp])
    de.add_argument("--chain", action="store_true", help="Iterate down to a standard system.")

    augment = verbs.add_parser("augment", help="Standard systems and two-round generators.")
    aa = augment.add_subparsers(dest="action", required=True)
    st = aa.add_parser("standard", parents=[inp])
    st.add_argument("--s_min", type=int, default=-1)
    st.add_argument("--s_max", type=int, default=5)
    gen = aa.add_parser("generate")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--max_rank", type=int, default=14)
    gen.add_argument("--hirzebruch_n", type=int, default=0, help="Parameter n >= -1 of the Hirzebruch construction.")

    search = verbs.add_parser("search", help="Bounded search for strongly exceptional toric systems.")
    ra = search.add_subparsers(dest="action", required=True)
    for name in ("strong", "cyclic"):
        p = ra.add_parser(name, parents=[inp])
        b = p.add_argument_group("Bounds")
        b.add_argument("--d_floor", type=int, default=-1)
        b.add_argument("--slack", type=int, default=0)
        b.add_argument("--jobs", type=int, default=None, help="Worker processes (default: $TORIC_JOBS or 1).")

    tables = verbs.add_parser("tables", help="Reproduce the tabulated results.")
    ta = tables.add_subparsers(dest="action", required=True)
    rp = ta.add_parser("reproduce")
    rp.add_argument("name", choices=sorted(TABLES) + sorted(TABLE_ALIASES))

    figure = verbs.add_parser("figure", help="SVG pictures of divisors.")
    fa = figure.add_subparsers(dest="action", required=True)
    sv = fa.add_parser("svg", parents=[inp, div])
    sv.add_argument("--out", type=str, default="outputs/figure.svg")
    return ap


def _attach_values(argv: Sequence[str]) -> List[str]:
    # "--a -2,-1" -> "--a=-2,-1" so argparse does not read the value as a flag
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


HANDLERS = {
    "surface": cmd_surface,
    "divisor": cmd_divisor,
    "system": cmd_system,
    "augment": cmd_augment,
    "search": cmd_search,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_attach_values(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        if args.verb == "tables":
            report = reproduce_table(args.name)
            print("\n".join(report.lines()))
            return EXIT_OK if report.ok else EXIT_DOMAIN
        needs_doc = not (args.verb == "surface" and args.action == "enumerate") and not (
            args.verb == "augment" and args.action == "generate"
        )
        doc = doc_from_args(args) if needs_doc else {}
        if args.verb == "figure":
            X = _surface(doc)
            D = _divisor(X, doc)
            save_svg(render_report(X, D, _basis(X, doc)), args.out)
            return EXIT_OK
        out = HANDLERS[args.verb](args, doc)
    except (UsageError, FileNotFoundError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
