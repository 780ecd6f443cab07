from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

import pandas as pd
from tqdm import tqdm

from .augment_search import (
    TABLES,
    SearchBounds,
    brute_force_hirzebruch_systems,
    census_record,
    default_jobs,
    example_family_surface,
    example_family_system,
    random_two_round_blowup,
    reproduce_table,
    two_round_system,
    write_census,
)
from .toric_surface import canonical_form, enumerate_surfaces, from_a_sequence
from .toric_systems import gale_dual, invariant_system, is_cyclic_strongly_exceptional, is_strongly_exceptional

COUNTEREXAMPLE_A = (-2, -2, -1, -3, -2, 0, 1)


def _save_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True), encoding="utf-8")
    print(f"Saved: {path}")


def run_tables(out_dir: Path, names=None) -> bool:
    names = names or list(TABLES)
    rows = []
    ok = True
    for name in names:
        report = reproduce_table(name, progress=True)
        text = "\n".join(report.lines())
        print(text)
        p = out_dir / "tables" / f"{name}.txt"
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text + "\n", encoding="utf-8")
        print(f"Saved: {p}")
        rows.append({
            "table": name,
            "expected": report.expected,
            "matched": report.matched,
            "missing": len(report.missing),
            "extra": len(report.extra),
            "ok": report.ok,
        })
        ok = ok and report.ok
    csv_path = out_dir / "tables" / "summary.csv"
    pd.DataFrame(rows).to_csv(csv_path, index=False, encoding="utf-8")
    print(f"Saved: {csv_path}")
    return ok


def run_counterexample(out_dir: Path, bounds: SearchBounds, jobs: int) -> None:
    X = from_a_sequence(COUNTEREXAMPLE_A)
    records = []
    for cyclic in (False, True):
        rec = census_record(X, bounds, cyclic=cyclic, jobs=jobs, progress=True)
        kind = "cyclic" if cyclic else "strong"
        print(f"[counterexample] {kind}: {len(rec['hits'])} systems, two-step blow-down: {rec['two_step']}")
        records.append(rec)
    write_census(records, out_dir / "counterexample")

    Y, basis = example_family_surface()
    family = []
    for s in range(-1, 4):
        S = example_family_system(s, (Y, basis))
        family.append({
            "s": s,
            "system": [basis.format(A) for A in S.classes],
            "strongly_exceptional": is_strongly_exceptional(Y, S),
            "cyclic_strongly_exceptional": is_cyclic_strongly_exceptional(Y, S),
        })
        print(f"[counterexample] family s={s}: strong={family[-1]['strongly_exceptional']}")
    _save_json({"a": list(Y.a_sequence), "family": family}, out_dir / "counterexample" / "family.json")


def run_hirzebruch(out_dir: Path, a_max: int, bound: int) -> None:
    rows = []
    for a in range(a_max + 1):
        found = brute_force_hirzebruch_systems(a, bound, progress=True)
        bad = 0
        for r in found:
            if r.expected is not None and r.expected != r.labels:
                bad += 1
            rows.append({
                "a": a,
                "system": ";".join(f"{al}P{be:+d}Q" for al, be in r.coeffs),
                "rotation": r.rotation,
                "kind": r.kind,
                "s": r.s,
                "exceptional": r.exceptional,
                "strong": r.strong,
                "cyclic": r.cyclic,
            })
        print(f"[hirzebruch] F_{a}: {len(found)} systems, {bad} label mismatches")
    p = out_dir / "hirzebruch" / "brute_force.csv"
    p.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(p, index=False, encoding="utf-8")
    print(f"Saved: {p}")


def run_gale(out_dir: Path, n_max: int, a_bound: int) -> None:
    rows = []
    for n in range(3, n_max + 1):
        surfaces = enumerate_surfaces(n, -a_bound, a_bound, progress=True)
        bad = 0
        for X in surfaces:
            Y = gale_dual(invariant_system(X))
            if canonical_form(Y.a_sequence) != canonical_form(X.a_sequence):
                bad += 1
        rows.append({"n": n, "surfaces": len(surfaces), "round_trip_failures": bad})
        print(f"[gale] n={n}: {len(surfaces)} surfaces, {bad} failures")
    p = out_dir / "gale" / "round_trip.csv"
    p.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(p, index=False, encoding="utf-8")
    print(f"Saved: {p}")


def run_generators(out_dir: Path, seed: int, count: int, max_rank: int) -> None:
    rng = random.Random(seed)
    cases = []
    failures = 0
    for _ in tqdm(range(count), desc="two-round"):
        blowup = random_two_round_blowup(rng, max_rank)
        S = two_round_system(blowup)
        strong = is_strongly_exceptional(blowup.surface, S)
        failures += not strong
        cases.append({
            "base": list(blowup.base.a_sequence),
            "first": list(blowup.first),
            "second": list(blowup.second),
            "a": list(blowup.surface.a_sequence),
            "system": [blowup.basis.format(A) for A in S.classes],
            "strongly_exceptional": strong,
        })
    print(f"[generators] {count - failures}/{count} two-round systems strongly exceptional (seed={seed})")
    _save_json({"seed": seed, "max_rank": max_rank, "cases": cases}, out_dir / "generators" / "two_round.json")


def run_census(out_dir: Path, n: int, a_min: int, bounds: SearchBounds, jobs: int) -> None:
    records = []
    for X in enumerate_surfaces(n, a_min, progress=True):
        records.append(census_record(X, bounds, cyclic=False, jobs=jobs))
    write_census(records, out_dir / "census")
    print(f"[census] {len(records)} surfaces with {n} rays")


def parse_args():
    ap = argparse.ArgumentParser(description="Reproduction driver for toric surfaces and toric systems.")
    ap.add_argument("--out_dir", type=str, default="outputs", help="Output directory.")

    stages = ap.add_argument_group("Stages")
    stages.add_argument("--tables", action="store_true", help="Reproduce every table.")
    stages.add_argument("--counterexample", action="store_true", help="Search the seven-ray counterexample and the blow-up family.")
    stages.add_argument("--hirzebruch", action="store_true", help="Brute-force toric systems on F_0..F_a.")
    stages.add_argument("--gale", action="store_true", help="Gale duality round trip over enumerated surfaces.")
    stages.add_argument("--generators", action="store_true", help="Random two-round blow-up generators.")
    stages.add_argument("--census", action="store_true", help="Search census over surfaces with --census_n rays.")

    bounds = ap.add_argument_group("Bounds")
    bounds.add_argument("--d_floor", type=int, default=-1)
    bounds.add_argument("--slack", type=int, default=0)
    bounds.add_argument("--jobs", type=int, default=None, help="Worker processes (default: $TORIC_JOBS or 1).")
    bounds.add_argument("--hirzebruch_a_max", type=int, default=3)
    bounds.add_argument("--hirzebruch_bound", type=int, default=6)
    bounds.add_argument("--gale_n_max", type=int, default=8)
    bounds.add_argument("--gale_a_bound", type=int, default=4)
    bounds.add_argument("--census_n", type=int, default=6)
    bounds.add_argument("--census_a_min", type=int, default=-2)

    gen = ap.add_argument_group("Generators")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, default=50)
    gen.add_argument("--max_rank", type=int, default=14)

    args = ap.parse_args()
    if not any([args.tables, args.counterexample, args.hirzebruch, args.gale, args.generators, args.census]):
        args.tables = args.hirzebruch = args.gale = args.generators = True
    return args


def main():
    args = parse_args()
    out_dir = Path(args.out_dir)
    jobs = args.jobs if args.jobs is not None else default_jobs()
    bounds = SearchBounds(d_floor=args.d_floor, slack=args.slack)

    if args.tables:
        ok = run_tables(out_dir)
        print(f"[tables] all match: {ok}")

    if args.counterexample:
        run_counterexample(out_dir, bounds, jobs)

    if args.hirzebruch:
        run_hirzebruch(out_dir, args.hirzebruch_a_max, args.hirzebruch_bound)

    if args.gale:
        run_gale(out_dir, args.gale_n_max, args.gale_a_bound)

    if args.generators:
        run_generators(out_dir, args.seed, args.count, args.max_rank)

    if args.census:
        run_census(out_dir, args.census_n, args.census_a_min, bounds, jobs)


if __name__ == "__main__":
    main()
