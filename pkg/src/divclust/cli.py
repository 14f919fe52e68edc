"""Command-line entry point: ``divclust <command> ...``.

Exit status: 0 success, 2 infeasible instance, 1 any other error (including
usage errors).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import anonymize as anon
from .diversity import check_feasible, infeasibility_message, resolve_l, solve
from .errors import DivClustError, InfeasibleInstance
from .generators import gadget_from_3dm, random_3dm, random_euclidean
from .instance import Clustering, Instance, read_instance
from .oracle import exact_solve, exact_solve_outliers
from .outliers import outlier_plan, solve_with_outliers
from .twocolor import solve_two_color

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load(args) -> Instance:
    path = Path(args.instance)
    if path.suffix.lower() == ".csv":
        if not args.qi or not args.sa:
            raise UsageError("CSV input needs --qi and --sa")
        cfg = anon.AnonymizeConfig(tuple(args.qi.split(",")), args.sa, args.l or 2, args.normalize)
        inst, _ = anon.ingest_csv(path, cfg)
        return inst
    if args.qi or args.sa:
        raise UsageError("--qi/--sa only apply to CSV input")
    return read_instance(path, validate_metric=args.validate)


def _clustering_text(inst: Instance, clustering: Clustering, fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        doc = clustering.to_dict(inst)
        doc.update(extra or {})
        return json.dumps(doc, indent=2) + "\n"
    rows = []
    labels = clustering.labels(inst.n)
    for v in range(inst.n):
        cid = int(labels[v])
        center = clustering.clusters[cid].center if cid >= 0 else ""
        rows.append({"point": v, "cluster": cid if cid >= 0 else "", "center": center,
                     "outlier": int(v in set(clustering.outliers))})
    return anon._csv_text(rows, ["point", "cluster", "center", "outlier"])


def cmd_check(args) -> int:
    inst = _load(args)
    l = resolve_l(inst, args.l)
    if check_feasible(inst, l):
        plan = outlier_plan(inst, l)
        print(f"feasible: max color class {int(inst.color_counts().max())} <= floor({inst.n}/{l}) = {inst.n // l}; "
              f"up to {plan.p} clusters")
        return EXIT_OK
    plan = outlier_plan(inst, l)
    print(infeasibility_message(inst, l))
    print(f"minimum outliers q={plan.q} leaving p={plan.p} clusters (use solve-outliers)")
    return EXIT_INFEASIBLE


def cmd_solve(args) -> int:
    inst = _load(args)
    _emit(_clustering_text(inst, solve(inst, args.l), args.format), args.out)
    return EXIT_OK


def cmd_solve2c(args) -> int:
    inst = _load(args)
    _emit(_clustering_text(inst, solve_two_color(inst, args.l), args.format), args.out)
    return EXIT_OK


def cmd_solve_outliers(args) -> int:
    inst = _load(args)
    _emit(_clustering_text(inst, solve_with_outliers(inst, args.l), args.format), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args)
    if args.outliers:
        res = exact_solve_outliers(inst, args.l)
    else:
        res = exact_solve(inst, args.l)
    extra = {"optimal_radius": res.radius, "optimal_diameter": res.diameter}
    _emit(_clustering_text(inst, res.clustering, args.format, extra), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "euclidean":
        if args.m is not None or args.extra_edges:
            raise UsageError("--m/--extra-edges apply to the gadget generator only")
        inst = random_euclidean(args.n, args.k, args.dim, args.seed, l=args.l)
    else:
        if args.m is None:
            raise UsageError("gadget generator needs --m")
        inst = gadget_from_3dm(random_3dm(args.m, args.extra_edges, args.seed, planted=not args.unplanted))
    _emit(inst.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_anonymize(args) -> int:
    if not args.qi or not args.sa:
        raise UsageError("anonymize needs --qi and --sa")
    if args.format == "csv" and args.out is None:
        raise UsageError("--format csv writes three files; give an output prefix with --out")
    cfg = anon.AnonymizeConfig(tuple(c.strip() for c in args.qi.split(",")), args.sa, args.l or 2,
                               args.normalize, args.mode)
    header, _ = anon.read_rows(args.csv)
    inst, rows = anon.ingest_csv(args.csv, cfg)
    clustering = anon.anonymize(inst, cfg)
    pub = anon.publish(inst, clustering, rows, cfg)
    files = anon.publication_files(pub, cfg, header, args.format)
    if args.out is None:
        sys.stdout.write(files[".json"])
    else:
        for suffix, text in files.items():
            Path(f"{args.out}{suffix}").write_text(text, encoding="utf-8")
    print(f"{len(pub.summary)} groups, {len(pub.table)} published rows, {len(pub.suppressed)} suppressed",
          file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="divclust", description="Diversity-constrained clustering and l-diverse anonymization.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance_cmd(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("instance", help="instance JSON (or CSV with --qi/--sa)")
        sp.add_argument("--l", type=int, help="minimum cluster size (defaults to the instance's l)")
        sp.add_argument("--qi", help="comma-separated QI columns for CSV input")
        sp.add_argument("--sa", help="SA column for CSV input")
        sp.add_argument("--normalize", choices=anon.NORMALIZATIONS, default="minmax")
        sp.add_argument("--validate", action="store_true", help="check the triangle inequality")
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.set_defaults(func=func)
        return sp

    instance_cmd("check", cmd_check, "feasibility check against the floor(n/l) bound")
    instance_cmd("solve", cmd_solve, "2-approximation")
    instance_cmd("solve2c", cmd_solve2c, "exact two-color solver")
    instance_cmd("solve-outliers", cmd_solve_outliers, "approximation with minimum outliers")
    orc = instance_cmd("oracle", cmd_oracle, "exact exponential-time solver (n <= 14)")
    orc.add_argument("--outliers", action="store_true", help="drop the minimum number of outliers first")

    gen = sub.add_parser("gen", help="generate an instance JSON")
    gen.add_argument("kind", choices=("euclidean", "gadget"))
    gen.add_argument("--n", type=int, default=10)
    gen.add_argument("--k", type=int, default=3)
    gen.add_argument("--dim", type=int, default=2)
    gen.add_argument("--l", type=int, default=2)
    gen.add_argument("--m", type=int, help="3DM side size (gadget)")
    gen.add_argument("--extra-edges", type=int, default=0)
    gen.add_argument("--unplanted", action="store_true")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_gen)

    an = sub.add_parser("anonymize", help="publish an l-diverse grouping of CSV microdata")
    an.add_argument("csv")
    an.add_argument("--qi", help="comma-separated numeric QI columns")
    an.add_argument("--sa", help="sensitive attribute column")
    an.add_argument("--l", type=int, default=2)
    an.add_argument("--mode", choices=anon.MODES, default="strict")
    an.add_argument("--normalize", choices=anon.NORMALIZATIONS, default="minmax")
    an.add_argument("--format", choices=("json", "csv"), default="json")
    an.add_argument("--out", help="output prefix (required for csv)")
    an.set_defaults(func=cmd_anonymize)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except InfeasibleInstance as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DivClustError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
