"""Command-line entry point.

Subcommands: `run` reproduces one convergence table, `compare-p1` dumps
the mixed vs Lagrange field comparison, `mesh-info` prints mesh counts.
Numeric output is printed with six decimals to match the tables.
"""

import argparse
import sys

from .experiments import (DEFAULT_LEVELS, DEFAULT_SIGMA_REF, EXAMPLES,
                          ExperimentConfig, ExperimentError, compare_p1,
                          predict_rate, run_example)
from .mesh import DomainSpec, boundary_loop, generate_structured
from .solver import SolverConfig


def _parse_levels(text):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("levels must be comma-separated integers") from exc


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mixedpoisson",
        description="Mixed RT0/DG0 solver for Poisson problems with rough "
                    "Dirichlet boundary data")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one convergence study and write its CSV table")
    run.add_argument("--example", required=True, choices=sorted(EXAMPLES))
    run.add_argument("--levels", type=_parse_levels, default=DEFAULT_LEVELS,
                     metavar="2,4,...", help="mesh levels n (h = sqrt(2)/n)")
    run.add_argument("--sigma-ref", type=int, default=DEFAULT_SIGMA_REF,
                     help="fine level for the flux reference; 0 skips sigma errors")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--solver", choices=["direct", "iterative"], default="direct")

    cmp_ = sub.add_parser("compare-p1", help="dump mixed vs P1 fields on one mesh")
    cmp_.add_argument("--domain", required=True, choices=["rect", "lshape"])
    cmp_.add_argument("--n", type=int, required=True)
    cmp_.add_argument("--alpha", type=float, required=True)
    cmp_.add_argument("--out", default=".")
    cmp_.add_argument("--solver", choices=["direct", "iterative"], default="direct")

    info = sub.add_parser("mesh-info", help="print mesh statistics")
    info.add_argument("--domain", required=True, choices=["rect", "lshape"])
    info.add_argument("--n", type=int, required=True)
    info.add_argument("--dump", metavar="FILE", help="write a plain-text mesh dump")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = ExperimentConfig(example=args.example, levels=args.levels,
                                   sigma_ref_n=args.sigma_ref, out_dir=args.out,
                                   solver=SolverConfig(method=args.solver))
            report = run_example(cfg)
            print(f"wrote {cfg.csv_path}")
            final = report.rows[-1]
            print(f"final level {final.level}: err_u={final.err_u:.6f}", end="")
            if final.rate_u is not None:
                print(f" rate_u={final.rate_u:.6f}", end="")
            print(f" (predicted rate {predict_rate(args.example):.6f})")
        elif args.command == "compare-p1":
            result = compare_p1(args.domain, args.n, args.alpha, out_dir=args.out,
                                solver=SolverConfig(method=args.solver))
            print(f"wrote {result.mixed_csv}")
            print(f"wrote {result.p1_csv}")
            print(f"max |u_h| near origin: mixed {result.mixed_max_near_origin:.6f}, "
                  f"P1 {result.p1_max_near_origin:.6f}")
        elif args.command == "mesh-info":
            domain = DomainSpec.from_name(args.domain)
            mesh = generate_structured(domain, args.n)
            loop = boundary_loop(mesh)
            print(f"domain {domain.kind}, level {mesh.level}, h={mesh.h:.6f}")
            print(f"vertices {mesh.num_vertices}, triangles {mesh.num_triangles}, "
                  f"edges {mesh.num_edges}, boundary edges {loop.size}")
            print(f"area {mesh.tri_areas.sum():.6f}, "
                  f"perimeter {mesh.edge_lengths[loop].sum():.6f}")
            if args.dump:
                with open(args.dump, "w") as fh:
                    mesh.dump(fh)
                print(f"wrote {args.dump}")
    except ExperimentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
