"""
Command-line entry point.

Energies cross the command line in picojoules and distances in meters.
Exit codes: 0 success, 1 domain error, 2 usage error, 3 failed catalog check.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass

from . import __version__, advantage, catalog, gravity, placement
from .energy import PJ, TechProfile, balanced_separation, disjunction_constant
from .errors import DomainError
from .scenario import load_scenario

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_CLAIMS = 3


@dataclass
class RunRecord:
    subcommand: str
    params: dict
    seed: int
    version: str
    output_digest: str

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


class _Usage(Exception):
    pass


def _floats(text, n, what):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise _Usage(f"{what} must be {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise _Usage(f"{what} must be {n} comma-separated numbers, got {text!r}")
    return vals


def _region(text):
    try:
        lo, hi = text.split(":")
    except ValueError:
        raise _Usage(f"--region must look like x0,y0,z0:x1,y1,z1, got {text!r}") from None
    return _floats(lo, 3, "--region corner"), _floats(hi, 3, "--region corner")


def _fmt(x):
    return f"{x:.6g}"


def _profile_from_args(args):
    if args.profile:
        return load_scenario(args.profile).profile
    missing = [f for f in ("e_compute_pj", "alpha", "beta") if getattr(args, f) is None]
    if missing:
        raise _Usage("need --profile or all of --e-compute-pj, --alpha, --beta")
    return TechProfile("cli", args.e_compute_pj * PJ, args.alpha, args.beta,
                       bits_per_access=args.bits)


def cmd_gd(args):
    if args.profile:
        if args.e_move_pj is not None or args.e_compute_pj is not None:
            raise _Usage("use either --profile or --e-move-pj/--e-compute-pj")
        g = load_scenario(args.profile).profile.disjunction_constant(d=args.d, per_bit=args.per_bit)
    else:
        if args.e_move_pj is None or args.e_compute_pj is None:
            raise _Usage("gd needs --e-move-pj and --e-compute-pj (or --profile)")
        g = disjunction_constant(args.e_move_pj * PJ, args.e_compute_pj * PJ)
    if args.format == "json":
        return json.dumps({"g_d": g, "unit": "dimensionless"}) + "\n", EXIT_OK
    if args.format == "csv":
        return f"g_d (dimensionless)\n{g:.2f}\n", EXIT_OK
    return f"{g:.2f}\n", EXIT_OK


def cmd_advantage(args):
    inputs = advantage.AdvantageInputs(args.gd, args.d, args.dmin, args.beta)
    rep = advantage.evaluate(inputs)
    if args.format == "json":
        return json.dumps(asdict(rep), sort_keys=True) + "\n", EXIT_OK
    lines = [
        f"g_d (dimensionless): {_fmt(rep.g_d)}",
        f"beta (dimensionless): {_fmt(rep.beta)}",
        f"d (m): {_fmt(inputs.d)}",
        f"d_min (m): {_fmt(inputs.d_min)}",
        f"r = d_min/d (dimensionless): {_fmt(rep.r)}",
        f"gamma (dimensionless): {rep.gamma:.2f}",
        f"bound (dimensionless): {rep.lower_bound:.2f}",
        f"condition: {str(rep.condition_holds).lower()}",
        f"bound_satisfied: {str(rep.bound_satisfied).lower()}",
    ]
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_sweep(args):
    rows = advantage.sweep(advantage.SweepRange.parse(args.gd_range),
                           advantage.SweepRange.parse(args.beta_range),
                           advantage.SweepRange.parse(args.r_range))
    if args.format == "json":
        return json.dumps([row._asdict() for row in rows]) + "\n", EXIT_OK
    return advantage.sweep_to_csv(rows), EXIT_OK


def cmd_field(args):
    scn = load_scenario(args.scenario)
    g_d = args.gd if args.gd is not None else scn.profile.disjunction_constant()
    beta = args.beta if args.beta is not None else scn.profile.beta
    samples = gravity.sample_grid(scn.objects, _region(args.region),
                                  _floats(args.resolution, 3, "--resolution"),
                                  g_d, beta, args.epsilon_d)
    if args.format == "json":
        return json.dumps([asdict(s) for s in samples]) + "\n", EXIT_OK
    return gravity.samples_to_csv(samples), EXIT_OK


def cmd_place(args):
    problem = load_scenario(args.scenario).placement_problem(seed=args.seed)
    if args.mode == "continuous":
        sol = placement.optimize_continuous(problem, max_iters=args.max_iters, tol=args.tol)
    else:
        sol = placement.optimize_discrete(problem)
    if args.format == "json":
        return sol.to_json(), EXIT_OK
    return sol.table(), EXIT_OK, sol.to_json()


def cmd_balance(args):
    profile = _profile_from_args(args)
    d = balanced_separation(profile)
    if args.format == "json":
        return json.dumps({"balanced_separation_m": d, "g_d_at_d_ref": profile.disjunction_constant()}) + "\n", EXIT_OK
    return (f"balanced separation (m): {d:.6g}\n"
            f"g_d at d_ref={_fmt(profile.d_ref)} m (dimensionless): {profile.disjunction_constant():.2f}\n",
            EXIT_OK)


def cmd_catalog(args):
    if args.action == "list":
        if args.format == "json":
            return catalog.records_to_json(), EXIT_OK
        if args.format == "csv":
            return catalog.records_to_csv(), EXIT_OK
        return catalog.records_table(), EXIT_OK
    if args.action == "export":
        if args.format == "json":
            return catalog.records_to_json(), EXIT_OK
        return catalog.records_to_csv(), EXIT_OK
    results = catalog.check_claims()
    code = EXIT_OK if catalog.all_passed(results) else EXIT_CLAIMS
    if args.format == "json":
        rows = [{"label": r.label, "expected": list(r.expected),
                 "derived": None if r.derived is None else list(r.derived),
                 "rel_error": r.rel_error, "status": r.status, "detail": r.detail} for r in results]
        return json.dumps(rows, indent=2) + "\n", code
    return catalog.results_table(results), code


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="recorded for reproducibility")
    common.add_argument("--output", "-o", help="write output here instead of stdout")
    common.add_argument("--format", choices=("text", "csv", "json"), default=None)
    common.add_argument("--record", help="write a JSON run record to this path")

    parser = argparse.ArgumentParser(prog="datagravity", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("gd", parents=[common], help="disjunction constant from two energies")
    p.add_argument("--e-move-pj", type=float)
    p.add_argument("--e-compute-pj", type=float)
    p.add_argument("--profile", help="scenario file providing the technology profile")
    p.add_argument("--d", type=float, help="distance in m (default: profile d_ref)")
    p.add_argument("--per-bit", action="store_true", help="move one bit instead of one access")
    p.set_defaults(func=cmd_gd)

    p = sub.add_parser("advantage", parents=[common], help="co-location advantage at one point")
    p.add_argument("--gd", type=float, required=True)
    p.add_argument("--d", type=float, required=True, help="separated distance, m")
    p.add_argument("--dmin", type=float, required=True, help="co-located distance, m")
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_advantage)

    p = sub.add_parser("sweep", parents=[common], help="tabulate gamma and bound as CSV")
    p.add_argument("--gd-range", required=True, help="lo:hi:n[:log]")
    p.add_argument("--beta-range", required=True, help="lo:hi:n[:log]")
    p.add_argument("--r-range", required=True, help="lo:hi:n[:log]")
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("field", parents=[common], help="sample the gravity field on a grid")
    p.add_argument("--scenario", required=True)
    p.add_argument("--region", required=True, help="x0,y0,z0:x1,y1,z1 in m")
    p.add_argument("--resolution", required=True, help="nx,ny,nz")
    p.add_argument("--gd", type=float, help="override the profile's G_d")
    p.add_argument("--beta", type=float, help="override the profile's beta")
    p.add_argument("--epsilon-d", type=float, default=gravity.EPSILON_D)
    p.set_defaults(func=cmd_field, default_format="csv")

    p = sub.add_parser("place", parents=[common], help="optimize kernel placement")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=("continuous", "discrete"), default="continuous")
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_place)

    p = sub.add_parser("catalog", parents=[common], help="published measurements and G_d checks")
    p.add_argument("action", choices=("list", "check", "export"))
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("balance", parents=[common], help="separation where movement equals compute")
    p.add_argument("--profile", help="scenario file providing the technology profile")
    p.add_argument("--e-compute-pj", type=float)
    p.add_argument("--alpha", type=float, help="J / (bit * m**beta)")
    p.add_argument("--beta", type=float)
    p.add_argument("--bits", type=int, default=64, help="bits per access")
    p.set_defaults(func=cmd_balance)
    return parser


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.format is None:
        args.format = getattr(args, "default_format", "text")

    try:
        result = args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"datagravity: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, OSError) as exc:
        print(f"datagravity: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    text, code = result[0], result[1]
    if args.output:
        # place: the file gets the JSON solution while the table goes to stdout
        if len(result) > 2:
            _write(args.output, result[2])
            sys.stdout.write(text)
            text = result[2]
        else:
            _write(args.output, text)
    else:
        sys.stdout.write(text)

    if args.record:
        params = {k: v for k, v in sorted(vars(args).items())
                  if k not in ("func", "record", "default_format")}
        rec = RunRecord(args.command, params, args.seed, __version__,
                        hashlib.sha256(text.encode()).hexdigest())
        _write(args.record, rec.to_json())
    return code


if __name__ == "__main__":
    sys.exit(main())
