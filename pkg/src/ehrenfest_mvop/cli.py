"""Command-line interface.

Exit codes: 0 success, 1 usage or parameter error, 2 identity-check failure,
3 numeric-conditioning failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from contextlib import contextmanager

from ._numeric import DomainError, as_number, fmt
from .block_mvop import IllConditionedBlockError
from .checks import run_checks
from .ehrenfest import (ModelSpec, NotStochasticError, build, classical_eigenvalues, multiplicity_report, omega,
                        spectral_gap, spectrum)
from .figures import fig1_rows, fig2_rows, parse_grid, parse_k
from .simulation import SimConfig, empirical_vs_analytic, z_scores

EXIT_OK, EXIT_USAGE, EXIT_CHECK, EXIT_CONDITIONING = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(text):
    return [p.strip() for p in text.split(",") if p.strip()]


def model_from_args(args) -> ModelSpec:
    kind = args.model
    if kind is None:
        if args.qvec or args.kvec:
            kind = "multi_ball"
        elif args.k is not None:
            kind = "k_ball"
        elif args.q is not None:
            kind = "q_deformed"
        else:
            kind = "classical"
    if kind == "classical":
        return ModelSpec.classical(args.N)
    if kind == "q_deformed":
        return ModelSpec.q_deformed(args.N, args.q if args.q is not None else "1/2")
    if kind == "k_ball":
        ks = parse_k(args.k) if args.k else []
        if len(ks) != 1:
            raise UsageError("k_ball needs a single --k value")
        return ModelSpec.k_ball(args.N, ks[0])
    if not args.qvec or not args.kvec:
        raise UsageError("multi_ball needs --qvec and --kvec")
    return ModelSpec.multi_ball(args.N, _csv_list(args.qvec), [int(k) for k in _csv_list(args.kvec)])


@contextmanager
def _sink(path):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _emit(args, header, rows, payload=None):
    with _sink(args.out) as fh:
        if args.json:
            data = payload if payload is not None else [dict(zip(header, r)) for r in rows]
            json.dump(data, fh, indent=2)
            fh.write("\n")
        else:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)


def cmd_build(args):
    spec = model_from_args(args)
    M = build(spec, args.exact).entries
    rows = [(i, j, fmt(M[i, j])) for i in range(M.shape[0]) for j in range(M.shape[1])]
    payload = {"model": spec.kind, "N": spec.N, "matrix": [[fmt(v) for v in row] for row in M]}
    _emit(args, ("i", "j", "value"), rows, payload)
    return EXIT_OK


def cmd_spectrum(args):
    spec = model_from_args(args)
    rep = spectrum(spec, args.exact)
    cls = {j: c for c, members in enumerate(rep.multiplicity_classes) for j in members}
    lams = classical_eigenvalues(spec.N, args.exact)
    rows = [(j, fmt(lams[j]), fmt(v), cls[j]) for j, v in enumerate(rep.eigenvalues)]
    gaps = spectral_gap(rep)
    payload = {
        "model": spec.kind,
        "N": spec.N,
        "rows": [dict(zip(("j", "lambda_j", "theta_lambda_j", "multiplicity_class"), r)) for r in rows],
        "gap_excluding_one": fmt(gaps["gap_excluding_one"]),
        "gap_excluding_unimodular": fmt(gaps["gap_excluding_unimodular"]),
    }
    _emit(args, ("j", "lambda_j", "theta_lambda_j", "multiplicity_class"), rows, payload)
    return EXIT_OK


def cmd_multiplicity(args):
    N = args.N
    qs = [args.q] if args.q is not None else omega(N)
    header = ("i", "q", "in_omega", "predicted_doubles", "observed_doubles", "agrees")
    rows = []
    for q in qs:
        q = as_number(q, args.exact)
        rep = multiplicity_report(N, q)
        rows.append((rep.i if rep.i is not None else "", fmt(q), rep.in_omega, rep.predicted_doubles,
                     rep.observed_doubles, rep.agrees))
    _emit(args, header, rows)
    return EXIT_OK if all(r[-1] for r in rows) else EXIT_CHECK


def cmd_check(args):
    results = run_checks(args.N, args.q if args.q is not None else "1/2", args.exact, args.nmax)
    rows = [(r.name, r.status, "" if r.deviation is None else fmt(r.deviation), r.detail) for r in results]
    _emit(args, ("suite", "status", "max_deviation", "detail"), rows)
    return EXIT_CHECK if any(r.failed for r in results) else EXIT_OK


def cmd_simulate(args):
    spec = model_from_args(args)
    cfg = SimConfig(spec, args.start, args.steps, args.trials, args.seed)
    rep = empirical_vs_analytic(cfg, args.steps, args.workers)
    z = z_scores(rep.counts, rep.analytic)
    rows = [(s, int(rep.counts[s]), repr(float(rep.empirical[s])), repr(float(rep.analytic[s])), repr(float(z[s])))
            for s in range(spec.N + 1)]
    payload = {
        "model": spec.kind, "N": spec.N, "start": cfg.start, "n": rep.n, "trials": cfg.trials, "seed": cfg.seed,
        "tv": rep.tv, "z_max": rep.z_max,
        "rows": [dict(zip(("state", "count", "empirical", "analytic", "z"), r)) for r in rows],
    }
    _emit(args, ("state", "count", "empirical", "analytic", "z"), rows, payload)
    print(f"tv={rep.tv!r} z_max={rep.z_max!r}", file=sys.stderr)
    return EXIT_OK


def cmd_fig1(args):
    rows = fig1_rows(args.N, parse_grid(args.q_grid), args.exact)
    _emit(args, ("q", "j", "eigenvalue"), [(fmt(r.q), r.j, fmt(r.eigenvalue)) for r in rows])
    return EXIT_OK


def cmd_fig2(args):
    ks = parse_k(args.k or "1..40")
    rows = fig2_rows(args.N, args.q if args.q is not None else "0.3", ks, args.exact)
    out = [(r.k, r.j, fmt(r.eigenvalue), int(r.is_subdominant)) for r in rows]
    _emit(args, ("k", "j", "eigenvalue", "is_subdominant"), out)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--N", type=int, required=True, help="number of balls")
    common.add_argument("--q", help="deformation parameter, e.g. 2/5 or 0.3")
    common.add_argument("--k", help="ball count: int, list a,b,c or range a..b")
    common.add_argument("--qvec", help="multi-ball probabilities, comma separated")
    common.add_argument("--kvec", help="multi-ball ball counts, comma separated")
    common.add_argument("--model", choices=("classical", "q_deformed", "k_ball", "multi_ball"))
    common.add_argument("--backend", choices=("rational", "real"), default="rational")
    common.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    common.add_argument("--out", help="write output to this path")

    parser = _Parser(prog="ehrenfest-mvop", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    sub.add_parser("build", parents=[common], help="emit the transition matrix").set_defaults(func=cmd_build)
    sub.add_parser("spectrum", parents=[common], help="analytic spectrum").set_defaults(func=cmd_spectrum)
    sub.add_parser("multiplicity", parents=[common],
                   help="double-eigenvalue sweep over the critical q set").set_defaults(func=cmd_multiplicity)
    p = sub.add_parser("check", parents=[common], help="run the identity suites")
    p.add_argument("--nmax", type=int, default=10, help="largest power for the representation check")
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo vs analytic n-step distribution")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    p = sub.add_parser("fig1", parents=[common], help="eigenvalue curves over a q grid")
    p.add_argument("--q-grid", default="0:1:0.005", help="start:stop:step or comma list")
    p.set_defaults(func=cmd_fig1)
    sub.add_parser("fig2", parents=[common], help="multi-ball eigenvalues over k").set_defaults(func=cmd_fig2)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    args.exact = args.backend == "rational"
    try:
        return args.func(args)
    except IllConditionedBlockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING
    except (UsageError, DomainError, NotStochasticError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
