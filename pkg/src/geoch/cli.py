"""Command-line front end.

Every subcommand writes to stdout or ``--out``. Exit status is 0 on
success, 2 for invalid input and 3 when a numerical routine fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import _backend
from . import catalog as cat
from . import polytope as poly
from . import quantum as q
from . import violation as vio
from .errors import GeochError, NumericalError
from .events import lhv_extrema

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 2, 3

TABLE_INEQUALITIES = ("geometric_tripartite_ch", "three_site_ch")
TABLE_STATES = {
    "I": [("ghz", (2 * math.pi / 18,)), ("ghz", (3 * math.pi / 18,)),
          ("ghz", (4 * math.pi / 18,)), ("ghz", (math.pi / 4,))],
    "II": [("w", (math.pi / 6, math.pi / 4)), ("w", (math.pi / 2, math.pi / 4)),
           ("w", (math.pi / 4, math.pi / 4)), ("w", (math.acos(1 / math.sqrt(3)), math.pi / 4))],
}
SUBSPACES = {"ghz": q.GHZ_BASIS, "w-epr": q.W_EPR_BASIS}


class UsageError(GeochError, ValueError):
    pass


def parse_state(text: str) -> tuple[str, tuple[float, ...]]:
    """``ghz:<alpha>``, ``w:<theta>,<phi>``, ``epr`` or ``product``; angles in radians."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    try:
        params = tuple(float(x) for x in rest.split(",")) if rest.strip() else ()
    except ValueError:
        raise UsageError(f"bad state parameters in {text!r}") from None
    expected = {"ghz": 1, "w": 2, "epr": 0, "product": 0}
    if kind not in expected:
        raise UsageError(f"unknown state {text!r}; use ghz:<a>, w:<t>,<p>, epr or product")
    if len(params) != expected[kind]:
        raise UsageError(f"state {kind!r} takes {expected[kind]} parameter(s), got {len(params)}")
    if not all(math.isfinite(p) for p in params):
        raise UsageError("state parameters must be finite")
    return kind, params


def state_label(kind: str, params) -> str:
    return kind + (":" + ",".join(f"{p:.10f}" for p in params) if params else "")


def _unit(name: str):
    def check(text: str) -> float:
        try:
            x = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number") from None
        if not 0.0 <= x <= 1.0:
            raise argparse.ArgumentTypeError(f"{name} must lie in [0, 1]")
        return x
    return check


def _config(args) -> vio.OptimizerConfig:
    plane = None if args.plane == "none" else args.plane
    return vio.OptimizerConfig(starts=args.starts, tolerance=args.tolerance,
                               max_iterations=args.max_iterations, seed=args.seed, plane=plane)


def _meta(cfg: vio.OptimizerConfig) -> dict:
    return {**cfg.as_dict(), "backend": _backend.BACKEND}


def _fmt(x) -> str:
    return vio._fmt(None if x is None else float(x))


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- subcommands ------------------------------------------------------------

def cmd_catalog(args) -> str:
    names = [args.name] if args.name else list(cat.NAMES)
    items = []
    for name in names:
        if args.form == "named":
            item = cat.make_named(name)
        elif args.form == "probability":
            item = cat.make_probability(name)
        elif args.form == "correlation":
            item = cat.to_correlation_form(cat.make_separation(name))
        else:
            item = cat.to_eberhard(cat.make_probability(name))
        items.append(item.to_json())
    return _dumps(items[0] if args.name else items)


def cmd_lhv(args) -> str:
    item = cat.make_named(args.name)
    space = item.scenario.space()
    if isinstance(item, cat.SeparationInequality):
        lo, hi = lhv_extrema(item.expression(), space)
        bound, upper, ok, form = Fraction(0), None, lo >= 0, "separation"
    else:
        lo, hi, ok = poly.validate(item)
        bound, upper, form = item.lower_bound, item.upper_bound, "probability"
    out = {"name": item.name, "form": form, "points": space.size,
           "min": cat.frac_str(lo), "max": cat.frac_str(hi), "lower_bound": cat.frac_str(bound),
           "upper_bound": None if upper is None else cat.frac_str(upper), "valid": bool(ok)}
    return _dumps(out)


def cmd_facet(args) -> str:
    ineq = cat.make_probability(args.name)
    rep = poly.tightness(ineq, args.bound)
    return _dumps({"name": ineq.name, "bound": args.bound, "dimension": ineq.dimension, **rep.to_json()})


def cmd_vcrit(args) -> str:
    cfg = _config(args)
    kind, params = parse_state(args.state)
    ineq = cat.make_probability(args.name)
    rep = vio.violation_report(ineq, q.state_vector(kind, params), args.eta, cfg,
                               state_label(kind, params))
    rep.config = _meta(cfg)
    if args.format == "csv":
        return _csv(["inequality", "state", "eta", "min_expectation", "v_crit", "robustness"],
                    [[rep.inequality, rep.state, _fmt(rep.eta), _fmt(rep.min_expectation),
                      _fmt(rep.v_crit), _fmt(rep.robustness)]])
    return rep.dumps()


def _efficiency_target(args):
    chosen = [x for x in (args.state, args.subspace, args.full or None) if x]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --state, --subspace, --full")
    if args.state:
        kind, params = parse_state(args.state)
        return q.state_vector(kind, params), state_label(kind, params)
    if args.subspace:
        return ("subspace", SUBSPACES[args.subspace]), f"subspace:{args.subspace}"
    return "full", "full"


def cmd_etacrit(args) -> str:
    cfg = _config(args)
    ineq = cat.make_probability(args.name)
    target, label = _efficiency_target(args)
    res = vio.critical_efficiency(ineq, target, cfg)
    if args.format == "csv":
        return _csv(["inequality", "target", "eta_crit", "violated"],
                    [[ineq.name, label, _fmt(res.eta_crit), int(res.violated)]])
    scan = [[_round(e), f] for e, f in res.scan]
    return _dumps({"inequality": ineq.name, "target": label, "eta_crit": res.eta_crit,
                   "violated": res.violated, "resolution": 1e-4, "scan": scan,
                   "optimizer": _meta(cfg)})


def _round(x: float) -> float:
    return float(f"{x:.12g}")


def _grid(start: float, stop: float, step: float) -> list[float]:
    if step <= 0:
        raise UsageError("--step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9))
    if n < 0:
        raise UsageError("--stop must not be below --start")
    return [round(start + k * step, 12) for k in range(n + 1)]


def cmd_sweep(args) -> str:
    cfg = _config(args)
    ineq = cat.make_probability(args.name)
    kind, params = parse_state(args.state)
    rows = vio.sweep(ineq, kind, params, args.axis, _grid(args.start, args.stop, args.step), cfg,
                     eta=args.eta)
    if args.format == "json":
        return _dumps({"inequality": ineq.name, "state": state_label(kind, params), "axis": args.axis,
                       "rows": [[r.axis, r.min_expectation, r.v_crit, r.robustness] for r in rows],
                       "optimizer": _meta(cfg)})
    return vio.sweep_csv(rows)


def violation_table(which: str, cfg: vio.OptimizerConfig) -> list[list[str]]:
    """Rows ``type, state, n, v_crit, eta_crit`` for Table I (GHZ) or II (W)."""
    rows = []
    for name in TABLE_INEQUALITIES:
        ineq = cat.make_probability(name)
        for kind, params in TABLE_STATES[which]:
            psi = q.state_vector(kind, params)
            rep = vio.violation_report(ineq, psi, 1.0, cfg)
            eff = vio.critical_efficiency(ineq, psi, cfg)
            rows.append([name, state_label(kind, params), _fmt(rep.robustness), _fmt(rep.v_crit),
                         _fmt(eff.eta_crit)])
    return rows


def vertex_table(which: str) -> tuple[list[str], list[tuple[int, ...]]]:
    """Saturating vertices of the tripartite inequality, lower (III) or upper (IV) bound."""
    ineq = cat.make_probability("geometric_tripartite_ch")
    header = [ineq.scenario.coordinate_label(c) for c in ineq.coordinates]
    return header, poly.saturating_vertices(ineq, "lower" if which == "III" else "upper")


def cmd_tables(args) -> str:
    which = args.which
    if which in ("I", "II"):
        cfg = _config(args)
        header = ["type", "state", "n", "v_crit", "eta_crit", "starts", "seed"]
        rows = [r + [cfg.starts, cfg.seed] for r in violation_table(which, cfg)]
        return _csv(header, rows)
    header, rows = vertex_table(which)
    return _csv(header, rows)


def cmd_simulate(args) -> str:
    cfg = _config(args)
    kind, params = parse_state(args.state)
    ineq = cat.make_probability(args.name)
    counts_form = cat.to_eberhard(ineq)
    psi = q.state_vector(kind, params)
    settings, f, _ = vio.min_expectation(ineq, psi, args.eta, cfg)
    rho = q.density(psi, args.visibility)
    tuples = sorted(counts_form.by_setting())
    table = q.sample_counts(rho, settings, args.eta, args.trials, args.seed, tuples)
    exact = q.joint_probabilities(rho, settings, args.eta, ineq)
    prob_value = float(sum(float(c) * exact[coord] for coord, c in ineq.terms().items()))
    out = table.to_json()
    out.update({
        "inequality": ineq.name,
        "state": state_label(kind, params),
        "visibility": args.visibility,
        "probability_value": prob_value,
        "count_value": counts_form.value(table.as_mapping()),
        "count_value_per_trial": counts_form.value(table.as_mapping()) / args.trials,
        "optimizer": _meta(cfg),
    })
    return _dumps(out)


COMMANDS = {
    "catalog": cmd_catalog, "lhv": cmd_lhv, "facet": cmd_facet, "vcrit": cmd_vcrit,
    "etacrit": cmd_etacrit, "sweep": cmd_sweep, "tables": cmd_tables, "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoch", description="Bell inequalities from event separations: catalog, "
        "polytope checks, optimal violations and count simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json",)):
        p.add_argument("--out", help="write here instead of stdout")
        p.add_argument("--format", choices=fmt, default=fmt[0])

    def optimizer(p):
        g = p.add_argument_group("optimizer")
        g.add_argument("--starts", type=int, default=64, help="random starts (default 64)")
        g.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
        g.add_argument("--tolerance", type=float, default=1e-8, help="objective tolerance (default 1e-8)")
        g.add_argument("--max-iterations", type=int, default=2000)
        g.add_argument("--plane", choices=("none", "xy", "xz"), default="none",
                       help="confine settings to a great circle of the Bloch sphere")

    names = cat.NAMES
    p = sub.add_parser("catalog", help="export inequalities as JSON")
    p.add_argument("--name", choices=names)
    p.add_argument("--form", choices=("named", "probability", "correlation", "eberhard"), default="named")
    common(p)

    p = sub.add_parser("lhv", help="exact extrema over deterministic assignments")
    p.add_argument("--name", choices=names, required=True)
    common(p)

    p = sub.add_parser("facet", help="saturating vertices and exact rank")
    p.add_argument("--name", choices=names, required=True)
    p.add_argument("--bound", choices=("lower", "upper"), default="lower")
    common(p)

    p = sub.add_parser("vcrit", help="optimal violation and critical visibility")
    p.add_argument("--name", choices=names, required=True)
    p.add_argument("--state", required=True, help="ghz:<a> | w:<t>,<p> | epr | product (radians)")
    p.add_argument("--eta", type=_unit("eta"), default=1.0)
    optimizer(p)
    common(p, ("json", "csv"))

    p = sub.add_parser("etacrit", help="critical detection efficiency")
    p.add_argument("--name", choices=names, required=True)
    p.add_argument("--state")
    p.add_argument("--subspace", choices=sorted(SUBSPACES))
    p.add_argument("--full", action="store_true", help="lowest eigenvalue over the whole space")
    optimizer(p)
    common(p, ("json", "csv"))

    p = sub.add_parser("sweep", help="robustness along eta or alpha")
    p.add_argument("--name", choices=names, required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--axis", choices=("eta", "alpha"), default="eta")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.02)
    p.add_argument("--eta", type=_unit("eta"), default=1.0, help="fixed eta for the alpha axis")
    optimizer(p)
    common(p, ("csv", "json"))

    p = sub.add_parser("tables", help="reproduce Tables I-IV as CSV")
    p.add_argument("which", choices=("I", "II", "III", "IV"))
    optimizer(p)
    common(p, ("csv",))

    p = sub.add_parser("simulate", help="sample coincidence counts at optimal settings")
    p.add_argument("--name", choices=names, required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--eta", type=_unit("eta"), default=1.0)
    p.add_argument("--visibility", type=_unit("visibility"), default=1.0)
    p.add_argument("--trials", type=int, default=100_000)
    optimizer(p)
    common(p)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        text = COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"geoch: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (GeochError, ValueError, KeyError) as exc:
        print(f"geoch: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
