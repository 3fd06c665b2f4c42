"""Command-line interface: certify, compare, vpfit, gen, sample-lb, normmax.

All outputs are machine readable (JSON, or CSV where a table makes sense) and
byte-identical across runs with the same flags and seed.  Timing fields are
only emitted with --timings since they are excluded from the determinism
guarantee.  Exit codes: 0 success, 2 usage or input error, 3 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .errors import InternalInvariantError, ZonolipError
from .netio import gen_random_net, load_network, sampled_lower_bound, save_network
from .normmax import METHOD_ALIASES, run_l1max
from .propagate import DomainChoice, zlip
from .sets import Hyperbox, Zonotope
from .vpfit import MulBounds, vp_fit, vp_fit_mul

_CONFIG_ORDER = ("ZZ", "HH", "HZ", "ZH")


class InputError(ZonolipError):
    code = "input"


def _load_vector(spec: str, what: str) -> np.ndarray:
    """Accept inline JSON (starts with '[') or a path to a JSON list."""
    text = spec.strip()
    if not text.startswith("["):
        try:
            with open(spec, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"{what}: cannot read file {spec!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON: {exc}") from exc
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 1:
        raise InputError(f"{what}: expected a flat list of numbers")
    return arr


def _region(center_spec: str, radius_spec: str) -> Hyperbox:
    center = _load_vector(center_spec, "center")
    try:
        radius = np.full(center.shape, float(radius_spec))
    except ValueError:
        radius = _load_vector(radius_spec, "radius")
    if not np.isfinite(center).all() or not np.isfinite(radius).all():
        raise InputError("center and radius must be finite")
    if radius.size and radius.min() < 0.0:
        raise InputError("radius must be nonnegative")
    if radius.shape != center.shape:
        raise InputError("radius vector length does not match center")
    return Hyperbox(center, radius)


def _emit(text: str) -> None:
    sys.stdout.write(text)
    if not text.endswith("\n"):
        sys.stdout.write("\n")


def _emit_json(doc) -> None:
    _emit(json.dumps(doc, indent=2))


def _cmd_certify(args) -> int:
    net = load_network(args.model)
    region = _region(args.center, args.radius)
    domain = DomainChoice(args.forward, args.backward)
    report = zlip(net, region, domain, norm_method=args.norm, budget=args.budget)
    doc = report.to_dict(include_timing=args.timings)
    doc["seed"] = args.seed
    if args.format == "csv":
        cols = ["bound", "norm_method", "forward", "backward"]
        vals = [repr(doc["bound"]), doc["norm_method"],
                report.domain.forward, report.domain.backward]
        if args.timings:
            cols.append("wall_time_seconds")
            vals.append(repr(doc["wall_time_seconds"]))
        _emit(",".join(cols) + "\n" + ",".join(vals))
    else:
        _emit_json(doc)
    return 0


def _cmd_compare(args) -> int:
    net = load_network(args.model)
    region = _region(args.center, args.radius)
    labels = [s.strip().upper() for s in args.configs.split(",") if s.strip()]
    for lab in labels:
        if lab not in _CONFIG_ORDER:
            raise InputError(f"unknown configuration label {lab!r}")
    # fixed evaluation order regardless of how the flags were spelled
    labels = [lab for lab in _CONFIG_ORDER if lab in labels]
    rows = []
    bounds = {}
    for lab in labels:
        t0 = time.monotonic()
        report = zlip(net, region, DomainChoice.from_label(lab),
                      norm_method=args.norm, budget=args.budget)
        bounds[lab] = report.bound
        rows.append({"config": lab, "bound": report.bound,
                     "time_seconds": time.monotonic() - t0})
    t0 = time.monotonic()
    lb = sampled_lower_bound(net, region, args.lb_samples, args.seed)
    rows.append({"config": "sampled_lb", "bound": lb,
                 "time_seconds": time.monotonic() - t0})
    zz = bounds.get("ZZ")
    for row in rows:
        row["ratio_to_ZZ"] = (row["bound"] / zz) if zz else None
    if args.format == "csv":
        cols = ["config", "bound", "ratio_to_ZZ"]
        if args.timings:
            cols.append("time_seconds")
        lines = [",".join(cols)]
        for row in rows:
            cells = [row["config"], repr(row["bound"]),
                     "" if row["ratio_to_ZZ"] is None else repr(row["ratio_to_ZZ"])]
            if args.timings:
                cells.append(repr(row["time_seconds"]))
            lines.append(",".join(cells))
        _emit("\n".join(lines))
    else:
        if not args.timings:
            for row in rows:
                del row["time_seconds"]
        _emit_json({"rows": rows})
    return 0


def _cmd_vpfit(args) -> int:
    if args.operator == "mul":
        if args.xlo is None or args.xhi is None:
            raise InputError("mul needs four numbers: lz uz lx ux")
        fit = vp_fit_mul(MulBounds(args.l, args.u, args.xlo, args.xhi))
    else:
        fit = vp_fit(args.operator, args.l, args.u)
    _emit_json({"slope": fit.slope, "intercept": fit.intercept,
                "half_altitude": fit.half_altitude})
    return 0


def _cmd_gen(args) -> int:
    try:
        widths = [int(w) for w in args.widths.split(",")]
    except ValueError as exc:
        raise InputError(f"bad widths list {args.widths!r}") from exc
    net = gen_random_net(widths, args.nonlin, weight_scale=args.scale, seed=args.seed)
    save_network(net, args.out)
    _emit_json({"written": args.out, "input_dim": net.input_dim,
                "output_dim": net.output_dim})
    return 0


def _cmd_sample_lb(args) -> int:
    net = load_network(args.model)
    region = _region(args.center, args.radius)
    lb = sampled_lower_bound(net, region, args.n, args.seed)
    _emit_json({"lower_bound": lb})
    return 0


def _cmd_normmax(args) -> int:
    try:
        with open(args.zonotope, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read zonotope file: {exc}") from exc
    if not isinstance(doc, dict) or "center" not in doc or "generators" not in doc:
        raise InputError('zonotope file must contain "center" and "generators"')
    center = np.asarray(doc["center"], dtype=np.float64)
    gens = np.asarray(doc["generators"], dtype=np.float64)
    if gens.size == 0:
        gens = np.zeros((center.shape[0], 0))
    z = Zonotope(center, gens)
    result = run_l1max(z, METHOD_ALIASES[args.method])
    witness = None if result.witness is None else [float(v) for v in result.witness]
    _emit_json({"value": result.value, "method": result.method, "witness": witness})
    return 0


def _add_region_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, help="model file (zonolip-net/1 JSON)")
    p.add_argument("--center", required=True,
                   help="region center: inline JSON list or path to one")
    p.add_argument("--radius", required=True,
                   help="region radius: scalar, or path to a per-coordinate JSON list")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zonolip",
        description="Certified local Lipschitz bounds via set propagation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="compute a certified Lipschitz upper bound")
    _add_region_flags(p)
    p.add_argument("--forward", choices=("box", "zono"), default="zono")
    p.add_argument("--backward", choices=("box", "zono"), default="zono")
    p.add_argument("--norm", choices=("box", "lp", "exact"), default="lp")
    p.add_argument("--budget", type=int, default=None,
                   help="generator budget (default: 4x layer width)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timing (not deterministic)")
    p.set_defaults(fn=_cmd_certify)

    p = sub.add_parser("compare", help="run several domain configurations")
    _add_region_flags(p)
    p.add_argument("--configs", default=",".join(_CONFIG_ORDER),
                   help="comma list drawn from ZZ,HH,HZ,ZH")
    p.add_argument("--norm", choices=("box", "lp", "exact"), default="lp")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lb-samples", type=int, default=1000,
                   help="samples for the lower-bound reference row")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("vpfit", help="print a vertical band fit as JSON")
    p.add_argument("operator", choices=("relu", "abs", "tanh", "sigmoid", "mul"))
    p.add_argument("l", type=float)
    p.add_argument("u", type=float)
    p.add_argument("xlo", type=float, nargs="?", default=None)
    p.add_argument("xhi", type=float, nargs="?", default=None)
    p.set_defaults(fn=_cmd_vpfit)

    p = sub.add_parser("gen", help="generate a random network model file")
    p.add_argument("--widths", required=True, help="comma list, input through output")
    p.add_argument("--nonlin", choices=("relu", "tanh", "sigmoid"), default="relu")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("sample-lb", help="sampled lower bound on the Lipschitz constant")
    _add_region_flags(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_sample_lb)

    p = sub.add_parser("normmax", help="maximal l1 norm over a zonotope file")
    p.add_argument("--zonotope", required=True,
                   help='JSON file {"center": [...], "generators": [[...], ...]}')
    p.add_argument("--method", choices=("box", "lp", "exact"), default="lp")
    p.set_defaults(fn=_cmd_normmax)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InternalInvariantError as exc:
        print(f"internal error [{exc.code}]: {exc}", file=sys.stderr)
        return 3
    except ZonolipError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error [input]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
