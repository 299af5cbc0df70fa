"""Command-line entry point.

Exit status is 0 when every verdict passes, 1 when a verification fails
and 2 on usage errors. ``--config FILE`` reads an INI file with one
section per subcommand; its keys are spelled like the long flags and are
applied before the command line, so explicit flags win. Reports go to
``--out`` when given, else under ``$SAMETRIC_OUT`` when that is set.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import kernels
from .badpoints import Gauge, default_family, detect_bad, detect_r_bad, estimate_gauge, gauge_samples, ray_family
from .compactify import CompactifyOptions, compactify_strip
from .disk import ORIGIN, DiskPoint, check_condition_star, check_condition_starstar, disk_point
from .holeblowup import HoleBlowUp, dyadic_t_list
from .isometry import IsometryWitness, boundary_grid, phi_disk_map, verify_isometry, winding_csv, winding_profile
from .levelset import SvgSpec, emit_csv, emit_svg, marching_squares, plateau_detect, sample_grid, slope_classify
from .metric import SampleConfig, check_boundedness, check_metric_axioms
from .registry import SPACES, get_space
from .scalar import Mode, fmt, fmt_point, rational, to_mode

SUBCOMMANDS = ("levelset", "verify-metric", "verify-isometry", "verify-conditions", "badpoints", "gauge", "blowup",
               "compactify", "winding")
OUT_ENV = "SAMETRIC_OUT"


class UsageError(Exception):
    pass


def _numbers(text: str, mode: Mode = Mode.EXACT) -> list:
    try:
        return [to_mode(part, mode) for part in text.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse numbers from {text!r}") from exc


def _point(text: str, mode: Mode = Mode.EXACT) -> tuple:
    if text.strip().lower() == "origin":
        return ORIGIN if mode is Mode.EXACT else DiskPoint(0.0, 0.0)
    vals = _numbers(text, mode)
    if len(vals) != 2:
        raise UsageError(f"expected two comma-separated numbers, got {text!r}")
    return tuple(vals)


def _report_dir(args, sub: str) -> Path | None:
    if getattr(args, "out", None):
        return Path(args.out)
    env = os.environ.get(OUT_ENV)
    return Path(env) / sub if env else None


def _write(directory: Path | None, name: str, text: str) -> None:
    if directory is None:
        return
    directory.mkdir(parents=True, exist_ok=True)
    (directory / name).write_text(text)


def _cfg(args, count: int) -> SampleConfig:
    mode = Mode(args.mode)
    tol = args.tol if args.tol is not None else (None if mode is Mode.EXACT else 1e-12)
    return SampleConfig(seed=args.seed, count=count, mode=mode, tol=tol, workers=args.workers)


# --------------------------------------------------------------------------
# subcommands


def cmd_verify_metric(args) -> int:
    desc = get_space(args.space)
    mode = Mode(args.mode)
    if mode is Mode.EXACT and not desc.exact_capable:
        raise UsageError(f"{desc.name} cannot be evaluated exactly; use --mode float")
    cfg = _cfg(args, args.samples)
    rep = check_metric_axioms(desc, cfg)
    sup = check_boundedness(desc, cfg)
    out = _report_dir(args, "verify-metric")
    _write(out, f"axioms_{desc.name}.csv", rep.to_csv())
    print(f"{desc.name}: {sum(rep.checked.values())} checks, {rep.n_violations} violations, sampled sup {fmt(sup)}")
    return 0 if rep.ok else 1


def cmd_verify_isometry(args) -> int:
    cfg = _cfg(args, args.samples)
    points = boundary_grid() if args.grid else [disk_point(*_point(args.b0))]
    status = 0
    out = _report_dir(args, "verify-isometry")
    for b0 in points:
        w = IsometryWitness(b0, reflect=args.reflect)
        rep = verify_isometry(w, cfg)
        fixed = phi_disk_map(w, DiskPoint(rational(1), rational(0))) == w.b0
        _write(out, f"isometry_{fmt(b0[1]).replace('/', '_')}.csv", rep.to_csv())
        print(f"b0=({fmt_point(b0)}): {rep.n_violations} violations, Phi(1,0)=b0: {fixed}")
        if not (rep.ok and fixed):
            status = 1
    return status


def cmd_verify_conditions(args) -> int:
    status = 0
    out = _report_dir(args, "verify-conditions")
    if args.which in ("star", "both"):
        rep = check_condition_star(_cfg(args, args.samples), twisted=args.twisted)
        _write(out, f"{rep.name}.csv", rep.to_csv())
        print(f"{rep.name}: {sum(rep.checked.values())} checks, {rep.n_violations} violations")
        status |= 0 if rep.ok else 1
    if args.which in ("starstar", "both"):
        t_list = [rational(1) / 2**i for i in range(2, args.depth + 1)]
        for rp in _numbers(args.rprime):
            crep = check_condition_starstar(DiskPoint(rp, rational(0)), t_list, twisted=args.twisted, seed=args.seed)
            ok = crep.exact_zero_below(rp / 2)
            tag = "twisted" if args.twisted else "plain"
            _write(out, f"starstar_{tag}_{fmt(rp).replace('/', '_')}.csv", crep.to_csv())
            print(f"condition_starstar[{tag}] r'={fmt(rp)}: exact zero below r'/2: {ok}")
            status |= 0 if ok else 1
    return status


def _family_for(desc, point, kind: str):
    if kind == "rays":
        return ray_family(point, [k * math.pi / 8 for k in range(-3, 4)])
    return default_family(point)


def cmd_badpoints(args) -> int:
    desc = get_space(args.space)
    point = _point(args.point, Mode.FLOAT)
    family = _family_for(desc, point, args.family)
    t_list = dyadic_t_list(2, args.depth)
    rep = detect_bad(desc, point, family, t_list, workers=args.workers)
    if args.gauge == "t":
        detect_r_bad(desc, point, family, Gauge.identity(), t_list, base=rep)
    out = _report_dir(args, "badpoints")
    _write(out, "badness.csv", rep.to_csv())
    print(f"point {point!r}: {rep.verdict}")
    if rep.witness is not None:
        print(f"witness {rep.witness_labels()} limit {rep.limit!r}")
    for g, v in rep.r_bad.items():
        print(f"{g}-bad: {v} (ratio sup {rep.ratio_sup[g]!r})")
    return 0


def cmd_gauge(args) -> int:
    desc = get_space(args.space)
    point = _point(args.point, Mode.FLOAT)
    t_list = dyadic_t_list(2, args.depth)
    rep = detect_bad(desc, point, _family_for(desc, point, args.family), t_list)
    samples = gauge_samples(desc, rep, t_list)
    if not samples:
        print("no bad curve pairs; no gauge to estimate")
        return 1
    g = estimate_gauge(samples)
    ok = all(u > g(t) for t, u, _ in samples)
    out = _report_dir(args, "gauge")
    _write(out, "gauge.csv", g.to_csv())
    print(g.to_csv(), end="")
    print(f"samples={len(samples)} separated={ok}")
    return 0 if ok else 1


def cmd_blowup(args) -> int:
    center = _point(args.center)
    eps = _numbers(args.eps)[0]
    h = HoleBlowUp.point(center, eps)
    p = _point(args.point)
    q = h.inverse(p) if args.inverse else h.forward(p)
    print(fmt_point(q))
    return 0


def cmd_compactify(args) -> int:
    desc = get_space(args.space)
    opts = CompactifyOptions(eps=float(_numbers(args.eps)[0]), resolution=float(_numbers(args.resolution)[0]),
                             use_gauge=args.use_gauge, n_arc=args.arc, workers=args.workers)
    res = compactify_strip(desc, opts)
    out = _report_dir(args, "compactify")
    if out is not None:
        res.save(out)
    print(f"{desc.name}: bad set {res.bad_set}, verdict {res.verdict}")
    if res.diagnostic:
        print(res.diagnostic)
    return 0 if res.verdict == "extends" else 1


def cmd_winding(args) -> int:
    w = IsometryWitness(disk_point(*_point(args.b0)))
    xs = _numbers(args.x1)
    samples = winding_profile(w, xs)
    status = 0
    for s in samples:
        close = abs(s.half_turns_accumulated - s.half_turns_analytic) <= 1
        print(f"x1={s.x1!r}: {s.half_turns_analytic:.6g} half-turns (analytic), "
              f"{s.half_turns_accumulated:.6g} accumulated, within 1: {close}")
        status |= 0 if close else 1
    _write(_report_dir(args, "winding"), "winding.csv", winding_csv(samples))
    return status


def cmd_levelset(args) -> int:
    desc = get_space(args.space)
    mode = Mode.FLOAT
    base = _point(args.base, mode)
    if desc.make_point is not tuple:
        base = desc.make_point(*base)
    g = sample_grid(desc, base, args.grid)
    polys = []
    for v in _numbers(args.values, mode):
        lv = marching_squares(g, v)
        sc = slope_classify(lv)
        print(f"level {v!r}: {len(lv)} polylines, other-fraction {sc['other']:.4f}, "
              f"plateau fraction {plateau_detect(g, v, 1e-9):.4f}")
        polys.extend(lv)
    out = Path(args.out) if args.out else None
    if out is None and os.environ.get(OUT_ENV):
        out = Path(os.environ[OUT_ENV]) / "levelset.svg"
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        emit_svg(polys, SvgSpec(region=g.region, title=f"{desc.name} levels around {args.base}"), out)
        if args.csv:
            emit_csv(g, args.csv)
        print(f"wrote {out}")
    return 0


# --------------------------------------------------------------------------
# parser


def _sampling(p: argparse.ArgumentParser, samples: int) -> None:
    p.add_argument("--samples", type=int, default=samples)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=[m.value for m in Mode], default="exact")
    p.add_argument("--tol", type=float, default=None, help="float-mode comparison tolerance")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sametric", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="INI file with one section per subcommand")
    ap.add_argument("--backend-info", action="store_true", help="print the active kernel backend and exit")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("levelset", help="render level sets of d(., base)")
    p.add_argument("--space", required=True, choices=sorted(SPACES))
    p.add_argument("--base", required=True, help="'origin' or 'x1,x2' (disk spaces: 'r,a')")
    p.add_argument("--values", required=True)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--out")
    p.add_argument("--csv", help="also write the sampled grid as CSV")
    p.set_defaults(func=cmd_levelset)

    p = sub.add_parser("verify-metric", help="sample the metric axioms")
    p.add_argument("--space", required=True, choices=sorted(SPACES))
    _sampling(p, 10000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_metric)

    p = sub.add_parser("verify-isometry", help="check the twisted-to-plain disk isometry")
    p.add_argument("--b0", default="1,0", help="boundary point 'r,a' with r = 1")
    p.add_argument("--grid", action="store_true", help="run all 16 boundary points a = k/8")
    p.add_argument("--reflect", action="store_true", help="use the orientation-reversing partner")
    _sampling(p, 10000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_isometry)

    p = sub.add_parser("verify-conditions", help="check the quotient and origin-limit conditions")
    p.add_argument("--which", choices=["star", "starstar", "both"], default="both")
    p.add_argument("--twisted", action="store_true")
    p.add_argument("--rprime", default="1/4,3/5,1")
    p.add_argument("--depth", type=int, default=20, help="smallest t is 2^-depth")
    _sampling(p, 10000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_conditions)

    for name, func, help_ in (("badpoints", cmd_badpoints, "probe a point for bad curve pairs"),
                              ("gauge", cmd_gauge, "estimate a separation gauge at a bad point")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--space", required=True, choices=sorted(SPACES))
        p.add_argument("--point", default="0,0")
        p.add_argument("--family", choices=["default", "rays"], default="default")
        p.add_argument("--depth", type=int, default=30)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out")
        if name == "badpoints":
            p.add_argument("--gauge", choices=["none", "t"], default="t")
        p.set_defaults(func=func)

    p = sub.add_parser("blowup", help="apply a point hole-blow-up or its inverse")
    p.add_argument("--center", default="0,0")
    p.add_argument("--eps", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("compactify", help="compactify a strip metric")
    p.add_argument("--space", required=True, choices=sorted(SPACES))
    p.add_argument("--eps", default="1/8")
    p.add_argument("--resolution", default="1/64")
    p.add_argument("--arc", type=int, default=128)
    p.add_argument("--use-gauge", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compactify)

    p = sub.add_parser("winding", help="half-turns of the image of a radius")
    p.add_argument("--b0", default="1,0")
    p.add_argument("--x1", required=True, help="comma-separated parameters in (0, 1]")
    p.add_argument("--out")
    p.set_defaults(func=cmd_winding)
    return ap


def _config_args(path: str, command: str, parser: argparse.ArgumentParser) -> list[str]:
    cp = configparser.ConfigParser()
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path!r}")
    if not cp.has_section(command):
        return []
    sub = parser._subparsers._group_actions[0].choices[command]  # noqa: SLF001
    store_true = {a.dest for a in sub._actions if isinstance(a, argparse._StoreTrueAction)}  # noqa: SLF001
    out = []
    for key, value in cp.items(command):
        flag = "--" + key.replace("_", "-")
        if key.replace("-", "_") in store_true:
            if cp.getboolean(command, key):
                out.append(flag)
        else:
            out += [flag, value]
    return out


def _inject_config(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    pos = next((i for i, a in enumerate(argv) if a in SUBCOMMANDS), None)
    if pos is None or not known.config:
        return argv
    return argv[: pos + 1] + _config_args(known.config, argv[pos], parser) + argv[pos + 1:]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _inject_config(argv, parser)
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sametric: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    if args.backend_info:
        print(kernels.BACKEND)
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (UsageError, KeyError, ValueError) as exc:
        print(f"sametric {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
