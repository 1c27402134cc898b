"""Command-line front end.

    ccc-rates gen --family xqam --m 32
    ccc-rates rate-sweep --u1 hqam:16 --u2 star:16 --snr-grid -10:30:5
    ccc-rates secrecy-sweep --u1 hqam:16 --u2 hqam:16 --snr-grid 0:20:2 --eve-offset-db -3
    ccc-rates sweep-theta --u1 psk:2 --u2 psk:2 --snr-db 40 --theta-grid 0:180:1 --angle-unit deg

User specs take the form ``family:M[:ringspec][@angle]`` where ringspec is
``radii[/points_per_ring[/phase_offsets]]`` (comma-separated lists) and
``@angle`` pre-rotates that user (in --angle-unit). ``file:PATH`` loads a
constellation JSON file.

Exit codes: 0 success, 2 argument or precondition error, 1 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import constellation as cst
from .channel import MCConfig, params_from_snr
from .errors import NumericalError, RatesError
from .mi import Method, rate_region_corner, secrecy_rates
from .optimizer import Objective, ThetaGrid, evaluate_objective, refine_rotation, sweep_rotation
from .oracle import (
    QuadratureConfig,
    gaussian_capacity_bound,
    quad_rate_region_corner,
    quad_secrecy_rates,
)

FAMILIES = ("qam", "xqam", "hqam", "star", "apsk", "psk", "point")
_ADMISSIBLE = {
    "qam": "4, 16, 64, 256, ... (even powers of two)",
    "xqam": "32, 128, 512, ... (2^(2k+1), k >= 2)",
    "hqam": "4, 9, 16, 25, 36, 49, 64, ... (perfect squares L^2, L >= 2)",
    "star": "multiples of 8",
    "apsk": "16 or 32 with default rings; any M with an explicit ring spec",
    "psk": "any M >= 1",
    "point": "1",
}


class UsageError(Exception):
    """Bad command-line input; reported with exit code 2."""


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_ring(text: str) -> cst.RingSpec:
    parts = text.split("/")
    radii = _floats(parts[0])
    counts = [int(v) for v in _floats(parts[1])] if len(parts) > 1 else None
    offsets = _floats(parts[2]) if len(parts) > 2 else ()
    if counts is None:
        counts = [8] * len(radii)
    return cst.RingSpec(tuple(radii), tuple(counts), tuple(offsets))


def build_constellation(family: str, m: int, ring: cst.RingSpec | None = None, hex_d: float = 1.0):
    """Raw (unnormalized) constellation for a CLI family name."""
    family = family.lower()
    try:
        if family == "qam":
            return cst.gen_square_qam(m)
        if family == "xqam":
            return cst.gen_cross_qam(m)
        if family == "hqam":
            return cst.gen_hex_qam(m, hex_d)
        if family == "star":
            return cst.gen_star_qam(m, ring)
        if family == "apsk":
            return cst.gen_apsk(m, ring)
        if family == "psk":
            return cst.gen_psk(m)
        if family == "point":
            if m != 1:
                raise cst.InvalidOrderError("point family has exactly one symbol")
            return cst.single_point()
    except (cst.InvalidOrderError, cst.InvalidSpecError) as exc:
        raise UsageError(f"{exc}; admissible orders for {family}: {_ADMISSIBLE[family]}") from exc
    raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def parse_user_spec(text: str, unit: str) -> cst.Constellation:
    """``family:M[:ringspec][@angle]`` or ``file:PATH`` -> normalized constellation."""
    spec, _, angle = text.partition("@")
    if spec.startswith("file:"):
        c = cst.Constellation.from_json(Path(spec[5:]).read_text())
    else:
        fields = spec.split(":")
        if len(fields) < 2:
            raise UsageError(f"user spec {text!r} must look like family:M[:ringspec][@angle]")
        try:
            m = int(fields[1])
        except ValueError:
            raise UsageError(f"order in {text!r} is not an integer") from None
        ring = _parse_ring(fields[2]) if len(fields) > 2 and fields[2] else None
        c = build_constellation(fields[0], m, ring)
    c = cst.normalize(c)
    if angle:
        c = cst.rotate(c, _to_rad(_floats(angle)[0], unit))
    return c


def _to_rad(x: float, unit: str) -> float:
    return math.radians(x) if unit == "deg" else x


def _from_rad(x: float, unit: str) -> float:
    return math.degrees(x) if unit == "deg" else x


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (stop inclusive) or a single value."""
    vals = [float(v) for v in text.split(":")]
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3 or not vals[2] > 0 or vals[1] < vals[0]:
        raise UsageError(f"grid {text!r} must be start:stop:step with step > 0 and stop >= start")
    start, stop, step = vals
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def parse_theta_grid(text: str | None, unit: str) -> np.ndarray:
    """``start:stop:step`` with stop exclusive, or a single angle."""
    if text is None:
        return ThetaGrid().angles()
    vals = [_to_rad(float(v), unit) for v in text.split(":")]
    if len(vals) == 1:
        return np.array(vals)
    if len(vals) != 3:
        raise UsageError(f"theta grid {text!r} must be start:stop:step")
    return ThetaGrid(*vals).angles()


@dataclass(frozen=True)
class RunContext:
    method: Method
    mc: MCConfig
    q: QuadratureConfig


def _context(args) -> RunContext:
    method = Method.QUADRATURE if args.method == "quad" else Method.MONTE_CARLO
    return RunContext(method, MCConfig(args.samples, args.seed), QuadratureConfig(nodes_per_dim=args.quad_nodes))


def _snr_grid(args) -> np.ndarray:
    if args.snr_grid is not None:
        return parse_grid(args.snr_grid)
    if args.snr_db is not None:
        return np.array([float(args.snr_db)])
    raise UsageError("give --snr-db or --snr-grid")


def _eve_offset(args, snr: float) -> float:
    offset = args.eve_offset_db if args.eve_snr_db is None else args.eve_snr_db - snr
    if offset > 0:
        raise UsageError(
            f"eavesdropper SNR exceeds the main SNR by {offset:g} dB; "
            "the degraded wiretap model needs an eve offset <= 0"
        )
    return offset


def _optimal_rotation(c1, c2, p, ctx: RunContext, objective: Objective, args) -> float:
    sweep = sweep_rotation(
        c1, c2, p, ctx.mc, objective, parse_theta_grid(args.theta_grid, args.angle_unit), method=ctx.method, q=ctx.q
    )
    return sweep.theta_opt


def cmd_gen(args) -> tuple[str, None]:
    ring = _parse_ring(args.ring) if args.ring else None
    c = cst.normalize(build_constellation(args.family, args.m, ring, args.hex_d))
    if args.rotate:
        c = cst.rotate(c, _to_rad(args.rotate, args.angle_unit))
    return c.to_json(indent=2) + "\n", None


def cmd_rate_sweep(args):
    ctx = _context(args)
    c1 = parse_user_spec(args.u1, args.angle_unit)
    c2 = parse_user_spec(args.u2, args.angle_unit)
    header = ["snr_db", "sr_bits", "sr_stderr", "r1_bits", "r2_bits", "bound_bits"]
    if args.reopt_per_snr:
        header.append("theta_opt")
    rows = []
    for snr in _snr_grid(args):
        p = params_from_snr(snr)
        c2_used, theta = c2, None
        if args.reopt_per_snr:
            theta = _optimal_rotation(c1, c2, p, ctx, Objective.SUM_RATE, args)
            c2_used = cst.rotate(c2, theta)
        if ctx.method is Method.QUADRATURE:
            pair = quad_rate_region_corner(c1, c2_used, p, ctx.q)
        else:
            pair = rate_region_corner(c1, c2_used, p, ctx.mc)
        row = [snr, pair.sum.bits, pair.sum.std_error, pair.r1.bits, pair.r2.bits, gaussian_capacity_bound(p)]
        if theta is not None:
            row.append(_from_rad(theta, args.angle_unit))
        rows.append(row)
    return header, rows


def cmd_secrecy_sweep(args):
    snrs = _snr_grid(args)
    offsets = [_eve_offset(args, float(snr)) for snr in snrs]
    ctx = _context(args)
    c1 = parse_user_spec(args.u1, args.angle_unit)
    c2 = parse_user_spec(args.u2, args.angle_unit)
    header = [
        "snr_db", "ssr_bits", "ssr_stderr", "r1_sec", "r2_sec", "sr_bits",
        "i_x2_y", "i_x1_y_given_x2", "i_x2_y_given_x1", "i_x1_ye", "i_x2_ye", "ssr_raw",
    ]
    if args.reopt_per_snr:
        header.append("theta_opt")
    rows = []
    for snr, offset in zip(snrs, offsets):
        p = params_from_snr(snr, snr + offset)
        c2_used, theta = c2, None
        if args.reopt_per_snr:
            theta = _optimal_rotation(c1, c2, p, ctx, Objective.SECRECY_SUM_RATE, args)
            c2_used = cst.rotate(c2, theta)
        if ctx.method is Method.QUADRATURE:
            sec = quad_secrecy_rates(c1, c2_used, p, ctx.q)
        else:
            sec = secrecy_rates(c1, c2_used, p, ctx.mc)
        comp = sec.components
        row = [
            snr, sec.ssr_bits, sec.ssr_std_error, sec.r1_sec_bits, sec.r2_sec_bits, comp.sum_rate.bits,
            comp.i_x2_y.bits, comp.i_x1_y_given_x2.bits, comp.i_x2_y_given_x1.bits,
            comp.i_x1_ye.bits, comp.i_x2_ye.bits, comp.ssr_raw.bits,
        ]
        if theta is not None:
            row.append(_from_rad(theta, args.angle_unit))
        rows.append(row)
    return header, rows


def cmd_sweep_theta(args):
    ctx = _context(args)
    c1 = parse_user_spec(args.u1, args.angle_unit)
    c2 = parse_user_spec(args.u2, args.angle_unit)
    snrs = _snr_grid(args)
    if snrs.size != 1:
        raise UsageError("sweep-theta runs at a single SNR; pass --snr-db")
    snr = float(snrs[0])
    objective = Objective.SECRECY_SUM_RATE if args.objective == "ssr" else Objective.SUM_RATE
    offset = _eve_offset(args, snr) if objective is Objective.SECRECY_SUM_RATE else 0.0
    p = params_from_snr(snr, snr + offset)
    angles = parse_theta_grid(args.theta_grid, args.angle_unit)
    sweep = sweep_rotation(c1, c2, p, ctx.mc, objective, angles, method=ctx.method, q=ctx.q)
    header = ["theta", "value_bits", "stderr"]
    rows = [[_from_rad(t, args.angle_unit), v.bits, v.std_error] for t, v in zip(sweep.angles, sweep.values)]
    unit = args.angle_unit
    summary = {
        "objective": objective.value,
        "snr_db": snr,
        "angle_unit": unit,
        "theta_opt": _from_rad(sweep.theta_opt, unit),
        "value_opt": sweep.value_opt.bits,
        "value_opt_stderr": sweep.value_opt.std_error,
        "baseline": sweep.baseline.bits,
        "baseline_stderr": sweep.baseline.std_error,
        "gain": sweep.gain,
    }
    if args.refine_tol is not None:
        if len(sweep.angles) < 3:
            raise UsageError("--refine-tol needs a theta grid with at least 3 angles")
        ref = refine_rotation(sweep, c1, c2, p, ctx.mc, _to_rad(args.refine_tol, unit), q=ctx.q)
        summary.update(
            refined_theta_opt=_from_rad(ref.theta_opt, unit),
            refined_value_opt=ref.value_opt.bits,
            refined_method=ref.method.value,
            refine_fallback=ref.fallback,
        )
    summary = {k: (float(_fmt(v)) if isinstance(v, float) else v) for k, v in summary.items()}
    return header, rows, summary


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(header, rows, summary=None) -> str:
    data = {"columns": header, "rows": [dict(zip(header, (float(_fmt(v)) for v in row))) for row in rows]}
    if summary is not None:
        data["summary"] = summary
    return json.dumps(data, indent=2) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def load_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; keys use flag names."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--u1", default="qam:4", help="user 1 spec, family:M[:ringspec][@angle]")
    p.add_argument("--u2", default="qam:4", help="user 2 spec")
    p.add_argument("--snr-db", type=float, help="single per-user SNR in dB")
    p.add_argument("--snr-grid", help="SNR grid start:stop:step in dB (stop inclusive)")
    p.add_argument("--eve-offset-db", type=float, default=0.0, help="eavesdropper SNR minus main SNR (<= 0)")
    p.add_argument("--eve-snr-db", type=float, help="absolute eavesdropper SNR; overrides --eve-offset-db")
    p.add_argument("--theta-grid", help="rotation grid start:stop:step (stop exclusive)")
    p.add_argument("--angle-unit", choices=("rad", "deg"), default="rad")
    p.add_argument("--method", choices=("mc", "quad"), default="mc")
    p.add_argument("--samples", type=int, default=10_000, help="noise draws per outer symbol pair")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quad-nodes", type=int, default=64, help="quadrature nodes per dimension")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", help="key = value file mirroring these flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccc-rates", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="emit a normalized constellation as JSON")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--ring", help="ring spec radii[/points[/offsets]] for star/apsk")
    g.add_argument("--hex-d", type=float, default=1.0)
    g.add_argument("--rotate", type=float, default=0.0)
    g.add_argument("--angle-unit", choices=("rad", "deg"), default="rad")
    g.add_argument("--out")
    g.add_argument("--config")

    for name, helptext in (
        ("rate-sweep", "sum rate and corner rates over an SNR grid"),
        ("secrecy-sweep", "secrecy sum rate over an SNR grid"),
    ):
        s = sub.add_parser(name, help=helptext)
        _add_shared(s)
        s.add_argument("--reopt-per-snr", action="store_true", help="rotate user 2 optimally at every SNR")

    t = sub.add_parser("sweep-theta", help="objective versus user 2 rotation")
    _add_shared(t)
    t.add_argument("--objective", choices=("sr", "ssr"), default="sr")
    t.add_argument("--refine-tol", type=float, help="golden-section refinement tolerance (angle unit)")
    t.add_argument("--summary", help="summary JSON path (csv output only)")
    return parser


_NUMERIC_VALUE_FLAGS = ("--snr-grid", "--theta-grid", "--snr-db", "--eve-offset-db", "--eve-snr-db", "--rotate")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``--snr-grid -10:30:5`` through; argparse would read it as a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in _NUMERIC_VALUE_FLAGS and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _parse(argv) -> argparse.Namespace:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            values = load_config(args.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, raw in values.items():
            if key not in known or key in ("help", "config"):
                parser.error(f"unknown config key {key!r}")
            action = known[key]
            if isinstance(action, argparse._StoreTrueAction):
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                defaults[key] = action.type(raw) if action.type else raw
        # flags given on the command line win over the file
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = _parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "gen":
            text, _ = cmd_gen(args)
            _write(text, args.out)
            return 0
        if args.command == "rate-sweep":
            header, rows = cmd_rate_sweep(args)
            summary = None
        elif args.command == "secrecy-sweep":
            header, rows = cmd_secrecy_sweep(args)
            summary = None
        else:
            header, rows, summary = cmd_sweep_theta(args)
        if args.format == "json":
            _write(render_json(header, rows, summary), args.out)
        else:
            _write(render_csv(header, rows), args.out)
            if summary is not None:
                text = json.dumps(summary, indent=2) + "\n"
                target = args.summary or (str(Path(args.out).with_suffix(".summary.json")) if args.out else None)
                if target:
                    Path(target).write_text(text, encoding="utf-8", newline="\n")
                else:
                    sys.stderr.write(text)
        return 0
    except NumericalError as exc:
        print(f"ccc-rates: numerical failure: {exc}", file=sys.stderr)
        return 1
    except (UsageError, RatesError, OSError, ValueError) as exc:
        print(f"ccc-rates: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
