"""Command-line front end.

Subcommands: ``price`` (Fourier call price), ``smile`` (approximation vs
oracle smile table), ``svi`` (SVI smoothing + density grid), ``calibrate``
(model-free surface calibration). Emits deterministic CSV/JSON with floats
at 17 significant digits.

Exit codes: 0 success, 2 input/domain errors, 3 fit failures,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .blackscholes import implied_vol
from .calibration import (
    calibrate_surface,
    levy_consistency_report,
    load_quotes_csv,
    outcomes_to_json,
)
from .core import ExpansionOrder, make_context
from .errors import FitFailure, IoFailure, NonConvergence, NumericsError
from .expansion import coefficients_for, smile_point
from .fourier import ContourSpec, fourier_call_price
from .models import CharacteristicModel, model_from_json
from .svi import bl_density, butterfly_check, svi_fit, svi_vol


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _load_model(spec: str) -> CharacteristicModel:
    text = spec.strip()
    if not text.startswith("{"):
        try:
            with open(text, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise IoFailure(f"cannot read model file {spec}: {exc}")
    return model_from_json(text)


def _parse_order(text: str) -> ExpansionOrder:
    try:
        n, m = (int(part) for part in text.split(","))
    except ValueError:
        raise IoFailure(f"order must be 'n,m', got {text!r}")
    return ExpansionOrder(n=n, m=m)


def _zeta_grid(args) -> np.ndarray:
    if args.zeta_count < 1:
        raise IoFailure(f"zeta grid needs at least one point, got {args.zeta_count}")
    return np.linspace(args.zeta_min, args.zeta_max, args.zeta_count)


def _contour(args) -> ContourSpec:
    return ContourSpec(lambda_i=args.contour_im, tolerance=args.tol)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def cmd_price(args) -> None:
    model = _load_model(args.model)
    contour = _contour(args)
    price = fourier_call_price(model, args.t, args.log_spot, args.zeta, contour)
    record = {
        "price": float(_fmt(price)),
        "contour_im": contour.lambda_i,
        "tolerance": contour.tolerance,
    }
    _emit(json.dumps(record, indent=2) + "\n", args.out)


def cmd_smile(args) -> None:
    model = _load_model(args.model)
    order = _parse_order(args.order)
    contour = _contour(args)
    zetas = _zeta_grid(args)
    t, x, sigma0 = args.t, args.log_spot, args.sigma0
    coeffs = coefficients_for(model, t, sigma0, order.m)

    header = ["zeta"] + [f"sigma_nm_{k}" for k in range(1, order.n + 1)]
    header += ["true_iv", f"rel_err_{order.n}"]
    lines = [",".join(header)]
    failures = 0
    for zeta in zetas:
        row = [_fmt(zeta)]
        try:
            context = make_context(t, x, float(zeta), sigma0)
            approx = smile_point(coeffs, order, context)
            partials = np.cumsum(approx.sigma_terms) + sigma0
            row += [_fmt(v) for v in partials]
            true_iv = implied_vol(fourier_call_price(model, t, x, float(zeta), contour),
                                  t, x, float(zeta))
            rel_err = (partials[-1] - true_iv) / true_iv
            row += [_fmt(true_iv), _fmt(rel_err)]
        except NumericsError:
            failures += 1
            row += ["nan"] * (order.n + 2)
        lines.append(",".join(row))
    if failures:
        print(f"warning: {failures} grid points failed", file=sys.stderr)
    _emit("\n".join(lines) + "\n", args.out)


def cmd_svi(args) -> None:
    order = _parse_order(args.order)
    t, x, sigma0 = args.t, args.log_spot, args.sigma0
    zetas = _zeta_grid(args)
    if args.smile_csv:
        points = []
        try:
            with open(args.smile_csv, encoding="utf-8") as handle:
                rows = handle.read().strip().splitlines()
        except OSError as exc:
            raise IoFailure(f"cannot read smile CSV: {exc}")
        for line in rows[1:]:
            parts = line.split(",")
            points.append((float(parts[0]), float(parts[1])))
    else:
        model = _load_model(args.model)
        curve = [smile_point(coefficients_for(model, t, sigma0, order.m), order,
                             make_context(t, x, float(z), sigma0)) for z in zetas]
        points = [(p.context.zeta, p.total) for p in curve]
    params, diag = svi_fit(points, t, x)
    window = (float(min(z for z, _ in points)), float(max(z for z, _ in points)))
    report = butterfly_check(params, t, x, window)
    density = bl_density(params, t, x, zetas)
    record = {
        "svi": params.to_json_dict(t),
        "rmse": diag.rmse,
        "arbitrage_free": report.arbitrage_free,
        "min_density": report.min_density,
    }
    lines = [json.dumps(record, indent=2), "zeta,svi_vol,density"]
    vols = svi_vol(params, t, x, zetas)
    for zeta, vol, dens in zip(zetas, np.atleast_1d(vols), density.values):
        lines.append(",".join([_fmt(zeta), _fmt(vol), _fmt(dens)]))
    _emit("\n".join(lines) + "\n", args.out)


def cmd_calibrate(args) -> None:
    order = _parse_order(args.order)
    surface = load_quotes_csv(args.quotes, args.log_spot)
    outcomes = calibrate_surface(surface, order)
    payload = json.loads(outcomes_to_json(outcomes))
    fitted = [o.result for o in outcomes if o.ok]
    if len(fitted) >= 2:
        report = levy_consistency_report(fitted)
        payload = {
            "slices": payload,
            "levy_consistency": {
                "dispersion": {str(q): v for q, v in report.dispersion.items()},
                "levy_like": report.levy_like,
            },
        }
    else:
        payload = {"slices": payload}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfsmile",
        description="Implied-volatility smiles from characteristic functions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_model=True):
        if needs_model:
            p.add_argument("--model", required=True,
                           help="model JSON file path or inline JSON document")
        p.add_argument("--t", type=float, default=1.0)
        p.add_argument("--log-spot", type=float, default=0.0)
        p.add_argument("--contour-im", type=float, default=-1.5)
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_price = sub.add_parser("price", help="Fourier call price for one strike")
    common(p_price)
    p_price.add_argument("--zeta", type=float, required=True, help="log strike")
    p_price.set_defaults(func=cmd_price)

    p_smile = sub.add_parser("smile", help="approximation vs oracle smile table")
    common(p_smile)
    p_smile.add_argument("--order", default="3,8", help="orders 'n,m'")
    p_smile.add_argument("--sigma0", type=float, required=True)
    p_smile.add_argument("--zeta-min", type=float, default=-1.0)
    p_smile.add_argument("--zeta-max", type=float, default=1.0)
    p_smile.add_argument("--zeta-count", type=int, default=41)
    p_smile.set_defaults(func=cmd_smile)

    p_svi = sub.add_parser("svi", help="SVI smoothing of a smile plus density")
    p_svi.add_argument("--model", default=None)
    p_svi.add_argument("--smile-csv", default=None,
                       help="input smile CSV (zeta,sigma); overrides --model")
    p_svi.add_argument("--order", default="3,8")
    p_svi.add_argument("--sigma0", type=float, default=0.5)
    p_svi.add_argument("--t", type=float, default=1.0)
    p_svi.add_argument("--log-spot", type=float, default=0.0)
    p_svi.add_argument("--zeta-min", type=float, default=-1.0)
    p_svi.add_argument("--zeta-max", type=float, default=1.0)
    p_svi.add_argument("--zeta-count", type=int, default=41)
    p_svi.add_argument("--out", default=None)
    p_svi.set_defaults(func=cmd_svi)

    p_cal = sub.add_parser("calibrate", help="model-free calibration of a quotes CSV")
    p_cal.add_argument("--quotes", required=True, help="CSV with header t,log_strike,iv")
    p_cal.add_argument("--log-spot", type=float, default=0.0)
    p_cal.add_argument("--order", default="3,8")
    p_cal.add_argument("--out", default=None)
    p_cal.set_defaults(func=cmd_calibrate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except FitFailure as exc:
        print(exc.kind + ": " + exc.detail, file=sys.stderr)
        return 3
    except NonConvergence as exc:
        print(exc.kind + ": " + exc.detail, file=sys.stderr)
        return 4
    except NumericsError as exc:
        print(exc.kind + ": " + exc.detail, file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
