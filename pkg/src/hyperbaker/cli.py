"""Command-line interface.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for
configuration or input errors.
"""

from __future__ import annotations

import argparse
import cmath
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from .algebra import parse_rational, to_text
from .curve import CurveError, ScaledModel, ScalingError, chi_factor, symbolic_curve, validate_curve

PRECISION_ENV = "HYPERBAKER_PRECISION"


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


class ConfigError(ValueError):
    pass


def _number(v, what: str):
    """Rational string/int, or ``[re, im]`` for complex values."""
    if isinstance(v, list):
        if len(v) != 2 or not all(isinstance(t, (int, float)) for t in v):
            raise ParseError(f"{what}: complex values are [re, im] pairs")
        return complex(v[0], v[1])
    if isinstance(v, bool) or not isinstance(v, (str, int, float)):
        raise ParseError(f"{what}: expected a number or a rational string")
    if isinstance(v, float):
        return Fraction(str(v))
    try:
        return parse_rational(v)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"{what}: cannot parse {v!r}") from exc


def parse_curve_data(data) -> tuple:
    """Validated curve and optional scaling pair from decoded JSON."""
    if not isinstance(data, dict):
        raise ParseError("curve input must be a JSON object")
    for key in ("genus", "nu", "branch_point"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    g = data["genus"]
    if not isinstance(g, int) or isinstance(g, bool) or g < 1:
        raise ParseError("genus must be a positive integer")
    nu = data["nu"]
    if not isinstance(nu, list) or len(nu) != 2 * g + 3:
        got = len(nu) if isinstance(nu, list) else type(nu).__name__
        raise ParseError(f"nu must list {2 * g + 3} coefficients nu0..nu{4 * g + 4}, got {got}")
    coeffs = [_number(c, f"nu[{k}]") for k, c in enumerate(nu)]
    if any(isinstance(c, complex) for c in coeffs):
        raise ParseError("curve coefficients must be rational")
    bp = data["branch_point"]
    if isinstance(bp, dict):
        if set(bp) != {"index"} or not isinstance(bp["index"], int):
            raise ParseError('branch_point object must be {"index": k}')
        a = ("index", bp["index"])
    else:
        a = _number(bp, "branch_point")
    try:
        curve = validate_curve(g, coeffs, a)
    except CurveError as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc
    scaling = None
    if "scaling" in data and data["scaling"] is not None:
        sc = data["scaling"]
        if not isinstance(sc, dict) or set(sc) != {"s", "t"}:
            raise ParseError('scaling must be {"s": .., "t": ..}')
        s, t = _number(sc["s"], "scaling.s"), _number(sc["t"], "scaling.t")
        try:
            if isinstance(s, Fraction) and isinstance(t, Fraction) and curve.is_exact:
                ScaledModel.exact_values(curve, s, t)
            else:
                ScaledModel.numeric(curve, complex(s), complex(t), tol=1e-9)
        except ScalingError as exc:
            raise ValidationError(f"ScalingError: {exc}") from exc
        scaling = (s, t)
    return curve, scaling


def parse_curve_input(path) -> tuple:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno - 1 < len(text.splitlines()) else ""
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line}") from exc
    return parse_curve_data(data)


def parse_points(path, curve) -> list:
    """Points as ``{"x": .., "y": ..}`` or ``{"x": .., "sheet": +1|-1}``
    (``y = sheet * sqrt(N(x))``, principal root)."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read points from {path}: {exc}") from exc
    if not isinstance(data, list):
        raise ParseError("points must be a JSON list")
    out = []
    for k, p in enumerate(data):
        if not isinstance(p, dict) or "x" not in p:
            raise ParseError(f"point {k} needs an x value")
        x = complex(_number(p["x"], f"points[{k}].x"))
        if "y" in p:
            y = complex(_number(p["y"], f"points[{k}].y"))
        else:
            sheet = p.get("sheet", 1)
            if sheet not in (1, -1):
                raise ParseError(f"points[{k}].sheet must be 1 or -1")
            y = sheet * cmath.sqrt(complex(curve.numeric().N(x)))
        out.append((x, y))
    return out


def _emit(obj, fmt: str, out) -> None:
    from .verify import canonical_json

    if fmt == "json":
        out.write(canonical_json(obj))
    else:
        for k in sorted(obj):
            out.write(f"{k}: {obj[k]}\n")


def _curve_or_symbolic(args):
    if args.curve:
        curve, scaling = parse_curve_input(args.curve)
        if args.genus is not None and args.genus != curve.genus:
            raise ConfigError("--genus disagrees with the curve file")
        return curve, scaling
    if args.genus is None:
        raise ConfigError("give --curve or --genus")
    if args.genus < 1:
        raise ConfigError("--genus must be positive")
    return symbolic_curve(args.genus), None


def cmd_baker(args) -> int:
    from .baker import baker_matrix

    curve, _ = _curve_or_symbolic(args)
    if args.points:
        if curve.symbolic:
            raise ConfigError("--points needs --curve")
        from .hfunc import baker_values

        pts = parse_points(args.points, curve)
        vals = baker_values(curve, pts)
        _emit({"genus": curve.genus, "baker": vals.tolist()}, args.format, sys.stdout)
        return 0
    if not curve.symbolic and not curve.is_exact:
        raise ConfigError("symbolic Baker functions need a rational branch point")
    bm = baker_matrix(curve)
    g = curve.genus
    entries = {bm.index_label(i, j): str(bm.entries[i][j]) for i in range(g) for j in range(i, g)}
    _emit({"genus": g, "G": to_text(bm.G), "baker": entries}, args.format, sys.stdout)
    return 0


def cmd_omega(args) -> int:
    from .omega import kappa_forms, omega_recursion

    curve, _ = _curve_or_symbolic(args)
    if not curve.symbolic and not curve.is_exact:
        raise ConfigError("exact Omega needs a rational branch point")
    m = ScaledModel.symbolic(curve)
    om = omega_recursion(m)
    g = curve.genus
    out = {
        "genus": g,
        "Omega": [[to_text(e) for e in row] for row in om],
        "chi": str(chi_factor(m)),
        "kappa": [str(f.coefficient) for f in kappa_forms(m, om)],
    }
    _emit(out, args.format, sys.stdout)
    return 0


def cmd_expand(args) -> int:
    from .series import h_series_genus1

    curve, scaling = _curve_or_symbolic(args)
    if curve.genus != 1:
        raise ConfigError("the series expansion is implemented for genus 1")
    if args.order < 1:
        raise ConfigError("--order must be positive")
    exact = scaling if scaling and all(isinstance(x, Fraction) for x in scaling) else None
    ser = h_series_genus1(curve, args.order, scaling=exact)
    coeffs = {str(k): str(c) for k, c in sorted(ser.coeffs.items())}
    _emit({"variable": "v2", "order": args.order, "coefficients": coeffs}, args.format, sys.stdout)
    return 0


def cmd_periods(args) -> int:
    from .periods import curve_periods
    from .verify import canonical_json, curve_fingerprint

    if not args.curve:
        raise ConfigError("periods needs --curve")
    curve, scaling = parse_curve_input(args.curve)
    m = ScaledModel.numeric(curve, complex(scaling[0]), complex(scaling[1])) if scaling else None
    pd = curve_periods(curve, m, seed=args.seed, precision=args.precision)
    out = {
        "curve_fingerprint": curve_fingerprint(curve),
        "branch_points": pd.branch.roots, "mu1": pd.mu1, "mu2": pd.mu2,
        "omega1": pd.omega1, "omega2": pd.omega2, "eta1": pd.eta1, "eta2": pd.eta2,
        "kappa1": pd.kappa1, "kappa2": pd.kappa2, "tau": pd.tau,
        "delta1": pd.delta1, "delta2": pd.delta2, "epsilon": pd.epsilon,
        "cycles": pd.cycles, "precision": args.precision, "seed": args.seed,
    }
    text = canonical_json(out)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _parse_overrides(items) -> dict:
    out = {}
    for item in items or []:
        name, sep, val = item.rpartition("=")
        if not sep or not name:
            raise ConfigError(f"tolerance override {item!r} is not NAME=VALUE")
        try:
            v = float(val)
        except ValueError as exc:
            raise ConfigError(f"tolerance {val!r} is not a number") from exc
        if not v > 0:
            raise ConfigError(f"tolerance for {name!r} must be positive")
        out[name] = v
    return out


def cmd_verify(args) -> int:
    from .verify import canonical_json, run_suite

    overrides = _parse_overrides(args.tolerance)
    if args.curve and args.symbolic:
        raise ConfigError("--symbolic and --curve are exclusive")
    if args.divisors < 1:
        raise ConfigError("--divisors must be positive")
    curve, scaling = _curve_or_symbolic(args)
    rep = run_suite(args.suite, curve=curve, seed=args.seed, precision=args.precision,
                    scaling=scaling, divisors=args.divisors, timing=args.timing)
    for c in rep.checks:
        if c.name in overrides:
            c.tolerance = overrides[c.name]
    text = canonical_json(rep.as_dict())
    if args.report:
        try:
            Path(args.report).write_text(text)
        except OSError as exc:
            raise ConfigError(f"cannot write report: {exc}") from exc
    for c in rep.checks:
        status = "PASS" if c.passed else "FAIL"
        val = "error" if c.measured is None else f"{c.measured:.3e}"
        print(f"{status}  {c.name}: {val} ({c.comparison} {c.tolerance:g})" + (f"  [{c.error}]" if c.error else ""))
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperbaker", description="Baker functions, Omega and H for hyperelliptic curves.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--curve", help="curve JSON file")
        sp.add_argument("--genus", type=int)
        sp.add_argument("--symbolic", action="store_true", help="treat a and nu as indeterminates")
        if fmt:
            sp.add_argument("--format", choices=("text", "json"), default="text")

    sp = sub.add_parser("baker", help="G and the Baker matrix")
    common(sp)
    sp.add_argument("--points", help="points JSON file (numerical evaluation)")
    sp.set_defaults(func=cmd_baker)

    sp = sub.add_parser("omega", help="Omega, chi and the kappa forms")
    common(sp)
    sp.set_defaults(func=cmd_omega)

    sp = sub.add_parser("expand", help="genus-1 series of H")
    common(sp)
    sp.add_argument("--order", type=int, default=20)
    sp.set_defaults(func=cmd_expand)

    precision = os.environ.get(PRECISION_ENV, "double")
    sp = sub.add_parser("periods", help="period data as JSON")
    sp.add_argument("--curve")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--precision", choices=("double", "extended"), default=precision)
    sp.add_argument("--report", help="write JSON here instead of stdout")
    sp.set_defaults(func=cmd_periods)

    sp = sub.add_parser("verify", help="run a verification suite")
    common(sp, fmt=False)
    sp.add_argument("--suite", choices=("algebraic", "periods", "h-identities", "pde", "all"), default="all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--precision", choices=("double", "extended"), default=precision)
    sp.add_argument("--report", help="JSON report path")
    sp.add_argument("--divisors", type=int, default=20, help="random rational divisors for divisibility")
    sp.add_argument("--tolerance", action="append", metavar="NAME=VALUE", help="override a check tolerance")
    sp.add_argument("--timing", action="store_true", help="include wall time in the report")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if getattr(args, "precision", "double") not in ("double", "extended"):
        print(f"error: unknown precision {args.precision!r}", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ParseError, ValidationError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
