"""Command-line interface.

Subcommands::

    isoradial transport --density SPEC --n N --out grid.csv
    isoradial profile   --density SPEC --n N --out curve.csv [--grid K]
    isoradial verify    --density SPEC --n N --N-list 100,10000
                        --count 100000 --seed 7 [--out diag.csv]
    isoradial classify  --phi SPEC --p P --n N
    isoradial audit     --density SPEC --trials T --seed S

Density spec grammar: ``gaussian`` | ``scaled-gaussian:c=<v>`` |
``exp-power:p=<v>`` | ``q-exp:q=<v>,p=<v>`` | ``phi:<file>,p=<v>`` |
``table:<file>``.  Deformation specs for ``classify``:
``power:q=<v>`` | ``identity`` | ``poly:<c0,c1,...>`` | ``phi:<file>``.

Exit codes: 0 success; 1 verification failure; 2 invalid spec;
3 divergent radial mass; 4 disconnected support; 5 audit bound violation.
All CSV output is locale-independent (shortest round-trip decimals, LF
newlines); identical invocations with identical seeds are byte-identical.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import criteria, phiexp, poincare, profile, radial, transport
from .errors import (
    DisconnectedSupportError,
    DivergentMassError,
    InvalidDensityError,
    IsoradialError,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_SPEC = 2
EXIT_DIVERGENT = 3
EXIT_DISCONNECTED = 4
EXIT_VIOLATION = 5


class SpecError(ValueError):
    """Malformed density or deformation spec."""


def _spec_params(body: str, expected: tuple[str, ...]) -> dict:
    params = {}
    for item in body.split(","):
        if "=" not in item:
            raise SpecError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        if key not in expected:
            raise SpecError(f"unknown parameter {key!r} (expected {expected})")
        try:
            params[key] = float(value)
        except ValueError as exc:
            raise SpecError(f"bad numeric value {value!r} for {key}") from exc
    missing = [k for k in expected if k not in params]
    if missing:
        raise SpecError(f"missing parameters {missing}")
    return params


def parse_density_spec(spec: str) -> radial.RadialDensity:
    """Density spec grammar -> RadialDensity."""
    kind, _, body = spec.partition(":")
    if kind == "gaussian" and not body:
        return radial.gaussian_density()
    if kind == "scaled-gaussian":
        return radial.scaled_gaussian_density(_spec_params(body, ("c",))["c"])
    if kind == "exp-power":
        return radial.exp_power_density(_spec_params(body, ("p",))["p"])
    if kind == "q-exp":
        params = _spec_params(body, ("q", "p"))
        return phiexp.phi_p_density(phiexp.power_phi(params["q"]), params["p"])
    if kind == "phi":
        path, _, tail = body.partition(",")
        if not tail.startswith("p="):
            raise SpecError("phi:<file>,p=<v> requires the exponent p")
        try:
            p = float(tail[2:])
        except ValueError as exc:
            raise SpecError(f"bad exponent {tail[2:]!r}") from exc
        return phiexp.phi_p_density(_load_phi_table(path), p)
    if kind == "table":
        if not body:
            raise SpecError("table:<file> requires a path")
        return radial.load_density_table(body)
    raise SpecError(f"unknown density kind {spec!r}")


def _load_phi_table(path: str) -> phiexp.PhiFunction:
    import csv

    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    if not rows or [c.strip().lower() for c in rows[0]] != ["s", "phi"]:
        raise SpecError(f"{path}: expected header 's,phi'")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]], dtype=float)
    except (ValueError, TypeError) as exc:
        raise SpecError(f"{path}: malformed row ({exc})") from exc
    return phiexp.phi_from_table(data[:, 0], data[:, 1], name=f"phi:{path}")


def parse_phi_spec(spec: str) -> phiexp.PhiFunction:
    """Deformation spec grammar -> PhiFunction."""
    kind, _, body = spec.partition(":")
    if kind == "identity" and not body:
        return phiexp.identity_phi()
    if kind == "power":
        return phiexp.power_phi(_spec_params(body, ("q",))["q"])
    if kind == "poly":
        try:
            coeffs = [float(v) for v in body.split(",")]
        except ValueError as exc:
            raise SpecError(f"bad poly coefficients {body!r}") from exc
        return phiexp.poly_phi(coeffs)
    if kind == "phi":
        return _load_phi_table(body)
    raise SpecError(f"unknown deformation kind {spec!r}")


def _build(args):
    density = parse_density_spec(args.density)
    measure = radial.build_measure(density, args.n, grid_size=args.grid,
                                   tail_floor=args.cdf_floor)
    return density, measure, transport.build_transport(measure)


def cmd_transport(args) -> int:
    density, _, tmap = _build(args)
    if args.out:
        transport.write_transport_csv(tmap, args.out)
    lab = "+inf" if not np.isfinite(tmap.lipschitz) else repr(tmap.lipschitz)
    print(f"L = {lab} ({tmap.lipschitz_reason})")
    report = criteria.prop_lip_verdict(density, args.n, transport=tmap)
    print(f"criteria verdict: {report.verdict}")
    if report.lipschitz_agrees is False:
        print("warning: criteria verdict disagrees with transport constant")
    return EXIT_OK


def cmd_profile(args) -> int:
    _, _, tmap = _build(args)
    curve = profile.bound_curve(tmap, grid_size=args.grid_points)
    profile.write_curve_csv(curve, args.out)
    lab = "+inf" if not curve.finite else repr(curve.lipschitz)
    print(f"L = {lab}; wrote {curve.levels.size} levels to {args.out}")
    if not curve.finite:
        print("bound curve is identically zero (transport not Lipschitz)")
    elif not curve.half_level_certified:
        print("a = 1/2 excluded (origin lim sup borderline)")
    return EXIT_OK


def cmd_verify(args) -> int:
    _, measure, tmap = _build(args)
    sphere_dims = [int(v) for v in args.sphere_dims.split(",")]
    table = poincare.convergence_diagnostic(tmap, sphere_dims)
    if args.out:
        poincare.write_diagnostics_csv(table, args.out)
    ok = True
    for label, errors in (("sup", table.sup_errors), ("l1", table.l1_errors)):
        decreasing = bool(np.all(errors[1:] <= 1.1 * errors[:-1]))
        print(f"{label} errors: " + ", ".join(f"{v:.3e}" for v in errors)
              + ("" if decreasing else "  NOT DECREASING"))
        ok = ok and decreasing
    batch = poincare.sample_pushforward(tmap, max(sphere_dims), args.count, args.seed)
    stat = poincare.ks_statistic(batch, measure)
    crit = poincare.ks_critical_value(args.count)
    print(f"KS statistic = {stat:.5f} (1% critical value {crit:.5f})")
    ok = ok and stat < crit
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_classify(args) -> int:
    phi = parse_phi_spec(args.phi)
    result = phiexp.classify(phi, args.p, args.n)
    print(f"integrable={'yes' if result.integrable else 'no'} "
          f"lipschitz={result.lipschitz.lower()} "
          f"clause={result.which_clause!r} "
          f"support_radius={result.support_radius!r}")
    return EXIT_OK


def cmd_audit(args) -> int:
    if args.n != 1:
        raise SpecError("audit requires --n 1")
    _, measure, tmap = _build(args)
    report = profile.bound_audit(measure, tmap, args.trials, args.seed,
                                 raise_on_violation=False)
    print(f"violations={report.violations} trials={report.trials} "
          f"min_slack={report.min_slack!r} halflines={report.halfline_trials}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write("violations,trials,min_slack,min_halfline_slack\n")
            fh.write(f"{report.violations},{report.trials},"
                     f"{report.min_slack!r},{report.min_halfline_slack!r}\n")
    if report.violations:
        print(f"witness: {report.witness}")
        return EXIT_VIOLATION
    return EXIT_OK


_CONFIG_TYPES = {
    "n": int, "grid": int, "grid_points": int, "count": int, "trials": int,
    "seed": int, "cdf_floor": float, "tol": float, "density": str,
    "phi": str, "p": float, "sphere_dims": str, "out": str,
}


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SpecError(f"{path}: expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise SpecError(f"{path}: unknown config key {key!r}")
            values[key] = _CONFIG_TYPES[key](value)
    return values


def _add_common(parser, density=True):
    if density:
        parser.add_argument("--density", required=True, help="density spec")
        parser.add_argument("--n", type=int, default=1, help="ambient dimension")
    parser.add_argument("--grid", type=int, default=4096,
                        help="cumulative-table grid nodes")
    parser.add_argument("--cdf-floor", dest="cdf_floor", type=float, default=1e-10,
                        help="tail-mass resolution of the grid")
    parser.add_argument("--tol", type=float, default=1e-12,
                        help="quadrature absolute tolerance")
    parser.add_argument("--config", default=None,
                        help="key=value file supplying defaults for any flag")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isoradial",
        description="Radial transport maps, sphere-projection limits, "
                    "and isoperimetric lower bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transport", help="build a transport map, dump its grid")
    _add_common(p)
    p.add_argument("--out", default=None, help="CSV path (r,sigma,sigma_prime,rho)")
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("profile", help="emit the isoperimetric lower-bound curve")
    _add_common(p)
    p.add_argument("--out", required=True, help="CSV path (a,bound,certified)")
    p.add_argument("--grid-points", dest="grid_points", type=int, default=401,
                   help="number of mass levels")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("verify", help="finite-N convergence and sampling check")
    _add_common(p)
    p.add_argument("--N-list", dest="sphere_dims", default="100,10000",
                   help="comma-separated sphere dimensions")
    p.add_argument("--count", type=int, default=100000, help="sample count")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--out", default=None, help="diagnostics CSV path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", help="integrability/Lipschitz classifier")
    p.add_argument("--phi", required=True, help="deformation spec")
    p.add_argument("--p", type=float, required=True, help="radial exponent")
    p.add_argument("--n", type=int, required=True, help="ambient dimension")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("audit", help="randomized 1-d audit of the lower bound")
    _add_common(p)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="report CSV path")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            config = _load_config(args.config)
            for key, value in config.items():
                flag = "--" + key.replace("_", "-")
                if not any(a == flag or a.startswith(flag + "=") for a in argv):
                    setattr(args, key, value)
        return args.func(args)
    except (SpecError, InvalidDensityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC
    except DivergentMassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except DisconnectedSupportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except IsoradialError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC


if __name__ == "__main__":
    sys.exit(main())
