"""Command-line front end: config, verification battery, sweeps, runs.

Subcommands
    verify                  scalar identities, residuals, quadratic-form
                            signs, negative direction, modulation checks
    negdir                  R-sweep of the localized negative direction
    evolve                  soliton + perturbation evolution experiment
    sweep                   verify over the (sigma, c) grid
    print-default-config    dump the built-in defaults as JSON

Exit codes: 0 all checks pass; 1 at least one check failed; 2 invalid
configuration; 3 runtime abort (blow-up suspected or a solver failed to
converge).
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from . import profiles as pr
from .core import (
    ComplexField,
    Grid,
    ProfileKind,
    WaveParams,
    h1_norm,
    phase_matched_half_width,
)
from .evolution import BlowUpError, IntegratorSpec, evolve, instability_experiment
from .functionals import identity_suite, soliton_mass
from .linearization import quad_form_signs_expected, sign_suite, symmetry_defect
from .modulation import jacobian_determinant, solve_modulation
from .negdir import build_psi, fit_rates, orthogonality_residuals, solve_mu_nu
from .profiles import profile_residuals

DEFAULT_CONFIG = {
    "sigma": 1.5,
    "c": 1.0,
    "grid": {"L": 400.0, "N": 8192},
    "quadrature": {"method": "transformed_adaptive", "rel_tol": 1e-10},
    "cutoff": {"R": 50.0, "sweep": [25.0, 50.0, 100.0, 200.0, 400.0]},
    "integrator": {"dt": 4e-4, "t_end": 30.0, "sample_every": 250},
    "experiment": {
        "betas": [0.0, 0.01, -0.01],
        "escape_factor": 10.0,
        "control_factor": 3.0,
        "grid_floor": 3.5e-4,
    },
    "sweep_sigmas": [1.2, 1.5, 1.8],
    "sweep_cs": [0.5, 1.0, 2.0],
    "seed": 20260826,
    "output_dir": "gdnlslab-out",
}


class ConfigError(ValueError):
    pass


def load_config(path: str | None, overrides: dict | None = None) -> dict:
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        for key, value in user.items():
            if key not in config:
                raise ConfigError(f"unknown config field {key!r}")
            if isinstance(config[key], dict):
                if not isinstance(value, dict):
                    raise ConfigError(f"config field {key!r} must be an object")
                unknown = set(value) - set(config[key])
                if unknown:
                    raise ConfigError(f"unknown config fields {sorted(unknown)} in {key!r}")
                config[key].update(value)
            else:
                config[key] = value
    for key, value in (overrides or {}).items():
        config[key] = value
    validate_config(config)
    return config


def validate_config(config: dict) -> None:
    sigma, c = config["sigma"], config["c"]
    if not (1.0 < sigma < 2.0):
        raise ConfigError(f"sigma must lie in (1, 2) (endpoint family), got {sigma}")
    if not c > 0.0:
        raise ConfigError(f"c must be positive, got {c}")
    grid = config["grid"]
    n = grid["N"]
    if grid["L"] <= 0.0:
        raise ConfigError(f"grid.L must be positive, got {grid['L']}")
    if not (isinstance(n, int) and n >= 16 and (n & (n - 1)) == 0):
        raise ConfigError(f"grid.N must be a power of two >= 16, got {n}")
    quad = config["quadrature"]
    if quad["method"] not in ("transformed_adaptive", "grid_trapezoid"):
        raise ConfigError(f"unknown quadrature.method {quad['method']!r}")
    if not (0.0 < quad["rel_tol"] < 1e-4):
        raise ConfigError(f"quadrature.rel_tol must lie in (0, 1e-4), got {quad['rel_tol']}")
    cut = config["cutoff"]
    if cut["R"] <= 0.0:
        raise ConfigError(f"cutoff.R must be positive, got {cut['R']}")
    if 4.0 * cut["R"] > grid["L"]:
        raise ConfigError(
            f"grid.L = {grid['L']} too small for cutoff.R = {cut['R']}; need L >= 4 R"
        )
    if any(r <= 0.0 for r in cut["sweep"]):
        raise ConfigError("cutoff.sweep radii must be positive")
    integ = config["integrator"]
    if integ["dt"] <= 0.0 or integ["t_end"] <= 0.0:
        raise ConfigError("integrator.dt and integrator.t_end must be positive")
    if not (isinstance(integ["sample_every"], int) and integ["sample_every"] >= 1):
        raise ConfigError("integrator.sample_every must be a positive integer")
    exp = config["experiment"]
    if exp["escape_factor"] <= 1.0 or exp["control_factor"] <= 0.0:
        raise ConfigError("experiment escape/control factors out of range")
    if exp["grid_floor"] <= 0.0:
        raise ConfigError("experiment.grid_floor must be positive")
    if not isinstance(config["seed"], int):
        raise ConfigError("seed must be an integer")


def _grid(config: dict) -> Grid:
    p = WaveParams(sigma=config["sigma"], c=config["c"])
    length = phase_matched_half_width(p, config["grid"]["L"])
    return Grid(half_width=length, n_points=config["grid"]["N"])


def _record(name: str, check_id: str, computed, expected, tolerance, relative=True):
    if expected == 0.0 or not relative:
        err = abs(computed - expected)
    else:
        err = abs(computed - expected) / max(abs(expected), 1e-300)
    return {
        "name": name,
        "check_id": check_id,
        "computed": computed,
        "expected": expected,
        "tolerance": tolerance,
        "passed": bool(err <= tolerance),
    }


def _sign_record(name: str, check_id: str, computed, want_negative=True):
    ok = computed < 0.0 if want_negative else computed > 0.0
    return {
        "name": name,
        "check_id": check_id,
        "computed": computed,
        "expected": "< 0" if want_negative else "> 0",
        "tolerance": 0.0,
        "passed": bool(ok),
    }


def verify_records(config: dict) -> list:
    p = WaveParams(sigma=config["sigma"], c=config["c"])
    g = _grid(config)
    seed = config["seed"]
    records = []

    res = profile_residuals(p, g)
    for key, value in res.items():
        records.append(
            _record(f"residual_{key}", "profiles.profile_residuals", value, 0.0, 1e-6)
        )

    for key, (lhs, rhs, rel) in identity_suite(p).items():
        records.append(
            {
                "name": f"identity_{key}",
                "check_id": "functionals.identity_suite",
                "computed": lhs,
                "expected": rhs,
                "tolerance": 1e-6,
                "passed": bool(rel <= 1e-6),
            }
        )

    for report in sign_suite(p, g):
        records.append(
            _record(
                f"quad_form_{report.direction}",
                "linearization.sign_suite",
                report.value,
                report.reference,
                1e-5,
            )
        )
        records.append(
            _sign_record(
                f"quad_form_{report.direction}_sign",
                "linearization.sign_suite",
                report.value,
                want_negative=quad_form_signs_expected()[report.direction] < 0,
            )
        )

    records.append(
        _record(
            "self_adjointness_defect",
            "linearization.symmetry_defect",
            symmetry_defect(p, g, n_samples=20, seed=seed),
            0.0,
            1e-8,
        )
    )

    nd = build_psi(p, config["cutoff"]["R"], g)
    for key, value in orthogonality_residuals(nd).items():
        records.append(
            _record(f"negdir_{key}", "negdir.orthogonality_residuals", value, 0.0, 1e-7)
        )
    records.append(
        _sign_record(
            "negdir_quad_form_sign", "negdir.build_psi", nd.quad_form_value
        )
    )

    jd = jacobian_determinant(p)
    mass = soliton_mass(p)
    det_expected = -p.sigma * (2.0 - p.sigma) * p.c**2 * mass**2
    records.append(
        _record(
            "modulation_jacobian_det",
            "modulation.jacobian_determinant",
            jd["det"],
            det_expected,
            1e-5,
        )
    )

    # Equivariance: gauge-rotating and lattice-shifting a field near the
    # orbit moves the fitted (theta, y) by exactly the applied amounts.
    rng = np.random.default_rng(seed)
    phi0 = pr.sample(p, g, ProfileKind.PHI)
    k = g.wavenumbers
    coef = rng.standard_normal(g.n_points) + 1j * rng.standard_normal(g.n_points)
    bump = np.fft.ifft(coef * (np.abs(k) <= 2.0)) * np.exp(-((g.nodes / 20.0) ** 2))
    bump *= 0.01 / h1_norm(bump, g)
    u = ComplexField(g, phi0.values + bump)
    fit0 = solve_modulation(u, p)
    worst = 0.0
    for _ in range(5):
        alpha = float(rng.uniform(0.0, 2.0 * np.pi))
        shift = int(rng.integers(-g.n_points // 4, g.n_points // 4))
        moved = ComplexField(g, np.exp(1j * alpha) * np.roll(u.values, shift))
        fit1 = solve_modulation(
            moved, p, theta0=fit0.theta + alpha, y0=fit0.y + shift * g.spacing
        )
        dth = abs((fit1.theta - fit0.theta - alpha + np.pi) % (2.0 * np.pi) - np.pi)
        dy = abs(fit1.y - fit0.y - shift * g.spacing)
        worst = max(worst, dth, dy)
    records.append(
        _record(
            "modulation_equivariance", "modulation.solve_modulation", worst, 0.0, 1e-7
        )
    )

    worst = 0.0
    for _ in range(5):
        theta0 = float(rng.uniform(0.0, 2.0 * np.pi))
        y0 = float(rng.uniform(-20.0, 20.0))
        length = 2.0 * g.half_width
        x = (g.nodes - y0 + g.half_width) % length - g.half_width
        u = ComplexField(g, np.exp(1j * theta0) * pr.phi(p, x))
        fit = solve_modulation(u, p, theta0=theta0 + 0.05, y0=y0 + 0.3)
        dth = abs((fit.theta - theta0 + np.pi) % (2.0 * np.pi) - np.pi)
        worst = max(worst, dth, abs(fit.y - y0))
    records.append(
        _record("modulation_recovery", "modulation.solve_modulation", worst, 0.0, 1e-7)
    )
    return records


def _environment(config: dict) -> dict:
    return {
        "sigma": config["sigma"],
        "c": config["c"],
        "grid": config["grid"],
        "quadrature": config["quadrature"],
        "seed": config["seed"],
        "version": __version__,
    }


def _write_report(config: dict, payload: dict) -> str:
    out_dir = config["output_dir"]
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "report.json")
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=float)
        fh.write("\n")
    return path


def _write_csv(config: dict, name: str, header: list, rows: list) -> str:
    out_dir = config["output_dir"]
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{value:.17e}" for value in row) + "\n")
    return path


def cmd_verify(config: dict) -> int:
    records = verify_records(config)
    payload = {"environment": _environment(config), "checks": records}
    path = _write_report(config, payload)
    failed = [r for r in records if not r["passed"]]
    for record in records:
        status = "pass" if record["passed"] else "FAIL"
        print(f"[{status}] {record['name']}")
    print(f"report: {path}")
    return 1 if failed else 0


def cmd_negdir(config: dict) -> int:
    p = WaveParams(sigma=config["sigma"], c=config["c"])
    rel_tol = config["quadrature"]["rel_tol"]
    n_points = config["grid"]["N"]
    probe_radii = sorted(set([2.0, 4.0, 6.0, 8.0] + list(config["cutoff"]["sweep"])))
    rows = []
    r_star = None
    for radius in probe_radii:
        sol = solve_mu_nu(p, radius, rel_tol)
        length = phase_matched_half_width(p, 4.0 * radius + 20.0)
        g = Grid(half_width=length, n_points=n_points)
        nd = build_psi(p, radius, g)
        rows.append(
            (
                radius,
                sol["mu"],
                sol["nu"],
                nd.quad_form_value,
                sol["dev_mass"],
                sol["dev_momentum"],
            )
        )
        if nd.quad_form_value < 0.0 and r_star is None:
            r_star = radius
    rates = fit_rates(p, config["cutoff"]["sweep"], rel_tol)
    csv_path = _write_csv(
        config,
        "negdir.csv",
        ["R", "mu", "nu", "quad_form", "err_mass_rate", "err_mom_rate"],
        rows,
    )
    payload = {
        "environment": _environment(config),
        "r_star": r_star,
        "slope_mass": rates["slope_mass"],
        "slope_momentum": rates["slope_momentum"],
        "predicted_slope": rates["predicted_slope"],
        "table": csv_path,
    }
    path = _write_report(config, payload)
    ok = (
        r_star is not None
        and abs(rates["slope_mass"] - rates["predicted_slope"]) <= 0.15
        and abs(rates["slope_momentum"] - rates["predicted_slope"]) <= 0.15
    )
    print(f"R* = {r_star}; slopes {rates['slope_mass']:+.4f} / "
          f"{rates['slope_momentum']:+.4f} vs {rates['predicted_slope']:+.4f}")
    print(f"report: {path}\ntable: {csv_path}")
    return 0 if ok else 1


def _trace_rows(trace) -> list:
    rows = []
    e0, p0, m0 = trace.energy[0], trace.momentum[0], trace.mass[0]
    for i, t in enumerate(trace.times):
        rows.append(
            (
                t,
                (trace.energy[i] - e0) / max(abs(e0), 1e-300),
                (trace.momentum[i] - p0) / max(abs(p0), 1e-300),
                (trace.mass[i] - m0) / max(abs(m0), 1e-300),
                trace.orbit_distance[i],
                trace.theta[i],
                trace.shift[i],
                trace.a_values[i] if trace.a_values else 0.0,
            )
        )
    return rows


def cmd_evolve(config: dict) -> int:
    p = WaveParams(sigma=config["sigma"], c=config["c"])
    g = _grid(config)
    nd = build_psi(p, config["cutoff"]["R"], g)
    integ = config["integrator"]
    spec = IntegratorSpec(dt=integ["dt"])
    exp = config["experiment"]
    header = ["t", "E_drift", "P_drift", "M_drift", "distance", "theta", "y", "A"]
    summary = {}
    aborted = False

    control = None
    betas = list(exp["betas"])
    if 0.0 in betas:
        betas.remove(0.0)
        try:
            phi0 = pr.sample(p, g, ProfileKind.PHI)
            control = evolve(
                phi0, p, integ["t_end"], spec, integ["sample_every"], nd=nd
            )
            csv_path = _write_csv(config, "trace_0.csv", header, _trace_rows(control))
            summary["0"] = {
                "escaped": False,
                "escape_time": None,
                "max_distance": max(control.orbit_distance),
                "trace": csv_path,
            }
        except BlowUpError as exc:
            summary["0"] = {"blow_up_suspected": True, "abort_time": exc.time}
            aborted = True

    for beta in betas:
        try:
            out = instability_experiment(
                p,
                nd,
                beta,
                integ["t_end"],
                spec,
                integ["sample_every"],
                grid_floor=exp["grid_floor"],
                escape_factor=exp["escape_factor"],
                control_factor=exp["control_factor"],
                control=control,
            )
            if control is None:
                control = out["control"]
            csv_path = _write_csv(
                config, f"trace_{beta}.csv", header, _trace_rows(out["perturbed"])
            )
            summary[str(beta)] = {
                "escaped": out["escape_time"] is not None,
                "escape_time": out["escape_time"],
                "initial_distance": out["initial_distance"],
                "a_monotone_fraction": out["a_monotone_fraction"],
                "a_orientation": out["a_orientation"],
                "max_control_distance": out["max_control_distance"],
                "trace": csv_path,
            }
        except BlowUpError as exc:
            summary[str(beta)] = {"blow_up_suspected": True, "abort_time": exc.time}
            aborted = True

    payload = {"environment": _environment(config), "runs": summary}
    path = _write_report(config, payload)
    for key, value in summary.items():
        print(f"beta={key}: {json.dumps(value, default=float)}")
    print(f"report: {path}")
    return 3 if aborted else 0


def _sweep_point(args):
    config, sigma, c = args
    point = copy.deepcopy(config)
    point["sigma"], point["c"] = sigma, c
    try:
        validate_config(point)
    except ConfigError as exc:
        return {"sigma": sigma, "c": c, "invalid": str(exc)}
    # Corner points of the sweep have both wider Fourier support (large
    # sigma*c sharpens the profile) and slower spatial decay (small sigma*c
    # fattens the algebraic tails) than the base point, so the verification
    # grid is refined relative to the configured resolution.
    point["grid"]["N"] = point["grid"]["N"] * 8
    records = verify_records(point)
    p = WaveParams(sigma=sigma, c=c)
    g = _grid(point)
    nd = build_psi(p, point["cutoff"]["R"], g)
    return {
        "sigma": sigma,
        "c": c,
        "checks": records,
        "all_passed": all(r["passed"] for r in records),
        "quad_form_value": nd.quad_form_value,
    }


def cmd_sweep(config: dict, jobs: int = 1) -> int:
    points = [
        (config, sigma, c)
        for sigma in sorted(config["sweep_sigmas"])
        for c in sorted(config["sweep_cs"])
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, points))
    else:
        results = [_sweep_point(point) for point in points]
    margins = [
        abs(r["quad_form_value"]) for r in results if "quad_form_value" in r
    ]
    payload = {
        "environment": _environment(config),
        "points": results,
        "worst_negativity_margin": min(margins) if margins else None,
    }
    path = _write_report(config, payload)
    ok = True
    for result in results:
        if "invalid" in result:
            print(f"sigma={result['sigma']} c={result['c']}: invalid ({result['invalid']})")
            ok = False
        else:
            status = "pass" if result["all_passed"] else "FAIL"
            print(f"sigma={result['sigma']} c={result['c']}: {status}")
            ok = ok and result["all_passed"]
    print(f"report: {path}")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gdnlslab",
        description="verification laboratory for endpoint gDNLS solitary waves",
    )
    parser.add_argument("command", choices=["verify", "negdir", "evolve", "sweep", "print-default-config"])
    parser.add_argument("--config", default=None, help="path to a JSON config")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    args = parser.parse_args(argv)

    if args.command == "print-default-config":
        print(json.dumps(DEFAULT_CONFIG, indent=2))
        return 0

    overrides = {}
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    try:
        config = load_config(args.config, overrides)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "negdir":
            return cmd_negdir(config)
        if args.command == "evolve":
            return cmd_evolve(config)
        if args.command == "sweep":
            return cmd_sweep(config, jobs=args.jobs)
    except BlowUpError as exc:
        print(f"runtime abort: blow-up suspected at t = {exc.time}", file=sys.stderr)
        return 3
    except RuntimeError as exc:
        print(f"runtime abort: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
