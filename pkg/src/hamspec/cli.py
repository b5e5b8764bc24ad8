"""Command-line entry point: ``hamspec <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import acceptance, continuum, expansion, krein, model_gl, validate
from .config import RunConfig, load
from .errors import ConditionViolation, ConfigError
from .problem import GLProblem, build_problem


EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def _error(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


class UsageError(Exception):
    """Bad input that is not a config-file problem (missing file, bad option)."""


# --------------------------------------------------------------------------- output


def _f(v: float) -> str:
    return "%.17g" % v


def write_csv(path: Path, header: list[str], rows, meta: dict | None = None) -> None:
    """Comma-separated file; ``meta`` goes into leading ``# key=value`` lines."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for k, v in (meta or {}).items():
            fh.write(f"# {k}={_f(v) if isinstance(v, float) else v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_f(x) if isinstance(x, (float, np.floating)) else x for x in row])


def write_json(path: Path, obj) -> None:
    text = json.dumps(acceptance._jsonable(obj), indent=2, sort_keys=True, allow_nan=True)
    path.write_text(text + "\n", encoding="utf-8")


def read_initial(path: str, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Read ``x, psi, psidot`` columns and interpolate onto ``points``."""
    try:
        data = np.loadtxt(path, delimiter=",", comments="#", skiprows=_header_rows(path), ndmin=2)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read initial data '{path}': {exc}") from None
    if data.shape[1] != 3:
        raise UsageError(f"initial data '{path}' needs 3 columns (x, psi, psidot), found {data.shape[1]}")
    x = data[:, 0]
    if np.any(np.diff(x) <= 0):
        raise UsageError(f"initial data '{path}': x column must be strictly increasing")
    span = points[-1] - points[0]
    if x[0] > points[0] + 1e-9 * span or x[-1] < points[-1] - 1e-9 * span:
        raise UsageError(f"initial data '{path}' covers [{x[0]:g}, {x[-1]:g}], grid needs [{points[0]:g}, {points[-1]:g}]")
    return np.interp(points, x, data[:, 1]), np.interp(points, x, data[:, 2])


def _header_rows(path: str) -> int:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            try:
                [float(t) for t in s.split(",")]
                return 0
            except ValueError:
                return 1
    return 0


# --------------------------------------------------------------------------- helpers


def _problem(cfg: RunConfig) -> GLProblem:
    c = cfg
    return build_problem(c.grid.L, c.grid.N, c.model.a, c.model.m, c.model.potential_mode, c.model.discretization, c.spectral.kernel_tol)


def _scheme(cfg: RunConfig) -> str:
    return "lattice" if cfg.model.discretization == "lattice" else "line"


def _times(cfg: RunConfig) -> np.ndarray:
    return np.arange(0.0, cfg.time.T + 0.5 * cfg.time.sample, cfg.time.sample)


def _check_dt(cfg: RunConfig, pr: GLProblem) -> None:
    limit = validate.stability_limit(pr.S)
    if cfg.time.dt >= limit:
        raise ConfigError(f"{cfg.time.dt} is above the leapfrog stability bound {limit:.6g}", "time.dt")


# --------------------------------------------------------------------------- commands


def cmd_check(cfg: RunConfig, out: Path, args) -> int:
    pr = _problem(cfg)
    rep = krein.check_conditions(pr.system)
    res = continuum.detect_resonance(pr.V, pr.mass, pr.grid, _scheme(cfg), eigenvalues=pr.spectral.eigenvalues)
    report = rep.to_dict()
    report["sc11"] = {"resonant": res.resonant, "indicator": res.indicator, "transmission": res.transmission}
    write_json(out / "check.json", report)
    print(json.dumps(acceptance._jsonable(report), indent=2, sort_keys=True))
    if res.resonant:
        _warn(f"threshold resonance detected (|T| = {res.transmission:.3g}): the absence-of-resonance condition fails")
    for v in rep.violations:
        _error(f"condition violated: {v}")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_spectrum(cfg: RunConfig, out: Path, args) -> int:
    pr = _problem(cfg)
    lam = pr.spectral.clean_eigenvalues
    edge = pr.edge
    meta = {"m2": cfg.model.m**2, "edge": edge, "discretization": cfg.model.discretization, "h": pr.grid.spacing}
    write_csv(out / "spectrum_S.csv", ["index", "lambda", "below_edge"], ((i, float(v), str(bool(v < edge)).lower()) for i, v in enumerate(lam)), meta)
    om = np.sort(pr.system.omega)
    write_csv(out / "spectrum_H.csv", ["index", "omega"], ((i, float(v)) for i, v in enumerate(om)), meta)
    below = lam[lam < edge]
    print(f"{below.size} eigenvalues of S below the edge {edge:.6g}: " + ", ".join(f"{v:.6g}" for v in below))
    return EXIT_OK


def cmd_kink(cfg: RunConfig, out: Path, args) -> int:
    pr = _problem(cfg)
    if pr.kink is None:
        raise ConfigError("mode 'free' has no kink", "model.potential_mode")
    k = pr.kink
    write_csv(out / "kink.csv", ["x", "s0", "s0_prime", "V"], zip(pr.grid.points, k.values, k.derivative, pr.V))
    res = model_gl.stationary_residual(k)
    fit = model_gl.verify_decay(pr.V, pr.grid)
    info = {"stationary_residual_max": float(np.abs(res).max()), "decay_kappa": fit.kappa, "decay_C": fit.C, "mass": pr.mass}
    write_json(out / "kink.json", info)
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def cmd_eigenfunction(cfg: RunConfig, out: Path, args) -> int:
    pr = _problem(cfg)
    scheme = args.scheme or _scheme(cfg)
    if abs(args.omega) <= pr.mass:
        raise UsageError(f"|omega| = {abs(args.omega):g} is not above the threshold {pr.mass:.6g}")
    ef = continuum.solve_lippmann_schwinger(args.omega, args.parity, pr.V, pr.mass, pr.grid, scheme)
    ef = continuum.normalize_continuum([ef], pr.mass, pr.grid)[0]
    ef = continuum.lift_to_hamilton(ef, pr.system)
    rows = zip(pr.grid.points, ef.e_values.real, ef.e_values.imag)
    write_csv(out / "eigenfunction.csv", ["x", "re_e", "im_e"], rows, {"omega": float(args.omega), "parity": args.parity, "scheme": scheme})
    info = {
        "omega": float(args.omega),
        "parity": args.parity,
        "scheme": scheme,
        "norm_const": ef.norm_const,
        "rcond": ef.rcond,
        "residuals": continuum.hamilton_residuals(ef, pr.system, pr.grid),
    }
    write_json(out / "eigenfunction.json", info)
    print(json.dumps(acceptance._jsonable(info), sort_keys=True))
    return EXIT_OK


def _initial_state(args, pr: GLProblem) -> np.ndarray:
    if getattr(args, "initial", None):
        psi, psid = read_initial(args.initial, pr.grid.points)
    else:
        psi, psid = acceptance.gaussian_initial_data(pr.grid.points)
    return np.concatenate([psi, psid]).astype(complex)


def cmd_expand(cfg: RunConfig, out: Path, args) -> int:
    pr = _problem(cfg)
    X0 = _initial_state(args, pr)
    n = pr.grid.n_points
    omega_max = cfg.omega_max
    if _scheme(cfg) == "lattice":
        omega_max = min(omega_max, continuum.band_top(pr.mass, pr.grid, acceptance.BAND_FRACTION))
    fam = expansion.build_family(pr.system, pr.V, pr.mass, pr.grid, omega_max, cfg.spectral.omega_margin, cfg.spectral.panels, cfg.spectral.panel_width, _scheme(cfg))
    exp = expansion.decompose(pr.system, X0, fam, threshold=pr.mass, measure=pr.grid.spacing)
    mu = np.sqrt(pr.grid.spacing)
    report = {
        "phi0_norm": float(mu * np.linalg.norm(exp.phi0)),
        "psi0_norm": float(mu * np.linalg.norm(exp.psi0)),
        "kernel_part_norm": float(mu * np.linalg.norm(exp.kernel_part)),
        "discrete": [[float(w), float(abs(c))] for w, c in zip(exp.discrete.omega, exp.discrete.C)],
        "continuum": [[float(w), float(c.real), float(c.imag)] for w, c in zip(fam.omega, exp.continuum_C)],
        "Omega_max": exp.Omega_max,
        "convention": exp.convention,
    }
    write_json(out / "expansion.json", report)
    times = _times(cfg)
    oracle = []
    for t in times:
        p, q = validate.exact_spectral_propagate(pr.spectral, X0[:n].real, X0[n:].real, t)
        oracle.append(np.concatenate([p, q]).astype(complex))
    m = cfg.model.m
    M_list = [M for M in (3 * m, 5 * m, 8 * m, 12 * m) if M < exp.Omega_max] + [exp.Omega_max]
    tab = expansion.convergence_curve(exp, pr.system, times, oracle, M_list, pr.grid)
    write_csv(out / "convergence.csv", ["M", "v_residual", "weighted_residual"], tab.rows())
    for M, v, w in tab.rows():
        print(f"M={M:.4g}  v_residual={v:.3e}  weighted_residual={w:.3e}")
    if not tab.monotone:
        _warn("residuals are not monotone in M")
    return EXIT_OK


def cmd_propagate(cfg: RunConfig, out: Path, args) -> int:
    pr = _problem(cfg)
    X0 = _initial_state(args, pr)
    n = pr.grid.n_points
    if args.method == "exact":
        X = krein.reconstruct_X(pr.system, X0, args.t)
    else:
        _check_dt(cfg, pr)
        if np.any(X0.imag != 0):
            raise UsageError("leapfrog takes real initial data")
        steps = max(1, int(round(args.t / cfg.time.dt)))
        tr = validate.leapfrog(pr.S, X0[:n].real, X0[n:].real, args.t / steps, args.t, record_every=steps)
        X = tr.states[-1].astype(complex)
    rows = zip(pr.grid.points, X[:n].real, X[n:].real)
    write_csv(out / "propagate.csv", ["x", "psi", "psidot"], rows, {"t": float(args.t), "method": args.method})
    e0, e1 = krein.energy(pr.system, X0), krein.energy(pr.system, X)
    info = {"t": float(args.t), "method": args.method, "energy_initial": e0, "energy_final": e1}
    write_json(out / "propagate.json", info)
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def cmd_validate(cfg: RunConfig, out: Path, args) -> int:
    pr = _problem(cfg)
    _check_dt(cfg, pr)
    results = acceptance.run_all(cfg, log=print)
    report = {"all_passed": all(r.passed for r in results), "criteria": [r.to_dict() for r in results]}
    write_json(out / "validation.json", report)
    for r in results:
        if not r.passed:
            _error(f"criterion {r.number} failed: measured {r.measured}, allowed {r.allowed}")
    return EXIT_OK if report["all_passed"] else EXIT_FAIL


COMMANDS = {
    "check": cmd_check,
    "spectrum": cmd_spectrum,
    "kink": cmd_kink,
    "eigenfunction": cmd_eigenfunction,
    "expand": cmd_expand,
    "propagate": cmd_propagate,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    def global_flags(default):
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--config", metavar="FILE", default=default, help="key = value config file")
        g.add_argument("--out", metavar="DIR", default=default, help="output directory (default: output_dir from config)")
        g.add_argument("--seed", type=int, metavar="K", default=default, help="override the random seed")
        return g

    # flags are accepted before and after the command; SUPPRESS keeps the sub-command from resetting them
    common = global_flags(argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="hamspec", description="Spectral analysis of the linearized kink Hamilton system.", parents=[global_flags(None)])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="verify structural conditions and the threshold classification")
    sub.add_parser("spectrum", parents=[common], help="write eigenvalues of S and H")
    sub.add_parser("kink", parents=[common], help="write the static kink and its linearization potential")
    e = sub.add_parser("eigenfunction", parents=[common], help="solve one continuum eigenfunction")
    e.add_argument("--omega", type=float, required=True, metavar="W")
    e.add_argument("--parity", choices=continuum.PARITIES, required=True, metavar="P")
    e.add_argument("--scheme", choices=continuum.SCHEMES)
    x = sub.add_parser("expand", parents=[common], help="eigenfunction expansion of initial data")
    x.add_argument("--initial", metavar="FILE", help="CSV with columns x, psi, psidot (default: Gaussian fixture)")
    t = sub.add_parser("propagate", parents=[common], help="propagate initial data to time T")
    t.add_argument("--t", type=float, required=True, metavar="T")
    t.add_argument("--initial", metavar="FILE")
    t.add_argument("--method", choices=("exact", "leapfrog"), default="exact")
    sub.add_parser("validate", parents=[common], help="run the acceptance suite")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        cfg = load(args.config) if args.config else RunConfig()
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        out = Path(args.out or cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, out, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        _error(str(exc))
        return EXIT_USAGE
    except ConditionViolation as exc:
        print(f"condition violated: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
