"""Acceptance criteria as executable checks shared by the test-suite and ``validate``.

Each ``criterion_*`` function returns a :class:`CriterionResult` holding the
measured values next to the allowed bounds.  Expensive objects (grids,
systems, the continuum family of the Gaussian fixture) are built once per
:class:`AcceptanceContext`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from . import continuum, expansion, krein, validate
from .config import RunConfig
from .grid import weighted_norm
from .problem import GLProblem, build_problem

# Jost classification of the detuned fixture V0 + 0.3 exp(-x^2), computed once
# with the lattice recurrence at omega - m = 1e-4 (|T| = 0.462) and confirmed by
# the continuum ODE oracle below; frozen as a regression value.
DETUNED_STRENGTH = 0.3
DETUNED_RESONANT = False

# Continuum cutoffs and probe frequencies stay below this fraction of the lattice band.
BAND_FRACTION = 0.8
PROBE_OMEGAS = (1.5, 2.0, 3.0)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    allowed: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] criterion {self.number:2d} {self.title}: {parts}"

    def to_dict(self) -> dict:
        """JSON form; wall-clock times are reduced to a budget flag so reports stay reproducible."""
        measured = dict(self.measured)
        if "seconds" in measured:
            measured["within_time_budget"] = measured.pop("seconds") < self.allowed.get("seconds", np.inf)
        return {"number": self.number, "title": self.title, "passed": bool(self.passed), "measured": _jsonable(measured), "allowed": _jsonable(self.allowed)}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.3e}"
    if isinstance(v, (list, tuple)):
        return "[" + " ".join(_fmt(x) for x in v) + "]"
    return str(v)


def _jsonable(d):
    if isinstance(d, dict):
        return {k: _jsonable(v) for k, v in d.items()}
    if isinstance(d, (list, tuple)):
        return [_jsonable(v) for v in d]
    if isinstance(d, (np.bool_, bool)):
        return bool(d)
    if isinstance(d, (np.integer,)):
        return int(d)
    if isinstance(d, (np.floating, float)):
        return float(d)
    return d


def gaussian_initial_data(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Displaced Gaussian bumps in both field components (variance 1/4)."""
    psi = np.exp(-((points - 1.0) ** 2) / 0.5)
    psid = 0.5 * np.exp(-((points + 0.5) ** 2) / 0.5)
    return psi, psid


class AcceptanceContext:
    """Lazily built shared fixtures for one configuration."""

    def __init__(self, cfg: RunConfig | None = None):
        self.cfg = cfg or RunConfig()
        self.timings: dict[str, float] = {}

    def _problem(self, n_points: int, potential_mode: str, discretization: str | None = None) -> GLProblem:
        c = self.cfg
        return build_problem(c.grid.L, n_points, c.model.a, c.model.m, potential_mode, discretization or c.model.discretization, c.spectral.kernel_tol)

    @cached_property
    def fine(self) -> GLProblem:
        t0 = time.perf_counter()
        pr = self._problem(self.cfg.validate.fine_N, "cubic")
        self.timings["fine_spectrum"] = time.perf_counter() - t0
        return pr

    @cached_property
    def base(self) -> GLProblem:
        return self._problem(self.cfg.grid.N, self.cfg.model.potential_mode)

    @cached_property
    def gaussian(self) -> np.ndarray:
        psi, psid = gaussian_initial_data(self.base.grid.points)
        return np.concatenate([psi, psid]).astype(complex)

    @cached_property
    def family(self) -> expansion.ContinuumFamily:
        c, pr = self.cfg, self.base
        t0 = time.perf_counter()
        fam = expansion.build_family(pr.system, pr.V, pr.mass, pr.grid, self.omega_max, c.spectral.omega_margin, c.spectral.panels, c.spectral.panel_width)
        self.timings["family"] = time.perf_counter() - t0
        return fam

    @property
    def omega_max(self) -> float:
        """Configured cutoff, clipped below the lattice band edge on coarse grids."""
        return min(self.cfg.omega_max, continuum.band_top(self.base.mass, self.base.grid, BAND_FRACTION))

    @cached_property
    def expansion(self) -> expansion.ExpansionData:
        pr = self.base
        return expansion.decompose(pr.system, self.gaussian, self.family, threshold=pr.mass, measure=pr.grid.spacing)

    @cached_property
    def times(self) -> np.ndarray:
        T, dt = self.cfg.time.T, self.cfg.time.sample
        return np.arange(0.0, T + 0.5 * dt, dt)

    @cached_property
    def oracle_states(self) -> list[np.ndarray]:
        pr = self.base
        psi, psid = gaussian_initial_data(pr.grid.points)
        out = []
        for t in self.times:
            p, q = validate.exact_spectral_propagate(pr.spectral, psi, psid, t)
            out.append(np.concatenate([p, q]).astype(complex))
        return out

    @cached_property
    def random_suite(self) -> list[dict]:
        """Seeded random systems with n <= 40 and mixed kernel geometry."""
        rng = np.random.default_rng(self.cfg.seed)
        specs = []
        for i in range(self.cfg.validate.random_systems):
            n = 2 * int(rng.integers(2, 21))
            kd = int(rng.integers(0, min(5, (n - 2) // 2) + 1))
            gap = float(rng.uniform(0.1, 1.0))
            specs.append({"n": n, "kernel_dim": kd, "gap": gap, "seed": int(self.cfg.seed * 1000 + i), "isotropic": bool(i % 3 == 0)})
        return specs


# --------------------------------------------------------------------------- criteria


def criterion_1(ctx: AcceptanceContext) -> CriterionResult:
    t0 = time.perf_counter()
    pr = ctx.fine
    elapsed = ctx.timings.get("fine_spectrum", time.perf_counter() - t0)
    lam = pr.spectral.eigenvalues
    meas = {"lambda0": lam[0], "lambda1": lam[1], "edge_m2": pr.model.mass**2, "lattice_edge": pr.edge, "h": pr.grid.spacing, "seconds": elapsed}
    ok = abs(lam[0]) < 1e-5 and abs(lam[1] - 1.5) < 1e-3 and abs(pr.model.mass**2 - 2.0) < 1e-12 and elapsed < 30
    return CriterionResult(1, "kink spectrum", ok, meas, {"lambda0": 1e-5, "lambda1_dev": 1e-3, "seconds": 30})


def criterion_2(ctx: AcceptanceContext) -> CriterionResult:
    pr = ctx.fine
    ds = pr.zero_mode
    res = float(np.linalg.norm(pr.S.matrix @ ds) / np.linalg.norm(ds))
    v0 = pr.spectral.eigenvectors[:, 0]
    align = float(abs(v0 @ ds) / np.linalg.norm(ds))
    ok = res < 1e-6 and align > 1 - 1e-6
    return CriterionResult(2, "zero mode", ok, {"residual": res, "alignment": align}, {"residual": 1e-6, "alignment": 1 - 1e-6})


def _random_stats(ctx: AcceptanceContext) -> list[dict]:
    if "random_stats" in ctx.__dict__:
        return ctx.__dict__["random_stats"]
    rows = []
    t0 = time.perf_counter()
    for params in ctx.random_suite:
        s = krein.random_system(params["n"], params["kernel_dim"], params["gap"], params["seed"], params["isotropic"])
        om = np.abs(s.omega)
        nz = om[om >= 1e-8]
        eps = float(nz.min()) if nz.size else np.inf
        jd = krein.jordan_structure(s)
        ge2, ge3 = krein.nilpotent_block_counts(s.A)
        rows.append(
            {
                **params,
                "epsilon": eps,
                "zero_count": int(np.sum(om < 1e-8)),
                "block_count": jd.block_count,
                "pair_residual": jd.pair_residual,
                "nilpotent_ge2": ge2,
                "nilpotent_ge3": ge3,
                "zero_basis_dim": int(s.zero_basis.shape[1]),
            }
        )
    ctx.timings["random_suite"] = time.perf_counter() - t0
    ctx.__dict__["random_stats"] = rows
    return rows


def criterion_3(ctx: AcceptanceContext) -> CriterionResult:
    rows = _random_stats(ctx)
    bad = [r for r in rows if not r["epsilon"] > 1e-6 or r["zero_count"] != r["kernel_dim"] + r["zero_basis_dim"]]
    secs = ctx.timings["random_suite"]
    meas = {"systems": len(rows), "violations": len(bad), "min_epsilon": min(r["epsilon"] for r in rows), "max_n": max(r["n"] for r in rows), "seconds": secs}
    ok = not bad and len(rows) >= 200 and meas["max_n"] <= 40 and secs < 60
    return CriterionResult(3, "spectral gap of H (random systems)", ok, meas, {"epsilon": 1e-6, "zero": 1e-8, "seconds": 60})


def criterion_4(ctx: AcceptanceContext) -> CriterionResult:
    pr = ctx.base
    if pr.zero_mode is None or pr.spectral.kernel_dim == 0:
        pr = ctx._problem(ctx.cfg.grid.N, "cubic")
    jd = krein.jordan_structure(pr.system)
    rows = _random_stats(ctx)
    mismatch = sum(1 for r in rows if r["block_count"] != r["nilpotent_ge2"] or r["nilpotent_ge3"] != 0)
    counts = sorted({r["block_count"] for r in rows})
    meas = {"kink_blocks": jd.block_count, "pair_residual": jd.pair_residual, "chain3_residual": jd.chain3_residual, "random_mismatches": mismatch, "random_block_counts": counts}
    ok = jd.block_count == 1 and jd.pair_residual < 1e-9 and jd.chain3_residual > 0.1 and mismatch == 0
    return CriterionResult(4, "Jordan structure", ok, meas, {"pair_residual": 1e-9, "chain3_residual_min": 0.1})


def criterion_5(ctx: AcceptanceContext) -> CriterionResult:
    rng = np.random.default_rng(ctx.cfg.seed + 5)
    sizes = [40, 80, 120, 200]
    worst = 0.0
    worst_krein = 0.0
    count = 0
    max_norm_t = 0.0
    times = np.arange(0.0, 20.0 + 1e-9, 1.0)
    for i, n in enumerate(sizes):
        s = krein.random_system(n, 1 + i, 0.25, ctx.cfg.seed + 100 + i, isotropic=bool(i % 2))
        anorm = float(np.linalg.norm(s.A, 2))
        max_norm_t = max(max_norm_t, anorm * times[-1])
        for _ in range(5):
            X0 = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            count += 1
            for t in times:
                X = krein.reconstruct_X(s, X0, t)
                ref = sla.expm(s.A * t) @ X0
                worst = max(worst, float(np.linalg.norm(X - ref) / np.linalg.norm(X0)))
                Zt = krein.propagate_Z(s, s.Lambda @ X0, t)
                worst_krein = max(worst_krein, float(np.linalg.norm(s.Lambda @ X - Zt) / np.linalg.norm(X0)))
    ok = worst < 1e-8 and worst_krein < 1e-9 and count >= 20
    meas = {"initial_states": count, "max_dim": max(sizes), "rel_error": worst, "krein_equivalence": worst_krein, "max_normA_t": max_norm_t}
    return CriterionResult(5, "propagator vs matrix exponential", ok, meas, {"rel_error": 1e-8, "krein_equivalence": 1e-9})


def criterion_6(ctx: AcceptanceContext) -> CriterionResult:
    pr = ctx.base if ctx.base.spectral.kernel_dim else ctx._problem(ctx.cfg.grid.N, "cubic")
    sysm = pr.system
    phi0, psi0 = krein.jordan_structure(sysm).secular_pairs[0]
    worst = 0.0
    for t in ctx.times:
        X = krein.reconstruct_X(sysm, psi0, t)
        worst = max(worst, float(np.linalg.norm(X - (t * phi0 + psi0)) / np.linalg.norm(psi0)))
    exp = expansion.decompose(sysm, psi0.astype(complex), None)
    coeff = float(np.abs(exp.discrete.C).max())
    ok = worst < 1e-9
    return CriterionResult(6, "secular solution", ok, {"rel_error": worst, "max_mode_coefficient": coeff}, {"rel_error": 1e-9})


def criterion_7(ctx: AcceptanceContext) -> CriterionResult:
    c = ctx.cfg
    pr = ctx._problem(c.validate.fine_N, "cubic", "sampled")
    g, m = pr.grid, pr.model.mass
    zero = continuum.solve_lippmann_schwinger(2.0, "odd", np.zeros(g.n_points), m, g, "line")
    free_err = float(np.abs(zero.e_values - continuum.free_wave(2.0, m, "odd", g)).max())
    worst_oracle = 0.0
    worst_ll2 = 0.0
    for w in PROBE_OMEGAS:
        R = continuum.resolvent(w**2, pr.V, m, g, "line")
        for p in continuum.PARITIES:
            e = continuum.solve_lippmann_schwinger(w, p, pr.V, m, g, "line").e_values
            ref = validate.reflectionless_eigenfunction(g.points, w, m, p)
            scale = weighted_norm(ref, 2, g)
            worst_oracle = max(worst_oracle, weighted_norm(e - ref, 2, g) / scale)
            f = continuum.free_wave(w, m, p, g)
            e2 = f - np.conj(R) @ (pr.V * f)
            worst_ll2 = max(worst_ll2, weighted_norm(e - e2, 2, g) / scale)
    lat = ctx.base
    worst_lat = 0.0
    top = continuum.band_top(lat.mass, lat.grid, BAND_FRACTION)
    for w in [w for w in PROBE_OMEGAS if w < top]:
        for p in continuum.PARITIES:
            e = continuum.solve_lippmann_schwinger(w, p, lat.V, lat.mass, lat.grid, "lattice").e_values
            e2 = continuum.ll2_eigenfunction(w, p, lat.V, lat.mass, lat.grid, "lattice")
            worst_lat = max(worst_lat, weighted_norm(e - e2, 2, lat.grid) / weighted_norm(e2, 2, lat.grid))
    ok = free_err < 1e-12 and worst_oracle < 1e-5 and worst_ll2 < 1e-6 and worst_lat < 1e-6
    meas = {"free_identity": free_err, "oracle_error": worst_oracle, "ll2_line": worst_ll2, "ll2_lattice": worst_lat}
    return CriterionResult(7, "Lippmann-Schwinger eigenfunctions", ok, meas, {"free_identity": 1e-12, "oracle_error": 1e-5, "ll2": 1e-6})


def ode_transmission(potential, k: float, half_length: float) -> float:
    """``|T(k)|`` for ``-u'' + V u = k^2 u`` by integrating the right Jost solution with RK45.

    ``u = exp(ikx)`` is imposed at ``x = L`` and integrated to ``x = -L``, where
    the solution is split into ``a exp(ikx) + b exp(-ikx)``; ``T = 1/a``.
    """

    def rhs(x, y):
        u, du = y[0] + 1j * y[1], y[2] + 1j * y[3]
        d2 = (potential(x) - k * k) * u
        return [du.real, du.imag, d2.real, d2.imag]

    L = half_length
    u0 = np.exp(1j * k * L)
    sol = solve_ivp(rhs, (L, -L), [u0.real, u0.imag, (1j * k * u0).real, (1j * k * u0).imag], rtol=1e-11, atol=1e-13, method="DOP853")
    u = sol.y[0, -1] + 1j * sol.y[1, -1]
    du = sol.y[2, -1] + 1j * sol.y[3, -1]
    a = (u + du / (1j * k)) * 0.5 * np.exp(1j * k * L)
    return float(1.0 / abs(a))


def criterion_8(ctx: AcceptanceContext) -> CriterionResult:
    c = ctx.cfg
    pr = ctx._problem(c.grid.N, "cubic")
    g = pr.grid
    free = continuum.detect_resonance(np.zeros(g.n_points), pr.mass, g)
    kink = continuum.detect_resonance(pr.V, pr.mass, g, eigenvalues=pr.spectral.eigenvalues)
    det_pr = ctx._problem(c.grid.N, f"detuned({DETUNED_STRENGTH})")
    det = continuum.detect_resonance(det_pr.V, det_pr.mass, g, eigenvalues=det_pr.spectral.eigenvalues)
    m = pr.model.mass
    k_probe = float(np.sqrt((m + 1e-4) ** 2 - m**2))
    v_kink = lambda x: -1.5 * m**2 / np.cosh(0.5 * m * x) ** 2
    v_det = lambda x: v_kink(x) + DETUNED_STRENGTH * np.exp(-x * x)
    t_kink = ode_transmission(v_kink, k_probe, c.grid.L)
    t_det = ode_transmission(v_det, k_probe, c.grid.L)
    ode_det_resonant = t_det > 0.5
    meas = {
        "free_T": free.transmission,
        "kink_T": kink.transmission,
        "detuned_T": det.transmission,
        "kink_T_ode": t_kink,
        "detuned_T_ode": t_det,
        "free_resonant": free.resonant,
        "kink_resonant": kink.resonant,
        "detuned_resonant": det.resonant,
    }
    ok = free.resonant and kink.resonant and free.transmission > 0.5 and kink.transmission > 0.5
    ok = ok and det.resonant == DETUNED_RESONANT and ode_det_resonant == DETUNED_RESONANT and t_kink > 0.5
    return CriterionResult(8, "threshold resonance detector", ok, meas, {"T_threshold": 0.5, "detuned_resonant": DETUNED_RESONANT})


def _window(lo: float, hi: float, fam: expansion.ContinuumFamily, m: float, reach: float = 5.0) -> tuple[float, float]:
    """Packet support ``[lo, hi]``, mapped affinely from ``[m, reach]`` into the covered band when it does not fit."""
    if hi <= fam.coverage:
        return lo, hi
    scale = (fam.coverage - m) / (reach - m)
    return m + (lo - m) * scale, m + (hi - m) * scale


def criterion_9(ctx: AcceptanceContext) -> CriterionResult:
    fam = ctx.family
    pr = ctx.base
    worst = 0.0
    for p in continuum.PARITIES:
        for sgn in (1, -1):
            sel = fam.channel(p, sgn)
            g = continuum.bump(np.abs(fam.omega[sel]), *_window(2.5, 4.0, fam, pr.mass))
            F = (fam.weights[sel] * g) @ fam.h[sel]
            lhs = pr.grid.spacing * float(np.real(np.vdot(F, F)))
            rhs = 2.0 * np.pi * float(np.sum(fam.weights[sel] * g**2))
            worst = max(worst, abs(lhs - rhs) / rhs)
    budget = expansion.parseval_budget(ctx.expansion, pr.system, ctx.gaussian)
    pars = abs(budget["continuum"] - budget["continuum_direct"]) / budget["continuum_direct"]
    tol = ctx.cfg.expansion.quad_tol
    ok = worst < tol and pars < tol
    return CriterionResult(9, "delta normalization and Parseval", ok, {"smeared_delta": worst, "parseval": pars}, {"smeared_delta": tol, "parseval": tol})


def criterion_10(ctx: AcceptanceContext) -> CriterionResult:
    t0 = time.perf_counter()
    exp = ctx.expansion
    pr = ctx.base
    m = pr.model.mass
    M_list = [M for M in (3 * m, 5 * m, 8 * m) if M < exp.Omega_max] + [min(12 * m, exp.Omega_max)]
    tab = expansion.convergence_curve(exp, pr.system, ctx.times, ctx.oracle_states, M_list, pr.grid)
    elapsed = time.perf_counter() - t0 + ctx.timings.get("family", 0.0)
    final = float(tab.v_residual[-1])
    tol = ctx.cfg.expansion.recon_tol
    ok = final < tol and tab.monotone and elapsed < 300
    meas = {"v_residuals": [float(v) for v in tab.v_residual], "weighted_residuals": [float(v) for v in tab.weighted_residual], "final": final, "monotone": tab.monotone, "seconds": elapsed}
    return CriterionResult(10, "eigenfunction expansion vs exact propagation", ok, meas, {"final": tol, "slack": tab.slack, "seconds": 300})


def criterion_11(ctx: AcceptanceContext) -> CriterionResult:
    exp = ctx.expansion
    pr = ctx.base
    sym = expansion.symplectic_renormalize(exp)
    fam = sym.family
    worst = 0.0
    imag_ratio = 0.0
    for p in continuum.PARITIES:
        for sgn in (1, -1):
            sel = fam.channel(p, sgn)
            w = np.abs(fam.omega[sel])
            g1 = continuum.bump(w, *_window(2.5, 4.0, fam, pr.mass))
            g2 = continuum.bump(w, *_window(3.0, 4.5, fam, pr.mass))
            lhs, rhs = expansion.symplectic_pairing_test(sym, pr.system, g1, g2, sel)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
            X1 = expansion.symplectic_packet(sym, g1, sel)
            pj = expansion.j_pairing(X1, X1, pr.system, sym.measure)
            imag_ratio = max(imag_ratio, abs(pj.real) / abs(pj))
    inv = 0.0
    for t in (0.0, 7.5, 20.0):
        a = expansion.reconstruct(exp, t)
        b = expansion.reconstruct(sym, t)
        inv = max(inv, float(np.linalg.norm(a - b) / np.linalg.norm(a)))
    tol = ctx.cfg.expansion.quad_tol
    ok = worst < tol and inv < 1e-10 and imag_ratio < 1e-3
    return CriterionResult(11, "symplectic normalization", ok, {"pairing_error": worst, "reconstruction_change": inv, "real_part_ratio": imag_ratio}, {"pairing_error": tol, "reconstruction_change": 1e-10})


def criterion_12(ctx: AcceptanceContext) -> CriterionResult:
    pr = ctx.base
    psi, psid = gaussian_initial_data(pr.grid.points)
    T = ctx.cfg.time.T
    limit = validate.stability_limit(pr.S)
    base_dt = ctx.cfg.time.dt
    if base_dt >= limit:
        raise ValueError(f"time.dt = {base_dt} above the leapfrog stability bound {limit:.4g}")
    steps = [4 * base_dt, 2 * base_dt, base_dt]
    steps = [s for s in steps if s < limit] or [base_dt]
    errs = []
    for dt in steps:
        every = max(1, int(round(ctx.cfg.time.sample / dt)))
        tr = validate.leapfrog(pr.S, psi, psid, dt, T, record_every=every)
        ex = validate.exact_trajectory(pr.spectral, pr.S, psi, psid, tr.times)
        errs.append(validate.compare(tr, ex, pr.system, grid=pr.grid, measure=pr.grid.spacing)["sup_x"])
    order = validate.convergence_order(steps, errs) if len(steps) > 1 else float("nan")
    X0 = ctx.gaussian
    e0 = krein.energy(pr.system, X0)
    drift = max(abs(krein.energy(pr.system, krein.reconstruct_X(pr.system, X0, t)) - e0) / abs(e0) for t in ctx.times)
    ok = order >= 1.9 and drift < 1e-9
    return CriterionResult(12, "leapfrog vs exact propagation", ok, {"order": order, "errors": errs, "energy_drift": drift}, {"order_min": 1.9, "energy_drift": 1e-9})


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10, criterion_11, criterion_12]


def run_all(cfg: RunConfig | None = None, log=print) -> list[CriterionResult]:
    ctx = AcceptanceContext(cfg)
    results = []
    for fn in CRITERIA:
        res = fn(ctx)
        if log is not None:
            log(res.line())
        results.append(res)
    return results
