"""Experiment runners: dispatch a resolved config, write reports and tables.

Every runner returns a JSON-serializable report dict embedding the resolved
config; the CLI wraps this with file emission, figures, and run metadata.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from ..dynamics import (
    BlowUpError,
    EquationSpec,
    Model,
    free_trajectory,
    mass,
    nonlinearity,
    solve,
)
from ..energy import cap_exponent, modified_energy_ledger
from ..gauge import (
    default_test_function,
    frozen_pairing,
    gauge_equivalence_residual,
    oscillation_experiment,
    rough_tail_field,
)
from ..norms import (
    NormSpec,
    TimeWindow,
    energy_norm,
    short_time_norms,
    spacetime_transform,
    strichartz_probe,
    xk1_ratio,
    xsb_norm,
)
from ..resonance import verify_identities
from ..spectral import SpectralField, TorusGrid, sobolev_norm
from .config import ConfigError, ExperimentConfig, build_initial_field, resolve_config
from .reporting import SCHEMA_VERSION, write_csv, write_json

__all__ = ["bootstrap_params", "run_experiment", "dispatch", "trajectory_rows"]


def bootstrap_params(
    u0_norm_hs: float,
    s: float,
    C1: float = 1.0,
    C2: float = 1.0,
    d: float = 0.25,
    c: float | None = None,
    theta: float = 0.25,
) -> tuple[int, float]:
    """Pick the frequency cap and horizon for the a priori bound bootstrap.

    With R = sqrt(C1) * ||u0||, returns the smallest power-of-two M with
    C2 M^-d (2R)^2 < 1/4 and then the largest T0 = 2^-m <= 1 with
    C2 T0^theta (M^c (2R)^2 + (2R)^4) < 1/4.  The constants are heuristic
    defaults (the bound's constants are not computable); c defaults to the
    cap growth exponent at this s.
    """
    if min(C1, C2, d, theta) <= 0:
        raise ValueError("constants C1, C2, d, theta must be positive")
    if not math.isfinite(u0_norm_hs) or u0_norm_hs < 0:
        raise ValueError("u0 norm must be finite and nonnegative")
    if c is None:
        c = cap_exponent(s)
    R = math.sqrt(C1) * u0_norm_hs
    # Solve the two displays in log space so large norms cannot overflow.
    if R == 0.0:
        return 1, 1.0
    m = max(0, math.floor(math.log2(4.0 * C2 * (2.0 * R) ** 2) / d) + 1)
    while not C2 * 2.0 ** (-m * d) * (2.0 * R) ** 2 < 0.25:
        m += 1
    M = 2**m
    bulk = C2 * (2.0 ** (m * c) * (2.0 * R) ** 2 + (2.0 * R) ** 4)
    k = max(0, math.floor(math.log2(4.0 * bulk) / theta) + 1) if bulk > 0.25 else 0
    while not bulk * 2.0 ** (-k * theta) < 0.25:
        k += 1
    return M, 2.0**-k


def trajectory_rows(traj) -> list:
    """Long-form (t, n, Re, Im) rows for trajectory serialization."""
    rows = []
    for m, t in enumerate(traj.times):
        for i, n in enumerate(traj.grid.modes):
            c = traj.coeffs[m, i]
            rows.append((float(t), int(n), float(c.real), float(c.imag)))
    return rows


def _norm_spec(cfg: ExperimentConfig) -> NormSpec:
    return NormSpec(
        s=float(cfg.params["s"]),
        alpha=float(cfg.params["alpha"]),
        T=abs(float(cfg.grid["T"])),
        b=float(cfg.params["b"]),
    )


def _solve_configured(cfg: ExperimentConfig, rng, store_stride: int = 1):
    grid = cfg.torus_grid()
    u0 = build_initial_field(cfg, grid, rng)
    traj = solve(u0, cfg.equation_spec(), float(cfg.grid["T"]), float(cfg.grid["dt"]), store_stride)
    return u0, traj


def _run_solve(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    u0, traj = _solve_configured(cfg, rng)
    drift = abs(mass(traj.final_state) - mass(u0)) / max(mass(u0), 1e-300)
    final = traj.final_state
    report = {
        "initial_mass": mass(u0),
        "final_mass": mass(final),
        "relative_mass_drift": drift,
        "final_hs_norm": sobolev_norm(final, float(cfg.params["s"])),
        "n_steps": traj.n_times - 1,
        "final_coeffs": [[int(n), float(c.real), float(c.imag)] for n, c in zip(traj.grid.modes, final.coeffs)],
    }
    if out is not None:
        write_csv(["t", "n", "re", "im"], trajectory_rows(traj), out / "trajectory.csv")
    return report


def _run_gauge_check(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    grid = cfg.torus_grid()
    u0 = build_initial_field(cfg, grid, rng)
    T = float(cfg.grid["T"])
    dt = float(cfg.grid["dt"])
    sign = cfg.equation["sign"]
    residual = gauge_equivalence_residual(u0, T, dt, sign)
    report = {"T": T, "dt": dt, "residual": residual}
    if cfg.options.get("dt_refine", False):
        coarse = float(cfg.options.get("dt_coarse", 8 * dt))
        seq = []
        step = coarse
        for _ in range(int(cfg.options.get("refine_levels", 3))):
            n = int(round(T / step))
            step_exact = T / n
            seq.append({"dt": step_exact, "residual": gauge_equivalence_residual(u0, T, step_exact, sign)})
            step /= 2
        for a, b in zip(seq, seq[1:]):
            b["order"] = math.log2(a["residual"] / b["residual"]) if b["residual"] > 0 else None
        report["refinement"] = seq
    if out is not None:
        rows = [(r["dt"], r["residual"]) for r in report.get("refinement", [])] or [(dt, residual)]
        write_csv(["dt", "residual"], rows, out / "gauge_residuals.csv")
    return report


def _run_ledger(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    _, traj = _solve_configured(cfg, rng)
    led = modified_energy_ledger(traj, float(cfg.params["s"]), int(cfg.params["M"]))
    report = {"ledger": led.to_dict()}
    if out is not None:
        d = led.to_dict()
        write_csv(list(d.keys()), [list(d.values())], out / "ledger.csv")
    return report


def _run_norms(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    _, traj = _solve_configured(cfg, rng)
    nspec = _norm_spec(cfg)
    stn = short_time_norms(traj, nspec)
    window = TimeWindow(float(traj.times[0]), float(traj.times[-1]), plateau=0.5)
    sp = spacetime_transform(traj, window)
    report = {
        "short_time": stn.to_dict(),
        "energy_norm": energy_norm(traj, nspec.s),
        "xsb": {
            "s": nspec.s,
            "b": nspec.b,
            "value": xsb_norm(sp, nspec.s, nspec.b),
        },
        "xk1_ratios": {str(k): xk1_ratio(sp, k) for k in range(traj.grid.max_block + 1)},
    }
    if out is not None:
        rows = [
            (k, stn.fk[k], stn.nk[k], report["xk1_ratios"][str(k)])
            for k in sorted(stn.fk)
        ]
        write_csv(["k", "f_k", "n_k", "xk1_ratio"], rows, out / "norms.csv")
    return report


def _run_strichartz(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    grid = cfg.torus_grid()
    T = float(cfg.grid["T"])
    dt = float(cfg.grid["dt"])
    count = int(cfg.options.get("samples", 32))
    p = int(cfg.options.get("p", 4))
    threads = int(cfg.options.get("threads", 1))

    def sample(i: int):
        local = np.random.default_rng((int(cfg.data["seed"]), i))
        u0 = build_initial_field(cfg, grid, local)
        return free_trajectory(u0, T, dt)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(sample, range(count)))
    else:
        samples = [sample(i) for i in range(count)]
    stats = strichartz_probe(samples, p)
    report = {"stats": stats.to_dict()}
    if out is not None:
        header = ["ratio"] if p == 4 else ["ratio", "band_length"]
        write_csv(header, [[r[h] for h in header] for r in stats.rows], out / "strichartz.csv")
    return report


def _run_resonance_audit(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    radius = int(cfg.options.get("radius", 64))
    audit = verify_identities(radius)
    report = {"audit": audit.to_dict()}
    if out is not None:
        rows = [(name, c["checked"], c["failed"]) for name, c in audit.counts.items()]
        write_csv(["check", "checked", "failed"], rows, out / "resonance_audit.csv")
    return report


def _run_oscillation(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    T = float(cfg.grid["T"])
    tail = float(cfg.data.get("tail_exponent", -0.5))
    cutoffs = tuple(cfg.options.get("cutoffs", [8, 16, 32, 64, 128]))
    threads = int(cfg.options.get("threads", 1))
    rows = oscillation_experiment(
        tail_exponent=tail,
        cutoffs=cutoffs,
        T=T,
        sign=cfg.equation["sign"],
        threads=threads,
    )
    testfn = default_test_function(T)
    mechanism = []
    for cutoff in cutoffs:
        grid = TorusGrid(2 * (2 * cutoff + 8))
        u0 = rough_tail_field(grid, tail, cutoff)
        mechanism.append(frozen_pairing(u0, mass(u0), testfn, T, min(1e-3, T / 1000)))
    report = {
        "rows": [
            {"cutoff": r.cutoff, "flux": r.flux, "pairing_abs": r.pairing_abs}
            for r in rows
        ],
        "mechanism_pairings": {str(c): p for c, p in zip(cutoffs, mechanism)},
        "note": (
            "pairing_abs uses the gauged nonlinear evolution and converges to the "
            "nonzero weak-limit pairing; mechanism_pairings freeze the reference "
            "field and exhibit the stationary-phase decay"
        ),
    }
    if out is not None:
        write_csv(
            ["n", "M_n", "pairing_abs", "runtime_s"],
            [(r.cutoff, r.flux, r.pairing_abs, r.runtime_s) for r in rows],
            out / "oscillation.csv",
        )
    return report


def _run_apriori(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    amplitudes = [float(a) for a in cfg.options.get("amplitudes", [0.1, 0.2, 0.4])]
    horizons = [float(t) for t in cfg.options.get("horizons", [0.25])]
    nspec = _norm_spec(cfg)
    s = nspec.s
    grid = cfg.torus_grid()
    dt = float(cfg.grid["dt"])
    cap = int(cfg.params["M"])
    spec = cfg.equation_spec()
    base = build_initial_field(cfg, grid, rng)
    base_norm = sobolev_norm(base, s)
    rows = []
    for amp in amplitudes:
        u0 = SpectralField(grid, base.coeffs * (amp / base_norm))
        for T in horizons:
            traj = solve(u0, spec, T, dt)
            stn = short_time_norms(traj, NormSpec(s, nspec.alpha, T, nspec.b))
            nl_traj_coeffs = np.stack(
                [nonlinearity(traj.state(m), spec)[0].coeffs for m in range(traj.n_times)]
            )
            from ..dynamics import Trajectory

            nl_traj = Trajectory(traj.times, nl_traj_coeffs, grid, spec)
            nl_stn = short_time_norms(nl_traj, NormSpec(s, nspec.alpha, T, nspec.b))
            led = modified_energy_ledger(traj, s, min(cap, grid.max_mode))
            u0_norm = sobolev_norm(u0, s)
            f = stn.f_aggregate
            e = stn.energy
            n_nl = nl_stn.n_aggregate
            rows.append(
                {
                    "amplitude": amp,
                    "T": T,
                    "u0_hs": u0_norm,
                    "E_s": e,
                    "F_s_alpha": f,
                    "N_s_alpha_of_nl": n_nl,
                    "ratio_linear": f / (e + n_nl) if e + n_nl > 0 else 0.0,
                    "ratio_trilinear": n_nl / f**3 if f > 0 else 0.0,
                    "ratio_energy": (e**2 - u0_norm**2) / f**4 if f > 0 else 0.0,
                    "f_over_u0": f / u0_norm if u0_norm > 0 else 0.0,
                    "ledger_residual": led.residual,
                }
            )
    header = list(rows[0].keys()) if rows else []
    report = {"rows": rows, "flags": _monotone_flags(rows)}
    if out is not None and rows:
        write_csv(header, [[r[h] for h in header] for r in rows], out / "apriori.csv")
    return report


def _monotone_flags(rows: list) -> dict:
    flags = {}
    for key in ("f_over_u0", "ratio_trilinear", "ratio_energy"):
        vals = [r[key] for r in rows]
        flags[key + "_monotone_increasing"] = all(b >= a for a, b in zip(vals, vals[1:]))
    return flags


def _run_bootstrap(cfg: ExperimentConfig, rng, out: Path | None) -> dict:
    s = float(cfg.params["s"])
    grid = cfg.torus_grid()
    u0 = build_initial_field(cfg, grid, rng)
    norm = sobolev_norm(u0, s)
    constants = {
        "C1": float(cfg.options.get("C1", 1.0)),
        "C2": float(cfg.options.get("C2", 1.0)),
        "d": float(cfg.options.get("d", 0.25)),
        "theta": float(cfg.options.get("theta", 0.25)),
    }
    c = cfg.options.get("c")
    cap, T0 = bootstrap_params(norm, s, c=float(c) if c is not None else None, **constants)
    return {
        "u0_hs_norm": norm,
        "s": s,
        "constants": {**constants, "c": float(c) if c is not None else cap_exponent(s)},
        "M": cap,
        "T0": T0,
        "note": "constants are heuristic configuration, not claims",
    }


_RUNNERS = {
    "solve": _run_solve,
    "gauge-check": _run_gauge_check,
    "ledger": _run_ledger,
    "norms": _run_norms,
    "strichartz": _run_strichartz,
    "resonance-audit": _run_resonance_audit,
    "oscillation": _run_oscillation,
    "apriori": _run_apriori,
    "bootstrap": _run_bootstrap,
}


def dispatch(cfg: ExperimentConfig, out: Path | None = None) -> dict:
    """Run the experiment named by a resolved config; returns the report body."""
    rng = np.random.default_rng(int(cfg.data.get("seed", 0)))
    runner = _RUNNERS[cfg.experiment]
    return runner(cfg, rng, out)


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: str | Path | None,
    seed: int | None = None,
    threads: int | None = None,
) -> dict:
    """Resolve, dispatch, and wrap the report with config echo and status.

    Solver blow-up is reported as a structured failure rather than a crash.
    """
    resolved = resolve_config(cfg, seed)
    if threads is not None:
        resolved.options["threads"] = int(threads)
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    try:
        body = dispatch(resolved, out)
        status = "ok"
        failure = None
    except BlowUpError as exc:
        body = {}
        status = "blowup"
        failure = {"step_index": exc.step_index, "time": exc.time, "message": str(exc)}
    report = {
        "schema_version": SCHEMA_VERSION,
        "experiment": resolved.experiment,
        "status": status,
        "resolved_config": resolved.to_dict(),
        "results": body,
    }
    if failure is not None:
        report["failure"] = failure
    if out is not None:
        write_json(report, out / "report.json")
    report["_wall_time_s"] = time.perf_counter() - start
    return report
