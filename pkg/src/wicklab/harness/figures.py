"""Figure rendering for experiment reports.

Each experiment gets one summary PNG next to its delimited output.  Figures
are diagnostic companions to the CSV tables, never the primary artifact.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figures"]


def _save(fig, out: Path, name: str) -> str:
    path = out / name
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return str(path)


def _fig_solve(report: dict, out: Path) -> list[str]:
    coeffs = report["results"]["final_coeffs"]
    n = np.array([row[0] for row in coeffs])
    amp = np.hypot(np.array([row[1] for row in coeffs]), np.array([row[2] for row in coeffs]))
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.semilogy(n, np.maximum(amp, 1e-20), ".", ms=3)
    ax.set_xlabel("mode n")
    ax.set_ylabel("|coefficient|")
    ax.set_title("final spectrum")
    return [_save(fig, out, "solve_spectrum.png")]


def _fig_gauge(report: dict, out: Path) -> list[str]:
    res = report["results"]
    seq = res.get("refinement") or [{"dt": res["dt"], "residual": res["residual"]}]
    dts = [r["dt"] for r in seq]
    vals = [max(r["residual"], 1e-300) for r in seq]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(dts, vals, "o-")
    ref = vals[0] * (np.array(dts) / dts[0]) ** 4
    ax.loglog(dts, ref, "k--", lw=0.8, label="4th order")
    ax.set_xlabel("dt")
    ax.set_ylabel("max-in-time L2 gap")
    ax.legend()
    ax.set_title("gauge equivalence residual")
    return [_save(fig, out, "gauge_residual.png")]


def _fig_ledger(report: dict, out: Path) -> list[str]:
    led = report["results"]["ledger"]
    keys = [
        "delta_energy",
        "quartic_flux",
        "boundary_end",
        "boundary_start",
        "sextic_cascade",
        "sextic_diagonal",
        "residual",
    ]
    vals = [led[k] for k in keys]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(range(len(keys)), vals)
    ax.set_xticks(range(len(keys)), keys, rotation=30, ha="right", fontsize=8)
    ax.set_title(f"modified-energy ledger (s={led['s']}, cap={led['cap']})")
    ax.axhline(0, color="k", lw=0.5)
    return [_save(fig, out, "ledger_terms.png")]


def _fig_norms(report: dict, out: Path) -> list[str]:
    stn = report["results"]["short_time"]
    ks = sorted(int(k) for k in stn["fk"])
    fk = [max(stn["fk"][str(k)], 1e-300) for k in ks]
    nk = [max(stn["nk"][str(k)], 1e-300) for k in ks]
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.semilogy(ks, fk, "o-", label="F-flavor")
    ax.semilogy(ks, nk, "s-", label="N-flavor")
    ax.set_xlabel("dyadic block k")
    ax.set_ylabel("short-time norm")
    ax.legend()
    ax.set_title("per-block short-time norms")
    return [_save(fig, out, "norms_blocks.png")]


def _fig_strichartz(report: dict, out: Path) -> list[str]:
    stats = report["results"]["stats"]
    ratios = [r["ratio"] for r in stats["rows"]]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.hist(ratios, bins=min(20, max(5, len(ratios) // 3)))
    ax.set_xlabel("ratio")
    ax.set_ylabel("count")
    ax.set_title(f"L{stats['p']} Strichartz ratio distribution")
    return [_save(fig, out, "strichartz_ratios.png")]


def _fig_resonance(report: dict, out: Path) -> list[str]:
    audit = report["results"]["audit"]
    names = list(audit["counts"].keys())
    failed = [audit["counts"][n]["failed"] for n in names]
    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    ax.bar(range(len(names)), failed)
    ax.set_xticks(range(len(names)), names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("failures")
    ax.set_title(f"phase identity audit, radius {audit['radius']} ({audit['quadruples_checked']} quadruples)")
    return [_save(fig, out, "resonance_audit.png")]


def _fig_oscillation(report: dict, out: Path) -> list[str]:
    rows = report["results"]["rows"]
    mech = report["results"]["mechanism_pairings"]
    n = [r["cutoff"] for r in rows]
    flux = [r["flux"] for r in rows]
    dyn = [r["pairing_abs"] for r in rows]
    frozen = [mech[str(c)] for c in n]
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax0.semilogx(n, flux, "o-", base=2)
    ax0.set_xlabel("cutoff n")
    ax0.set_ylabel("gauge flux M_n")
    ax0.set_title("flux growth")
    ax1.loglog(n, dyn, "o-", label="gauged evolution")
    ax1.loglog(n, frozen, "s--", label="frozen reference")
    ax1.set_xlabel("cutoff n")
    ax1.set_ylabel("|pairing|")
    ax1.legend(fontsize=8)
    ax1.set_title("test-function pairings")
    fig.tight_layout()
    return [_save(fig, out, "oscillation.png")]


def _fig_apriori(report: dict, out: Path) -> list[str]:
    rows = report["results"]["rows"]
    if not rows:
        return []
    amps = sorted({r["amplitude"] for r in rows})
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    for T in sorted({r["T"] for r in rows}):
        ys = [r["f_over_u0"] for r in rows if r["T"] == T]
        xs = [r["amplitude"] for r in rows if r["T"] == T]
        ax.plot(xs, ys, "o-", label=f"T={T}")
    ax.set_xlabel("data amplitude")
    ax.set_ylabel("F-norm / initial H^s norm")
    ax.legend(fontsize=8)
    ax.set_title("a priori bound surrogate")
    return [_save(fig, out, "apriori_ratios.png")]


_RENDERERS = {
    "solve": _fig_solve,
    "gauge-check": _fig_gauge,
    "ledger": _fig_ledger,
    "norms": _fig_norms,
    "strichartz": _fig_strichartz,
    "resonance-audit": _fig_resonance,
    "oscillation": _fig_oscillation,
    "apriori": _fig_apriori,
}


def render_figures(report: dict, out_dir: str | Path) -> list[str]:
    """Render the experiment's summary figures; returns written paths."""
    if report.get("status") != "ok":
        return []
    renderer = _RENDERERS.get(report.get("experiment"))
    if renderer is None:
        return []
    return renderer(report, Path(out_dir))
