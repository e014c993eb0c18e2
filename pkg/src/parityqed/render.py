"""Minimal SVG rendering of scan and spectrum outputs (matplotlib/Agg)."""

from __future__ import annotations

import numpy as np

from . import model, scans, spectrum

PARITY_COLORS = {model.EVEN: "tab:blue", model.ODD: "tab:red"}


def _figure():
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = "parityqed"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    import matplotlib.pyplot as plt

    plt.close(fig)


def render_ladder(result: scans.ScanResult, path) -> None:
    """Doublet branches versus the scan axis, colored by transition parity."""
    plt = _figure()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    axis = result.column(result.axis_name)
    rungs = sorted(set(int(r) for r in result.column("rung")))
    parities = result.column("parity")
    seen = set()
    for n in rungs:
        sel = result.column("rung") == n
        parity = parities[sel][0]
        label = f"{parity} transitions" if parity not in seen else None
        seen.add(parity)
        for branch in ("omega_low", "omega_high"):
            ax.plot(
                axis[sel],
                result.column(branch)[sel],
                color=PARITY_COLORS[parity],
                lw=0.8,
                label=label if branch == "omega_low" else None,
            )
    xlabel = "deformation parameter" if result.axis_name == "lambda" else "detuning (units of g)"
    ax.set_xlabel(xlabel)
    ax.set_ylabel("transition frequency - cavity frequency (units of g)")
    ax.axhline(0.0, color="0.8", lw=0.6, zorder=0)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_spectrum(result: spectrum.SpectrumResult, path, label: str = "") -> None:
    plt = _figure()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(result.omega, result.intensity, lw=1.0, label=label or None)
    ax.set_xlabel("frequency - cavity frequency (units of g)")
    ax.set_ylabel(f"intensity ({result.normalization} units)")
    if label:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_g2(result: scans.ScanResult, path) -> None:
    plt = _figure()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    lambdas = sorted(set(float(x) for x in result.column("lambda")))
    pump = result.column("pump")
    g2 = result.column("g2")
    lam_col = result.column("lambda")
    for lam in lambdas:
        sel = lam_col == lam
        ax.plot(pump[sel], g2[sel], marker=".", ms=3, lw=0.9, label=f"lam = {lam:g}")
    if np.all(pump > 0) and pump.max() / max(pump.min(), 1e-300) > 30:
        ax.set_xscale("log")
    ax.set_xlabel("pump rate (units of g)")
    ax.set_ylabel("g2(0)")
    ax.axhline(1.0, color="0.8", lw=0.6, zorder=0)
    ax.axhline(2.0, color="0.8", lw=0.6, zorder=0)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    _save(fig, path)
