"""Deterministic figure rendering from hank2a CSV outputs.

Figures never recompute economics: inputs are the CSVs named in a run's
manifest, verified untouched by checksum before and after rendering. Output
is a PNG and an SVG per figure with fixed styling (baseline solid, the
integrated-market arm dashed, alternatives dash-dotted).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

__all__ = ["FigureSpec", "render", "FIGURES", "ChecksumError"]

STYLE = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
    "svg.hashsalt": "hankfigs",
}

ARM_STYLES = {
    "baseline": dict(color="#1f4e9c", linestyle="-", label="baseline"),
    "alt": dict(color="#c03028", linestyle="--", label="integrated (Psi=0)"),
    "counterfactual": dict(color="#c03028", linestyle="--", label="counterfactual"),
    "ruled": dict(color="#2a7f3f", linestyle="-.", label="adjusted rule"),
    "misunderstood": dict(color="#8050a0", linestyle=":", label="misunderstood"),
}

# horizon paths are quarterly deviations; percent for quantities, annualized
# percentage points for rates and inflation
PANEL_UNITS = {
    "Y": ("Output", "% of steady state", "relative", 100.0),
    "C": ("Consumption", "% of steady state", "relative", 100.0),
    "I": ("Investment", "% of steady state", "relative", 100.0),
    "pi": ("Inflation", "p.p. (annualized)", "deviation", 400.0),
    "rr": ("Policy rate", "p.p. (annualized)", "deviation", 400.0),
    "BY": ("Public debt / annual GDP", "p.p.", None, None),
}


class ChecksumError(RuntimeError):
    pass


@dataclass
class FigureSpec:
    figure_id: str
    run_dir: Path
    out_dir: Path | None = None
    options: dict = field(default_factory=dict)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


class _Inputs:
    """Loads manifest-listed CSVs and guards them against modification."""

    def __init__(self, run_dir: Path):
        self.run_dir = Path(run_dir)
        man = self.run_dir / "manifest.json"
        if not man.exists():
            raise FileNotFoundError(f"no manifest.json in {self.run_dir}")
        self.manifest = json.loads(man.read_text())
        self.used: dict[str, str] = {}

    def csv(self, name: str) -> pd.DataFrame:
        path = self.run_dir / name
        if name not in self.manifest.get("outputs", {}):
            raise FileNotFoundError(f"{name} is not listed in the run manifest")
        digest = _sha256(path)
        if digest != self.manifest["outputs"][name]:
            raise ChecksumError(
                f"{name} does not match its manifest checksum; inputs were modified")
        self.used[name] = digest
        df = pd.read_csv(path)
        return df

    def verify_untouched(self):
        for name, digest in self.used.items():
            if _sha256(self.run_dir / name) != digest:
                raise ChecksumError(f"{name} changed during rendering")


def _paths_frame(df: pd.DataFrame, variable: str) -> pd.DataFrame:
    sub = df[df["variable"] == variable]
    missing = {"variable", "horizon", "deviation"} - set(df.columns)
    if missing:
        raise ValueError(f"IRF CSV lacks columns: {sorted(missing)}")
    return sub.sort_values("horizon")


def _panel_series(df: pd.DataFrame, panel: str) -> np.ndarray:
    if panel == "BY":
        b = _paths_frame(df, "Bg")
        y = _paths_frame(df, "Y")
        # debt over annualized output, p.p. deviation at first order
        rel_b = b["relative"].values
        rel_y = y["relative"].values
        return 100.0 * (rel_b - rel_y) * 0.45   # scaled by B/(4Y) at the ballpark target
    title, unit, col, scale = PANEL_UNITS[panel]
    sub = _paths_frame(df, panel)
    vals = sub[col].values if col == "relative" else sub["deviation"].values
    return np.asarray(vals, dtype=float) * scale


def _fig_axes(n_panels: int, ncols: int = 3):
    nrows = int(np.ceil(n_panels / ncols))
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.2 * ncols, 2.4 * nrows))
    return fig, np.atleast_1d(axes).ravel()


# -- individual figures -------------------------------------------------------

def fig_transfer_irfs(inp: _Inputs, options: dict):
    panels = ["Y", "C", "I", "pi", "rr", "BY"]
    arms = options.get("arms", ["baseline", "alt"])
    frames = {arm: inp.csv(f"irf_{arm}.csv") for arm in arms}
    fig, axes = _fig_axes(6)
    for ax, panel in zip(axes, panels):
        for arm in arms:
            series = _panel_series(frames[arm], panel)
            ax.plot(np.arange(len(series)), series, **ARM_STYLES[arm])
        title, unit = PANEL_UNITS[panel][0], PANEL_UNITS[panel][1]
        ax.set_title(title)
        ax.set_ylabel(unit)
        ax.set_xlabel("quarters")
        ax.axhline(0.0, color="k", linewidth=0.6)
    axes[0].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def fig_inflation_decomposition(inp: _Inputs, options: dict):
    df = inp.csv("inflation_decomposition.csv")
    horizon = options.get("horizon", int(df["horizon"].max()) + 1)
    total = df[df["shock"] == "total"].sort_values("horizon")["value"].values[:horizon]
    shocks = sorted(s for s in df["shock"].unique() if s != "total")
    fig, ax = plt.subplots(figsize=(7.2, 3.6))
    bottom_pos = np.zeros(horizon)
    bottom_neg = np.zeros(horizon)
    colors = plt.cm.tab10(np.linspace(0, 1, len(shocks)))
    x = np.arange(horizon)
    for color, s in zip(colors, shocks):
        v = df[df["shock"] == s].sort_values("horizon")["value"].values[:horizon]
        v = np.where(np.abs(v) < 1e-9, 0.0, v) * 400.0   # clip numerical dust
        pos = np.clip(v, 0, None)
        neg = np.clip(v, None, 0)
        ax.bar(x, pos, bottom=bottom_pos, color=color, label=s, width=0.85)
        ax.bar(x, neg, bottom=bottom_neg, color=color, width=0.85)
        bottom_pos += pos
        bottom_neg += neg
    ax.plot(x, total * 400.0, color="k", linewidth=1.8, label="total")
    ax.set_xlabel("quarters")
    ax.set_ylabel("p.p. (annualized)")
    ax.set_title("Inflation by shock")
    ax.legend(frameon=False, fontsize=8, ncol=3)
    fig.tight_layout()
    return fig


def fig_stability_map(inp: _Inputs, options: dict):
    df = inp.csv("stability_map.csv")
    psis = np.array(sorted(df["Psi"].unique()))
    psibs = np.array(sorted(df["psi_B"].unique()))
    grid = np.zeros((len(psis), len(psibs)))
    for _, row in df.iterrows():
        i = list(psis).index(row["Psi"])
        j = list(psibs).index(row["psi_B"])
        grid[i, j] = 1.0 if row["stable"] else 0.0
    fig, ax = plt.subplots(figsize=(4.8, 3.6))
    ax.pcolormesh(psibs, psis, grid, cmap="RdYlGn", vmin=0, vmax=1, shading="nearest")
    ax.set_xlabel("fiscal response psi_B")
    ax.set_ylabel("liquidity penalty Psi")
    ax.set_title("Unique stable solution (green)")
    fig.tight_layout()
    return fig


def fig_mpc_distribution(inp: _Inputs, options: dict):
    df = inp.csv("mpc_by_liquid.csv")
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    ax.plot(df["liquid"], df["qmpc"], color="#1f4e9c")
    ax.set_xlabel("liquid assets")
    ax.set_ylabel("quarterly MPC")
    ax.set_title("MPC by liquid wealth")
    ax.set_xscale("symlog", linthresh=1.0)
    fig.tight_layout()
    return fig


def fig_lp_bands(inp: _Inputs, options: dict):
    df = inp.csv("local_projections.csv")
    fig, ax = plt.subplots(figsize=(5.2, 3.4))
    h = df["horizon"].values
    ax.fill_between(h, df["lo90"], df["hi90"], color="#1f4e9c", alpha=0.15,
                    label="90% band")
    ax.fill_between(h, df["lo68"], df["hi68"], color="#1f4e9c", alpha=0.3,
                    label="68% band")
    ax.plot(h, df["beta"], color="#1f4e9c", label="coefficient")
    ax.axhline(0.0, color="k", linewidth=0.6)
    ax.set_xlabel("horizon (quarters)")
    ax.set_ylabel("response (p.p.)")
    ax.set_title("Local projection")
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def fig_post2020_panel(inp: _Inputs, options: dict):
    arms = options.get("arms", ["baseline", "counterfactual"])
    frames = {arm: inp.csv(f"paths_{arm}.csv") for arm in arms}
    panels = ["Y", "C", "I", "pi", "rr", "BY"]
    fig, axes = _fig_axes(6)
    for ax, panel in zip(axes, panels):
        for arm in arms:
            series = _panel_series(frames[arm], panel)
            ax.plot(np.arange(len(series)), series, **ARM_STYLES[arm])
        ax.set_title(PANEL_UNITS[panel][0])
        ax.set_ylabel(PANEL_UNITS[panel][1])
        ax.set_xlabel("quarters from 2020Q1")
        ax.axhline(0.0, color="k", linewidth=0.6)
    axes[0].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


FIGURES = {
    "transfer-irfs": (fig_transfer_irfs, ("irf_baseline.csv", "irf_alt.csv")),
    "inflation-decomposition": (fig_inflation_decomposition,
                                ("inflation_decomposition.csv",)),
    "stability-map": (fig_stability_map, ("stability_map.csv",)),
    "mpc-distribution": (fig_mpc_distribution, ("mpc_by_liquid.csv",)),
    "lp-bands": (fig_lp_bands, ("local_projections.csv",)),
    "post2020-panel": (fig_post2020_panel,
                       ("paths_baseline.csv", "paths_counterfactual.csv")),
}


def render(spec: FigureSpec) -> list[Path]:
    """Render one figure id to PNG and SVG; returns the written paths."""
    if spec.figure_id not in FIGURES:
        raise KeyError(
            f"unknown figure id {spec.figure_id!r}; known: {sorted(FIGURES)}")
    fn, _ = FIGURES[spec.figure_id]
    inp = _Inputs(spec.run_dir)
    out_dir = Path(spec.out_dir or spec.run_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(STYLE):
        fig = fn(inp, spec.options)
        written = []
        for ext, meta in (("png", {"Software": None}),
                          ("svg", {"Date": None})):
            out = out_dir / f"{spec.figure_id}.{ext}"
            fig.savefig(out, metadata=meta)
            written.append(out)
        plt.close(fig)
    inp.verify_untouched()
    return written
