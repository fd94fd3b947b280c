"""Regenerate the shipped example CSVs (run from figures/: python tests/make_example_data.py).

Synthetic but interface-faithful: same columns and manifest layout as a real
hank2a run directory. Deterministic by construction.
"""

import hashlib
import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).parent / "data" / "example_run"

IRF_VARS = ["Y", "C", "I", "K", "N", "w", "pi", "piw", "rr", "r_l", "r_k", "q",
            "mc", "Bg", "Al", "tau", "G", "T", "Q", "Pi_profits", "goods"]
RELATIVE = {"Y", "C", "I", "K", "N", "w", "q", "mc", "Al", "Bg", "G",
            "Pi_profits", "Q"}
SS = {"Y": 3.2, "C": 2.0, "I": 0.6, "K": 36.0, "N": 1.0, "w": 1.95, "q": 1.0,
      "mc": 0.909, "Al": 5.8, "Bg": 5.8, "G": 0.56, "Pi_profits": 0.29, "Q": 17.0}


def fmt(v):
    return f"{v:.12g}" if isinstance(v, float) else str(v)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(v) for v in row) + "\n")


def hump(T, peak, decay, delay=0):
    t = np.arange(T, dtype=float)
    x = peak * (t - delay + 1).clip(0) * decay ** t
    return x / max(np.max(np.abs(x)), 1e-12) * peak


def irf_csv(path, scale=1.0, sign=1.0):
    T = 60
    rows = []
    series = {
        "Y": hump(T, 0.02 * scale, 0.9), "C": hump(T, 0.025 * scale, 0.88),
        "I": -hump(T, 0.01 * scale, 0.92), "K": -hump(T, 0.004 * scale, 0.97, 4),
        "N": hump(T, 0.015 * scale, 0.9), "w": hump(T, 0.008 * scale, 0.93),
        "pi": sign * hump(T, 0.0012 * scale, 0.9),
        "piw": sign * hump(T, 0.0015 * scale, 0.9),
        "rr": sign * hump(T, 0.0009 * scale, 0.92),
        "r_l": sign * hump(T, 0.0006 * scale, 0.91),
        "r_k": sign * hump(T, 0.0004 * scale, 0.94),
        "q": -hump(T, 0.003 * scale, 0.9), "mc": hump(T, 0.004 * scale, 0.9),
        "Bg": hump(T, 0.25 * scale, 0.975, 2), "Al": hump(T, 0.25 * scale, 0.975, 2),
        "tau": hump(T, 0.01 * scale, 0.97, 6), "G": np.zeros(T),
        "T": np.concatenate([[0.064 * scale], np.zeros(T - 1)]),
        "Q": -hump(T, 0.15 * scale, 0.9), "Pi_profits": -hump(T, 0.006 * scale, 0.9),
        "goods": np.zeros(T),
    }
    for var in IRF_VARS:
        dev = series[var]
        for t in range(T):
            rel = dev[t] / SS[var] if var in RELATIVE else ""
            rows.append([var, t, float(dev[t]), rel])
    write_csv(path, ["variable", "horizon", "deviation", "relative"], rows)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    irf_csv(OUT / "irf_baseline.csv", scale=1.0)
    irf_csv(OUT / "irf_alt.csv", scale=0.8)
    irf_csv(OUT / "paths_baseline.csv", scale=1.2)
    irf_csv(OUT / "paths_counterfactual.csv", scale=0.7)

    T = 40
    shocks = ["Z_I", "mu", "eps_R", "A", "T"]
    rows = []
    rng = np.random.default_rng(12345)
    parts = {s: 0.0004 * rng.standard_normal(T).cumsum() * 0.2 for s in shocks}
    for t in range(T):
        total = 0.0
        for s in shocks:
            rows.append([s, t, float(parts[s][t])])
            total += parts[s][t]
        rows.append(["total", t, float(total)])
    write_csv(OUT / "inflation_decomposition.csv", ["shock", "horizon", "value"], rows)

    rows = []
    for psi in [0.0, 0.0025, 0.005, 0.01, 0.05]:
        for psib in [0.0, 0.25, 0.5, 1.0]:
            stable = psib > 0.1 + psi * 4
            rows.append([psi, psib, stable])
    write_csv(OUT / "stability_map.csv", ["Psi", "psi_B", "stable"], rows)

    liquid = np.concatenate([[-1.4, -0.5, 0.0], np.geomspace(0.1, 500, 25)])
    qmpc = 0.05 + 0.55 * np.exp(-np.maximum(liquid + 1.4, 0) / 3.0)
    write_csv(OUT / "mpc_by_liquid.csv", ["liquid", "qmpc"],
              [[float(a), float(m)] for a, m in zip(liquid, qmpc)])

    rows = []
    for h in range(13):
        beta = 0.5 * 0.85 ** h
        se = 0.12 + 0.02 * h
        rows.append([h, beta, se, beta - se, beta + se,
                     beta - 1.645 * se, beta + 1.645 * se, 150 - h])
    write_csv(OUT / "local_projections.csv",
              ["horizon", "beta", "se", "lo68", "hi68", "lo90", "hi90", "nobs"], rows)

    outputs = {}
    for p in sorted(OUT.glob("*.csv")):
        outputs[p.name] = hashlib.sha256(p.read_bytes()).hexdigest()
    manifest = dict(command="example", cfg_hash="example0000000000",
                    code_version="0.1.0", timings={}, outputs=outputs)
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"wrote example run to {OUT}")


if __name__ == "__main__":
    main()
