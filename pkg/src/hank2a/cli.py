"""Command-line entry point: every experiment writes CSVs plus a manifest."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import apply_overrides, config_hash, load_config, validate_config

IRF_VARS = ("Y", "C", "I", "K", "N", "w", "pi", "piw", "rr", "r_l", "r_k", "q",
            "mc", "Bg", "Al", "tau", "G", "T", "Q", "Pi_profits", "goods")

RELATIVE_VARS = {"Y", "C", "I", "K", "N", "w", "q", "mc", "Al", "Bg", "G",
                 "Pi_profits", "Q"}


def _load_cfg(args) -> dict:
    cfg = load_config(getattr(args, "config", None), preset=args.preset)
    if getattr(args, "set", None):
        cfg = apply_overrides(cfg, args.set)
    return cfg


def _cap_threads(n: int | None):
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                    "NUMBA_NUM_THREADS"):
            os.environ[var] = str(n)


def _prepare_ss(cfg, outdir: Path, manifest=None):
    from .snapshots import load_steady_state, save_steady_state
    from .steady_state import solve_steady_state

    snap = outdir / f"ss_{config_hash(cfg)}.npz"
    if snap.exists():
        return load_steady_state(snap, expect_cfg=cfg)
    ss = solve_steady_state(cfg)
    save_steady_state(ss, snap)
    return ss


def _prepare_lab(cfg, outdir: Path):
    from .scenarios import ScenarioLab
    from .snapshots import load_jacobians, save_jacobians
    from .ssj import ha_jacobians

    ss = _prepare_ss(cfg, outdir)
    T = cfg["numerics"]["T"]
    jpath = outdir / f"jac_{config_hash(cfg)}_{T}.npz"
    lab = ScenarioLab.__new__(ScenarioLab)
    lab.ss = ss
    lab.T = T
    J = load_jacobians(jpath, config_hash(cfg), T)
    if J is None:
        J = ha_jacobians(ss, T)
        save_jacobians(J, jpath, config_hash(cfg), T)
    lab.J = J
    lab._economies = {}
    return lab


def _write_paths_csv(path, paths: dict, ss_quantities: dict, horizon=None):
    from .snapshots import write_csv

    rows = []
    for var in IRF_VARS:
        if var not in paths:
            continue
        dev = paths[var]
        H = len(dev) if horizon is None else min(horizon, len(dev))
        scale = ss_quantities.get(var if var != "Al" else "A_l")
        for t in range(H):
            rel = dev[t] / scale if (var in RELATIVE_VARS and scale) else ""
            rows.append([var, t, dev[t], rel])
    write_csv(path, ["variable", "horizon", "deviation", "relative"], rows)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_analytic(args):
    from .analytic import AnalyticParams, debt_grid_table
    from .snapshots import Manifest, write_csv

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("analytic", cfg, outdir)
    p = AnalyticParams(
        beta=args.beta, gamma=args.gamma, epsilon=args.epsilon, phi=args.phi,
        theta_pi=args.theta_pi, rho_h=args.rho_h, z_h=args.z_h, z_l=args.z_l,
        r_star0=args.r_star0,
    )
    lo, hi, n = args.debt_grid
    grid = np.linspace(lo, hi, int(n))
    with man.time("solve"):
        table = debt_grid_table(p, grid)
    out = outdir / "analytic.csv"
    write_csv(out, ["b_g0", "r_n0", "pi_0", "dr_db"], table.tolist())
    man.add(out)
    man.write()
    print(f"wrote {out}")


def cmd_calibrate(args):
    from .snapshots import Manifest
    from .steady_state import CalibrationTargets, calibrate

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("calibrate", cfg, outdir)
    with man.time("calibrate"):
        cfg_new, report = calibrate(cfg, CalibrationTargets(), verbose=args.verbose)
    out = outdir / "calibrated_config.json"
    with open(out, "w", encoding="utf-8") as f:
        json.dump(cfg_new, f, indent=2, sort_keys=True)
        f.write("\n")
    rep = outdir / "calibration_report.json"
    with open(rep, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2, sort_keys=True, default=float)
        f.write("\n")
    man.add(out)
    man.add(rep)
    man.write()
    print(f"wrote {out}")


def cmd_steady_state(args):
    from .snapshots import Manifest, write_csv

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("steady-state", cfg, outdir)
    with man.time("solve"):
        ss = _prepare_ss(cfg, outdir)
    man.add(outdir / f"ss_{config_hash(cfg)}.npz")
    out = outdir / "steady_state.csv"
    rows = [[k, v] for k, v in sorted(ss.quantities.items())]
    rows += [[f"residual_{k}", v] for k, v in sorted(ss.residuals.items())]
    write_csv(out, ["name", "value"], rows)
    man.add(out)
    man.write()
    print(ss.residual_report())
    print(f"wrote {out}")


def cmd_irf(args):
    from .scenarios import g_experiment, transfer_experiment
    from .snapshots import Manifest

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("irf", cfg, outdir)
    with man.time("prepare"):
        lab = _prepare_lab(cfg, outdir)
    with man.time("solve"):
        if args.shock == "transfer":
            res = transfer_experiment(lab, size_frac=args.size, rho=args.rho,
                                      Psi_alt=args.compare_psi,
                                      fiscal_mode=args.fiscal_mode)
        elif args.shock == "G":
            res = g_experiment(lab, impact=args.size, rho=args.rho,
                               Psi_alt=args.compare_psi)
        else:
            from .ssj import ShockSpec
            spec = ShockSpec(args.shock, args.size, args.rho)
            base = lab.economy(fiscal_mode=args.fiscal_mode).solve_irf(spec)
            alt = lab.economy(Psi=args.compare_psi,
                              fiscal_mode=args.fiscal_mode).solve_irf(spec)
            res = dict(baseline=base, alt=alt,
                       difference={k: base[k] - alt[k] for k in base if k != "dU"})
    q = lab.ss.quantities
    for arm in ("baseline", "alt", "difference"):
        out = outdir / f"irf_{arm}.csv"
        _write_paths_csv(out, res[arm], q, horizon=args.horizon)
        man.add(out)
    man.extra["shock"] = dict(name=args.shock, size=args.size, rho=args.rho,
                              compare_psi=args.compare_psi)
    man.write()
    print(f"wrote IRFs to {outdir}")


def cmd_elasticity(args):
    from .snapshots import Manifest, write_csv
    from .steady_state import long_run_elasticity

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("elasticity", cfg, outdir)
    ss = _prepare_ss(cfg, outdir)
    rows = []
    for token in args.psi_grid.split(","):
        Psi = np.inf if token.strip() in ("inf", "segmented") else float(token)
        with man.time(f"psi_{token.strip()}"):
            res = long_run_elasticity(cfg, ss_base=ss, Psi=Psi,
                                      delta_pp=args.delta_pp)
        rows.append([token.strip(), res["bp_per_pp"], res["r_R_base"],
                     res["r_R_new"]])
    out = outdir / "elasticity.csv"
    write_csv(out, ["Psi", "bp_per_pp", "r_R_base", "r_R_new"], rows)
    man.add(out)
    man.write()
    print(f"wrote {out}")


def cmd_sweep(args):
    from .scenarios import fiscal_rule_sweep
    from .snapshots import Manifest, write_csv

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("sweep", cfg, outdir)
    lab = _prepare_lab(cfg, outdir)
    rho_grid = [float(x) for x in args.rho_tau.split(",")]
    psi_grid = [float(x) for x in args.psi_b.split(",")]
    with man.time("sweep"):
        rows = fiscal_rule_sweep(lab, rho_grid, psi_grid, horizon=args.horizon,
                                 Psi_alt=args.compare_psi)
    header = sorted({k for r in rows for k in r})
    out = outdir / "fiscal_rule_sweep.csv"
    write_csv(out, header, [[r.get(k, "") for k in header] for r in rows])
    man.add(out)
    man.write()
    print(f"wrote {out}")


def cmd_filter(args):
    from .filters import ImpulseBank, ObservableSet, filter_with_elb
    from .snapshots import Manifest, write_csv
    from .ssj import SHOCK_NAMES
    import pandas as pd

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("filter", cfg, outdir)
    df = pd.read_csv(args.observables)
    obs = ObservableSet(list(df["date"].astype(str)),
                        df[["dY", "dI", "pi", "rR", "dT"]].values)
    lab = _prepare_lab(cfg, outdir)
    with man.time("filter"):
        bank = ImpulseBank(lab.economy())
        shocks = filter_with_elb(obs, bank)
    out = outdir / "shocks.csv"
    rows = [[shocks.dates[t]] + list(shocks.eps[t]) for t in range(shocks.T_obs)]
    write_csv(out, ["date"] + [f"eps_{n}" for n in SHOCK_NAMES], rows)
    man.add(out)
    news = outdir / "elb_news.csv"
    write_csv(news, ["horizon", "news"],
              [[t, v] for t, v in enumerate(shocks.elb_news)])
    man.add(news)
    man.extra["elb_flagged_quarters"] = [shocks.dates[i] for i in shocks.elb_flagged]
    man.write()
    print(f"wrote {out}")


def cmd_simulate(args):
    from .filters import ImpulseBank, ShockSeries, simulate_forward
    from .snapshots import Manifest
    from .ssj import SHOCK_NAMES
    import pandas as pd

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("simulate", cfg, outdir)
    df = pd.read_csv(args.shocks)
    eps = df[[f"eps_{n}" for n in SHOCK_NAMES]].values
    news = np.zeros(cfg["numerics"]["T"])
    if args.elb_news:
        news_df = pd.read_csv(args.elb_news)
        news[: len(news_df)] = news_df["news"].values
    shocks = ShockSeries(list(df["date"].astype(str)), eps, news)
    lab = _prepare_lab(cfg, outdir)
    with man.time("simulate"):
        bank = ImpulseBank(lab.economy())
        sim = simulate_forward(bank, shocks, horizon=args.horizon)
    out = outdir / "simulation.csv"
    sim.pop("_contributions", None)
    _write_paths_csv(out, sim, lab.ss.quantities, horizon=args.horizon)
    man.add(out)
    man.write()
    print(f"wrote {out}")


def cmd_decompose(args):
    from .filters import ImpulseBank, ShockSeries
    from .scenarios import (decompose_household_response,
                            decompose_inflation_by_shock, transfer_experiment)
    from .snapshots import Manifest, write_csv
    from .ssj import SHOCK_NAMES
    import pandas as pd

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("decompose", cfg, outdir)
    lab = _prepare_lab(cfg, outdir)
    if args.what == "household":
        res = transfer_experiment(lab, size_frac=args.size)
        for output in ("C", "Ahh", "Khh"):
            dec = decompose_household_response(lab, res["baseline"], output)
            out = outdir / f"decomposition_{output}.csv"
            rows = []
            for t in range(lab.T):
                for name, path in dec.contributions.items():
                    rows.append([output, name, t, path[t]])
                rows.append([output, "total", t, dec.total[t]])
            write_csv(out, ["output", "channel", "horizon", "value"], rows)
            man.add(out)
    else:
        df = pd.read_csv(args.shocks)
        eps = df[[f"eps_{n}" for n in SHOCK_NAMES]].values
        news = np.zeros(lab.T)
        if args.elb_news:
            news_df = pd.read_csv(args.elb_news)
            news[: len(news_df)] = news_df["news"].values
        shocks = ShockSeries(list(df["date"].astype(str)), eps, news)
        bank = ImpulseBank(lab.economy())
        dec = decompose_inflation_by_shock(bank, shocks)
        out = outdir / "inflation_decomposition.csv"
        rows = []
        for t in range(lab.T):
            for name, path in dec.contributions.items():
                rows.append([name, t, path[t]])
            rows.append(["total", t, dec.total[t]])
        write_csv(out, ["shock", "horizon", "value"], rows)
        man.add(out)
    man.write()
    print(f"wrote decompositions to {outdir}")


def cmd_counterfactual(args):
    from .filters import ImpulseBank, ShockSeries, simulate_forward
    from .scenarios import counterfactual_propagation
    from .snapshots import Manifest
    from .ssj import SHOCK_NAMES
    import pandas as pd

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("counterfactual", cfg, outdir)
    lab = _prepare_lab(cfg, outdir)
    df = pd.read_csv(args.shocks)
    eps = df[[f"eps_{n}" for n in SHOCK_NAMES]].values
    news = np.zeros(lab.T)
    if args.elb_news:
        news_df = pd.read_csv(args.elb_news)
        news[: len(news_df)] = news_df["news"].values
    shocks = ShockSeries(list(df["date"].astype(str)), eps, news)
    bank = ImpulseBank(lab.economy())
    bank_alt = ImpulseBank(lab.economy(Psi=args.substitute_psi))
    with man.time("simulate"):
        base = simulate_forward(bank, shocks)
        subs = {name: bank_alt for name in args.shock_names.split(",")}
        cf = counterfactual_propagation(bank, shocks, subs)
    base.pop("_contributions", None)
    cf.pop("_contributions", None)
    q = lab.ss.quantities
    for name, paths in (("baseline", base), ("counterfactual", cf)):
        out = outdir / f"paths_{name}.csv"
        _write_paths_csv(out, paths, q, horizon=args.horizon)
        man.add(out)
    man.write()
    print(f"wrote counterfactual paths to {outdir}")


def cmd_altrule(args):
    from .scenarios import (alt_rule_news, apply_news_bundle, misunderstood_rule,
                            reference_theta_B, transfer_experiment)
    from .snapshots import Manifest

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("altrule", cfg, outdir)
    lab = _prepare_lab(cfg, outdir)
    res = transfer_experiment(lab, size_frac=args.size)
    ge = lab.economy()
    theta_B = args.theta_b if args.theta_b is not None else reference_theta_B(
        lab.ss.cfg, lab.ss)
    with man.time("impose"):
        nu = alt_rule_news(ge, res["baseline"], args.rule,
                           switch_date=args.switch_date,
                           theta_pi=args.theta_pi, theta_B=theta_B)
        ruled = apply_news_bundle(ge, res["baseline"], nu,
                                  switch_date=args.switch_date)
    q = lab.ss.quantities
    for name, paths in (("baseline", res["baseline"]), ("alt_psi", res["alt"]),
                        ("ruled", ruled)):
        out = outdir / f"paths_{name}.csv"
        _write_paths_csv(out, paths, q, horizon=args.horizon)
        man.add(out)
    if args.misunderstood:
        mis, surprises = misunderstood_rule(ge, res["baseline"], ruled["rr"],
                                            switch_date=args.switch_date)
        out = outdir / "paths_misunderstood.csv"
        _write_paths_csv(out, mis, q, horizon=args.horizon)
        man.add(out)
    man.extra["rule"] = dict(rule=args.rule, theta_B=theta_B,
                             theta_pi=args.theta_pi, switch_date=args.switch_date)
    man.write()
    print(f"wrote rule paths to {outdir}")


def cmd_lp(args):
    from .empirics import local_projection
    from .snapshots import Manifest, write_csv
    import pandas as pd

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("lp", cfg, outdir)
    df = pd.read_csv(args.data)
    controls = {}
    if args.controls:
        for c in args.controls.split(","):
            controls[c] = df[c].values
    res = local_projection(df[args.y].values, df[args.b].values,
                           controls=controls, horizons=args.horizons,
                           lags=args.lags)
    out = outdir / "local_projections.csv"
    write_csv(out, ["horizon", "beta", "se", "lo68", "hi68", "lo90", "hi90", "nobs"],
              [[r.horizon, r.beta, r.se, *r.band68, *r.band90, r.nobs] for r in res])
    man.add(out)
    man.write()
    print(f"wrote {out}")


def cmd_data(args):
    from .empirics import RawSeriesBundle, build_observables, domestic_debt_value
    from .snapshots import Manifest, write_csv

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest("data-build", cfg, outdir)
    raw = RawSeriesBundle.from_csv(args.raw)
    obs = build_observables(raw, trend_window=tuple(args.trend_window.split(":")),
                            sample=tuple(args.sample.split(":")))
    out = outdir / "observables.csv"
    write_csv(out, ["date", "dY", "dI", "pi", "rR", "dT"],
              [[obs.dates[t]] + list(obs.values[t]) for t in range(obs.T_obs)])
    man.add(out)
    try:
        debt = domestic_debt_value(raw)
        out2 = outdir / "domestic_debt.csv"
        write_csv(out2, ["date", "value"],
                  [[str(d), v] for d, v in debt.items()])
        man.add(out2)
    except ValueError:
        pass   # debt components are optional
    man.write()
    print(f"wrote {out}")


def cmd_inspect(args):
    from .snapshots import Manifest, write_csv
    from .steady_state import build_chain

    cfg = _load_cfg(args)
    outdir = Path(args.outdir)
    man = Manifest(f"inspect-{args.target}", cfg, outdir)
    if args.target == "income":
        chain = build_chain(cfg)
        out = outdir / "income_chain.csv"
        n = chain.n_states
        rows = []
        for i in range(n):
            val = chain.skill_values[i] if i < n - 1 else ""
            rows.append([i, "entrepreneur" if i == n - 1 else "worker",
                         val, chain.ergodic[i]]
                        + list(chain.transition[i]))
        write_csv(out, ["state", "kind", "productivity", "ergodic"]
                  + [f"to_{j}" for j in range(n)], rows)
        man.add(out)
    else:
        ss = _prepare_ss(cfg, outdir)
        out = outdir / "household_policies.csv"
        rows = []
        mix = ss.policies.mixed(ss.model.params.lam, ss.model.k_grid)
        for s in range(ss.model.n_s):
            for jk in range(ss.model.n_k):
                for ia in range(ss.model.n_a):
                    rows.append([
                        s, ss.model.k_grid[jk], ss.model.a_grid[ia],
                        mix["c"][s, jk, ia], mix["a"][s, jk, ia],
                        mix["k"][s, jk, ia], ss.D[s, jk, ia],
                    ])
        write_csv(out, ["s", "k", "a", "c", "a_next", "k_next", "mass"], rows)
        man.add(out)
    man.write()
    print(f"wrote inspection to {outdir}")


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hank2a",
        description="Two-asset HANK solver suite: public debt, liquidity and inflation",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--set", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="config override")
        p.add_argument("--preset", choices=["fast", "full"], default="full")
        p.add_argument("--outdir", default=os.environ.get("HANK2A_OUTDIR", "out"))
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("analytic", help="two-period model over a debt grid")
    common(p)
    p.add_argument("--beta", type=float, default=0.96)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=6.0)
    p.add_argument("--phi", type=float, default=100.0)
    p.add_argument("--theta-pi", type=float, default=1.5)
    p.add_argument("--rho-h", type=float, default=0.5)
    p.add_argument("--z-h", type=float, default=1.25)
    p.add_argument("--z-l", type=float, default=0.75)
    p.add_argument("--r-star0", type=float, default=None)
    p.add_argument("--debt-grid", type=float, nargs=3, default=[0.0, 4.0, 21],
                   metavar=("LO", "HI", "N"))
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("calibrate", help="internal calibration to the wealth targets")
    common(p)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("steady-state", help="solve and snapshot the steady state")
    common(p)
    p.set_defaults(func=cmd_steady_state)

    p = sub.add_parser("irf", help="impulse responses with a Psi counterfactual")
    common(p)
    p.add_argument("--shock", default="transfer",
                   choices=["transfer", "G", "Z_I", "mu", "eps_R", "A", "T"])
    p.add_argument("--size", type=float, default=0.02)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--compare-psi", type=float, default=0.0)
    p.add_argument("--fiscal-mode", choices=["tax", "G"], default="tax")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_irf)

    p = sub.add_parser("elasticity", help="long-run debt-supply yield elasticity")
    common(p)
    p.add_argument("--psi-grid", default="0,0.001,0.0025,0.005,0.01,0.05")
    p.add_argument("--delta-pp", type=float, default=1.0)
    p.set_defaults(func=cmd_elasticity)

    p = sub.add_parser("sweep", help="fiscal-rule grid: debt and inflation")
    common(p)
    p.add_argument("--rho-tau", default="0.9,0.94,0.97")
    p.add_argument("--psi-b", default="0.25,0.5,1.0")
    p.add_argument("--horizon", type=int, default=40)
    p.add_argument("--compare-psi", type=float, default=0.0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("filter", help="recover shocks from observables")
    common(p)
    p.add_argument("--observables", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("simulate", help="forward simulation from filtered shocks")
    common(p)
    p.add_argument("--shocks", required=True)
    p.add_argument("--elb-news", default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decompose", help="household-channel or shock decomposition")
    common(p)
    p.add_argument("--what", choices=["household", "inflation"], default="household")
    p.add_argument("--size", type=float, default=0.02)
    p.add_argument("--shocks", default=None)
    p.add_argument("--elb-news", default=None)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("counterfactual", help="propagate shocks with substituted kernels")
    common(p)
    p.add_argument("--shocks", required=True)
    p.add_argument("--elb-news", default=None)
    p.add_argument("--shock-names", default="T")
    p.add_argument("--substitute-psi", type=float, default=0.0)
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_counterfactual)

    p = sub.add_parser("altrule", help="alternative monetary rules via news")
    common(p)
    p.add_argument("--rule", choices=["debt_adjusted", "hawkish", "difference"],
                   required=True)
    p.add_argument("--theta-b", type=float, default=None)
    p.add_argument("--theta-pi", type=float, default=None)
    p.add_argument("--switch-date", type=int, default=0)
    p.add_argument("--size", type=float, default=0.02)
    p.add_argument("--misunderstood", action="store_true")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=cmd_altrule)

    p = sub.add_parser("lp", help="local projections with robust bands")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--controls", default="")
    p.add_argument("--horizons", type=int, default=12)
    p.add_argument("--lags", type=int, default=4)
    p.set_defaults(func=cmd_lp)

    p = sub.add_parser("data", help="build observables from raw series")
    common(p)
    p.add_argument("action", choices=["build"])
    p.add_argument("--raw", required=True)
    p.add_argument("--trend-window", default="2014Q1:2019Q4")
    p.add_argument("--sample", default="2020Q1:2024Q2")
    p.set_defaults(func=cmd_data)

    p = sub.add_parser("inspect", help="dump income chain or household policies")
    common(p)
    p.add_argument("target", choices=["income", "household"])
    p.set_defaults(func=cmd_inspect)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    _cap_threads(getattr(args, "threads", None))
    try:
        cfg = _load_cfg(args)
        validate_config(cfg)
        args.func(args)
        return 0
    except Exception as exc:   # noqa: BLE001 - CLI boundary
        payload = dict(error=str(exc), type=type(exc).__name__)
        print(json.dumps(payload), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
