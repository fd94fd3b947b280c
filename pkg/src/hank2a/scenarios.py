"""Experiment layer: fiscal shocks with Psi counterfactuals, decompositions,
alternative monetary rules, and counterfactual shock propagation.

Every comparison across asset-market structures (the Psi dial) shares one
steady state and one set of household Jacobians; only the fund's portfolio
condition differs, so "debt inflation" is isolated by construction.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import blocks
from .filters import ImpulseBank, ShockSeries, simulate_forward
from .ssj import GEModel, ShockSpec, ha_jacobians
from .steady_state import SteadyState, long_run_elasticity

__all__ = ["ScenarioLab", "Decomposition", "transfer_experiment", "g_experiment",
           "fiscal_rule_sweep", "decompose_household_response",
           "decompose_inflation_by_shock", "counterfactual_propagation",
           "alt_rule_news", "apply_news_bundle", "misunderstood_rule",
           "pi_tilde_comparison", "HOUSEHOLD_CHANNELS"]

HOUSEHOLD_CHANNELS = {
    "transfers": ("T",),
    "wage_income": ("w", "N"),
    "liquid_return": ("r_l",),
    "illiquid_return": ("r_k", "q"),
    "taxes": ("tau_level",),
    "profits": ("Pi",),
    "discount": ("A",),
}


@dataclass
class Decomposition:
    total: np.ndarray
    contributions: dict[str, np.ndarray]

    def additivity_gap(self) -> float:
        s = sum(self.contributions.values())
        return float(np.max(np.abs(s - self.total)))


class ScenarioLab:
    """Shared steady state + household Jacobians with cached GE variants."""

    def __init__(self, ss: SteadyState, T: int | None = None):
        self.ss = ss
        self.T = T or ss.cfg["numerics"]["T"]
        self.J = ha_jacobians(ss, self.T)
        self._economies: dict = {}

    def economy(self, Psi: float | None = None, fiscal_mode: str = "tax",
                macro_overrides: dict | None = None) -> GEModel:
        key = (Psi, fiscal_mode, tuple(sorted((macro_overrides or {}).items())))
        if key not in self._economies:
            macro = self.ss.macro
            if macro_overrides:
                macro = blocks.MacroParams(**{**macro.__dict__, **macro_overrides})
            ge = GEModel(self.ss, self.J, self.T, Psi=Psi,
                         fiscal_mode=fiscal_mode, macro=macro)
            ge.build()
            self._economies[key] = ge
        return self._economies[key]


# ---------------------------------------------------------------------------
# paired fiscal experiments
# ---------------------------------------------------------------------------

def transfer_experiment(lab: ScenarioLab, size_frac: float = 0.02,
                        rho: float = 0.0, Psi_alt: float = 0.0,
                        fiscal_mode: str = "tax") -> dict:
    """One-time transfer (share of quarterly GDP) under two Psi variants."""
    size = size_frac * lab.ss.quantities["Y"]
    spec = ShockSpec("T", size, rho)
    base = lab.economy(fiscal_mode=fiscal_mode).solve_irf(spec)
    alt = lab.economy(Psi=Psi_alt, fiscal_mode=fiscal_mode).solve_irf(spec)
    diff = {k: base[k] - alt[k] for k in base if k != "dU"}
    return dict(baseline=base, alt=alt, difference=diff, spec=spec)


def g_experiment(lab: ScenarioLab, impact: float = 0.025, rho: float = 0.9,
                 Psi_alt: float = 0.0) -> dict:
    """Persistent government-consumption shock (impact as share of G_ss)."""
    size = impact * lab.ss.quantities["G"]
    spec = ShockSpec("G", size, rho)
    base = lab.economy().solve_irf(spec)
    alt = lab.economy(Psi=Psi_alt).solve_irf(spec)
    diff = {k: base[k] - alt[k] for k in base if k != "dU"}
    return dict(baseline=base, alt=alt, difference=diff, spec=spec)


def fiscal_rule_sweep(lab: ScenarioLab, rho_tau_grid, psi_B_grid,
                      size_frac: float = 0.02, horizon: int = 40,
                      Psi_alt: float = 0.0) -> list[dict]:
    """Mean debt deviation and cumulative inflation per fiscal-rule setting."""
    rows = []
    q0 = lab.ss.quantities
    size = size_frac * q0["Y"]
    for rho_tau in rho_tau_grid:
        for psi_B in psi_B_grid:
            row = dict(rho_tau=float(rho_tau), psi_B=float(psi_B))
            for arm, Psi in (("baseline", None), ("alt", Psi_alt)):
                ge = lab.economy(Psi=Psi, macro_overrides=dict(
                    rho_tau=float(rho_tau), psi_B=float(psi_B)))
                verdict = ge.determinacy(tail_window=min(50, ge.T // 3),
                                         decay_tol=0.95)
                if not verdict["stable"]:
                    row[f"{arm}_stable"] = False
                    continue
                paths = ge.solve_irf(ShockSpec("T", size, 0.0))
                debt_dev = (paths["Bg"] - q0["B"] / q0["Y"] * paths["Y"]) / (4 * q0["Y"])
                row[f"{arm}_stable"] = True
                row[f"{arm}_mean_debt_pp"] = float(np.mean(debt_dev[:horizon]) * 100)
                row[f"{arm}_cum_inflation_pp"] = float(np.sum(paths["pi"][:horizon]) * 100)
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------

def decompose_household_response(lab: ScenarioLab, paths: dict,
                                 output: str = "C") -> Decomposition:
    """Split a household output's response by direct input channel."""
    pr0 = lab.ss.prices
    dev = {
        "r_l": paths["r_l"], "r_k": paths["r_k"], "q": paths["q"],
        "w": paths["w"], "N": paths["N"], "T": paths["T"],
        "tau_level": paths["tau"], "Pi": paths["Pi_profits"], "A": paths["A"],
    }
    J = lab.J[output]
    contributions = {}
    for channel, inputs in HOUSEHOLD_CHANNELS.items():
        acc = np.zeros(lab.T)
        for name in inputs:
            acc += J[name] @ dev[name]
        contributions[channel] = acc
    total = paths[output]
    return Decomposition(total=total, contributions=contributions)


def decompose_inflation_by_shock(bank: ImpulseBank, shocks: ShockSeries,
                                 variable: str = "pi",
                                 horizon: int | None = None) -> Decomposition:
    sim = simulate_forward(bank, shocks, horizon=horizon, variables=(variable,))
    contribs = {name: c[variable] for name, c in sim["_contributions"].items()}
    return Decomposition(total=sim[variable], contributions=contribs)


def counterfactual_propagation(bank: ImpulseBank, shocks: ShockSeries,
                               substitute_banks: dict[str, ImpulseBank],
                               variables: tuple | None = None,
                               horizon: int | None = None) -> dict:
    """Propagate selected shocks through another economy's impulse responses."""
    subs = {}
    for name, other in substitute_banks.items():
        if other.T != bank.T:
            raise ValueError("substitute impulse responses have a different horizon")
        subs[name] = other.irfs[name]
    return simulate_forward(bank, shocks, horizon=horizon, variables=variables,
                            substitute_irfs=subs)


# ---------------------------------------------------------------------------
# alternative monetary rules via news shocks
# ---------------------------------------------------------------------------

def _rule_residual(rule: str, dev: dict, ge: GEModel, theta_pi: float,
                   theta_B: float) -> np.ndarray:
    """First-order residual of the alternative rule along deviation paths."""
    m = ge.macro
    q0 = ge.ssq
    R = 1.0 + q0["r_R"]
    drr = dev["rr"] / R
    drr_lag = np.concatenate([[0.0], drr[:-1]])
    dpi = dev["pi"]
    dY = dev["Y"] / q0["Y"]
    dY_lag = np.concatenate([[0.0], dY[:-1]])
    if rule == "difference":
        return drr - drr_lag - theta_pi * dpi
    if rule == "hawkish":
        return drr - m.rho_R * drr_lag - (1.0 - m.rho_R) * (
            theta_pi * dpi + m.theta_y * (dY - dY_lag))
    if rule == "debt_adjusted":
        dlog_BY = dev["Bg"] / q0["B"] - dY
        return drr - m.rho_R * drr_lag - (1.0 - m.rho_R) * (
            theta_B * dlog_BY + m.theta_pi * dpi + m.theta_y * (dY - dY_lag))
    raise ValueError(f"unknown rule {rule!r}")


_RULE_VARS = ("rr", "pi", "Y", "Bg")


def _news_var_responses(ge: GEModel) -> dict[str, np.ndarray]:
    return {v: ge.news_matrix(v) for v in _RULE_VARS}


def alt_rule_news(ge: GEModel, base_paths: dict, rule: str,
                  switch_date: int = 0, theta_pi: float | None = None,
                  theta_B: float = 0.0047) -> np.ndarray:
    """News bundle announced at the switch date that imposes the rule onward."""
    theta_pi = theta_pi if theta_pi is not None else (
        2.5 if rule == "hawkish" else ge.macro.theta_pi)
    T = ge.T
    n_rel = T - switch_date
    M = _news_var_responses(ge)

    base_dev = {v: base_paths[v] for v in _RULE_VARS}
    res0_full = _rule_residual(rule, base_dev, ge, theta_pi, theta_B)
    res0 = res0_full[switch_date:]
    # lag terms crossing the switch date use the realized pre-switch path,
    # which the base residual already encodes

    A = np.empty((n_rel, n_rel))
    for j in range(n_rel):
        dev_j = {v: np.zeros(T) for v in _RULE_VARS}
        for v in _RULE_VARS:
            dev_j[v][switch_date:] = M[v][:n_rel, j]
        col = _rule_residual(rule, dev_j, ge, theta_pi, theta_B)
        A[:, j] = col[switch_date:]
    nu = np.linalg.solve(A, -res0)
    return nu


def apply_news_bundle(ge: GEModel, base_paths: dict, nu: np.ndarray,
                      switch_date: int = 0,
                      variables: tuple | None = None) -> dict:
    """Add the effect of an eps_R news bundle announced at switch_date."""
    out = {}
    keys = variables or [k for k in base_paths if k != "dU"]
    n_rel = ge.T - switch_date
    for v in keys:
        M = ge.news_matrix(v)
        add = np.zeros(ge.T)
        add[switch_date:] = M[:n_rel, :n_rel] @ nu
        out[v] = base_paths[v] + add
    return out


def misunderstood_rule(ge: GEModel, base_paths: dict, target_rr: np.ndarray,
                       switch_date: int = 0) -> tuple[dict, np.ndarray]:
    """Replicate a target rate path with per-period unanticipated surprises.

    Each date's surprise is computed with no future surprises anticipated;
    agents keep expecting the original rule.
    """
    T = ge.T
    M = {v: ge.news_matrix(v) for v in set(_RULE_VARS) | {"rr"}}
    impact = M["rr"][0, 0]
    if abs(impact) < 1e-12:
        raise ValueError("monetary surprise has no impact on the current rate")
    keys = [k for k in base_paths if k != "dU"]
    out = {k: base_paths[k].copy() for k in keys}
    eps = np.zeros(T)
    cols = {k: ge.news_matrix(k)[:, 0] for k in keys}
    for t in range(switch_date, T):
        gap = target_rr[t] - out["rr"][t]
        e = gap / impact
        eps[t] = e
        for k in keys:
            out[k][t:] += cols[k][: T - t] * e
    return out, eps


def pi_tilde_comparison(ge: GEModel, paths: dict, theta_B: float,
                        theta_pi: float | None = None) -> dict:
    """Implicit-target inflation implied by the debt path vs model inflation."""
    q0 = ge.ssq
    theta_pi = theta_pi or ge.macro.theta_pi
    R_star = 1.0 + q0["r_R"]
    dlog_BY = paths["Bg"] / q0["B"] - paths["Y"] / q0["Y"]
    R_tilde = np.exp(np.log(R_star) + theta_B * dlog_BY)
    pi_tilde = (theta_pi - R_star) / (theta_pi - R_tilde)   # pi_star = 1
    return dict(model=paths["pi"], formula=pi_tilde - 1.0)


def reference_theta_B(cfg: dict, ss: SteadyState) -> float:
    """Elasticity of the gross liquid rate to the quarterly debt ratio."""
    res = long_run_elasticity(cfg, ss_base=ss)
    dlogR = np.log1p(res["r_R_new"]) - np.log1p(res["r_R_base"])
    dlogb = np.log(res["b_ratio_new"]) - np.log(res["b_ratio_base"])
    return float(dlogR / dlogb)
