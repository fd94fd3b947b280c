"""Stationary equilibrium: solver, internal calibration, debt-supply elasticities.

The baseline steady state imposes the calibration identity B = A^hh (all
household liquid savings intermediated into government bonds), which makes
every Psi share the same stationary equilibrium and reduces the solve to one
dimension in r_k. Counterfactual debt supplies re-solve with (r_l, r_k, N)
free and the tax level clearing the budget at fixed G.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from . import blocks
from .blocks import MacroParams
from .config import config_hash, validate_config
from .grids import build_grid, liquid_grid
from .household import (
    Aggregates,
    HouseholdModel,
    HouseholdParams,
    PolicySet,
    Prices,
    aggregate,
    classify_htm,
    compute_mpcs,
    distribution_stats,
    solve_stationary_policies,
    stationary_distribution,
)
from .income import IncomeChain, SkillSpec, build_income_chain

__all__ = ["SteadyState", "CalibrationTargets", "build_chain", "build_household_model",
           "solve_steady_state", "calibrate", "long_run_elasticity", "recalibrate_rate_gap",
           "macro_params_from_cfg"]


@dataclass
class CalibrationTargets:
    K_Y: float = 11.22
    B_Y: float = 1.8          # liquid assets over quarterly GDP
    top10: float = 0.70
    borrower_share: float = 0.16
    r_l: float = 0.0
    a_lower_income_mult: float = 1.0
    N_ss: float = 1.0


@dataclass
class SteadyState:
    cfg: dict
    model: HouseholdModel
    chain: IncomeChain
    macro: MacroParams
    prices: Prices
    policies: PolicySet
    D: np.ndarray
    agg: Aggregates
    quantities: dict
    residuals: dict
    varsigma: float
    delta1: float

    @property
    def cfg_hash(self) -> str:
        return config_hash(self.cfg)

    def residual_report(self) -> str:
        lines = [f"  {k:22s} {v:+.3e}" for k, v in self.residuals.items()]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def build_chain(cfg: dict) -> IncomeChain:
    inc = cfg["income"]
    return build_income_chain(
        SkillSpec(inc["rho_s"], inc["sigma_s"], inc["n_s"], inc["width"]),
        zeta=inc["zeta"],
        iota=inc["iota"],
    )


def _firm_block(r_k: float, N: float, chain: IncomeChain, cfg: dict, delta1: float,
                delta2: float) -> dict:
    """Closed-form supply side at (r_k, N) with q = 1, Z = 1, mc = 1/mu."""
    tech = cfg["technology"]
    alpha, mu = tech["alpha"], tech["mu_ss"]
    mc = 1.0 / mu
    if delta2 > 0:
        u = float(np.sqrt(max(1.0 + 2.0 * (r_k + tech["delta0"] - delta1) / delta2, 1e-12)))
    else:
        u = 1.0
    H = N * (1.0 - chain.ent_mass)
    marg = delta1 + delta2 * (u - 1.0)
    x = (alpha * mc / marg) ** (1.0 / (1.0 - alpha))   # u*K/H
    K = x * H / u
    Y = x ** alpha * H
    w = (1.0 - alpha) * mc * Y / H
    delta_u = tech["delta0"] + delta1 * (u - 1.0) + 0.5 * delta2 * (u - 1.0) ** 2
    I = delta_u * K
    Pi = (1.0 - mc) * Y
    return dict(u=u, H=H, K=K, Y=Y, w=w, I=I, Pi=Pi, mc=mc, delta_u=delta_u)


def derived_a_lower(cfg: dict, w: float, chain: IncomeChain, N: float = 1.0) -> float:
    """Borrowing limit: one quarter of average post-tax labor income."""
    fis = cfg["fiscal"]
    mom = chain.worker_moment(1.0 - fis["tau_p"]) / (1.0 - chain.ent_mass)
    avg_inc = (1.0 - fis["tau_w"]) * (w * N) ** (1.0 - fis["tau_p"]) * mom
    return -avg_inc


def build_household_model(cfg: dict, chain: IncomeChain, w_ref: float,
                          a_lower: float | None = None) -> HouseholdModel:
    hh, gr = cfg["household"], cfg["grids"]
    if a_lower is None:
        a_lower = cfg["household"]["a_lower"]
    if a_lower is None:
        a_lower = derived_a_lower(cfg, w_ref, chain)
    params = HouseholdParams(
        beta=cfg["preferences"]["beta"],
        xi=cfg["preferences"]["xi"],
        gamma=cfg["preferences"]["gamma"],
        varsigma=cfg["preferences"]["varsigma"] or 1.0,
        lam=hh["lam"],
        a_lower=a_lower,
        R_bar=hh["R_bar"],
        tau_w=cfg["fiscal"]["tau_w"],
        tau_p=cfg["fiscal"]["tau_p"],
        tau_Xi=cfg["fiscal"]["tau_Xi"],
    )
    a_max = hh["a_max_factor"] * w_ref
    k_max = hh["k_max_factor"] * w_ref
    a_grid = liquid_grid(a_lower, a_max, gr["n_a"], gr["n_extra"])
    k_grid = build_grid(0.0, k_max, gr["n_k"])
    return HouseholdModel(params, chain, a_grid, k_grid)


def macro_params_from_cfg(cfg: dict, delta1: float, G_ss: float, r_R_ss: float,
                          varsigma: float) -> MacroParams:
    tech, nom, fis, mon, liq = (cfg["technology"], cfg["nominal"], cfg["fiscal"],
                                cfg["monetary"], cfg["liquidity"])
    return MacroParams(
        alpha=tech["alpha"], delta0=tech["delta0"], delta1=delta1,
        delta2=tech["delta_ratio"] * delta1, phi_I=tech["phi_I"], mu_ss=tech["mu_ss"],
        kappa_Y=nom["kappa_Y"], kappa_w=nom["kappa_w"], eps_w=nom["eps_w"],
        varphi=cfg["liquidity"]["varphi"], Psi=liq["Psi"], delta_B=fis["delta_B"],
        G_ss=G_ss, rho_tau=fis["rho_tau"], psi_B=fis["psi_B"], rho_R=mon["rho_R"],
        theta_pi=mon["theta_pi"], theta_y=mon["theta_y"],
        r_LB=r_R_ss - mon["elb_gap"], pi_ss=1.0, beta=cfg["preferences"]["beta"],
        wage_pc_form=nom["wage_pc_form"],
    )


# ---------------------------------------------------------------------------
# steady-state solver
# ---------------------------------------------------------------------------

class _HHCache:
    """Warm-start container for repeated household solves."""

    def __init__(self):
        self.V = None
        self.D = None

    def solve(self, model, pr, tol_back, tol_dist):
        pols = solve_stationary_policies(model, pr, tol=tol_back, init=self.V)
        D = stationary_distribution(model, pols, tol=tol_dist, init=self.D)
        self.V = (pols.Va, pols.Vk)
        self.D = D
        return pols, D


def _tau_level_for_budget(G: float, r_R: float, B: float, w: float, H: float,
                          N: float, Pi: float, chain: IncomeChain, cfg: dict) -> float:
    """Tax level clearing the stationary budget (revenues are affine in it)."""
    fis = cfg["fiscal"]
    s_pow = (w * N) ** (1.0 - fis["tau_p"]) * chain.worker_moment(1.0 - fis["tau_p"])
    need = G + r_R * B
    return (need - w * H + s_pow) / (fis["tau_Xi"] * Pi + fis["tau_w"] * s_pow)


def analytic_upsilon(w: float, H: float, N: float, Pi: float, tau_level: float,
                     chain: IncomeChain, cfg: dict) -> float:
    """Tax revenue from the chain's ergodic moments (exact, no histogram error)."""
    fis = cfg["fiscal"]
    s_pow = (w * N) ** (1.0 - fis["tau_p"]) * chain.worker_moment(1.0 - fis["tau_p"])
    return (tau_level * fis["tau_Xi"] * Pi
            + w * H - (1.0 - tau_level * fis["tau_w"]) * s_pow)


def solve_steady_state(
    cfg: dict,
    mode: str = "baseline",
    b_target: float | None = None,
    G_fixed: float | None = None,
    delta1: float | None = None,
    varsigma: float | None = None,
    r_guess: tuple | None = None,
    model: HouseholdModel | None = None,
    cache: _HHCache | None = None,
) -> SteadyState:
    """Find the stationary equilibrium.

    mode 'baseline': B = A^hh, u = 1 (delta1 set accordingly), tau_level = 1;
    one-dimensional in r_k. mode 'debt_target': B = b_target * Y with G fixed
    and the tax level clearing the budget; three unknowns (r_l, r_k, N).
    A segmented asset market (Psi = inf) pairs the liquid and bond markets
    directly.
    """
    validate_config(cfg)
    num = cfg["numerics"]
    tech = cfg["technology"]
    fis = cfg["fiscal"]
    Psi = cfg["liquidity"]["Psi"]
    varphi = cfg["liquidity"]["varphi"]
    chain = build_chain(cfg)
    cache = cache or _HHCache()

    alpha, mu = tech["alpha"], tech["mu_ss"]
    mc = 1.0 / mu

    if mode == "baseline":
        # u=1 requires delta1 = r_k + delta0; the K/H ratio then pins the
        # entire supply side, leaving a one-dimensional search in r_k
        r_k0 = r_guess[0] if r_guess else 0.0092

        if model is None:
            fb0 = _firm_block(r_k0, 1.0, chain, cfg, r_k0 + tech["delta0"],
                              tech["delta_ratio"] * (r_k0 + tech["delta0"]))
            model = build_household_model(cfg, chain, fb0["w"])

        def excess(r_k, tight=False):
            d1 = r_k + tech["delta0"]
            fb = _firm_block(r_k, 1.0, chain, cfg, d1, tech["delta_ratio"] * d1)
            pr = Prices(r_l=r_k - varphi, r_k=r_k, q=1.0, w=fb["w"], N=1.0,
                        T=0.0, tau_level=1.0, Pi=fb["Pi"], A=1.0)
            tb = min(num["tol_backward"], 5e-13) if tight else num["tol_backward"]
            td = min(num["tol_dist"], 1e-13) if tight else num["tol_dist"]
            pols, D = cache.solve(model, pr, tb, td)
            agg = aggregate(model, D, pols, pr)
            return (agg.K_end - fb["K"]) / fb["Y"], (fb, pr, pols, D, agg)

        r_k = r_k0
        f0, payload = excess(r_k)
        step = 1e-4
        f1, payload1 = excess(r_k + step)
        slope = (f1 - f0) / step
        r_k_prev, f_prev = r_k + step, f1
        payload = payload1
        r_k = r_k_prev
        tight = False
        for it in range(60):
            if abs(f_prev) < 1e-10:
                break
            # near the root, household noise dominates: tighten the inner
            # tolerances and refresh the residual before the next step
            if not tight and abs(f_prev) < 1e-7:
                tight = True
                f_prev, payload = excess(r_k, tight=True)
                continue
            r_new = r_k - f_prev / slope
            r_new = min(max(r_new, 1e-4), 0.2)
            f_new, payload = excess(r_new, tight=tight)
            if r_new != r_k:
                slope = (f_new - f_prev) / (r_new - r_k)
            r_k, f_prev = r_new, f_new
        else:
            raise RuntimeError(f"steady-state r_k iteration stalled, residual {f_prev:.3e}")
        fb, pr, pols, D, agg = payload
        r_k = pr.r_k
        N = 1.0
        B = agg.A_end
        A_l = agg.A_end
        r_R = r_k
        tau_level = 1.0
        delta1 = r_k + tech["delta0"]
        Upsilon = analytic_upsilon(fb["w"], fb["H"], 1.0, fb["Pi"], 1.0, chain, cfg)
        G = Upsilon - r_R * B if G_fixed is None else G_fixed
    elif mode in ("debt_target", "segmented"):
        if delta1 is None or b_target is None or G_fixed is None:
            raise ValueError("debt-target mode needs delta1, b_target and G_fixed "
                             "from the baseline steady state")
        delta2 = tech["delta_ratio"] * delta1
        segmented = mode == "segmented" or np.isinf(Psi)

        if model is None:
            fb0 = _firm_block(r_guess[1] if r_guess else 0.0092, 1.0, chain, cfg,
                              delta1, delta2)
            model = build_household_model(cfg, chain, fb0["w"])

        def implied_r_R(r_l, r_k):
            """Policy rate consistent with the fund's two conditions at (r_l, r_k).

            Combining the portfolio FOC with the realized-return equation at a
            stationary point gives Psi*(x - x^2/2) = r_k - varphi - r_l for the
            capital share x = 1 - B/A, hence r_R = r_k - Psi*x.
            """
            if segmented:
                return r_l + varphi
            if Psi == 0.0:
                return r_k
            disc = 1.0 - 2.0 * (r_k - varphi - r_l) / Psi
            x = 1.0 - np.sqrt(max(disc, 0.0))
            return r_k - Psi * x

        tight = {"on": False}

        def system(xvec):
            r_l, r_k, N = xvec
            fb = _firm_block(r_k, N, chain, cfg, delta1, delta2)
            B = b_target * fb["Y"]
            tl = _tau_level_for_budget(G_fixed, implied_r_R(r_l, r_k), B, fb["w"],
                                       fb["H"], N, fb["Pi"], chain, cfg)
            pr = Prices(r_l=r_l, r_k=r_k, q=1.0, w=fb["w"], N=N, T=0.0,
                        tau_level=tl, Pi=fb["Pi"], A=1.0)
            tb = 5e-13 if tight["on"] else min(num["tol_backward"], 1e-11)
            td = 5e-14 if tight["on"] else min(num["tol_dist"], 1e-13)
            pols, D = cache.solve(model, pr, tb, td)
            agg = aggregate(model, D, pols, pr)
            A_l = agg.A_end
            if segmented:
                r_R = r_l + varphi
                f1 = (A_l - B) / fb["Y"]
                f2 = (fb["K"] - agg.K_end) / fb["Y"]
            else:
                r_R = r_k - Psi * (1.0 - B / A_l)
                f1 = (fb["K"] - (A_l - B) - agg.K_end) / fb["Y"]
                rl_implied = blocks.laf_liquid_return(
                    1.0, 1.0, r_k, 1.0 / (r_R + fis["delta_B"]),
                    1.0 / (r_R + fis["delta_B"]), 1.0, B, A_l, varphi, Psi,
                    fis["delta_B"])
                f2 = r_l - rl_implied
            outs = model.node_outputs(pols, pr)
            union = float(np.sum(D * outs["UnionInt"]))
            wres = blocks.wage_pc_residual(
                1.0, 1.0, N, union, fis["tau_w"] * tl,
                macro_params_from_cfg(cfg, delta1, G_fixed, r_R, varsigma),
                varsigma, cfg["preferences"]["gamma"], fis["tau_p"])
            f3 = wres
            return np.array([f1, f2, f3]), (fb, pr, pols, D, agg, B, A_l, r_R, tl, union)

        x = np.array(r_guess if r_guess and len(r_guess) == 3 else
                     [(r_guess[0] if r_guess else 0.0), (r_guess[1] if r_guess else 0.0092), 1.0])
        f, payload = system(x)
        # damped quasi-Newton with periodic finite-difference Jacobian refresh
        J = None
        damp = 0.5
        # residuals are normalized by Y; the absolute 1e-8 requirement on
        # market clearing maps into ~2e-9 here
        crit = 2e-9
        for it in range(80):
            if np.max(np.abs(f)) < crit:
                break
            if J is None or it % 5 == 0:
                J = np.empty((3, 3))
                hsteps = np.array([5e-5, 5e-5, 5e-4])
                for i in range(3):
                    xp = x.copy()
                    xp[i] += hsteps[i]
                    fp, _ = system(xp)
                    J[:, i] = (fp - f) / hsteps[i]
            dx = np.linalg.solve(J, -f)
            x_new = x + damp * dx
            f_new, payload_new = system(x_new)
            if np.max(np.abs(f_new)) < np.max(np.abs(f)):
                damp = min(1.0, 1.5 * damp)
                x, f, payload = x_new, f_new, payload_new
            else:
                damp = max(0.1, 0.5 * damp)
                x = x + damp * dx
                f, payload = system(x)
        else:
            raise RuntimeError(
                f"steady-state quasi-Newton stalled; residuals {f}")
        fb, pr, pols, D, agg, B, A_l, r_R, tau_level, union = payload
        r_k, N = pr.r_k, pr.N
        G = G_fixed
        Upsilon = analytic_upsilon(fb["w"], fb["H"], N, fb["Pi"], tau_level, chain, cfg)
    else:
        raise ValueError(f"unknown steady-state mode {mode!r}")

    # shared post-processing -------------------------------------------------
    Q = 1.0 / (r_R + fis["delta_B"])
    outs = model.node_outputs(pols, pr)
    union_integral = float(np.sum(D * outs["UnionInt"]))
    if varsigma is None:
        # labor disutility scale making the wage curve hold at N_ss
        varsigma = ((cfg["nominal"]["eps_w"] - 1.0) / cfg["nominal"]["eps_w"]
                    * (1.0 - fis["tau_p"]) * (1.0 - fis["tau_w"] * tau_level)
                    * union_integral / pr.N ** (1.0 + cfg["preferences"]["gamma"]))
    macro = macro_params_from_cfg(cfg, delta1, G, r_R, varsigma)

    quantities = dict(
        Y=fb["Y"], K=fb["K"], H=fb["H"], I=fb["I"], u=fb["u"], w=fb["w"],
        mc=fb["mc"], C=agg.C, G=G, B=B if mode != "baseline" else agg.A_end,
        A_l=agg.A_end, r_l=pr.r_l, r_k=r_k, r_R=r_R, Q=Q, N=pr.N,
        Pi=fb["Pi"], tau_level=tau_level, Upsilon=Upsilon,
        borrow_volume=agg.borrow_volume, union_integral=union_integral,
        K_hh=agg.K_end, T=0.0, pi=1.0, q=1.0,
    )

    residuals = _ss_residuals(quantities, agg, macro, cfg, varsigma)
    return SteadyState(cfg=copy.deepcopy(cfg), model=model, chain=chain, macro=macro,
                       prices=pr, policies=pols, D=D, agg=agg,
                       quantities=quantities, residuals=residuals,
                       varsigma=varsigma, delta1=delta1)


def _ss_residuals(q: dict, agg: Aggregates, macro: MacroParams, cfg: dict,
                  varsigma: float) -> dict:
    fis = cfg["fiscal"]
    res = {}
    res["nkpc"] = float(blocks.nkpc_residual(1.0, 1.0, q["mc"], macro.mu_ss,
                                             macro.beta, macro.kappa_Y))
    res["wage_pc"] = float(blocks.wage_pc_residual(
        1.0, 1.0, q["N"], q["union_integral"], fis["tau_w"] * q["tau_level"],
        macro, varsigma, cfg["preferences"]["gamma"], fis["tau_p"]))
    fh, fk, fu = blocks.firm_focs(q["K"], q["H"], q["u"], q["mc"], 1.0,
                                  q["r_k"], q["w"], 1.0, macro)
    res["firm_H"], res["firm_K"], res["firm_u"] = float(fh), float(fk), float(fu)
    res["capital_producer"] = float(blocks.capital_producer_residual(
        q["I"], q["I"], q["I"], 1.0, 1.0, 1.0, 1.0, macro.beta, macro.phi_I))
    if np.isfinite(macro.Psi):
        res["laf_portfolio"] = float(blocks.laf_portfolio_residual(
            q["r_k"], 1.0, 1.0, 1.0, q["r_R"], q["B"], q["A_l"], macro.Psi))
    res["laf_return"] = float(q["r_l"] - blocks.laf_liquid_return(
        1.0, 1.0, q["r_k"], q["Q"], q["Q"], 1.0, q["B"], q["A_l"],
        macro.varphi, macro.Psi if np.isfinite(macro.Psi) else 0.0, macro.delta_B))
    res["fiscal_budget"] = float(blocks.fiscal_budget_next_debt(
        q["B"], q["Q"], q["Q"], 1.0, q["G"], 0.0, q["Upsilon"], macro.delta_B) - q["B"])
    res["liquid_market"] = float(q["A_l"] - agg.A_end)
    res["capital_market"] = float(q["K"] - (q["A_l"] - q["B"]) - q["K_hh"])
    res["goods_market"] = float(blocks.goods_market_residual(
        q["Y"], q["C"], q["G"], q["I"], q["A_l"], q["B"], q["borrow_volume"],
        cfg["household"]["R_bar"], macro.varphi,
        macro.Psi if np.isfinite(macro.Psi) else 0.0))
    res["household_budget"] = float(agg.budget_gap)
    return res


# ---------------------------------------------------------------------------
# calibration
# ---------------------------------------------------------------------------

def calibrate(cfg: dict, targets: CalibrationTargets | None = None,
              verbose: bool = False, max_outer: int = 40) -> tuple[dict, dict]:
    """Choose (beta, zeta, lam, R_bar, a_lower, G_ss, varphi) to hit the targets.

    The K/Y target fixes r_k in closed form through the capital FOC, and the
    liquid target fixes r_l = 0 via varphi, so every moment evaluation is a
    household solve at known prices: the nested loops are (lam, R_bar) inside
    (beta, zeta), with the borrowing limit refreshed between outer rounds.
    """
    t = targets or CalibrationTargets()
    cfg = copy.deepcopy(cfg)
    tech = cfg["technology"]
    alpha, mu = tech["alpha"], tech["mu_ss"]
    mc = 1.0 / mu
    r_k = alpha * mc / t.K_Y - tech["delta0"]
    if r_k <= 0:
        raise ValueError(f"K/Y target {t.K_Y} implies non-positive r_k {r_k:.4g}")
    r_l = t.r_l
    delta1 = r_k + tech["delta0"]
    num = cfg["numerics"]
    cache = _HHCache()

    x_out = np.array([cfg["preferences"]["beta"], np.log(cfg["income"]["zeta"])])
    x_mid = np.array([np.log(cfg["household"]["lam"]), np.log(cfg["household"]["R_bar"])])
    state = {}

    def moments(beta, zeta, lam, R_bar, a_lower):
        cfg["preferences"]["beta"] = float(beta)
        cfg["income"]["zeta"] = float(zeta)
        cfg["household"]["lam"] = float(lam)
        cfg["household"]["R_bar"] = float(R_bar)
        chain = build_chain(cfg)
        fb = _firm_block(r_k, t.N_ss, chain, cfg, delta1, tech["delta_ratio"] * delta1)
        model = build_household_model(cfg, chain, fb["w"], a_lower=a_lower)
        pr = Prices(r_l=r_l, r_k=r_k, q=1.0, w=fb["w"], N=t.N_ss, T=0.0,
                    tau_level=1.0, Pi=fb["Pi"], A=1.0)
        pols, D = cache.solve(model, pr, num["tol_backward"], num["tol_dist"])
        agg = aggregate(model, D, pols, pr)
        nw_top10 = distribution_stats(model, D, pr)["networth"]["top10"]
        borrowers = float(np.sum(D[:, :, model.a_grid < 0.0]))
        state.update(model=model, chain=chain, fb=fb, pr=pr, pols=pols, D=D, agg=agg)
        return np.array([
            agg.K_end / fb["Y"] - t.K_Y,
            agg.A_end / fb["Y"] - t.B_Y,
            borrowers - t.borrower_share,
            nw_top10 - t.top10,
        ])

    def middle_solve(beta, zeta, a_lower, x_mid):
        """2D Broyden on (log lam, log R_bar) against (B/Y, borrower share)."""
        def f2(xm):
            m = moments(beta, zeta, np.exp(xm[0]), np.exp(xm[1]), a_lower)
            return m[1:3]
        x = x_mid.copy()
        f = f2(x)
        J = None
        for it in range(30):
            if np.max(np.abs(f)) < 2e-7:
                break
            if J is None or it % 6 == 0:
                J = np.empty((2, 2))
                for i, h in enumerate([1e-3, 1e-3]):
                    xp = x.copy()
                    xp[i] += h
                    J[:, i] = (f2(xp) - f) / h
            dx = np.clip(np.linalg.solve(J, -f), -0.5, 0.5)
            x_new = x + dx
            f_new = f2(x_new)
            s = dx
            yv = f_new - f
            # Broyden rank-1 update
            J = J + np.outer((yv - J @ s), s) / max(s @ s, 1e-300)
            x, f = x_new, f_new
        return x, f

    a_lower = cfg["household"]["a_lower"]
    report = {}
    for outer in range(max_outer):
        beta, zeta = x_out[0], np.exp(x_out[1])
        chain = build_chain(cfg | {"income": {**cfg["income"], "zeta": float(zeta)}})
        fb = _firm_block(r_k, t.N_ss, chain, cfg, delta1, tech["delta_ratio"] * delta1)
        a_lower_new = -t.a_lower_income_mult * abs(derived_a_lower(cfg, fb["w"], chain, t.N_ss))
        if a_lower is None or abs(a_lower_new - a_lower) > 1e-6 * abs(a_lower_new):
            a_lower = a_lower_new
            cache.V = cache.D = None   # grid changed, cold restart
        x_mid, f_mid = middle_solve(beta, zeta, a_lower, x_mid)
        m = moments(beta, zeta, np.exp(x_mid[0]), np.exp(x_mid[1]), a_lower)
        f_out = m[[0, 3]]
        if verbose:
            print(f"outer {outer}: beta={beta:.5f} zeta={zeta:.6f} "
                  f"lam={np.exp(x_mid[0]):.5f} Rbar={np.exp(x_mid[1]):.5f} "
                  f"targets {m}")
        if np.max(np.abs(m / np.array([t.K_Y, t.B_Y, t.borrower_share, t.top10]))) < 1e-6:
            break
        J = np.empty((2, 2))
        for i, h in enumerate([2e-4, 0.05]):
            xp = x_out.copy()
            xp[i] += h
            beta_p, zeta_p = xp[0], np.exp(xp[1])
            mp = moments(beta_p, zeta_p, np.exp(x_mid[0]), np.exp(x_mid[1]), a_lower)
            J[:, i] = (mp[[0, 3]] - f_out) / h
        dx = np.clip(np.linalg.solve(J, -f_out), [-4e-3, -0.6], [4e-3, 0.6])
        x_out = x_out + dx
    else:
        raise RuntimeError(f"calibration did not converge; last targets {m}")

    # finalize derived parameters
    cfg["household"]["a_lower"] = float(a_lower)
    cfg["liquidity"]["varphi"] = float(r_k - t.r_l)
    agg, fb, pr = state["agg"], state["fb"], state["pr"]
    Upsilon = analytic_upsilon(fb["w"], fb["H"], t.N_ss, fb["Pi"], 1.0, state["chain"], cfg)
    cfg["fiscal"]["G_ss"] = float(Upsilon - r_k * agg.A_end)
    outs = state["model"].node_outputs(state["pols"], pr)
    union = float(np.sum(state["D"] * outs["UnionInt"]))
    nom, fis = cfg["nominal"], cfg["fiscal"]
    cfg["preferences"]["varsigma"] = float(
        (nom["eps_w"] - 1.0) / nom["eps_w"] * (1.0 - fis["tau_p"])
        * (1.0 - fis["tau_w"]) * union / t.N_ss ** (1.0 + cfg["preferences"]["gamma"]))
    report = dict(
        r_k=r_k, delta1=delta1, beta=cfg["preferences"]["beta"],
        zeta=cfg["income"]["zeta"], lam=cfg["household"]["lam"],
        R_bar=cfg["household"]["R_bar"], a_lower=a_lower,
        G_ss=cfg["fiscal"]["G_ss"], varphi=cfg["liquidity"]["varphi"],
        varsigma=cfg["preferences"]["varsigma"],
        target_gaps=dict(K_Y=float(m[0]), B_Y=float(m[1]),
                         borrower_share=float(m[2]), top10=float(m[3])),
    )
    return cfg, report


# ---------------------------------------------------------------------------
# long-run exercises
# ---------------------------------------------------------------------------

def annualized_bond_yield(r_R: float) -> float:
    return (1.0 + r_R) ** 4 - 1.0


def long_run_elasticity(cfg: dict, ss_base: SteadyState | None = None,
                        delta_pp: float = 1.0, Psi: float | None = None) -> dict:
    """Annual bond-yield change (bp) after raising annual debt/GDP by delta_pp.

    The counterfactual holds G at its baseline level, keeps transfers at zero
    and lets the tax level clear the budget; the central bank re-anchors its
    intercept so inflation stays at target.
    """
    if ss_base is None:
        ss_base = solve_steady_state(cfg)
    cfg2 = copy.deepcopy(ss_base.cfg)
    if Psi is not None:
        cfg2["liquidity"]["Psi"] = Psi
    b0 = ss_base.quantities["B"] / ss_base.quantities["Y"]
    b1 = b0 + 0.04 * delta_pp
    mode = "segmented" if np.isinf(cfg2["liquidity"]["Psi"]) else "debt_target"
    ss_new = solve_steady_state(
        cfg2, mode=mode, b_target=b1, G_fixed=ss_base.quantities["G"],
        delta1=ss_base.delta1, varsigma=ss_base.varsigma,
        r_guess=(ss_base.quantities["r_l"], ss_base.quantities["r_k"], 1.0),
        model=ss_base.model,
    )
    dy = annualized_bond_yield(ss_new.quantities["r_R"]) - annualized_bond_yield(
        ss_base.quantities["r_R"])
    return dict(
        bp_per_pp=dy * 1e4 / delta_pp,
        r_R_base=ss_base.quantities["r_R"],
        r_R_new=ss_new.quantities["r_R"],
        b_ratio_base=b0,
        b_ratio_new=b1,
        ss_new=ss_new,
    )


# published alternative calibrations, used only to seed the solver
_RATE_GAP_SEEDS = {
    0.0175: dict(beta=0.9838, zeta=0.0005, lam=0.0363, R_bar=0.0355),
    0.02: dict(beta=0.9866, zeta=0.0004, lam=0.067, R_bar=0.0299),
    0.0225: dict(beta=0.9894, zeta=0.0003, lam=0.1068, R_bar=0.0222),
    0.025: dict(beta=0.9921, zeta=0.0003, lam=0.176, R_bar=0.0131),
}


def recalibrate_rate_gap(cfg: dict, delta0_new: float,
                         targets: CalibrationTargets | None = None) -> dict:
    """Re-run the full calibration at a different depreciation rate.

    Returns the new config plus the steady-state rate gap, MPC and HtM
    moments, and the segmented-market debt elasticity.
    """
    if not 0.0175 - 1e-9 <= delta0_new <= 0.025 + 1e-9:
        raise ValueError(f"delta0 {delta0_new} outside the studied range [0.0175, 0.025]")
    cfg2 = copy.deepcopy(cfg)
    cfg2["technology"]["delta0"] = float(delta0_new)
    seed = min(_RATE_GAP_SEEDS, key=lambda d: abs(d - delta0_new))
    cfg2["preferences"]["beta"] = _RATE_GAP_SEEDS[seed]["beta"]
    cfg2["income"]["zeta"] = _RATE_GAP_SEEDS[seed]["zeta"]
    cfg2["household"]["lam"] = _RATE_GAP_SEEDS[seed]["lam"]
    cfg2["household"]["R_bar"] = _RATE_GAP_SEEDS[seed]["R_bar"]
    cfg2, rep = calibrate(cfg2, targets)
    ss = solve_steady_state(cfg2)
    mean_q, mean_a, _ = compute_mpcs(ss.model, ss.D, ss.policies, ss.prices)
    htm = classify_htm(ss.model, ss.D, ss.prices)
    gap = annualized_bond_yield(ss.quantities["r_k"]) - annualized_bond_yield(
        ss.quantities["r_l"])
    elast = long_run_elasticity(cfg2, ss_base=ss, Psi=np.inf)
    return dict(cfg=cfg2, calibration=rep, rate_gap=gap, mean_qmpc=mean_q,
                mean_ampc=mean_a, htm=htm, segmented_bp=elast["bp_per_pp"], ss=ss)
