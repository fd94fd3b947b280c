"""Sequence-space linearization: fake-news Jacobians, GE assembly, IRFs, ELB.

The household block's T x T Jacobians come from the fake-news construction
(one two-sided finite-difference backward sweep per input, expectation-vector
forward accumulation). The general-equilibrium map stacks six unknown paths
(pi, N, I, u, q, Al) against six targets (utilization FOC, investment FOC,
wage curve, fund portfolio FOC, liquid clearing, capital clearing); all other
equilibrium conditions are imposed exactly inside the forward map, and the
goods market is kept back as the Walras check.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import blocks
from .household import Prices, PolicySet
from .steady_state import SteadyState

logger = logging.getLogger(__name__)

__all__ = ["ShockSpec", "TABLE5_PERSISTENCE", "HH_INPUTS", "HH_OUTPUTS",
           "ha_jacobians", "jacobian_from_fake_news", "household_path",
           "GEModel", "ar1_path"]

HH_INPUTS = ("r_l", "r_k", "q", "w", "N", "T", "tau_level", "Pi", "A")
HH_OUTPUTS = ("C", "Ahh", "Khh", "UnionInt", "Volb")

TABLE5_PERSISTENCE = {"Z_I": 0.75, "mu": 0.9, "eps_R": 0.0, "A": 0.9, "T": 0.5, "G": 0.9}

SHOCK_NAMES = ("Z_I", "mu", "eps_R", "A", "T")


@dataclass(frozen=True)
class ShockSpec:
    name: str
    size: float
    persistence: float | None = None   # None: Table-5 value

    def path(self, T: int) -> np.ndarray:
        rho = TABLE5_PERSISTENCE[self.name] if self.persistence is None else self.persistence
        if not 0.0 <= rho < 1.0:
            raise ValueError(f"persistence must be in [0,1), got {rho}")
        return self.size * rho ** np.arange(T)


def ar1_path(size: float, rho: float, T: int) -> np.ndarray:
    return size * rho ** np.arange(T)


# ---------------------------------------------------------------------------
# household-block Jacobians (fake news)
# ---------------------------------------------------------------------------

def _input_scale(name: str, pr: Prices, Y_ss: float) -> float:
    val = abs(getattr(pr, name))
    floors = {"r_l": 0.01, "r_k": 0.01, "T": Y_ss, "A": 1.0, "tau_level": 1.0}
    return max(val, floors.get(name, 0.0), 1e-2)


def _perturbed_prices(pr: Prices, name: str, delta: float) -> Prices:
    kw = {f: getattr(pr, f) for f in HH_INPUTS}
    kw[name] += delta
    return Prices(**kw)


def household_path(ss: SteadyState, input_paths: dict[str, np.ndarray], T: int) -> dict:
    """Nonlinear perfect-foresight solution of the household block alone.

    Prices follow `input_paths` (absolute deviations from the steady state)
    and revert to steady state after T; the distribution starts from the
    stationary one. Used as the direct-perturbation oracle for the Jacobians.
    """
    model = ss.model
    pr_ss = ss.prices
    prices = []
    for t in range(T):
        kw = {f: getattr(pr_ss, f) for f in HH_INPUTS}
        for name, path in input_paths.items():
            kw[name] += path[t]
        prices.append(Prices(**kw))
    Va, Vk = ss.policies.Va, ss.policies.Vk
    pols_seq: list[PolicySet] = [None] * T
    for t in range(T - 1, -1, -1):
        pols = model.backward_step(Va, Vk, prices[t])
        pols_seq[t] = pols
        Va, Vk = pols.Va, pols.Vk
    D = ss.D
    out = {o: np.empty(T) for o in HH_OUTPUTS}
    for t in range(T):
        nodes = model.node_outputs(pols_seq[t], prices[t])
        for o in HH_OUTPUTS:
            out[o][t] = np.sum(D * nodes[o])
        D = model.forward_step(D, pols_seq[t])
    return out


def ha_jacobians(
    ss: SteadyState,
    T: int,
    inputs: tuple = HH_INPUTS,
    outputs: tuple = HH_OUTPUTS,
    h_rel: float = 1e-4,
    dtype=None,
    richardson_check: bool = True,
    return_fake_news: bool = False,
) -> dict[str, dict[str, np.ndarray]]:
    """T x T household Jacobians J[output][input] via the fake-news algorithm."""
    model = ss.model
    pr_ss = ss.prices
    pols_ss = ss.policies
    D_ss = ss.D
    Y_ss = ss.quantities["Y"]
    n_nodes = D_ss.size
    if dtype is None:
        # expectation vectors dominate memory; degrade gracefully on big grids
        need = (len(outputs) + 1) * T * n_nodes * 8
        dtype = np.float64 if need < 6e9 else np.float32

    # expectation vectors for every output (shared across inputs)
    nodes_ss = model.node_outputs(pols_ss, pr_ss)
    curlyP = {}
    for o in outputs:
        P = np.empty((T - 1, n_nodes), dtype=dtype)
        phi = nodes_ss[o] - np.sum(D_ss * nodes_ss[o])
        P[0] = phi.ravel()
        for t in range(1, T - 1):
            phi = model.expectation_step(phi, pols_ss)
            phi = phi - np.sum(D_ss * phi)
            P[t] = phi.ravel()
        curlyP[o] = P

    def backward_sweep(name: str, h: float):
        """Two-sided perturbed backward iteration; returns curlyY, curlyD."""
        curlyY = {o: np.empty(T) for o in outputs}
        curlyD = np.empty((T, n_nodes), dtype=dtype)
        pr_p = _perturbed_prices(pr_ss, name, +h)
        pr_m = _perturbed_prices(pr_ss, name, -h)
        Va_p, Vk_p = pols_ss.Va, pols_ss.Vk
        Va_m, Vk_m = pols_ss.Va, pols_ss.Vk
        for s in range(T):
            use_p = pr_p if s == 0 else pr_ss
            use_m = pr_m if s == 0 else pr_ss
            pp = model.backward_step(Va_p, Vk_p, use_p)
            pm = model.backward_step(Va_m, Vk_m, use_m)
            np_out = model.node_outputs(pp, use_p)
            nm_out = model.node_outputs(pm, use_m)
            for o in outputs:
                curlyY[o][s] = np.sum(D_ss * (np_out[o] - nm_out[o])) / (2 * h)
            Dp = model.forward_step(D_ss, pp)
            Dm = model.forward_step(D_ss, pm)
            curlyD[s] = ((Dp - Dm) / (2 * h)).ravel()
            Va_p, Vk_p = pp.Va, pp.Vk
            Va_m, Vk_m = pm.Va, pm.Vk
        return curlyY, curlyD

    J = {o: {} for o in outputs}
    FN = {o: {} for o in outputs} if return_fake_news else None
    for name in inputs:
        h = h_rel * _input_scale(name, pr_ss, Y_ss)
        curlyY, curlyD = backward_sweep(name, h)
        if richardson_check:
            curlyY_half, _ = _impact_row(model, pols_ss, D_ss, pr_ss, name, h / 2, outputs)
            for o in outputs:
                a, b = curlyY[o][0], curlyY_half[o]
                if abs(a - b) > 1e-3 * max(abs(a), abs(b), 1e-8):
                    logger.warning(
                        "fake-news derivative for d%s/d%s fails the step-halving "
                        "check: %.6e vs %.6e", o, name, a, b)
        for o in outputs:
            F = np.empty((T, T))
            F[0, :] = curlyY[o]
            F[1:, :] = (curlyP[o] @ curlyD.T).astype(np.float64)
            J[o][name] = jacobian_from_fake_news(F)
            if return_fake_news:
                FN[o][name] = F
    return (J, FN) if return_fake_news else J


def _impact_row(model, pols_ss, D_ss, pr_ss, name, h, outputs):
    pr_p = _perturbed_prices(pr_ss, name, +h)
    pr_m = _perturbed_prices(pr_ss, name, -h)
    pp = model.backward_step(pols_ss.Va, pols_ss.Vk, pr_p)
    pm = model.backward_step(pols_ss.Va, pols_ss.Vk, pr_m)
    np_out = model.node_outputs(pp, pr_p)
    nm_out = model.node_outputs(pm, pr_m)
    return {o: np.sum(D_ss * (np_out[o] - nm_out[o])) / (2 * h) for o in outputs}, None


def jacobian_from_fake_news(F: np.ndarray) -> np.ndarray:
    """J[t,s] = F[t,s] + J[t-1,s-1]."""
    J = F.copy()
    for s in range(1, J.shape[1]):
        J[1:, s] += J[:-1, s - 1]
    return J


# ---------------------------------------------------------------------------
# general-equilibrium model
# ---------------------------------------------------------------------------

UNKNOWNS = ("pi", "N", "I", "u", "q", "Al")


class GEModel:
    """Linearized general equilibrium around a steady state.

    H_U and H_Z are finite-difference Jacobians of the target map; the
    household block enters through its fake-news Jacobians, every other block
    through its exact equations.
    """

    def __init__(self, ss: SteadyState, J_ha: dict, T: int,
                 Psi: float | None = None, fiscal_mode: str = "tax",
                 rho_G: float = 0.94, macro: blocks.MacroParams | None = None):
        self.ss = ss
        self.J = J_ha
        self.T = T
        self.fiscal_mode = fiscal_mode
        self.rho_G = rho_G
        self.macro = macro or ss.macro
        if Psi is not None:
            self.macro = blocks.MacroParams(**{**self.macro.__dict__, "Psi": Psi})
        q = ss.quantities
        self.ssq = q
        self.Y_ss = q["Y"]
        self.scales = np.array([1.0, q["N"], q["I"], 1.0, 1.0, q["A_l"]])
        self.t_scales = np.array([1.0, 1.0, 1.0, 1.0, q["Y"], q["Y"]])
        self._worker_mom = ss.chain.worker_moment(1.0 - ss.cfg["fiscal"]["tau_p"])
        self.H_U = None
        self._lu = None
        self._H_Z: dict[str, np.ndarray] = {}
        self._news_matrices: dict[str, np.ndarray] = {}

    # -- the nonlinear forward map -------------------------------------------

    def forward(self, dU: np.ndarray, dz: dict[str, np.ndarray]):
        """Targets and all paths given unknown deviations and shock paths."""
        T = self.T
        q0 = self.ssq
        m = self.macro
        cfg = self.ss.cfg
        fis = cfg["fiscal"]

        def shock(name):
            z = dz.get(name)
            return np.zeros(T) if z is None else z

        pi = 1.0 + dU[0] * self.scales[0]
        N = q0["N"] + dU[1] * self.scales[1]
        I = q0["I"] + dU[2] * self.scales[2]
        u = q0["u"] + dU[3] * self.scales[3]
        q = 1.0 + dU[4] * self.scales[4]
        Al = q0["A_l"] + dU[5] * self.scales[5]

        Z_I = 1.0 + shock("Z_I")
        mu = m.mu_ss + shock("mu")
        eps_R = shock("eps_R")
        A_shift = 1.0 + shock("A")
        Tr = shock("T")

        pi_next = np.append(pi[1:], 1.0)
        mc = blocks.mc_from_nkpc(pi, pi_next, mu, m.beta, m.kappa_Y)

        I_lag = np.concatenate([[q0["I"]], I[:-1]])
        growth = I / I_lag - 1.0
        newcap = Z_I * (1.0 - 0.5 * m.phi_I * growth**2) * I
        K = np.empty(T + 1)
        K[0] = q0["K"]
        dep = blocks.depreciation(u, m)
        for t in range(T):
            K[t + 1] = (1.0 - dep[t]) * K[t] + newcap[t]
        Kt = K[:-1]

        H = N * (1.0 - self.ss.chain.ent_mass)
        Y = (u * Kt) ** m.alpha * H ** (1.0 - m.alpha)
        w = (1.0 - m.alpha) * mc * Y / H
        w_lag = np.concatenate([[q0["w"]], w[:-1]])
        piw = pi * w / w_lag
        r_k = m.alpha * mc * Y / Kt - q * dep
        Pi_profits = (1.0 - mc) * Y + q * newcap - I

        # policy rate: rr[t] is the rate set at t for t+1
        Y_lag = np.concatenate([[q0["Y"]], Y[:-1]])
        rr = np.empty(T)
        r_prev = q0["r_R"]
        for t in range(T):
            rr[t] = blocks.taylor_rule(r_prev, pi[t], Y[t], Y_lag[t], eps_R[t],
                                       q0["r_R"], m, enforce_elb=False)
            r_prev = rr[t]

        Q = np.empty(T + 1)
        Q[T] = q0["Q"]
        for t in range(T - 1, -1, -1):
            Q[t] = ((1.0 - m.delta_B) * Q[t + 1] + 1.0) / (1.0 + rr[t])
        Q_lag = np.concatenate([[q0["Q"]], Q[: T - 1]])

        # fiscal recursion
        s_pow = (w * N) ** (1.0 - fis["tau_p"]) * self._worker_mom
        tau = np.empty(T)
        Bg = np.empty(T)              # Bg[t] = B^g_{t+1}
        G = np.empty(T)
        B_prev = q0["B"]
        tau_prev = q0["tau_level"]
        G_prev = q0["G"]
        g_shock = shock("G")
        for t in range(T):
            if self.fiscal_mode == "tax":
                tau[t] = blocks.tax_rule_step(tau_prev, B_prev, 1.0, q0["B"],
                                              m.rho_tau, m.psi_B)
                G[t] = q0["G"] + g_shock[t]
            else:
                tau[t] = 1.0
                G[t] = q0["G"] * (G_prev / q0["G"]) ** self.rho_G \
                    * (B_prev / q0["B"]) ** (-(1.0 - self.rho_G) * m.psi_B)
                G[t] += g_shock[t]
            Upsilon_t = (tau[t] * fis["tau_Xi"] * Pi_profits[t]
                         + w[t] * H[t] - (1.0 - tau[t] * fis["tau_w"]) * s_pow[t])
            Bg[t] = blocks.fiscal_budget_next_debt(
                B_prev, Q[t], Q_lag[t], pi[t], G[t], Tr[t], Upsilon_t, m.delta_B)
            B_prev = Bg[t]
            tau_prev = tau[t]
            G_prev = G[t]
        Upsilon = (tau * fis["tau_Xi"] * Pi_profits
                   + w * H - (1.0 - tau * fis["tau_w"]) * s_pow)

        B_entering = np.concatenate([[q0["B"]], Bg[:-1]])
        A_entering = np.concatenate([[q0["A_l"]], Al[:-1]])
        q_lag = np.concatenate([[1.0], q[:-1]])
        r_l = blocks.laf_liquid_return(q, q_lag, r_k, Q[:-1], Q_lag, pi,
                                       B_entering, A_entering, m.varphi, m.Psi,
                                       m.delta_B)

        # household block (linear in input deviations)
        pr0 = self.ss.prices
        dev_inputs = {
            "r_l": r_l - pr0.r_l, "r_k": r_k - pr0.r_k, "q": q - pr0.q,
            "w": w - pr0.w, "N": N - pr0.N, "T": Tr - pr0.T,
            "tau_level": tau - pr0.tau_level, "Pi": Pi_profits - pr0.Pi,
            "A": A_shift - pr0.A,
        }
        hh = {}
        for o in HH_OUTPUTS:
            acc = np.zeros(T)
            for name, dx in dev_inputs.items():
                acc += self.J[o][name] @ dx
            hh[o] = acc
        C = self.ss.agg.C + hh["C"]
        Ahh = self.ss.agg.A_end + hh["Ahh"]
        Khh = self.ss.agg.K_end + hh["Khh"]
        UnionInt = q0["union_integral"] + hh["UnionInt"]
        Volb = self.ss.agg.borrow_volume + hh["Volb"]

        # targets ------------------------------------------------------------
        t_focu = (q * (m.delta1 + m.delta2 * (u - 1.0))
                  - m.alpha * mc * Y / (u * Kt)) / self.t_scales[0]
        I_next = np.append(I[1:], q0["I"])
        q_next = np.append(q[1:], 1.0)
        ZI_next = np.append(Z_I[1:], 1.0)
        t_foci = blocks.capital_producer_residual(
            I_lag, I, I_next, q, q_next, Z_I, ZI_next, m.beta, m.phi_I
        ) / self.t_scales[1]
        piw_next = np.append(piw[1:], 1.0)
        t_wpc = blocks.wage_pc_residual(
            piw, piw_next, N, UnionInt, fis["tau_w"] * tau, m,
            self.ss.varsigma, cfg["preferences"]["gamma"], fis["tau_p"]
        ) / self.t_scales[2]
        rk_next = np.append(r_k[1:], q0["r_k"])
        t_laf = blocks.laf_portfolio_residual(
            rk_next, q_next, q, pi_next, rr, Bg, Al, m.Psi) / self.t_scales[3]
        t_liq = (Al - Ahh) / self.t_scales[4]
        t_cap = (K[1:] - (Al - Bg) / q - Khh) / self.t_scales[5]

        targets = np.stack([t_focu, t_foci, t_wpc, t_laf, t_liq, t_cap])
        paths = dict(
            pi=pi, piw=piw, N=N, I=I, u=u, q=q, Al=Al, mc=mc, K=Kt, H=H, Y=Y,
            w=w, r_k=r_k, rr=rr, Q=Q[:-1], tau=tau, Bg=Bg, G=G, T=Tr,
            Pi_profits=Pi_profits, Upsilon=Upsilon, r_l=r_l, C=C, Ahh=Ahh,
            Khh=Khh, UnionInt=UnionInt, Volb=Volb, Z_I=Z_I, mu=mu,
            eps_R=eps_R, A=A_shift,
            goods=blocks.goods_market_residual(
                Y, C, G, I, A_entering, B_entering, Volb,
                self.ss.cfg["household"]["R_bar"], m.varphi, m.Psi),
        )
        return targets, paths

    # -- Jacobian assembly -----------------------------------------------------

    def build(self, h: float = 1e-5):
        T = self.T
        n = 6 * T
        base_t, _ = self.forward(np.zeros((6, T)), {})
        if np.max(np.abs(base_t)) > 1e-9:
            raise RuntimeError(
                f"steady-state paths violate the targets: {np.max(np.abs(base_t)):.2e}")
        H_U = np.empty((n, n))
        dU = np.zeros((6, T))
        for j in range(n):
            v, t = divmod(j, T)
            dU[v, t] = h
            tp, _ = self.forward(dU, {})
            dU[v, t] = -h
            tm, _ = self.forward(dU, {})
            dU[v, t] = 0.0
            H_U[:, j] = (tp - tm).ravel() / (2 * h)
        self.H_U = H_U
        self._lu = scipy.linalg.lu_factor(H_U)
        return self

    def H_Z(self, name: str, h: float = 1e-5) -> np.ndarray:
        if name not in self._H_Z:
            T = self.T
            cols = np.empty((6 * T, T))
            z = np.zeros(T)
            for t in range(T):
                z[t] = h
                tp, _ = self.forward(np.zeros((6, T)), {name: z})
                z[t] = -h
                tm, _ = self.forward(np.zeros((6, T)), {name: z})
                z[t] = 0.0
                cols[:, t] = (tp - tm).ravel() / (2 * h)
            self._H_Z[name] = cols
        return self._H_Z[name]

    # -- solving ----------------------------------------------------------------

    def solve_unknowns(self, dz: dict[str, np.ndarray]) -> np.ndarray:
        if self._lu is None:
            self.build()
        rhs = np.zeros(6 * self.T)
        for name, path in dz.items():
            rhs += self.H_Z(name) @ path
        dU = scipy.linalg.lu_solve(self._lu, -rhs)
        return dU.reshape(6, self.T)

    def paths_for(self, dU: np.ndarray, dz: dict[str, np.ndarray],
                  eps: float = 1e-4) -> dict[str, np.ndarray]:
        """First-order deviation paths via a directional derivative.

        The direction is normalized so the result is exactly homogeneous of
        degree one in (dU, dz).
        """
        scale = max(np.max(np.abs(dU)) if dU.size else 0.0,
                    max((np.max(np.abs(p)) for p in dz.values()), default=0.0))
        if scale == 0.0:
            _, base = self.forward(np.zeros((6, self.T)), {})
            return {k: np.zeros_like(np.atleast_1d(v)) for k, v in base.items()}
        vU = dU / scale
        vz = {k: p / scale for k, p in dz.items()}
        _, pp = self.forward(eps * vU, {k: eps * p for k, p in vz.items()})
        _, pm = self.forward(-eps * vU, {k: -eps * p for k, p in vz.items()})
        return {k: scale * (pp[k] - pm[k]) / (2 * eps) for k in pp}

    def solve_irf(self, shocks: ShockSpec | list[ShockSpec] | dict[str, np.ndarray]
                  ) -> dict[str, np.ndarray]:
        """Deviation paths for AR(1) shock specs or explicit shock paths."""
        if isinstance(shocks, ShockSpec):
            dz = {shocks.name: shocks.path(self.T)}
        elif isinstance(shocks, list):
            dz = {}
            for s in shocks:
                dz[s.name] = dz.get(s.name, 0.0) + s.path(self.T)
        else:
            dz = {k: np.asarray(v, dtype=float) for k, v in shocks.items()}
        dU = self.solve_unknowns(dz)
        out = self.paths_for(dU, dz)
        out["dU"] = dU
        return out

    # -- diagnostics --------------------------------------------------------------

    def linearized_residuals(self, dU: np.ndarray, dz: dict[str, np.ndarray],
                             eps: float = 1e-4) -> dict[str, float]:
        """Independent first-order residuals of every equilibrium condition.

        Evaluated as a directional derivative of each nonlinear residual
        function along the solved deviation; the imposed equations come back
        at machine precision, the six targets at solver precision, and the
        goods market (never imposed) verifies the whole accounting.
        """
        scale = max(np.max(np.abs(dU)),
                    max((np.max(np.abs(p)) for p in dz.values()), default=0.0))
        if scale == 0.0:
            return {"all": 0.0}
        vU, vz = dU / scale, {k: p / scale for k, p in dz.items()}
        tp, pp = self.forward(eps * vU, {k: eps * p for k, p in vz.items()})
        tm, pm = self.forward(-eps * vU, {k: -eps * p for k, p in vz.items()})
        tlin = scale * (tp - tm) / (2 * eps)
        dev = {k: scale * (pp[k] - pm[k]) / (2 * eps) for k in pp}
        m = self.macro
        q0 = self.ssq
        res = {
            "foc_u": np.max(np.abs(tlin[0])) * self.t_scales[0],
            "foc_I": np.max(np.abs(tlin[1])) * self.t_scales[1],
            "wage_pc": np.max(np.abs(tlin[2])) * self.t_scales[2],
            "laf_portfolio": np.max(np.abs(tlin[3])) * self.t_scales[3],
            "liquid_market": np.max(np.abs(tlin[4])) * self.t_scales[4],
            "capital_market": np.max(np.abs(tlin[5])) * self.t_scales[5],
        }
        # linearized NKPC from the solved paths (imposed via mc inversion)
        dpi = dev["pi"]
        dpi_next = np.append(dpi[1:], 0.0)
        res["nkpc"] = np.max(np.abs(
            dpi - m.kappa_Y * (dev["mc"] - (-1.0 / m.mu_ss**2) * dev["mu"])
            - m.beta * dpi_next))
        # linearized Taylor rule
        drr = dev["rr"]
        drr_lag = np.concatenate([[0.0], drr[:-1]])
        dY = dev["Y"]
        dY_lag = np.concatenate([[0.0], dY[:-1]])
        rule = (m.rho_R * drr_lag / (1.0 + q0["r_R"])
                + (1.0 - m.rho_R) * (m.theta_pi * dpi
                                     + m.theta_y * (dY - dY_lag) / q0["Y"])
                + dev["eps_R"])
        res["taylor"] = np.max(np.abs(drr / (1.0 + q0["r_R"]) - rule))
        res["goods_market"] = np.max(np.abs(dev["goods"]))
        return res

    # -- monetary news machinery ---------------------------------------------------

    def news_matrix(self, var: str = "rr") -> np.ndarray:
        """Response of a path variable to unit eps_R news at each date."""
        if var not in self._news_matrices:
            T = self.T
            if self._lu is None:
                self.build()
            HZ = self.H_Z("eps_R")
            dU_all = scipy.linalg.lu_solve(self._lu, -HZ)   # (6T, T)
            M = np.empty((T, T))
            for j in range(T):
                dz = {"eps_R": np.eye(T)[j]}
                M[:, j] = self.paths_for(dU_all[:, j].reshape(6, T), dz)[var]
            self._news_matrices[var] = M
        return self._news_matrices[var]

    def impose_elb(self, base_rr_dev: np.ndarray, tol: float = 1e-9,
                   max_iter: int = 50) -> np.ndarray:
        """Smallest set of anticipated eps_R news keeping r^R above the bound.

        Solves the linear complementarity problem news >= 0,
        rr + M news >= bound, news'(rr + M news - bound) = 0 by active-set
        iteration. Returns the news path.
        """
        m = self.macro
        bound = m.r_LB - self.ssq["r_R"]
        M = self.news_matrix("rr")
        T = self.T
        nu = np.zeros(T)
        active: set[int] = set()
        for _ in range(max_iter):
            rr = base_rr_dev + M @ nu
            violations = set(np.where(rr < bound - tol)[0])
            nonneg_fail = {j for j in active if nu[j] < -tol}
            new_active = (active | violations) - nonneg_fail
            if new_active == active and not violations and not nonneg_fail:
                break
            active = new_active
            nu = np.zeros(T)
            if active:
                idx = sorted(active)
                sub = M[np.ix_(idx, idx)]
                nu[idx] = np.linalg.solve(sub, (bound - base_rr_dev[idx]))
        else:
            raise RuntimeError("ELB active-set iteration did not converge")
        rr = base_rr_dev + M @ nu
        if np.min(rr) < bound - 1e-7:
            raise RuntimeError(
                f"bound still violated after news imposition: min rr dev {rr.min():.3e} "
                f"vs bound {bound:.3e} (binding beyond truncation?)")
        return nu

    def determinacy(self, shock_sizes: dict | None = None,
                    cond_ceiling: float = 1e10,
                    decay_vars: tuple = ("Y", "pi", "Bg", "C"),
                    decay_tol: float = 1e-6,
                    tail_window: int = 50) -> dict:
        """Heuristic stability verdict: conditioning plus IRF decay.

        A proxy for the formal unique-stable-solution check: H_U must be
        well-conditioned and all shock responses must die out within the
        truncation window.
        """
        if self._lu is None:
            self.build()
        cond = np.linalg.cond(self.H_U, 1)
        decays = {}
        stable = cond < cond_ceiling and np.isfinite(cond)
        sizes = shock_sizes or {"Z_I": 0.01, "mu": 0.01, "eps_R": 0.0025,
                                "A": 0.01, "T": 0.02 * self.Y_ss}
        tail_start = self.T - tail_window
        for name, size in sizes.items():
            paths = self.solve_irf(ShockSpec(name, size))
            worst = 0.0
            for v in decay_vars:
                dev = np.abs(paths[v])
                peak = dev.max()
                if peak > 0:
                    worst = max(worst, dev[tail_start:].max() / peak)
            decays[name] = worst
            if not np.isfinite(worst) or worst > decay_tol:
                stable = False
        return dict(stable=stable, condition_number=cond, tail_ratios=decays)
