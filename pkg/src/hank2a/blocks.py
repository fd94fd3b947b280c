"""Non-household equilibrium conditions as residual functions.

Every function works elementwise on scalars or numpy arrays, takes explicit
next-period values where the condition is forward looking, and returns a
residual that is zero in equilibrium. Used both for steady-state checks and
inside the sequence-space forward map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MacroParams",
    "nkpc_residual",
    "mc_from_nkpc",
    "wage_pc_residual",
    "firm_focs",
    "rental_rate",
    "utilization_from_rk",
    "depreciation",
    "capital_producer_residual",
    "laf_portfolio_residual",
    "laf_liquid_return",
    "bond_price_noarb",
    "fiscal_budget_next_debt",
    "tax_rule_step",
    "taylor_rule",
    "goods_market_residual",
]


@dataclass(frozen=True)
class MacroParams:
    alpha: float = 0.33
    delta0: float = 0.0175
    delta1: float = 0.0267
    delta2: float = 0.0267
    phi_I: float = 3.5
    mu_ss: float = 1.1
    kappa_Y: float = 0.06
    kappa_w: float = 0.015
    eps_w: float = 11.0
    varphi: float = 0.0092
    Psi: float = 0.005
    delta_B: float = 0.05
    G_ss: float = 0.5649
    rho_tau: float = 0.94
    psi_B: float = 0.5
    rho_R: float = 0.8
    theta_pi: float = 1.5
    theta_y: float = 0.2
    r_LB: float = -0.0041
    pi_ss: float = 1.0
    beta: float = 0.9838
    wage_pc_form: str = "standard"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")
        if self.Psi < 0.0:
            raise ValueError(f"Psi must be nonnegative, got {self.Psi}")
        if self.theta_pi <= 1.0:
            raise ValueError(f"active rule requires theta_pi > 1, got {self.theta_pi}")
        if not 0.0 < self.delta_B <= 1.0:
            raise ValueError(f"delta_B must be in (0,1], got {self.delta_B}")


# -- price setting -----------------------------------------------------------

def nkpc_residual(pi, pi_next, mc, mu, beta, kappa_Y):
    return np.log(pi) - kappa_Y * (mc - 1.0 / mu) - beta * np.log(pi_next)


def mc_from_nkpc(pi, pi_next, mu, beta, kappa_Y):
    """Invert the price Phillips curve for real marginal cost."""
    return 1.0 / mu + (np.log(pi) - beta * np.log(pi_next)) / kappa_Y


def wage_pc_residual(pi_w, pi_w_next, N, union_integral, tau_w_level, p: MacroParams,
                     varsigma, gamma, tau_p):
    """Wage Phillips curve residual.

    The `standard` form uses log(pi_w) on both sides; `as_printed` keeps the
    pi_w*(1-pi_w) left side, which flips the first-order sign of the slope.
    Both vanish at pi_w = 1.
    """
    gap = varsigma * N ** (1.0 + gamma) - (p.eps_w - 1.0) / p.eps_w * (
        1.0 - tau_p
    ) * (1.0 - tau_w_level) * union_integral
    if p.wage_pc_form == "as_printed":
        lhs = pi_w * (1.0 - pi_w)
        nxt = pi_w_next * (1.0 - pi_w_next)
    else:
        lhs = np.log(pi_w)
        nxt = np.log(pi_w_next)
    return lhs - p.kappa_w * gap - p.beta * nxt


# -- firms -------------------------------------------------------------------

def depreciation(u, p: MacroParams):
    return p.delta0 + p.delta1 * (u - 1.0) + 0.5 * p.delta2 * (u - 1.0) ** 2


def firm_focs(K, H, u, mc, q, r_k, w, Z, p: MacroParams):
    """Residuals of the labor, capital and utilization optimality conditions."""
    Ypot = Z * (u * K) ** p.alpha * H ** (1.0 - p.alpha)
    res_H = w - (1.0 - p.alpha) * mc * Ypot / H
    res_K = (r_k + q * depreciation(u, p)) - p.alpha * mc * Ypot / K
    res_u = q * (p.delta1 + p.delta2 * (u - 1.0)) - p.alpha * mc * Ypot / (u * K)
    return res_H, res_K, res_u


def rental_rate(K, H, u, mc, q, Z, p: MacroParams):
    """Net dividend per unit of capital claims implied by the capital FOC."""
    Ypot = Z * (u * K) ** p.alpha * H ** (1.0 - p.alpha)
    return p.alpha * mc * Ypot / K - q * depreciation(u, p)


def utilization_from_rk(r_k, q, p: MacroParams):
    """Utilization consistent with the capital and utilization FOCs at q."""
    val = 1.0 + 2.0 * (r_k / q + p.delta0 - p.delta1) / p.delta2 if p.delta2 > 0 else 1.0
    return np.sqrt(np.maximum(val, 1e-12))


def capital_producer_residual(I_prev, I_now, I_next, q, q_next, Z_I, Z_I_next, beta, phi_I):
    g = I_now / I_prev - 1.0
    g_next = I_next / I_now - 1.0
    lhs = 1.0 + q * Z_I * (0.5 * phi_I * g ** 2 - 1.0 + phi_I * g * (I_now / I_prev))
    rhs = beta * q_next * Z_I_next * phi_I * g_next * (I_next / I_now) ** 2
    return lhs - rhs


# -- liquid asset funds ------------------------------------------------------

def laf_portfolio_residual(r_k_next, q_next, q, pi_next, r_R_next, B_next, A_next, Psi):
    """Portfolio optimality between capital and reserves/bonds (date-t choice)."""
    share_gap = 1.0 - B_next / A_next
    return (r_k_next + q_next) / q - Psi * share_gap - (1.0 + r_R_next) / pi_next


def laf_liquid_return(q, q_prev, r_k, Q, Q_prev, pi, B, A, varphi, Psi, delta_B):
    """Realized net return credited to household liquid savings."""
    share_b = B / A
    cap_ret = (q + r_k) / q_prev
    bond_ret = ((1.0 - delta_B) * Q + 1.0) / (pi * Q_prev)
    cost = varphi + 0.5 * Psi * (1.0 - share_b) ** 2
    return cap_ret * (1.0 - share_b) + bond_ret * share_b - cost - 1.0


def bond_price_noarb(Q_next, pi_next, r_R_next, delta_B):
    """Bond price from the no-arbitrage condition with the policy rate."""
    return ((1.0 - delta_B) * Q_next + 1.0) / (pi_next * (1.0 + r_R_next))


# -- government --------------------------------------------------------------

def fiscal_budget_next_debt(B, Q, Q_prev, pi, G, T, Upsilon, delta_B):
    """End-of-period market value of debt implied by the budget constraint."""
    carry = (1.0 - delta_B) * Q * B / (Q_prev * pi)
    coupon = B / (Q_prev * pi)
    return carry + G + T + coupon - Upsilon


def tax_rule_step(tau_prev, B, tau_ss, B_ss, rho_tau, psi_B):
    return tau_ss * (tau_prev / tau_ss) ** rho_tau * (B / B_ss) ** ((1.0 - rho_tau) * psi_B)


def taylor_rule(r_R, pi, Y, Y_prev, eps_R, r_R_ss, p: MacroParams, enforce_elb=True):
    """Next-period gross policy rate under the smoothed rule with an ELB."""
    log_next = (
        p.rho_R * np.log(1.0 + r_R)
        + (1.0 - p.rho_R)
        * (
            np.log(1.0 + r_R_ss)
            + p.theta_pi * np.log(pi / p.pi_ss)
            + p.theta_y * np.log(Y / Y_prev)
        )
        + eps_R
    )
    rate = np.exp(log_next) - 1.0
    if enforce_elb:
        rate = np.maximum(rate, p.r_LB)
    return rate


# -- market clearing ---------------------------------------------------------

def goods_market_residual(Y, C, G, I, A_l, B_l, borrow_volume, R_bar, varphi, Psi):
    """Walras check: output minus all final-good uses.

    Liquid-fund intermediation costs and the borrowing wedge are real
    resource costs; investment adjustment losses are absorbed inside the
    capital-production technology, so they do not appear here.
    """
    laf_cost = (varphi + 0.5 * Psi * (1.0 - B_l / A_l) ** 2) * A_l
    return Y - C - G - I - laf_cost - R_bar * borrow_volume
