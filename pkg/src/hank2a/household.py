"""Two-asset household block: EGM backward step, lottery forward step, moments.

States are (s, k, a): income state (workers by skill, last index the
entrepreneur), illiquid capital claims k >= 0 and liquid assets a >= a_lower.
Each period a household adjusts k with probability lam; non-adjusters keep
their k node exactly. Borrowing (a < 0) pays the penalty rate r_l + R_bar.
Only marginal values (V_a, V_k) are iterated, never the value level.

Array layout is (n_s, n_k, n_a) throughout with a on the contiguous axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .income import IncomeChain

__all__ = [
    "HouseholdParams",
    "Prices",
    "HouseholdModel",
    "PolicySet",
    "Aggregates",
    "solve_stationary_policies",
    "stationary_distribution",
]


@dataclass(frozen=True)
class HouseholdParams:
    beta: float
    xi: float            # relative risk aversion
    gamma: float         # inverse Frisch (used by the union block)
    varsigma: float      # labor disutility scale
    lam: float           # illiquid adjustment probability
    a_lower: float
    R_bar: float         # borrowing penalty on a < 0
    tau_w: float         # labor tax level
    tau_p: float         # labor tax progressivity
    tau_Xi: float        # profit tax level

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise ValueError(f"lam must be in (0,1], got {self.lam}")
        if self.R_bar < 0.0:
            raise ValueError(f"R_bar must be nonnegative, got {self.R_bar}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0,1), got {self.beta}")


@dataclass(frozen=True)
class Prices:
    """Date-t prices and policies the household takes as given.

    A is the discount multiplier applied in the date-t Euler equation
    (the demand shock); tau_level scales both tax rates proportionally.
    """

    r_l: float
    r_k: float
    q: float
    w: float
    N: float
    T: float = 0.0
    tau_level: float = 1.0
    Pi: float = 0.0
    A: float = 1.0


@dataclass
class PolicySet:
    c_adj: np.ndarray
    a_adj: np.ndarray
    k_adj: np.ndarray
    c_noadj: np.ndarray
    a_noadj: np.ndarray
    Va: np.ndarray
    Vk: np.ndarray

    def mixed(self, lam: float, k_grid: np.ndarray) -> dict[str, np.ndarray]:
        return {
            "c": lam * self.c_adj + (1 - lam) * self.c_noadj,
            "a": lam * self.a_adj + (1 - lam) * self.a_noadj,
            "k": lam * self.k_adj + (1 - lam) * k_grid[None, :, None],
        }


@dataclass
class Aggregates:
    C: float
    A_end: float          # liquid savings chosen this period
    K_end: float          # illiquid claims chosen this period
    A_state: float        # liquid holdings entering the period
    K_state: float
    labor_tax: float      # pre-tax minus post-tax labor income
    borrow_volume: float  # -sum of negative liquid positions
    union_integral: float
    budget_gap: float     # aggregate budget residual, should be ~0


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _egm_invert_rows(m_endo, a_grid, m_query, out):
    """Row-wise inversion of increasing m_endo onto a_grid at m_query points.

    Both m_endo rows and m_query rows are increasing, so a two-pointer sweep
    suffices. Linear extrapolation outside the range (clipped by the caller).
    """
    R, n = m_endo.shape
    n_q = m_query.shape[1]
    for r in range(R):
        j = 0
        for i in range(n_q):
            mq = m_query[r, i]
            while j < n - 2 and m_endo[r, j + 1] < mq:
                j += 1
            m0 = m_endo[r, j]
            m1 = m_endo[r, j + 1]
            # ties break toward the lower node on flat segments
            t = (mq - m0) / (m1 - m0) if m1 > m0 else 0.0
            out[r, i] = a_grid[j] + t * (a_grid[j + 1] - a_grid[j])


@njit(cache=True)
def _portfolio_roots(h, EVa, EVk, a_grid, out_a, out_EVa, out_EVk):
    """First sign change of h (+ to -) along the liquid axis, per row.

    Returns the interpolated liquid choice and the expected marginal values
    at that point; corners map to the first/last node.
    """
    R, n = h.shape
    for r in range(R):
        if h[r, 0] <= 0.0:
            out_a[r] = a_grid[0]
            out_EVa[r] = EVa[r, 0]
            out_EVk[r] = EVk[r, 0]
            continue
        j = -1
        for i in range(n - 1):
            if h[r, i] > 0.0 and h[r, i + 1] <= 0.0:
                j = i
                break
        if j < 0:
            out_a[r] = a_grid[n - 1]
            out_EVa[r] = EVa[r, n - 1]
            out_EVk[r] = EVk[r, n - 1]
            continue
        t = h[r, j] / (h[r, j] - h[r, j + 1])
        out_a[r] = a_grid[j] + t * (a_grid[j + 1] - a_grid[j])
        out_EVa[r] = EVa[r, j] + t * (EVa[r, j + 1] - EVa[r, j])
        out_EVk[r] = EVk[r, j] + t * (EVk[r, j + 1] - EVk[r, j])


@njit(cache=True)
def _polish_rows(Edisc, a_grid, m_rows, a_rows, xi):
    """Newton-refine the liquid FOC per node against piecewise-linear E[Va'].

    f(a') = (m-a')^(-xi) - Edisc_hat(a') is strictly increasing; nodes with
    f at the borrowing limit already nonnegative stay constrained.
    """
    R, n = Edisc.shape
    n_q = m_rows.shape[1]
    lo = a_grid[0]
    top = a_grid[n - 1]
    for r in range(R):
        for i in range(n_q):
            m = m_rows[r, i]
            if (m - lo) ** (-xi) - Edisc[r, 0] >= 0.0:
                a_rows[r, i] = lo
                continue
            hi = min(m - 1e-10, top)
            a = a_rows[r, i]
            if a < lo:
                a = lo
            elif a > hi:
                a = hi
            j = 0
            for _ in range(4):
                # locate the segment of the piecewise-linear expectation
                jlo, jhi = 0, n - 1
                while jhi - jlo > 1:
                    mid = (jlo + jhi) // 2
                    if a_grid[mid] <= a:
                        jlo = mid
                    else:
                        jhi = mid
                j = jlo
                slope = (Edisc[r, j + 1] - Edisc[r, j]) / (a_grid[j + 1] - a_grid[j])
                rhs = Edisc[r, j] + slope * (a - a_grid[j])
                c = m - a
                f = c ** (-xi) - rhs
                fp = xi * c ** (-xi - 1.0) - slope
                a = a - f / fp
                if a < lo:
                    a = lo
                elif a > hi:
                    a = hi
            a_rows[r, i] = a


@njit(cache=True)
def _deposit_lottery(D, lam, ia, wa, ik, wk, ja, va, out):
    """Scatter mass to bracketing nodes: bilinear for adjusters, 1D otherwise."""
    S, K, A = D.shape
    for s in range(S):
        for k in range(K):
            for a in range(A):
                m = D[s, k, a]
                if m == 0.0:
                    continue
                ma = m * lam
                i1 = ia[s, k, a]
                w1 = wa[s, k, a]
                k1 = ik[s, k, a]
                w2 = wk[s, k, a]
                out[s, k1, i1] += ma * (1.0 - w2) * (1.0 - w1)
                out[s, k1, i1 + 1] += ma * (1.0 - w2) * w1
                out[s, k1 + 1, i1] += ma * w2 * (1.0 - w1)
                out[s, k1 + 1, i1 + 1] += ma * w2 * w1
                mn = m - ma
                j1 = ja[s, k, a]
                v1 = va[s, k, a]
                out[s, k, j1] += mn * (1.0 - v1)
                out[s, k, j1 + 1] += mn * v1


@njit(cache=True)
def _interp_rows_shared_x(x_grid, y_rows, xq_rows, out):
    """Interpolate y_rows (R,n) on the shared increasing x_grid at xq_rows (R,m)."""
    R, n = y_rows.shape
    m = xq_rows.shape[1]
    for r in range(R):
        for i in range(m):
            x = xq_rows[r, i]
            if x <= x_grid[0]:
                j, t = 0, 0.0
            elif x >= x_grid[n - 1]:
                j, t = n - 2, 1.0
            else:
                lo, hi = 0, n - 1
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if x_grid[mid] <= x:
                        lo = mid
                    else:
                        hi = mid
                j = lo
                t = (x - x_grid[j]) / (x_grid[j + 1] - x_grid[j])
            out[r, i] = y_rows[r, j] + t * (y_rows[r, j + 1] - y_rows[r, j])


# ---------------------------------------------------------------------------
# model container
# ---------------------------------------------------------------------------

@dataclass
class HouseholdModel:
    params: HouseholdParams
    chain: IncomeChain
    a_grid: np.ndarray
    k_grid: np.ndarray

    n_s: int = field(init=False)
    n_k: int = field(init=False)
    n_a: int = field(init=False)

    def __post_init__(self):
        self.n_s = self.chain.n_states
        self.n_k = len(self.k_grid)
        self.n_a = len(self.a_grid)
        if self.a_grid[0] != self.params.a_lower:
            raise ValueError("first liquid node must equal the borrowing limit")
        if self.k_grid[0] != 0.0:
            raise ValueError("first illiquid node must be 0")

    # -- builders ----------------------------------------------------------

    def income_by_state(self, pr: Prices) -> np.ndarray:
        """Post-tax income per income state (excluding asset returns and T)."""
        p = self.params
        tau_w = p.tau_w * pr.tau_level
        tau_Xi = p.tau_Xi * pr.tau_level
        base = np.maximum(pr.w * self.chain.skill_values * pr.N, 1e-12)
        y = np.empty(self.n_s)
        y[:-1] = (1.0 - tau_w) * base ** (1.0 - p.tau_p)
        m_ent = self.chain.ent_mass
        y[-1] = (1.0 - tau_Xi) * pr.Pi / m_ent if m_ent > 0 else 0.0
        return y

    def liquid_return(self, pr: Prices) -> np.ndarray:
        return pr.r_l + self.params.R_bar * (self.a_grid < 0.0)

    def cash_noadjust(self, pr: Prices) -> np.ndarray:
        y = self.income_by_state(pr)
        ra = self.liquid_return(pr)
        return (
            y[:, None, None]
            + (1.0 + ra)[None, None, :] * self.a_grid[None, None, :]
            + pr.r_k * self.k_grid[None, :, None]
            + pr.T
        )

    def cash_adjust(self, pr: Prices) -> np.ndarray:
        return self.cash_noadjust(pr) + pr.q * self.k_grid[None, :, None]

    def check_feasible(self, pr: Prices):
        m = self.cash_noadjust(pr)
        slack = m - self.params.a_lower
        if slack.min() <= 0.0:
            idx = np.unravel_index(np.argmin(slack), slack.shape)
            raise ValueError(
                "prices admit no positive consumption at state "
                f"(s={idx[0]}, k={self.k_grid[idx[1]]:.4g}, a={self.a_grid[idx[2]]:.4g}); "
                f"cash={m[idx]:.4g} <= borrowing limit {self.params.a_lower:.4g}"
            )

    def initial_values(self, pr: Prices) -> tuple[np.ndarray, np.ndarray]:
        m = self.cash_noadjust(pr)
        c0 = 0.5 * (m - self.params.a_lower)
        uc = c0 ** (-self.params.xi)
        ra = self.liquid_return(pr)
        Va = (1.0 + ra)[None, None, :] * uc
        Vk = (pr.q + pr.r_k) * uc
        return Va, Vk

    # -- backward step -------------------------------------------------------

    def backward_step(
        self, Va_next: np.ndarray, Vk_next: np.ndarray, pr: Prices
    ) -> PolicySet:
        """One EGM step: policies and updated marginal values given tomorrow's."""
        p = self.params
        n_s, n_k, n_a = self.n_s, self.n_k, self.n_a
        Pi_t = self.chain.transition
        disc = p.beta * pr.A
        inv_xi = -1.0 / p.xi

        EVa = (Pi_t @ Va_next.reshape(n_s, -1)).reshape(n_s, n_k, n_a)
        EVk = (Pi_t @ Vk_next.reshape(n_s, -1)).reshape(n_s, n_k, n_a)

        # --- non-adjusters: 1D EGM in a for each (s, k)
        c_endo = (disc * EVa) ** inv_xi
        m_endo = c_endo + self.a_grid[None, None, :]
        m_na = self.cash_noadjust(pr)
        a_na = np.empty_like(m_na)
        _egm_invert_rows(
            m_endo.reshape(-1, n_a), self.a_grid, m_na.reshape(-1, n_a),
            a_na.reshape(-1, n_a),
        )
        np.clip(a_na, self.a_grid[0], self.a_grid[-1], out=a_na)
        # node-level Newton refinement: EGM interpolation in m-space leaves
        # O(h^2) Euler errors on wide cells; the refined policy satisfies
        # u'(m - a') = disc*E[Va'](a') at every unconstrained node
        a_na = self._polish_liquid(EVa, m_na, a_na, disc)
        c_na = m_na - a_na

        # --- adjusters: portfolio split then EGM over total expenditure
        h = pr.q * EVa - EVk
        a_dag = np.empty((n_s, n_k))
        EVa_dag = np.empty((n_s, n_k))
        EVk_dag = np.empty((n_s, n_k))
        _portfolio_roots(
            h.reshape(-1, n_a), EVa.reshape(-1, n_a), EVk.reshape(-1, n_a),
            self.a_grid, a_dag.reshape(-1), EVa_dag.reshape(-1), EVk_dag.reshape(-1),
        )
        c_dag = (disc * EVk_dag / pr.q) ** inv_xi
        x_endo = c_dag + a_dag + pr.q * self.k_grid[None, :]
        x_endo = np.maximum.accumulate(x_endo, axis=1)  # guard: keep invertible

        # invert x_endo (per s) at every adjuster cash level; the two-pointer
        # kernel needs increasing queries, so sort and unsort per income state
        m_adj = self.cash_adjust(pr)
        mq = m_adj.reshape(n_s, -1)
        order = np.argsort(mq, axis=1, kind="stable")
        k_pol = np.empty((n_s, n_k * n_a))
        for s in range(n_s):
            srt = np.ascontiguousarray(mq[s, order[s]])
            out = np.empty_like(srt)
            _egm_invert_rows(x_endo[s][None, :], self.k_grid, srt[None, :], out[None, :])
            k_pol[s, order[s]] = out
        k_a = np.clip(k_pol.reshape(n_s, n_k, n_a), 0.0, self.k_grid[-1])

        # liquid choice along the portfolio locus, then the k'=0 branch
        a_loc = np.empty((n_s, n_k * n_a))
        _interp_rows_shared_x(self.k_grid, a_dag, k_a.reshape(n_s, -1), a_loc)
        a_a = np.clip(a_loc.reshape(n_s, n_k, n_a), self.a_grid[0], self.a_grid[-1])

        c_endo0 = (disc * EVa[:, 0, :]) ** inv_xi
        m_endo0 = c_endo0 + self.a_grid[None, :]
        lowres = m_adj <= x_endo[:, 0][:, None, None]
        if np.any(lowres):
            a_a0 = np.empty((n_s, n_k * n_a))
            for s in range(n_s):
                srt = np.ascontiguousarray(mq[s, order[s]])
                out = np.empty_like(srt)
                _egm_invert_rows(m_endo0[s][None, :], self.a_grid, srt[None, :], out[None, :])
                a_a0[s, order[s]] = out
            a_a0 = np.clip(a_a0.reshape(n_s, n_k, n_a), self.a_grid[0], self.a_grid[-1])
            a_a = np.where(lowres, a_a0, a_a)
            k_a = np.where(lowres, 0.0, k_a)
        c_a = m_adj - a_a - pr.q * k_a
        c_a = np.maximum(c_a, 1e-12)
        c_na = np.maximum(c_na, 1e-12)

        # --- envelope updates
        uc_a = c_a ** (-p.xi)
        uc_n = c_na ** (-p.xi)
        ra = self.liquid_return(pr)
        Va_new = (1.0 + ra)[None, None, :] * (p.lam * uc_a + (1 - p.lam) * uc_n)
        EVk_at_an = np.empty_like(a_na)
        _interp_rows_shared_x(
            self.a_grid, EVk.reshape(-1, n_a), a_na.reshape(-1, n_a),
            EVk_at_an.reshape(-1, n_a),
        )
        Vk_new = p.lam * (pr.q + pr.r_k) * uc_a + (1 - p.lam) * (
            pr.r_k * uc_n + disc * EVk_at_an
        )
        return PolicySet(c_a, a_a, k_a, c_na, a_na, Va_new, Vk_new)

    def _polish_liquid(
        self, EVa: np.ndarray, m: np.ndarray, a_start: np.ndarray, disc: float
    ) -> np.ndarray:
        a = a_start.copy()
        _polish_rows(
            (disc * EVa).reshape(-1, self.n_a), self.a_grid,
            m.reshape(-1, self.n_a), a.reshape(-1, self.n_a), self.params.xi,
        )
        return a

    # -- node-level outputs --------------------------------------------------

    def node_outputs(self, pols: PolicySet, pr: Prices) -> dict[str, np.ndarray]:
        p = self.params
        lam = p.lam
        mix = pols.mixed(lam, self.k_grid)
        uc = lam * pols.c_adj ** (-p.xi) + (1 - lam) * pols.c_noadj ** (-p.xi)
        base = np.maximum(pr.w * self.chain.skill_values * pr.N, 1e-12)
        wage_pow = np.zeros(self.n_s)   # entrepreneurs are not union members
        wage_pow[:-1] = base ** (1.0 - p.tau_p)
        union = uc * wage_pow[:, None, None]
        volb = np.broadcast_to(
            -np.minimum(self.a_grid, 0.0)[None, None, :], mix["c"].shape
        ).copy()
        return {
            "C": mix["c"],
            "Ahh": mix["a"],
            "Khh": mix["k"],
            "UnionInt": union,
            "Volb": volb,
        }

    # -- forward step ----------------------------------------------------------

    def _brackets(self, x: np.ndarray, grid: np.ndarray):
        i = np.clip(np.searchsorted(grid, x, side="right") - 1, 0, len(grid) - 2)
        w = np.clip((x - grid[i]) / (grid[i + 1] - grid[i]), 0.0, 1.0)
        return i, w

    def _transition_data(self, pols: PolicySet):
        """Bracketing indices and lottery weights, cached on the policy set."""
        cached = getattr(pols, "_trans", None)
        if cached is None:
            ia, wa = self._brackets(pols.a_adj, self.a_grid)
            ik, wk = self._brackets(pols.k_adj, self.k_grid)
            ja, va = self._brackets(pols.a_noadj, self.a_grid)
            cached = (ia, wa, ik, wk, ja, va)
            pols._trans = cached
        return cached

    def forward_step(self, D: np.ndarray, pols: PolicySet) -> np.ndarray:
        """Lottery deposit of policy mass, then the income transition."""
        ia, wa, ik, wk, ja, va = self._transition_data(pols)
        Dpre = np.zeros_like(D)
        _deposit_lottery(D, self.params.lam, ia, wa, ik, wk, ja, va, Dpre)
        return np.tensordot(self.chain.transition.T, Dpre, axes=(1, 0))

    def expectation_step(self, phi: np.ndarray, pols: PolicySet) -> np.ndarray:
        """Transpose of forward_step: tomorrow's node function pulled back to today."""
        lam = self.params.lam
        n_s = self.n_s
        phi_mixed = np.tensordot(self.chain.transition, phi, axes=(1, 0))
        ia, wa, ik, wk, ja, va = self._transition_data(pols)
        s_idx = np.broadcast_to(np.arange(n_s)[:, None, None], phi_mixed.shape[:1] + ia.shape[1:])
        k_idx = np.broadcast_to(np.arange(self.n_k)[None, :, None], ia.shape)
        adj = (
            (1 - wk) * (1 - wa) * phi_mixed[s_idx, ik, ia]
            + (1 - wk) * wa * phi_mixed[s_idx, ik, ia + 1]
            + wk * (1 - wa) * phi_mixed[s_idx, ik + 1, ia]
            + wk * wa * phi_mixed[s_idx, ik + 1, ia + 1]
        )
        nad = (1 - va) * phi_mixed[s_idx, k_idx, ja] + va * phi_mixed[s_idx, k_idx, ja + 1]
        return lam * adj + (1 - lam) * nad


# ---------------------------------------------------------------------------
# stationary solvers and moments
# ---------------------------------------------------------------------------

def solve_stationary_policies(
    model: HouseholdModel,
    pr: Prices,
    tol: float = 1e-9,
    maxit: int = 20_000,
    init: tuple[np.ndarray, np.ndarray] | None = None,
) -> PolicySet:
    """Iterate the backward step at constant prices to convergence.

    Plain iteration contracts at roughly rate beta, so every few steps a
    SQUAREM extrapolation is applied (with a plain-step fallback whenever it
    misbehaves).
    """
    model.check_feasible(pr)
    Va, Vk = init if init is not None else model.initial_values(pr)
    pols = None
    err = np.inf
    for it in range(maxit):
        pols = model.backward_step(Va, Vk, pr)
        err = max(np.max(np.abs(pols.Va - Va)), np.max(np.abs(pols.Vk - Vk)))
        if err < tol:
            return pols
        if it % 3 == 2 and err < 1e3:
            # SQUAREM step from (x0, x1, x2)
            p2 = model.backward_step(pols.Va, pols.Vk, pr)
            ra = pols.Va - Va
            rk = pols.Vk - Vk
            va = p2.Va - 2.0 * pols.Va + Va
            vk = p2.Vk - 2.0 * pols.Vk + Vk
            denom = float(np.sum(va * va) + np.sum(vk * vk))
            if denom > 0.0:
                alpha = -np.sqrt((np.sum(ra * ra) + np.sum(rk * rk)) / denom)
                alpha = float(np.clip(alpha, -8.0, -1.0))
                Va_x = Va - 2.0 * alpha * ra + alpha**2 * va
                Vk_x = Vk - 2.0 * alpha * rk + alpha**2 * vk
                # monotone safeguard: accept only if the residual shrank
                if np.all(Va_x > 0.0) and np.all(Vk_x > 0.0):
                    p3 = model.backward_step(Va_x, Vk_x, pr)
                    err_x = max(np.max(np.abs(p3.Va - Va_x)), np.max(np.abs(p3.Vk - Vk_x)))
                    if err_x < err:
                        Va, Vk, pols = p3.Va, p3.Vk, p3
                        continue
            Va, Vk = p2.Va, p2.Vk
        else:
            Va, Vk = pols.Va, pols.Vk
    raise RuntimeError(
        f"household backward iteration did not converge in {maxit} steps; last change {err:.3e}"
    )


def stationary_distribution(
    model: HouseholdModel,
    pols: PolicySet,
    tol: float = 1e-12,
    maxit: int = 100_000,
    init: np.ndarray | None = None,
) -> np.ndarray:
    if init is not None:
        D = init
    else:
        D = np.zeros((model.n_s, model.n_k, model.n_a))
        D[:, 0, :] = model.chain.ergodic[:, None] / model.n_a
    err = np.inf
    for it in range(maxit):
        D1 = model.forward_step(D, pols)
        err = np.max(np.abs(D1 - D))
        if err < tol:
            return D1 / D1.sum()
        if it % 3 == 2:
            # SQUAREM extrapolation with projection back onto the simplex
            D2 = model.forward_step(D1, pols)
            r = D1 - D
            v = D2 - 2.0 * D1 + D
            denom = float(np.sum(v * v))
            if denom > 0.0:
                alpha = float(np.clip(-np.sqrt(np.sum(r * r) / denom), -32.0, -1.0))
                Dx = np.maximum(D - 2.0 * alpha * r + alpha**2 * v, 0.0)
                Dx /= Dx.sum()
                D3 = model.forward_step(Dx, pols)
                if np.max(np.abs(D3 - Dx)) < err:
                    D = D3
                    continue
            D = D2
        else:
            D = D1
    raise RuntimeError(f"distribution iteration did not converge in {maxit} steps")


def aggregate(model: HouseholdModel, D: np.ndarray, pols: PolicySet, pr: Prices) -> Aggregates:
    p = model.params
    mix = pols.mixed(p.lam, model.k_grid)
    a_nodes = model.a_grid[None, None, :]
    k_nodes = model.k_grid[None, :, None]
    C = float(np.sum(D * mix["c"]))
    A_end = float(np.sum(D * mix["a"]))
    K_end = float(np.sum(D * mix["k"]))
    A_state = float(np.sum(D * a_nodes))
    K_state = float(np.sum(D * k_nodes))
    y = model.income_by_state(pr)
    base = np.maximum(pr.w * model.chain.skill_values * pr.N, 1e-12)
    labor_tax = float(np.sum(D[:-1].sum(axis=(1, 2)) * (base - y[:-1])))
    borrow = float(np.sum(D * np.maximum(-a_nodes, 0.0)))
    outs = model.node_outputs(pols, pr)
    union = float(np.sum(D * outs["UnionInt"]))
    ra = model.liquid_return(pr)
    income_total = float(
        np.sum(D * (y[:, None, None] + pr.T))
        + np.sum(D * (1.0 + ra)[None, None, :] * a_nodes)
        + pr.r_k * K_state
    )
    spend_total = C + A_end + pr.q * p.lam * float(np.sum(D * (pols.k_adj - k_nodes)))
    return Aggregates(
        C=C,
        A_end=A_end,
        K_end=K_end,
        A_state=A_state,
        K_state=K_state,
        labor_tax=labor_tax,
        borrow_volume=borrow,
        union_integral=union,
        budget_gap=spend_total - income_total,
    )


def compute_mpcs(model: HouseholdModel, D: np.ndarray, pols: PolicySet, pr: Prices):
    """Quarterly and annualized MPC out of a one-time liquid windfall.

    Forward slope of ex-ante consumption toward the next liquid node; with
    linear interpolation any sub-cell windfall gives the same answer.
    """
    p = model.params
    c = p.lam * pols.c_adj + (1 - p.lam) * pols.c_noadj
    ra = model.liquid_return(pr)
    cash = (1.0 + ra) * model.a_grid
    dm = np.diff(cash)
    qmpc = np.empty_like(c)
    qmpc[..., :-1] = np.diff(c, axis=-1) / dm
    qmpc[..., -1] = qmpc[..., -2]
    qmpc = np.clip(qmpc, 0.0, 1.0)
    ampc = 1.0 - (1.0 - qmpc) ** 4
    mean_q = float(np.sum(D * qmpc))
    mean_a = float(np.sum(D * ampc))
    by_a = np.sum(D * qmpc, axis=(0, 1)) / np.maximum(np.sum(D, axis=(0, 1)), 1e-300)
    return mean_q, mean_a, by_a


def classify_htm(model: HouseholdModel, D: np.ndarray, pr: Prices):
    """Shares (total, wealthy, poor) of hand-to-mouth households.

    A node is HtM when liquid wealth is within two weeks (1/6 quarter) of
    income of either 0 or the borrowing limit; wealthy if it also holds k>0.
    """
    y = model.income_by_state(pr) + pr.T
    a = model.a_grid[None, None, :]
    thresh = (y / 6.0)[:, None, None]
    at_zero = (a >= 0.0) & (a < thresh)
    at_limit = (a < 0.0) & ((a - model.params.a_lower) < thresh)
    htm = at_zero | at_limit
    has_k = (model.k_grid > 0.0)[None, :, None]
    share = float(np.sum(D * htm))
    wealthy = float(np.sum(D * (htm & has_k)))
    return share, wealthy, share - wealthy


def _gini(values: np.ndarray, weights: np.ndarray) -> float:
    order = np.argsort(values, kind="stable")
    v, w = values[order], weights[order]
    w = w / w.sum()
    mu = np.sum(v * w)
    if mu == 0.0:
        return 0.0
    cum = np.cumsum(w)
    fbar = cum - 0.5 * w
    return float(2.0 * np.sum(v * w * fbar) / mu - 1.0)


def _quantile_value_share(values, weights, p_lo, p_hi):
    order = np.argsort(values, kind="stable")
    v, w = values[order], weights[order]
    w = w / w.sum()
    cum_w = np.concatenate([[0.0], np.cumsum(w)])
    cum_v = np.concatenate([[0.0], np.cumsum(v * w)])
    total = cum_v[-1]

    def v_below(pq):
        i = np.searchsorted(cum_w, pq, side="right") - 1
        i = min(max(i, 0), len(w) - 1)
        frac = (pq - cum_w[i]) / max(cum_w[i + 1] - cum_w[i], 1e-300)
        return cum_v[i] + frac * (cum_v[i + 1] - cum_v[i])

    if total == 0.0:
        return 0.0
    return (v_below(p_hi) - v_below(p_lo)) / total


def distribution_stats(model: HouseholdModel, D: np.ndarray, pr: Prices) -> dict:
    """Gini, quintile shares and top-10% shares for income and wealth concepts."""
    y = model.income_by_state(pr)
    a = np.broadcast_to(model.a_grid[None, None, :], D.shape).ravel()
    k = np.broadcast_to(model.k_grid[None, :, None], D.shape).ravel()
    ra = np.broadcast_to(model.liquid_return(pr)[None, None, :], D.shape).ravel()
    inc = (
        np.broadcast_to(y[:, None, None], D.shape).ravel()
        + ra * a
        + pr.r_k * k
        + pr.T
    )
    w = D.ravel()
    out = {}
    for name, vals in {
        "income": inc,
        "networth": a + pr.q * k,
        "liquid": a,
        "illiquid": pr.q * k,
    }.items():
        out[name] = {
            "gini": _gini(vals, w),
            "quintiles": [
                _quantile_value_share(vals, w, 0.2 * i, 0.2 * (i + 1)) for i in range(5)
            ],
            "top10": _quantile_value_share(vals, w, 0.9, 1.0),
        }
    return out
