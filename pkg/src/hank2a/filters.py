"""Restricted-Kalman-style shock recovery and forward simulation.

Five observables (output gap, investment gap, inflation, policy rate,
transfers over trend output) identify five innovations period by period via
the impact matrix of the model's impulse responses. A joint fixed point adds
anticipated monetary news that keep the projected policy-rate path above the
effective lower bound after the sample ends; in-sample the bound is honored
by the observed rate path itself.

Timing: the model's rate variable is the rate set in quarter t (effective
t+1), so the date-t monetary innovation moves the date-t rate observable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ssj import GEModel, ShockSpec, TABLE5_PERSISTENCE, SHOCK_NAMES

__all__ = ["ObservableSet", "ShockSeries", "ImpulseBank", "filter_shocks",
           "filter_with_elb", "simulate_forward", "OBSERVABLES"]

OBSERVABLES = ("dY", "dI", "pi", "rR", "dT")


@dataclass
class ObservableSet:
    dates: list[str]
    values: np.ndarray    # (T_obs, 5) deviations, columns in OBSERVABLES order

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != len(OBSERVABLES):
            raise ValueError(f"observables must be (T,5), got {self.values.shape}")
        if len(self.dates) != self.values.shape[0]:
            raise ValueError("dates and values length mismatch")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("observables contain missing values")

    @property
    def T_obs(self) -> int:
        return self.values.shape[0]


@dataclass
class ShockSeries:
    dates: list[str]
    eps: np.ndarray              # (T_obs, n_e) innovations, SHOCK_NAMES order
    elb_news: np.ndarray         # (T,) anticipated eps_R news appendage
    elb_flagged: list[int] = field(default_factory=list)   # quarters at the bound

    @property
    def T_obs(self) -> int:
        return self.eps.shape[0]


class ImpulseBank:
    """Unit-innovation impulse responses for every shock and every variable."""

    def __init__(self, model: GEModel, persistences: dict | None = None):
        self.model = model
        self.T = model.T
        rhos = dict(TABLE5_PERSISTENCE)
        rhos.update(persistences or {})
        self.rhos = rhos
        self.irfs: dict[str, dict[str, np.ndarray]] = {}
        for name in SHOCK_NAMES:
            paths = model.solve_irf(ShockSpec(name, 1.0, rhos[name]))
            paths.pop("dU")
            self.irfs[name] = paths
        self.news_rr = model.news_matrix("rr")
        self._news_obs = None

    def observable_irfs(self) -> np.ndarray:
        """R[tau, obs, shock]: response of observables tau periods after impact."""
        q0 = self.model.ssq
        R = np.empty((self.T, len(OBSERVABLES), len(SHOCK_NAMES)))
        for j, name in enumerate(SHOCK_NAMES):
            p = self.irfs[name]
            R[:, 0, j] = p["Y"] / q0["Y"]
            R[:, 1, j] = p["I"] / q0["I"]
            R[:, 2, j] = p["pi"]
            R[:, 3, j] = p["rr"]
            R[:, 4, j] = p["T"] / q0["Y"]
        return R

    def news_observables(self) -> np.ndarray:
        """Response of the 5 observables to anticipated eps_R news at each date."""
        if self._news_obs is None:
            q0 = self.model.ssq
            m = self.model
            T = self.T
            out = np.empty((T, len(OBSERVABLES), T))
            HZ = m.H_Z("eps_R")
            import scipy.linalg
            dU_all = scipy.linalg.lu_solve(m._lu, -HZ)
            for t in range(T):
                dz = {"eps_R": np.eye(T)[t]}
                p = m.paths_for(dU_all[:, t].reshape(6, T), dz)
                out[:, 0, t] = p["Y"] / q0["Y"]
                out[:, 1, t] = p["I"] / q0["I"]
                out[:, 2, t] = p["pi"]
                out[:, 3, t] = p["rr"]
                out[:, 4, t] = p["T"] / q0["Y"]
            self._news_obs = out
        return self._news_obs


def filter_shocks(obs: ObservableSet, R: np.ndarray,
                  extra: np.ndarray | None = None) -> np.ndarray:
    """Innovations reproducing the observables exactly, date by date.

    R is (T, 5, n_e); `extra` is an optional (T_obs, 5) pre-committed
    contribution (e.g. anticipated news) subtracted before inversion.
    """
    T_obs = obs.T_obs
    n_e = R.shape[2]
    if R.shape[1] != n_e:
        raise ValueError("need as many shocks as observables for exact inversion")
    R0 = R[0]
    cond = np.linalg.cond(R0)
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError(f"impact matrix is singular (condition number {cond:.2e})")
    eps = np.zeros((T_obs, n_e))
    Q = np.zeros((T_obs, len(OBSERVABLES)))
    for t in range(T_obs):
        y_t = obs.values[t] - Q[t]
        if extra is not None:
            y_t = y_t - extra[t]
        eps[t] = np.linalg.solve(R0, y_t)
        # propagate this date's innovations onto future observables
        horizon = T_obs - t - 1
        if horizon > 0:
            Q[t + 1:] += np.einsum("toe,e->to", R[1:horizon + 1], eps[t])
    return eps


def _rate_path(bank: ImpulseBank, eps: np.ndarray, news: np.ndarray) -> np.ndarray:
    """Full-horizon policy-rate deviation implied by innovations plus news."""
    T = bank.T
    rr = bank.news_rr @ news
    for j, name in enumerate(SHOCK_NAMES):
        irf = bank.irfs[name]["rr"]
        for t in range(eps.shape[0]):
            if eps[t, j] != 0.0:
                rr[t:] += irf[: T - t] * eps[t, j]
    return rr


def filter_with_elb(obs: ObservableSet, bank: ImpulseBank,
                    tol: float = 1e-9, max_iter: int = 100) -> ShockSeries:
    """Joint fixed point of innovations and post-sample ELB news.

    The projected rate path beyond the sample must respect the bound with
    complementary news; in-sample the observed rate is matched exactly and
    quarters at the bound are flagged (the eps_R/news split is not separately
    identified there).
    """
    model = bank.model
    T = bank.T
    T_obs = obs.T_obs
    n_y = len(OBSERVABLES)
    n_e = len(SHOCK_NAMES)
    R = bank.observable_irfs()
    bound = model.macro.r_LB - model.ssq["r_R"]
    M = bank.news_rr

    # linear maps: observables and the rate path in (eps, news)
    n_eps = n_e * T_obs
    A_eps = np.zeros((n_y * T_obs, n_eps))
    for t in range(T_obs):
        for tau in range(t + 1):
            A_eps[t * n_y:(t + 1) * n_y, tau * n_e:(tau + 1) * n_e] = R[t - tau]
    A_news = bank.news_observables()[:T_obs].reshape(n_y * T_obs, T)
    B_eps = np.zeros((T, n_eps))
    for tau in range(T_obs):
        for j, name in enumerate(SHOCK_NAMES):
            B_eps[tau:, tau * n_e + j] = bank.irfs[name]["rr"][: T - tau]
    y_vec = obs.values.reshape(-1)

    # Murty least-index toggles on the post-sample binding set; each pass is
    # one square solve of (observables matched, rate at the bound on the set)
    active: set[int] = set()
    eps_vec = np.linalg.solve(A_eps, y_vec)
    news = np.zeros(T)
    for _ in range(max_iter):
        rr = B_eps @ eps_vec + M @ news
        pivot = -1
        for t in range(T_obs, T):
            if t in active and news[t] < -tol:
                pivot = t
                break
            if t not in active and rr[t] < bound - tol:
                pivot = t
                break
        if pivot < 0:
            break
        active.symmetric_difference_update({pivot})
        idx = sorted(active)
        k = len(idx)
        top = np.hstack([A_eps, A_news[:, idx]])
        bot = np.hstack([B_eps[idx, :], M[np.ix_(idx, idx)]])
        sol = np.linalg.solve(np.vstack([top, bot]),
                              np.concatenate([y_vec, np.full(k, bound)]))
        eps_vec = sol[:n_eps]
        news = np.zeros(T)
        news[idx] = sol[n_eps:]
    else:
        raise RuntimeError("ELB filtering fixed point did not converge")
    eps = eps_vec.reshape(T_obs, n_e)
    rr = B_eps @ eps_vec + M @ news
    if np.min(rr) < bound - 1e-7:
        raise RuntimeError(
            "rate path still violates the bound (binding beyond truncation?)")
    flagged = [t for t in range(T_obs) if obs.values[t, 3] <= bound + 1e-9]
    return ShockSeries(dates=list(obs.dates), eps=eps, elb_news=news,
                       elb_flagged=flagged)


def _lcp_tail(base_rr: np.ndarray, M: np.ndarray, bound: float, start: int,
              tol: float, max_iter: int = 4000) -> np.ndarray:
    """Complementarity solve for nonnegative news restricted to dates >= start.

    Murty's least-index pivoting: toggle the lowest-index violated condition
    one at a time, which terminates finitely for P-matrices and avoids the
    cycling that block updates exhibit on long binding spells.
    """
    T = len(base_rr)
    news = np.zeros(T)
    active: set[int] = set()
    for _ in range(max_iter):
        rr = base_rr + M @ news
        pivot = -1
        for t in range(start, T):
            if t in active and news[t] < -tol:
                pivot = t
                break
            if t not in active and rr[t] < bound - tol:
                pivot = t
                break
        if pivot < 0:
            return news
        if pivot in active:
            active.discard(pivot)
        else:
            active.add(pivot)
        news = np.zeros(T)
        if active:
            idx = sorted(active)
            sub = M[np.ix_(idx, idx)]
            news[idx] = np.linalg.solve(sub, bound - base_rr[idx])
    raise RuntimeError("tail complementarity did not converge")


def simulate_forward(bank: ImpulseBank, shocks: ShockSeries,
                     horizon: int | None = None,
                     variables: tuple | None = None,
                     substitute_irfs: dict | None = None) -> dict[str, np.ndarray]:
    """Superpose impulse responses of filtered innovations (plus ELB news).

    `substitute_irfs` maps shock name -> alternative irf dict, used for the
    counterfactual propagation of selected shocks through a different
    economy's kernels.
    """
    T = bank.T
    horizon = horizon or T
    if horizon > T:
        raise ValueError(f"horizon {horizon} exceeds truncation {T}")
    eps = shocks.eps
    names = SHOCK_NAMES
    if variables is None:
        variables = tuple(bank.irfs[names[0]].keys())
    out = {v: np.zeros(horizon) for v in variables}
    contrib = {n: {v: np.zeros(horizon) for v in variables} for n in names}
    for j, name in enumerate(names):
        irfs = (substitute_irfs or {}).get(name, bank.irfs[name])
        for t in range(min(eps.shape[0], horizon)):
            e = eps[t, j]
            if e == 0.0:
                continue
            for v in variables:
                seg = irfs[v][: horizon - t]
                contrib[name][v][t:t + len(seg)] += seg * e
    for name in names:
        for v in variables:
            out[v] += contrib[name][v]
    if np.any(shocks.elb_news != 0.0):
        news_contrib = {}
        for v in variables:
            M = bank.model.news_matrix(v) if v != "rr" else bank.news_rr
            news_contrib[v] = (M @ shocks.elb_news)[:horizon]
            out[v] += news_contrib[v]
        contrib["elb_news"] = news_contrib
    out["_contributions"] = contrib
    return out
