"""Steady-state snapshots, Jacobian caches, CSV and manifest writers.

Snapshots carry the config hash they were produced from so every downstream
command can verify provenance; manifests list each output file with its
content hash, making reruns byte-for-byte checkable.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from .blocks import MacroParams
from .config import config_hash
from .household import Aggregates, HouseholdModel, HouseholdParams, PolicySet, Prices
from .income import IncomeChain
from .steady_state import SteadyState

__all__ = ["save_steady_state", "load_steady_state", "save_jacobians",
           "load_jacobians", "write_csv", "Manifest", "sha256_file"]

SNAPSHOT_VERSION = 1


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def save_steady_state(ss: SteadyState, path: Path) -> None:
    meta = dict(
        snapshot_version=SNAPSHOT_VERSION,
        code_version=__version__,
        cfg=ss.cfg,
        cfg_hash=ss.cfg_hash,
        quantities=ss.quantities,
        residuals=ss.residuals,
        varsigma=ss.varsigma,
        delta1=ss.delta1,
        prices={k: getattr(ss.prices, k) for k in
                ("r_l", "r_k", "q", "w", "N", "T", "tau_level", "Pi", "A")},
        agg=ss.agg.__dict__,
        chain=dict(zeta=ss.chain.zeta, iota=ss.chain.iota),
    )
    pol = ss.policies
    np.savez_compressed(
        path,
        meta=json.dumps(meta),
        a_grid=ss.model.a_grid, k_grid=ss.model.k_grid,
        skill_values=ss.chain.skill_values,
        transition=ss.chain.transition, ergodic=ss.chain.ergodic,
        skill_transition=ss.chain.skill_transition,
        skill_ergodic=ss.chain.skill_ergodic,
        D=ss.D, c_adj=pol.c_adj, a_adj=pol.a_adj, k_adj=pol.k_adj,
        c_noadj=pol.c_noadj, a_noadj=pol.a_noadj, Va=pol.Va, Vk=pol.Vk,
    )


def load_steady_state(path: Path, expect_cfg: dict | None = None) -> SteadyState:
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        if meta["snapshot_version"] != SNAPSHOT_VERSION:
            raise ValueError(f"snapshot version {meta['snapshot_version']} unsupported")
        if expect_cfg is not None and config_hash(expect_cfg) != meta["cfg_hash"]:
            raise ValueError(
                "snapshot was produced from a different config "
                f"({meta['cfg_hash']} vs {config_hash(expect_cfg)})")
        cfg = meta["cfg"]
        chain = IncomeChain(
            skill_values=z["skill_values"], transition=z["transition"],
            ergodic=z["ergodic"], skill_transition=z["skill_transition"],
            skill_ergodic=z["skill_ergodic"], zeta=meta["chain"]["zeta"],
            iota=meta["chain"]["iota"],
        )
        params = HouseholdParams(
            beta=cfg["preferences"]["beta"], xi=cfg["preferences"]["xi"],
            gamma=cfg["preferences"]["gamma"],
            varsigma=meta["varsigma"], lam=cfg["household"]["lam"],
            a_lower=float(z["a_grid"][0]), R_bar=cfg["household"]["R_bar"],
            tau_w=cfg["fiscal"]["tau_w"], tau_p=cfg["fiscal"]["tau_p"],
            tau_Xi=cfg["fiscal"]["tau_Xi"],
        )
        model = HouseholdModel(params, chain, z["a_grid"], z["k_grid"])
        pol = PolicySet(z["c_adj"], z["a_adj"], z["k_adj"], z["c_noadj"],
                        z["a_noadj"], z["Va"], z["Vk"])
        prices = Prices(**meta["prices"])
        q = meta["quantities"]
        macro = MacroParams(
            alpha=cfg["technology"]["alpha"], delta0=cfg["technology"]["delta0"],
            delta1=meta["delta1"],
            delta2=cfg["technology"]["delta_ratio"] * meta["delta1"],
            phi_I=cfg["technology"]["phi_I"], mu_ss=cfg["technology"]["mu_ss"],
            kappa_Y=cfg["nominal"]["kappa_Y"], kappa_w=cfg["nominal"]["kappa_w"],
            eps_w=cfg["nominal"]["eps_w"], varphi=cfg["liquidity"]["varphi"],
            Psi=cfg["liquidity"]["Psi"], delta_B=cfg["fiscal"]["delta_B"],
            G_ss=q["G"], rho_tau=cfg["fiscal"]["rho_tau"],
            psi_B=cfg["fiscal"]["psi_B"], rho_R=cfg["monetary"]["rho_R"],
            theta_pi=cfg["monetary"]["theta_pi"], theta_y=cfg["monetary"]["theta_y"],
            r_LB=q["r_R"] - cfg["monetary"]["elb_gap"], pi_ss=1.0,
            beta=cfg["preferences"]["beta"],
            wage_pc_form=cfg["nominal"]["wage_pc_form"],
        )
        return SteadyState(
            cfg=cfg, model=model, chain=chain, macro=macro, prices=prices,
            policies=pol, D=z["D"], agg=Aggregates(**meta["agg"]),
            quantities=q, residuals=meta["residuals"],
            varsigma=meta["varsigma"], delta1=meta["delta1"],
        )


def save_jacobians(J: dict, path: Path, cfg_hash: str, T: int) -> None:
    arrays = {f"{o}__{i}": mat for o, inner in J.items() for i, mat in inner.items()}
    np.savez_compressed(path, meta=json.dumps(dict(cfg_hash=cfg_hash, T=T)), **arrays)


def load_jacobians(path: Path, cfg_hash: str, T: int) -> dict | None:
    if not Path(path).exists():
        return None
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        if meta["cfg_hash"] != cfg_hash or meta["T"] != T:
            return None
        J: dict = {}
        for key in z.files:
            if key == "meta":
                continue
            o, i = key.split("__")
            J.setdefault(o, {})[i] = z[key]
        return J


def write_csv(path: Path, header: list[str], rows) -> None:
    """Deterministic CSV: %.12g floats, LF endings, UTF-8."""
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return f"{v:.12g}"
        return str(v)

    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(fmt(v) for v in row) + "\n")


class Manifest:
    """Collects outputs and timings for one CLI run."""

    def __init__(self, command: str, cfg: dict, outdir: Path):
        self.command = command
        self.cfg_hash = config_hash(cfg)
        self.outdir = Path(outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}
        self.timings: dict[str, float] = {}
        self.extra: dict = {}
        self._t0 = time.perf_counter()

    def time(self, label: str):
        manifest = self

        class _Timer:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                manifest.timings[label] = round(time.perf_counter() - self.t, 3)

        return _Timer()

    def add(self, path: Path) -> Path:
        path = Path(path)
        self.files[path.name] = sha256_file(path)
        return path

    def write(self) -> Path:
        out = self.outdir / "manifest.json"
        payload = dict(
            command=self.command,
            cfg_hash=self.cfg_hash,
            code_version=__version__,
            total_seconds=round(time.perf_counter() - self._t0, 3),
            timings=self.timings,
            outputs=self.files,
            **self.extra,
        )
        with open(out, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        return out
