import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hank2a.cli import main
from hank2a.config import apply_overrides, config_hash, fast_config, validate_config


def run_cli(args, tmp):
    return main(args + ["--outdir", str(tmp)])


class TestConfig:
    def test_unknown_key_rejected_with_name(self):
        cfg = fast_config()
        cfg["extra_section"] = {}
        with pytest.raises(ValueError, match="extra_section"):
            validate_config(cfg)

    def test_all_violations_listed(self):
        cfg = fast_config()
        cfg["preferences"]["beta"] = 2.0
        cfg["technology"]["alpha"] = -1.0
        with pytest.raises(ValueError) as err:
            validate_config(cfg)
        msg = str(err.value)
        assert "beta" in msg and "alpha" in msg

    def test_overrides(self):
        cfg = apply_overrides(fast_config(), ["liquidity.Psi=0.01", "numerics.T=99"])
        assert cfg["liquidity"]["Psi"] == 0.01
        assert cfg["numerics"]["T"] == 99

    def test_override_unknown_key(self):
        with pytest.raises(ValueError, match="unknown config key"):
            apply_overrides(fast_config(), ["liquidity.bogus=1"])

    def test_hash_stability(self):
        assert config_hash(fast_config()) == config_hash(fast_config())
        other = apply_overrides(fast_config(), ["liquidity.Psi=0.9"])
        assert config_hash(other) != config_hash(fast_config())


class TestAnalyticCommand:
    def test_deterministic_reruns(self, tmp_path):
        d1, d2 = tmp_path / "a", tmp_path / "b"
        assert run_cli(["analytic", "--debt-grid", "0", "2", "6"], d1) == 0
        assert run_cli(["analytic", "--debt-grid", "0", "2", "6"], d2) == 0
        assert (d1 / "analytic.csv").read_bytes() == (d2 / "analytic.csv").read_bytes()

    def test_manifest_lists_outputs_with_hashes(self, tmp_path):
        assert run_cli(["analytic", "--debt-grid", "0", "1", "4"], tmp_path) == 0
        man = json.loads((tmp_path / "manifest.json").read_text())
        assert "analytic.csv" in man["outputs"]
        import hashlib
        digest = hashlib.sha256((tmp_path / "analytic.csv").read_bytes()).hexdigest()
        assert man["outputs"]["analytic.csv"] == digest

    def test_error_is_machine_readable(self, tmp_path, capsys):
        code = main(["analytic", "--z-h", "2.5", "--outdir", str(tmp_path)])
        assert code == 1
        err = capsys.readouterr().err
        payload = json.loads(err.strip().splitlines()[-1])
        assert payload["type"] == "ValueError"


class TestLPCommand:
    def test_lp_roundtrip(self, tmp_path):
        import pandas as pd
        rng = np.random.default_rng(0)
        n = 90
        B = rng.normal(0, 1, n)
        y = 0.4 * B + rng.normal(0, 1, n)
        pd.DataFrame({"y": y, "B": B}).to_csv(tmp_path / "data.csv", index=False)
        code = run_cli(["lp", "--data", str(tmp_path / "data.csv"), "--y", "y",
                        "--b", "B", "--horizons", "3"], tmp_path)
        assert code == 0
        out = pd.read_csv(tmp_path / "local_projections.csv")
        assert len(out) == 4
        assert abs(out["beta"].iloc[0] - 0.4) < 0.3


class TestDataCommand:
    def test_build_observables(self, tmp_path):
        import pandas as pd
        from test_empirics import make_raw
        raw = make_raw(n=44)
        df = raw.frame.copy()
        df.insert(0, "date", [str(p) for p in df.index])
        df.to_csv(tmp_path / "raw.csv", index=False)
        code = run_cli(["data", "build", "--raw", str(tmp_path / "raw.csv")], tmp_path)
        assert code == 0
        out = pd.read_csv(tmp_path / "observables.csv")
        assert list(out.columns) == ["date", "dY", "dI", "pi", "rR", "dT"]
        assert len(out) == 18  # 2020Q1..2024Q2


class TestInspectCommand:
    def test_income_chain_dump(self, tmp_path):
        import pandas as pd
        code = run_cli(["inspect", "income", "--preset", "fast"], tmp_path)
        assert code == 0
        out = pd.read_csv(tmp_path / "income_chain.csv")
        n = len(out)
        assert out["kind"].iloc[-1] == "entrepreneur"
        trans = out[[f"to_{j}" for j in range(n)]].values
        assert np.allclose(trans.sum(axis=1), 1.0, atol=1e-10)
