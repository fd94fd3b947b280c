import json
import shutil
from pathlib import Path

import pytest

from hankfigs.render import FIGURES, ChecksumError, FigureSpec, render

DATA = Path(__file__).parent / "data" / "example_run"


@pytest.mark.parametrize("figure_id", sorted(FIGURES))
def test_every_figure_renders(figure_id, tmp_path):
    written = render(FigureSpec(figure_id, DATA, out_dir=tmp_path))
    names = {w.name for w in written}
    assert names == {f"{figure_id}.png", f"{figure_id}.svg"}
    for w in written:
        assert w.stat().st_size > 1000


@pytest.mark.parametrize("figure_id", sorted(FIGURES))
def test_rerender_byte_identical(figure_id, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    w1 = render(FigureSpec(figure_id, DATA, out_dir=a))
    w2 = render(FigureSpec(figure_id, DATA, out_dir=b))
    for p1, p2 in zip(sorted(w1), sorted(w2)):
        assert p1.read_bytes() == p2.read_bytes(), p1.name


def test_transfer_irfs_has_six_labeled_panels(tmp_path):
    written = render(FigureSpec("transfer-irfs", DATA, out_dir=tmp_path))
    svg = next(w for w in written if w.suffix == ".svg").read_text()
    for label in ("Output", "Consumption", "Investment", "Inflation",
                  "Policy rate", "Public debt / annual GDP"):
        assert label in svg, f"panel {label!r} missing"


def test_checksum_guard_detects_modification(tmp_path):
    run = tmp_path / "run"
    shutil.copytree(DATA, run)
    csv = run / "irf_baseline.csv"
    csv.write_text(csv.read_text() + "Y,999,0,0\n")
    with pytest.raises(ChecksumError, match="modified"):
        render(FigureSpec("transfer-irfs", run, out_dir=tmp_path))


def test_unknown_figure_id(tmp_path):
    with pytest.raises(KeyError, match="unknown figure id"):
        render(FigureSpec("nope", DATA, out_dir=tmp_path))


def test_missing_manifest(tmp_path):
    with pytest.raises(FileNotFoundError, match="manifest"):
        render(FigureSpec("lp-bands", tmp_path, out_dir=tmp_path))


def test_inputs_must_be_listed_in_manifest(tmp_path):
    run = tmp_path / "run"
    shutil.copytree(DATA, run)
    man = json.loads((run / "manifest.json").read_text())
    del man["outputs"]["local_projections.csv"]
    (run / "manifest.json").write_text(json.dumps(man))
    with pytest.raises(FileNotFoundError, match="not listed"):
        render(FigureSpec("lp-bands", run, out_dir=tmp_path))
