import json

import numpy as np
import pytest

from qusix.cli import main, verify_manifest
from qusix.mub import loads, verify_mub_set
from qusix.tomography import build_projector_set, counts_csv, pure_density, simulate_counts
from qusix.states import qusix_encoding


def run(tmp_path, *argv):
    return main([argv[0], "--out", str(tmp_path), *argv[1:]])


def test_bases_dim6(tmp_path):
    assert run(tmp_path, "bases", "--dim", "6") == 0
    s = loads((tmp_path / "bases_d6.json").read_text())
    assert s.labels == ["I", "II", "III"] and verify_mub_set(s).passed
    rep = json.loads((tmp_path / "verify_d6.json").read_text())
    assert rep["passed"] and rep["max_deviation"] < 1e-12
    assert verify_manifest(tmp_path / "manifest.json") == []


def test_bases_dim3(tmp_path):
    assert run(tmp_path, "bases", "--dim", "3") == 0
    assert loads((tmp_path / "bases_d3.json").read_text()).labels == ["O1", "O2", "O3", "O4"]


def test_bases_validation_failure(tmp_path):
    # an impossible tolerance turns rounding noise into a failure
    assert run(tmp_path, "bases", "--dim", "3", "--tol", "1e-30") == 1


@pytest.mark.parametrize("argv", [
    ["bases", "--dim", "0"],
    ["bases"],
    ["kinoform", "--state", "O9:1"],
    ["kinoform", "--state", "O2:4"],
    ["kinoform"],
    ["kinoform", "--coeffs", "0:0"],
    ["search", "--dim", "3", "--extend", "O7"],
    ["search", "--dim", "3", "--extend", "O1", "--restarts", "0"],
    ["tomography", "--simulate", "poisson", "--state", "IV:1", "--counts", "x.csv"],
    ["nonsense"],
])
def test_usage_errors(tmp_path, argv, capsys):
    assert run(tmp_path, *argv) == 2 if argv[0] != "nonsense" else main(argv) == 2


def test_kinoform_simulate(tmp_path, capsys):
    assert run(tmp_path, "kinoform", "--state", "O2:alpha1", "--simulate") == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["fidelity"] >= 0.99
    for name in ("kinoform.png", "kinoform.f32", "kinoform.f32.json", "intensity.png",
                 "phase.png", "generated_intensity.png"):
        assert (tmp_path / name).exists(), name
    assert verify_manifest(tmp_path / "manifest.json") == []


def test_kinoform_gaussian_coeffs(tmp_path):
    from qusix.optics import load_raw

    assert run(tmp_path, "kinoform", "--coeffs", "0:1", "--grid-size", "128") == 0
    phase, spec = load_raw(tmp_path / "kinoform.f32")
    assert spec.n == 128
    from qusix.kinoform import inverse_sinc
    from qusix.optics import OamSuperposition, synthesize_mode

    A = np.abs(synthesize_mode(OamSuperposition.eigenstate(0), spec).amplitudes)
    A = A / A.max()
    I = 1 + inverse_sinc(A) / np.pi
    x = np.arange(128) - 64
    want = np.mod(-np.pi * I + 2 * np.pi * x[None, :] / 16, 2 * np.pi) * I
    d = np.abs(phase - want)
    assert np.minimum(d, 2 * np.pi - d).max() < 1e-5


def test_kinoform_pure_oam_state(tmp_path):
    assert run(tmp_path, "kinoform", "--state", "I:3", "--encoding", "pure-oam", "--grid-size", "128") == 0
    terms = json.loads((tmp_path / "report.json").read_text())["terms"]
    assert len(terms) == 1 and terms[0][0] == -1


def test_kinoform_order_overlap(tmp_path, capsys):
    with pytest.raises(ValueError):
        run(tmp_path, "kinoform", "--coeffs", "1:1", "--simulate", "--grid-size", "64", "--grating-period", "16")


def test_experiment_ideal(tmp_path, capsys):
    assert run(tmp_path, "experiment", "--encoding", "hybrid", "--model", "ideal", "--exposure", "1000") == 0
    s = json.loads((tmp_path / "summary.json").read_text())
    assert s["S_model_vs_ideal"] == pytest.approx(1, abs=1e-12)
    assert s["S"] > 0.999


def test_experiment_simulated_and_deterministic(tmp_path):
    argv = ["experiment", "--encoding", "pure-oam", "--model", "simulated-optics",
            "--rate", "7000", "--exposure", "1", "--seed", "1"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, *argv) == 0 and run(b, *argv) == 0
    assert json.loads((a / "summary.json").read_text())["S"] >= 0.98
    for name in ("P_hat.csv", "counts.csv", "P_model.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_tomography_noiseless(tmp_path, capsys):
    assert run(tmp_path, "tomography", "--simulate", "noiseless") == 0
    rows = (tmp_path / "fidelity_table.csv").read_text().strip().split("\n")
    assert len(rows) == 20
    fids = [float(r.split(",")[3]) for r in rows[1:-1]]
    assert min(fids) >= 0.999
    assert rows[-1].startswith(",Average Fidelity")
    assert verify_manifest(tmp_path / "manifest.json") == []


def test_tomography_poisson(tmp_path, capsys):
    assert run(tmp_path, "tomography", "--simulate", "poisson", "--repeats", "3", "--seed", "2") == 0
    last = (tmp_path / "fidelity_table.csv").read_text().strip().split("\n")[-1].split(",")
    assert float(last[3]) >= 0.98 and float(last[4]) > 0


def test_tomography_from_csv(tmp_path, capsys):
    ps = build_projector_set()
    s = qusix_encoding().state("II:2")
    f = tmp_path / "c.csv"
    f.write_text(counts_csv(simulate_counts(pure_density(s.vector), ps), ps))
    assert run(tmp_path, "tomography", "--counts", str(f), "--state", "II:2") == 0
    doc = json.loads((tmp_path / "rho_II_2.json").read_text())
    assert doc["fidelity"] >= 0.999
    f.write_text("\n".join(l for l in f.read_text().splitlines() if not l.startswith("L/gamma3")))
    assert run(tmp_path, "tomography", "--counts", str(f)) == 1
    assert "L/gamma3" in capsys.readouterr().err


def test_search_commands(tmp_path, capsys):
    assert run(tmp_path / "a", "search", "--dim", "3", "--extend", "O1,O2,O3") == 0
    assert json.loads((tmp_path / "a" / "search.json").read_text())["best_residual"] < 1e-8
    assert run(tmp_path / "b", "search", "--dim", "2", "--extend", "pi1") == 0
    assert json.loads((tmp_path / "b" / "search.json").read_text())["best_residual"] < 1e-10
    assert run(tmp_path / "c", "search", "--dim", "4", "--full", "3", "--restarts", "4") == 0
    assert json.loads((tmp_path / "c" / "search.json").read_text())["best_residual"] < 1e-8


def test_search_deterministic(tmp_path):
    argv = ["search", "--dim", "6", "--extend", "I,II,III", "--restarts", "5", "--seed", "9"]
    run(tmp_path / "a", *argv)
    run(tmp_path / "b", *argv)
    assert (tmp_path / "a" / "search.json").read_bytes() == (tmp_path / "b" / "search.json").read_bytes()


def test_manifest_detects_tampering(tmp_path):
    run(tmp_path, "bases", "--dim", "2")
    (tmp_path / "bases_d2.json").write_text("{}")
    assert verify_manifest(tmp_path / "manifest.json") == ["bases_d2.json"]


def test_out_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("QUSIX_OUT", str(tmp_path / "env"))
    assert main(["bases", "--dim", "2"]) == 0
    assert (tmp_path / "env" / "manifest.json").exists()


def test_tomography_plot(tmp_path, capsys):
    pytest.importorskip("matplotlib")
    ps = build_projector_set()
    f = tmp_path / "c.csv"
    f.write_text(counts_csv(simulate_counts(pure_density(qusix_encoding().state("I:1").vector), ps), ps))
    assert run(tmp_path, "tomography", "--counts", str(f), "--state", "I:1", "--plot") == 0
    assert (tmp_path / "rho_I_1.png").exists()
    assert verify_manifest(tmp_path / "manifest.json") == []
