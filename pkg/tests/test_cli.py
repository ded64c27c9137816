import csv
import os

import numpy as np
import pytest

from kmrglue.cli import main, run_verify, spectrum_rows


def _cfg(tmp_path, text):
    path = tmp_path / "run.ini"
    path.write_text(text)
    return str(path)


def _read(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_spectrum_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["spectrum", "--out", str(out)]) == 0
    rows = _read(out / "spectrum.csv")
    assert [int(r["i"]) for r in rows] == list(range(9))
    assert float(rows[0]["lambda"]) == pytest.approx(-np.sin(0.3) ** 2, abs=1e-9)
    assert all(float(r["lambda_minus_base"]) <= 1e-8 for r in rows)


def test_spectrum_sigma_zero_limit():
    rows = spectrum_rows(0.0, 4, "even")
    assert [r[1] for r in rows] == [0.0, 1.0, 4.0, 9.0, 16.0]


@pytest.mark.parametrize("body", ["[spectrum]\nsigma = 1.5708\n", "[spectrum]\nn = 40\n"])
def test_spectrum_validation(tmp_path, body):
    out = tmp_path / "o"
    assert main(["spectrum", "--config", _cfg(tmp_path, body), "--out", str(out)]) == 1
    assert not out.exists()


@pytest.mark.parametrize(
    "body",
    ["[spectrum]\ncolour = red\n", "[extra]\nx = 1\n", "[spectrum]\nsigma = abc\n", "not ini"],
)
def test_config_rejected(tmp_path, body):
    out = tmp_path / "o"
    assert main(["spectrum", "--config", _cfg(tmp_path, body), "--out", str(out)]) == 1
    assert not out.exists()


def test_bad_arguments(tmp_path):
    assert main(["nonsense"]) == 1
    assert main(["glue", "--truncation", "40", "--out", str(tmp_path / "o")]) == 1
    assert main(["glue", "--epsilon", "2", "--out", str(tmp_path / "o")]) == 1
    assert not (tmp_path / "o").exists()


def test_kmr_mesh(tmp_path):
    out = tmp_path / "o"
    assert main(["kmr-mesh", "--out", str(out)]) == 0
    rows = _read(out / "periods.csv")
    assert len(rows) == 4
    assert max(float(r["error"]) for r in rows) < 1e-6
    text = (out / "kmr_mesh.obj").read_text()
    assert text.count("\nv ") + text.startswith("v ") == 21 * 21


def test_kmr_mesh_empty_region(tmp_path):
    cfg = _cfg(tmp_path, "[kmr-mesh]\nu0 = 1.0\nu1 = 1.0\nv0 = 0.0\nv1 = 0.0\n")
    out = tmp_path / "o"
    assert main(["kmr-mesh", "--config", cfg, "--out", str(out)]) == 0
    assert "f " not in (out / "kmr_mesh.obj").read_text()


def test_scherk_solve(tmp_path):
    out = tmp_path / "o"
    assert main(["scherk-solve", "--out", str(out)]) == 0
    for name in ("scherk_trace.csv", "residual.csv", "flux.csv"):
        assert (out / name).exists()
    assert len(_read(out / "scherk_trace.csv")) >= 2


def test_glue_self_test(tmp_path):
    cfg = _cfg(tmp_path, "[glue]\ntheorem = self_test\n")
    out = tmp_path / "o"
    assert main(["glue", "--config", cfg, "--out", str(out)]) == 0
    report = (out / "matching_report.txt").read_text()
    assert "converged = True" in report
    assert (out / "matching_trace.csv").exists()
    assert (out / "seam_t_inner.obj").exists()


def test_glue_bad_theorem(tmp_path):
    cfg = _cfg(tmp_path, "[glue]\ntheorem = th7\n")
    assert main(["glue", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_glue_iteration_cap_is_numerical_failure(tmp_path):
    cfg = _cfg(tmp_path, "[glue]\nmax_iter = 1\n")
    assert main(["glue", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


def test_deterministic_outputs(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert main(["verify", "--out", str(out), "--seed", "3"]) == 0
        assert main(["spectrum", "--out", str(out)]) == 0
        outs.append(out)
    for name in ("verify.csv", "spectrum.csv"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_verify_all_pass(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["verify", "--out", str(out)]) == 0
    rows = _read(out / "verify.csv")
    assert len(rows) == 8
    assert all(r["passed"] == "1" for r in rows)
    assert capsys.readouterr().out.count("PASS") == 8


def test_verify_fault_injection(tmp_path):
    cfg = _cfg(tmp_path, "[verify]\nsuite = eigenvalue_bracket\ninject_eigenvalue_shift = 0.5\n")
    out = tmp_path / "o"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    rows = _read(out / "verify.csv")
    assert rows[0]["passed"] == "0"


def test_verify_empty_and_unknown(tmp_path):
    assert run_verify([]) == []
    cfg = _cfg(tmp_path, "[verify]\nsuite = ,\n")
    out = tmp_path / "o"
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
    assert _read(out / "verify.csv") == []
    cfg = _cfg(tmp_path, "[verify]\nsuite = nope\n")
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "p")]) == 1
