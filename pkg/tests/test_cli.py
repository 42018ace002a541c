import numpy as np
import pytest

from dictpair.cli import main
from dictpair.dictionaries import build_dirac_fourier, save_dictionary
from dictpair.solvers import save_signal, sparse_signal


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def body_lines(text):
    """Output lines with the comment header stripped."""
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_thresholds_two_onb_point(capsys):
    code, out, _ = run(capsys, "thresholds", "--mu", "0.01", "--mu-a", "0",
                       "--mu-b", "0")
    assert code == 0
    assert "pair_p0             100" in out
    assert "91.4213562373095" in out


def test_thresholds_tied_point(capsys):
    code, out, _ = run(capsys, "thresholds", "--mu", "0.01", "--mu-a", "0.01",
                       "--mu-b", "0.01")
    assert code == 0
    assert "pair_p0             50.5" in out
    assert "pair_bp_omp         50.5" in out


def test_thresholds_rejects_zero_mu(capsys):
    code, _, err = run(capsys, "thresholds", "--mu", "0")
    assert code == 2
    assert "error" in err


def test_figure1_default_grid(tmp_path, capsys):
    out_file = tmp_path / "fig.csv"
    code, _, _ = run(capsys, "figure1", "--out", str(out_file))
    assert code == 0
    lines = body_lines(out_file.read_text())
    assert lines[0] == "mu_b,general_p0,pair_p0_sym,pair_bp_omp,two_onb_p0,two_onb_bp"
    rows = [ln.split(",") for ln in lines[1:]]
    assert len(rows) == 101
    assert float(rows[0][2]) == pytest.approx(100.0, abs=1e-9)
    assert float(rows[0][3]) == pytest.approx(91.42135623730951, abs=1e-9)
    assert float(rows[-1][2]) == pytest.approx(50.5, abs=1e-9)
    # strictly decreasing pair thresholds
    sym = [float(r[2]) for r in rows]
    assert all(b < a for a, b in zip(sym, sym[1:]))


def test_figure1_two_rows(capsys):
    code, out, _ = run(capsys, "figure1", "--grid", "2")
    assert code == 0
    rows = body_lines(out)[1:]
    assert len(rows) == 2


def strip_timestamp(text):
    return [ln for ln in text.splitlines() if not ln.startswith("# generated_at")]


def test_figure1_deterministic_output(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    run(capsys, "figure1", "--grid", "11", "--out", str(out))
    first = out.read_text()
    run(capsys, "figure1", "--grid", "11", "--out", str(out))
    assert strip_timestamp(first) == strip_timestamp(out.read_text())


def test_figure1_unwritable_path(capsys):
    code, _, err = run(capsys, "figure1", "--out", "/nonexistent-dir/x.csv")
    assert code == 3
    assert "error" in err


@pytest.fixture
def planted_instance(tmp_path):
    pair = build_dirac_fourier(4)
    dict_path = tmp_path / "pair.dict"
    save_dictionary(dict_path, pair)
    x = np.zeros(8, dtype=complex)
    x[5] = 1.0 - 0.5j
    sig_path = tmp_path / "one.sig"
    save_signal(sig_path, sparse_signal(x, 4), 4)
    comb = np.zeros(8, dtype=complex)
    comb[0] = comb[2] = 1.0
    comb_path = tmp_path / "comb.sig"
    save_signal(comb_path, sparse_signal(comb, 4), 4)
    return dict_path, sig_path, comb_path


@pytest.mark.parametrize("solver", ["p0", "bp", "omp"])
def test_recover_planted_one_sparse(planted_instance, capsys, solver):
    dict_path, sig_path, _ = planted_instance
    code, out, _ = run(capsys, "recover", "--dict-file", str(dict_path),
                       "--signal-file", str(sig_path), "--solver", solver)
    assert code == 0
    assert "success = True" in out


def test_recover_comb_flags_non_uniqueness(planted_instance, capsys):
    dict_path, _, comb_path = planted_instance
    code, out, _ = run(capsys, "recover", "--dict-file", str(dict_path),
                       "--signal-file", str(comb_path), "--solver", "p0")
    assert code == 0
    assert "unique = False" in out
    # recovery failure is data, not a process failure: exit stays 0


def test_uncertainty_cli(capsys):
    code, out, _ = run(capsys, "uncertainty", "--dict", "dirac-fourier",
                       "--d", "4", "--max", "2")
    assert code == 0
    body = body_lines(out)
    assert "2,2,1,4" in body
    assert any(ln.startswith("# violations = 0") for ln in out.splitlines())


def test_uncertainty_guard_exit_code(capsys):
    code, _, err = run(capsys, "uncertainty", "--dict", "random", "--d", "6",
                       "--atoms-a", "20", "--atoms-b", "20", "--max", "10")
    assert code == 4
    assert "guard" in err


def test_spark_cli(capsys):
    code, out, _ = run(capsys, "spark", "--dict", "dirac-fourier", "--d", "4",
                       "--max-check", "5")
    assert code == 0
    assert "spark = 4" in out
    assert "witness = 0 2 4 6" in out
    assert "bound_two_onb = 4" in out


def test_mub_cli_scaling(capsys):
    code, out, _ = run(capsys, "mub", "--p", "5", "--split", "1",
                       "--report-scaling")
    assert code == 0
    assert "r1 = 1 " in out or "r1 = 1\n" in out
    assert "r4 = 1 " in out or "r4 = 1\n" in out


def test_conditions_cli(capsys):
    code, out, _ = run(capsys, "conditions", "--dict", "mub", "--p", "5",
                       "--split", "1", "--na", "1", "--nb", "1")
    assert code == 0
    assert "fixed_part_ok = False" in out
    assert "tail_ceiling" in out


def test_montecarlo_rejects_zero_trials(capsys):
    code, _, err = run(capsys, "montecarlo", "--dict", "mub", "--p", "3",
                       "--nb", "1", "--trials", "0")
    assert code == 2
    assert "error" in err


def test_montecarlo_output_and_determinism(tmp_path, capsys):
    out = tmp_path / "mc.csv"
    argv = ["montecarlo", "--dict", "dirac-fourier", "--d", "4",
            "--fixed-a", "0", "--nb", "1", "--trials", "10", "--seed", "5",
            "--out", str(out)]
    assert main(argv) == 0
    first = out.read_text()
    assert main(argv) == 0
    capsys.readouterr()
    assert strip_timestamp(first) == strip_timestamp(out.read_text())
    body = body_lines(first)
    assert body[0].startswith("trial,seed,na,nb,sigma_min")
    assert len(body) == 11


def test_config_file_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu = 0.5\ngrid = 4\n")
    code, out, _ = run(capsys, "figure1", "--config", str(cfg), "--grid", "3")
    assert code == 0
    rows = body_lines(out)[1:]
    assert len(rows) == 3  # flag wins over config
    assert "# mu = 0.5" in out  # config value applied


def test_output_header_records_config(tmp_path, capsys):
    out_file = tmp_path / "t.txt"
    run(capsys, "thresholds", "--mu", "0.2", "--mu-a", "0.1", "--mu-b", "0.15",
        "--seed", "9", "--out", str(out_file))
    text = out_file.read_text()
    assert "# command = thresholds" in text
    assert "# mu = 0.2" in text
    assert "# seed = 9" in text
