import pytest

from pagecurve.harness.cli import main

CFG = """model.N = 3
model.N_b = 12
engines = exact, hydro
times.start = 0
times.end = 16
times.dt = 0.25
profile_times = 3
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "scenario.cfg"
    path.write_text(CFG)
    return path


def test_run_writes_tables(config, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(config), "--output-dir", str(out)]) == 0
    assert (out / "page_entropy.csv").exists()
    assert (out / "current.csv").exists()
    assert (out / "profiles_t3.csv").exists()
    assert "wrote" in capsys.readouterr().out


def test_compare_and_fit_from_files(config, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", "--config", str(config), "--output-dir", str(out)])
    capsys.readouterr()
    assert main(["compare", "--input", str(out / "page_entropy.csv"), "--observable", "S_exact", "--against", "S_hydro_sys"]) == 0
    text = capsys.readouterr().out
    assert "max_rel =" in text and "flagged =" in text
    assert main(["fit", "--input", str(out / "page_entropy.csv"), "--observable", "S_hydro_sys", "--window", "1.5,2.5", "--page-units"]) == 0
    assert "exponent =" in capsys.readouterr().out


def test_fit_and_compare_from_config(config, capsys):
    assert main(["fit", "--config", str(config), "--observable", "I_hydro", "--window", "8,16"]) == 0
    assert main(["compare", "--config", str(config), "--observable", "S_exact", "--against", "S_hydro_sys", "--t-max", "5"]) == 0


def test_collapse_from_config(config, capsys):
    assert main(["collapse", "--config", str(config), "--set", "engines=hydro", "--sizes", "3,6"]) == 0
    assert "sup_distance" in capsys.readouterr().out


def test_exit_code_on_invalid_input(config, tmp_path, capsys):
    assert main(["run", "--config", str(config), "--set", "model.N=-3"]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["fit", "--config", str(config), "--observable", "I_hydro", "--window", "oops"]) == 2
    assert main(["collapse", "--config", str(config)]) == 2
    assert main(["bogus"]) == 2
    err = capsys.readouterr().err
    assert "model" in err


def test_exit_code_on_numeric_error(config, monkeypatch):
    import pagecurve.harness.runner as runner
    from pagecurve.errors import NumericError

    def broken(*args, **kwargs):
        raise NumericError("eigensolver failed")

    monkeypatch.setattr(runner, "ExactPropagator", broken)
    assert main(["run", "--config", str(config), "--set", "engines=exact"]) == 3
