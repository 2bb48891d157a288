import io
import json

import pytest

from hyperfid import cli


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "u": write(tmp_path / "u.json", {"dim": 2, "bloch": [0.6, 0, 0]}),
        "v": write(tmp_path / "v.json", {"dim": 2, "bloch": [0, 0.6, 0]}),
        "mixed3": write(tmp_path / "q.json", {"dim": 3, "matrix": [[[1 / 3, 0] if i == j else [0, 0] for j in range(3)] for i in range(3)]}),
        "bad": write(tmp_path / "bad.json", {"dim": 2, "bloch": [0.9, 0.9, 0]}),
    }


def run(argv):
    out = io.StringIO()
    code = cli.main(argv, stdout=out)
    return code, out.getvalue()


def test_worked_pair_json(files):
    code, text = run(["fidelity", files["u"], files["v"], "--format", "json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["bures_fidelity"] == pytest.approx(0.82, abs=1e-12)
    assert doc["a_fidelity"] == pytest.approx(0.81, abs=1e-12)
    assert doc["alt_a_fidelity"] == pytest.approx(0.81, abs=1e-12)
    assert {"phi_u", "phi_v", "phi_w", "cos2_half_defect"} <= doc.keys()
    assert {"bures_angle", "bures_metric", "gold_metric", "a_angle", "a_metric", "ac_metric"} <= doc.keys()


def test_same_file_gives_unit_fidelity(files):
    code, text = run(["fidelity", files["mixed3"], files["mixed3"], "--format", "json"])
    assert code == 0
    doc = json.loads(text)
    assert doc["bures_fidelity"] == 1.0 and doc["a_fidelity"] == 1.0
    assert doc["alt_a_fidelity"] == pytest.approx(1.0, abs=1e-12)
    for key in ("trace_distance", "bures_angle", "bures_metric", "gold_metric", "a_angle", "a_metric", "ac_metric"):
        assert doc[key] == 0.0
    assert "phi_u" not in doc


def test_table_rounds_to_twelve_digits(files):
    code, text = run(["fidelity", files["u"], files["v"]])
    assert code == 0
    line = next(l for l in text.splitlines() if l.startswith("bures_fidelity "))
    assert line.split()[-1] == "0.82"


def test_csv_output(files, tmp_path):
    out = tmp_path / "out.csv"
    code, text = run(["fidelity", files["u"], files["v"], "--format", "csv", "--out", str(out)])
    assert code == 0
    header, row = text.strip().splitlines()
    assert header.split(",")[:3] == ["dim", "bures_fidelity", "a_fidelity"]
    assert out.read_text() == text


def test_dim_mismatch_exit_code(files, capsys):
    code, _ = run(["fidelity", files["u"], files["mixed3"]])
    assert code == 2
    err = capsys.readouterr().err
    assert "DimMismatch" in err and "dim 2" in err and "dim 3" in err


def test_invalid_state_file(files, capsys):
    code, _ = run(["fidelity", files["u"], files["bad"]])
    assert code == 2
    assert "StateFileError" in capsys.readouterr().err


def test_missing_file(files, tmp_path):
    assert run(["fidelity", files["u"], str(tmp_path / "nope.json")])[0] == 2


def test_unknown_experiment(capsys):
    assert run(["verify", "everything"])[0] == 2
    assert "bound" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "bound", "--dim", "3", "--trials", "300"],
        ["verify", "triangle", "--metric", "a-angle", "--dim", "4", "--trials", "200"],
        ["verify", "theorem1", "--trials", "500"],
        ["verify", "sandwich", "--dim", "2", "--measure", "haar-pure", "--trials", "300"],
        ["verify", "limits", "--trials", "100", "--eps", "0.1,0.05"],
    ],
)
def test_verify_passes(argv):
    code, text = run(argv)
    assert code == 0
    assert text.startswith("PASS ")


def test_verify_violation_exit_code():
    code, text = run(["verify", "sandwich", "--trials", "50", "--tolerance", "-1"])
    assert code == 1
    assert text.startswith("FAIL ")


def test_verify_json_is_byte_identical(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        code, text = run(["verify", "bound", "--dim", "3", "--trials", "300", "--format", "json", "--out", str(path)])
        assert code == 0
        assert path.read_text() == text
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_verify_table_writes_json_report(tmp_path):
    path = tmp_path / "r.json"
    code, text = run(["verify", "theorem1", "--trials", "100", "--out", str(path)])
    assert code == 0 and len(text.splitlines()) == 1
    assert json.loads(path.read_text())["experiment_name"] == "theorem1"


def test_verify_csv():
    code, text = run(["verify", "sandwich", "--trials", "100", "--format", "csv"])
    assert code == 0
    assert text.splitlines()[0].startswith("name,dim,measure")


def test_timing_flag():
    _, text = run(["verify", "sandwich", "--trials", "10", "--format", "json", "--timing"])
    assert "elapsed" in json.loads(text)


def test_config_defaults():
    cfg = cli.CliConfig.from_args(cli.build_parser().parse_args(["verify", "bound"]))
    assert (cfg.trials, cfg.seed, cfg.measure, cfg.tolerance, cfg.format) == (100_000, 42, "hs", 1e-9, "table")


def test_invalid_measure_dim_combination():
    assert run(["verify", "sandwich", "--dim", "3", "--measure", "bloch-uniform", "--trials", "5"])[0] == 2
