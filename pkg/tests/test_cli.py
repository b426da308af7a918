import json
from pathlib import Path

import pytest

from collatz_transfer.cli import RunConfig, main, parse_vector
from collatz_transfer.weights import classic_bergman

from conftest import vec

GOLDEN = Path(__file__).parent / "golden"

# (golden file, argv); regenerate with tests/make_golden.py
GOLDEN_CASES = [
    ("norm_exact_1.json", ["norm", "exact", "--n", "1", "--weight", "bergman"]),
    ("norm_exact_2.json", ["norm", "exact", "--n", "2"]),
    ("collatz_orbit_3.json", ["collatz", "orbit", "--k", "3"]),
    ("collatz_sequences_7.json", ["collatz", "sequences", "--k", "7"]),
    ("eig_verify.json", ["eig", "verify", "--m", "1", "--mu", "1/2", "--cap", "4096"]),
    ("eig_materialize.json", ["eig", "materialize", "--m", "1", "--mu", "1", "--cap", "40"]),
    ("norm_table_3.json", ["norm", "table", "--n-max", "3"]),
    ("hc_build.json", ["hc", "build", "--target", "3:1", "--target", "4:2,5:-1", "--eps", "1/1000"]),
    ("ergodic_sample.json", ["--seed", "7", "ergodic", "sample", "--M", "1", "--L", "2"]),
    ("weight_info.json", ["--weight", '{"family": "power_law", "params": {"c": "2", "alpha": "1/2"}}', "weight", "info"]),
]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name, argv", GOLDEN_CASES, ids=[c[0] for c in GOLDEN_CASES])
def test_golden(name, argv, capsys):
    code, out, _ = run(argv, capsys)
    assert code == 0
    assert json.loads(out) == json.loads((GOLDEN / name).read_text())


def test_norm_exact_prints_8_3(capsys):
    code, out, _ = run(["norm", "exact", "--n", "1", "--weight", "bergman"], capsys)
    assert json.loads(out)["value"] == "8/3"
    code, out, _ = run(["--format", "csv", "norm", "exact", "--n", "1"], capsys)
    assert out.splitlines() == ["n,value", "1,8/3"]


def test_orbit_example(capsys):
    _, out, _ = run(["collatz", "orbit", "--k", "3"], capsys)
    obj = json.loads(out)
    assert obj["orbit"] == [3, 5, 8, 4, 2] and obj["quotient_death_time"] == 4


def test_eig_verify_zero(capsys):
    _, out, _ = run(["eig", "verify", "--m", "1", "--mu", "1/2", "--cap", "4096"], capsys)
    assert json.loads(out)["residual"] == 0 and json.loads(out)["exact_zero"]


def test_exit_codes(capsys):
    code, _, err = run(["--weight", '{"family": "constant", "params": {"c": "1"}}', "hc", "build", "--target", "3:1"], capsys)
    assert code == 2 and "bounded_below" in err
    code, _, err = run(["eig", "materialize", "--m", "1", "--mu", "1+i"], capsys)
    assert code == 2
    code, _, err = run(["--budget", "0.0001", "collatz", "orbit", "--k", "27"], capsys)
    assert code == 3 and "budget" in err
    code, _, _ = run(["norm", "exact", "--n", "12"], capsys)
    assert code == 3


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as e:
        main(["norm", "exact"])
    assert e.value.code == 2


def test_flags_after_subcommand(capsys):
    _, out, _ = run(["collatz", "orbit", "--k", "3", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "step,value"


def test_config_env(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 7, "format": "json"}))
    monkeypatch.setenv("COLLATZ_TRANSFER_CONFIG", str(cfg))
    _, out, _ = run(["ergodic", "sample", "--M", "1", "--L", "2"], capsys)
    assert json.loads(out) == json.loads((GOLDEN / "ergodic_sample.json").read_text())


def test_certificate_file_roundtrip(tmp_path, capsys):
    path = tmp_path / "cert.json"
    code, _, _ = run(["hc", "build", "--target", "3:1", "--target", "7:1", "--out", str(path)], capsys)
    assert code == 0
    code, out, _ = run(["hc", "verify", "--cert", str(path)], capsys)
    assert code == 0 and json.loads(out)["ok"]
    code, out, _ = run(["ergodic", "visits", "--cert", str(path), "--target", "7:1", "--eps", "0.001", "--horizon", "80"], capsys)
    assert json.loads(out)["frequency"] > 0


def test_defaults_match_library():
    cfg = RunConfig(classic_bergman())
    assert cfg.tree_budget == 10**6 and cfg.orbit_budget == 10**4 and cfg.n_max == 10
    assert cfg.scaled(36).n_max == 12 and cfg.scaled(0.5).tree_budget == 5 * 10**5


def test_parse_vector():
    assert parse_vector("3:1,5:-1/2") == vec(d3=1, d5="-1/2")
    assert parse_vector("4:2i") == vec(d4="2i")
    assert not parse_vector("0")
