import csv
import subprocess
import sys

import pytest

from cuspflow.cli import build_parser, fmt, main
from cuspflow.config import TWO_GENERATOR_TOML, ConfigError, load_config, parse_config


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_fmt():
    assert fmt(True) == "true" and fmt(False) == "false"
    assert fmt(float("inf")) == "divergent"
    assert fmt(0.1) == "0.1" and fmt(3) == "3"
    assert fmt(1 / 3) == "0.333333333333"


def test_check_group_two_generator(tmp_path, capsys):
    assert main(["check-group", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "check_group.csv")
    assert rows[0] == ["condition", "passed", "margin", "generator", "witness", "detail"]
    status = {r[0]: r[1] for r in rows[1:]}
    assert all(status[c] == "true" for c in ("C1", "C2", "C3", "C4", "C5"))
    # two generators: property (star) and mixing need a third
    assert status["star"] == "false" and status["mixing"] == "false"
    assert "C1-C5: pass" in capsys.readouterr().out
    assert (tmp_path / "check_group.txt").exists()


def test_check_group_three_generators(tmp_path):
    assert main(["check-group", "--config", "three-generator", "--out", str(tmp_path)]) == 0
    status = {r[0]: r[1] for r in read_csv(tmp_path / "check_group.csv")[1:]}
    assert status["star"] == "true" and status["mixing"] == "true"


@pytest.fixture()
def bad_config(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text(TWO_GENERATOR_TOML.replace("shift = 5.0", "shift = 5.0\narcs = [[-1.0, 2.8]]"))
    return path


def test_bad_config_names_condition(bad_config, tmp_path, capsys):
    assert main(["check-group", "--config", str(bad_config), "--out", str(tmp_path)]) == 2
    assert "failed conditions: C3" in capsys.readouterr().out
    assert main(["exponents", "--config", str(bad_config), "--out", str(tmp_path)]) == 2
    assert "condition C3 violated" in capsys.readouterr().err


def test_unknown_config(tmp_path, capsys):
    assert main(["exponents", "--config", "no-such-group", "--out", str(tmp_path)]) == 2
    assert "config" in capsys.readouterr().err


def test_config_parsing_errors():
    with pytest.raises(ConfigError):
        parse_config("[numerics]\nM0 = 3\n")
    with pytest.raises(ConfigError):
        parse_config(TWO_GENERATOR_TOML + "\n[extra]\nx = 1\n")
    with pytest.raises(ConfigError):
        parse_config(TWO_GENERATOR_TOML.replace('kind = "parabolic"', 'kind = "elliptic"'))
    with pytest.raises(ConfigError):
        parse_config("[group\n")


def test_toml_file_config(tmp_path):
    path = tmp_path / "g.toml"
    path.write_text(TWO_GENERATOR_TOML.replace("t_steps = 100", "t_steps = 7"))
    cfg = load_config(path)
    assert cfg.commands["t_steps"] == 7
    assert cfg.source == str(path)
    assert [g.label for g in cfg.group.generators] == ["h", "p"]


def test_matrix_generator_config():
    text = """
[group]
arc_margin = 0.02
[[group.generators]]
label = "a"
matrix = [1.0, 8.0, 0.0, 1.0]
[[group.generators]]
label = "b"
matrix = [1.0, 0.0, 8.0, 1.0]
"""
    cfg = parse_config(text)
    assert [g.kind for g in cfg.group.generators] == ["parabolic", "parabolic"]


def test_exponents_and_subgroup_limit(tmp_path):
    assert main(["exponents", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "exponents.csv")
    assert rows[0] == ["name", "kind", "lower", "upper", "method"]
    names = [r[0] for r in rows[1:]]
    assert names == ["h", "p", "group", "delta_p_max"]
    assert main(["subgroup-limit", "--powers", "1,2,4", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "subgroup_limit.csv")
    assert rows[0] == ["n", "delta_lower", "delta_upper"]
    ups = [float(r[2]) for r in rows[1:]]
    assert [r[0] for r in rows[1:]] == ["1", "2", "4"]
    assert ups[0] > ups[1] > ups[2]


def test_powers_argument():
    assert build_parser().parse_args(["subgroup-limit", "--powers", "1, 3"]).powers == [1, 3]
    with pytest.raises(SystemExit):
        build_parser().parse_args(["subgroup-limit", "--powers", "0,2"])


def test_pressure_curve_csv(tmp_path):
    args = ["pressure-curve", "--t-min", "-10", "--t-max", "2", "--t-steps", "5", "--threads", "2",
            "--out", str(tmp_path)]
    assert main(args) == 0
    rows = read_csv(tmp_path / "pressure_curve.csv")
    assert rows[0] == ["t", "value", "flat_certified", "M", "error"]
    assert len(rows) == 6
    assert [float(r[0]) for r in rows[1:]] == [-10.0, -7.0, -4.0, -1.0, 2.0]
    assert rows[1][2] == "true" and rows[-1][2] == "false"
    assert all(r[3] == "inf" for r in rows[1:])
    vals = [float(r[1]) for r in rows[1:]]
    assert vals == sorted(vals)


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["subgroup-limit", "--powers", "2,8", "--out", str(d)]) == 0
    assert (a / "subgroup_limit.csv").read_text() == (b / "subgroup_limit.csv").read_text()


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "cuspflow", "check-group", "--out", str(tmp_path)],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    assert "C1-C5: pass" in r.stdout
