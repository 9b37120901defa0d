import json

import pytest

from tamechar import __version__, characters
from tamechar.cli import main
from tamechar.config import RunConfig, corpus_dir, validate
from tamechar.cyclotomic import RootOfUnity
from tamechar.errors import ValidationError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dze_check_line(capsys):
    code, out, _ = run(capsys, "dze-check", "examples/sl2-unram.json")
    assert code == 0
    assert "LHS=-1 RHS=-1 OK" in out.splitlines()


def test_factorize_product_is_exact(capsys):
    code, out, _ = run(capsys, "factorize", "gl2-depth1.json")
    assert code == 0
    assert "product check: exact" in out


def test_flags_before_or_after_command(capsys):
    a = run(capsys, "--format", "json", "classify", "sl2-unram.json")
    b = run(capsys, "classify", "sl2-unram.json", "--format", "json")
    assert a == b and a[0] == 0


def test_json_carries_version(capsys):
    code, out, _ = run(capsys, "classify", "gl2-depth1.json", "--format", "json")
    data = json.loads(out)
    assert data["tamechar_version"] == __version__
    assert data["command"] == "classify"
    assert data["verdict"] == "extra-regular"


def test_char_table_csv_header(capsys):
    code, out, _ = run(capsys, "char-table", "sl2-unram.json")
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith(f"# tamechar {__version__} char-table N=3 normalization=")
    assert lines[1].split(",")[0] == "element"
    assert len(lines) == 2 + len(RunConfig.load("sl2-unram.json").elements)


@pytest.mark.parametrize("cmd", [["char-table", "sp4-toral.json"], ["signs", "sp4-toral.json"],
                                 ["delta2", "gl2-depth1.json"]])
def test_threads_do_not_change_output(capsys, cmd):
    one = run(capsys, *cmd, "--format", "json")
    four = run(capsys, *cmd, "--format", "json", "--threads", "4")
    assert one == four and one[0] == 0


def test_validation_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 1, "name": "x", "tower": {"q": 4, "e": 1, "f": 1, "N": 2},
                               "root_datum": {"type": "A1"}}))
    code, out, err = run(capsys, "classify", str(bad))
    assert code == 2
    assert "residue characteristic" in err
    assert out == ""


def test_missing_field_names_the_field(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 1, "name": "x", "tower": {"q": 3, "e": 1, "f": 2}, "torus": {"induced": True}}))
    code, _, err = run(capsys, "classify", str(bad))
    assert code == 2
    assert "tower" in err and "N" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "classify", "no-such-config.json")
    assert code == 2
    assert "not found" in err


def test_truncation_exit_code(capsys):
    code, _, err = run(capsys, "classify", "gl2-depth1.json", "--trunc-override", "1")
    assert code == 3
    assert "TruncationError" in err


def test_invariant_violation_exit_code(capsys, monkeypatch):
    real = characters.dze_check

    def broken(grd, scale=1, name=""):
        res = real(grd, scale, name)
        res.lhs = res.lhs * RootOfUnity.sign(-1)
        return res

    monkeypatch.setattr(characters, "dze_check", broken)
    code, _, err = run(capsys, "dze-check", "sl2-unram.json")
    assert code == 4
    assert "MISMATCH" in err


def test_bad_threads(capsys):
    code, _, _ = run(capsys, "classify", "sl2-unram.json", "--threads", "0")
    assert code == 2


def test_examples_env_override(capsys, monkeypatch, tmp_path):
    cfg = json.loads((corpus_dir() / "sl2-unram.json").read_text())
    cfg["name"] = "moved"
    (tmp_path / "moved.json").write_text(json.dumps(cfg))
    monkeypatch.setenv("TAMECHAR_EXAMPLES", str(tmp_path))
    assert corpus_dir() == tmp_path
    code, out, _ = run(capsys, "dze-check", "examples/moved.json")
    assert code == 0 and "config: moved" in out


def test_real_compare(capsys):
    code, out, _ = run(capsys, "real-compare", "su2.json", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["ok"] and float(data["max_deviation"]) < 1e-9


def test_real_config_rejected_by_padic_command(capsys):
    code, _, err = run(capsys, "classify", "su2.json")
    assert code == 2


def test_gln_oracle_agrees(capsys):
    code, out, _ = run(capsys, "gln-oracle", "gl2-depth1.json")
    assert code == 0 and "agree" in out


def test_verify_all_subset(capsys):
    code, out, _ = run(capsys, "verify-all", "--only", "8,9")
    lines = out.splitlines()
    assert code == 0
    assert sum(line.startswith("[PASS]") for line in lines) == 2
    assert lines[-1] == "2/2 criteria passed"


@pytest.mark.parametrize("path", sorted(p.name for p in corpus_dir().glob("*.json")))
def test_corpus_configs_validate_and_load(path):
    data = json.loads((corpus_dir() / path).read_text())
    validate(data)
    cfg = RunConfig.from_json(data)
    if cfg.tower is not None:
        S = cfg.build_torus()
        if cfg.character is not None:
            cfg.build_character(S)
        assert len(cfg.build_elements(S)) == len(cfg.elements)


def test_validate_rejects_wrong_version():
    with pytest.raises(ValidationError, match="version"):
        validate({"version": 2, "name": "x", "real": {"type": "A1", "weight": [1]}})
