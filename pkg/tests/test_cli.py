import json

import pytest

from hopfore import cli, envelope
from hopfore.tensorrules import tampered

from conftest import CONFIG_DIR


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def conf(name):
    return CONFIG_DIR / f"{name}.json"


def test_tensor_both_engines_match(capsys):
    code, out, _ = run(capsys, "tensor", "--config", conf("s3_sbar6"),
                       "--left", "V4(eps)", "--right", "W1(eps;eta=1)", "--engine", "both")
    assert code == 0
    assert out.strip().endswith("MATCH")


def test_unit_leaves_the_right_factor_alone(capsys):
    right = "2*V3(chr(tor=[1])) + W1(eps; eta=z)"
    code, out, _ = run(capsys, "--format", "json", "tensor", "--config", conf("s3_sbar6"),
                       "--left", "V1(eps)", "--right", right)
    doc = json.loads(out)
    assert code == 0 and doc["match"]
    assert doc["rules"] == doc["oracle"] == doc["right"]


def test_rules_engine_emits_traces(capsys):
    code, out, _ = run(capsys, "tensor", "--config", conf("s2_sbar4"), "--format", "json",
                       "--left", "V3(eps)", "--right", "V2(eps)", "--engine", "rules")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "hopfore.tensor/1"
    assert doc["traces"][0]["rule_id"].startswith("nil-nil:")
    assert "oracle" not in doc


def test_mismatch_exit_and_report(capsys):
    with tampered():
        code, out, _ = run(capsys, "tensor", "--config", conf("s2_sbar4"),
                           "--left", "V3(eps)", "--right", "V2(eps)")
    assert code == cli.EXIT_MISMATCH
    assert "MISMATCH" in out and "rules:" in out and "oracle:" in out and "rules - oracle:" in out


def test_incomplete_pool_exit(capsys, monkeypatch):
    monkeypatch.setattr(envelope, "eigen_candidates", lambda a, b, p: [])
    code, _, err = run(capsys, "tensor", "--config", conf("s3_sbar6"), "--engine", "oracle",
                       "--left", "V1(eps)", "--right", "W1(eps;eta=2)")
    assert code == cli.EXIT_POOL and "pool" in err


@pytest.mark.parametrize("payload", [
    "not json",
    json.dumps({"N": 6, "group": {"free_rank": 0, "torsion": [6]}, "a": [1],
                "chi": {"free": [], "torsion_exp": [0]}}),                 # chi(a) = 1
    json.dumps({"N": 3, "group": {"free_rank": 1, "torsion": [3]}, "a": [1, 0],
                "chi": {"free": ["z - z"], "torsion_exp": [1]}}),          # zero image
    json.dumps({"N": 3, "group": {"free_rank": 1, "torsion": [3]}, "a": [1, 0],
                "chi": {"free": ["z +"], "torsion_exp": [1]}}),            # unparsable image
    json.dumps({"N": 4, "group": {"free_rank": 0, "torsion": [8]}, "a": [1],
                "chi": {"free": [], "torsion_exp": [1]}}),                 # zeta_8 missing
    json.dumps({"N": 4, "a": [1]}),
])
def test_bad_configs(capsys, tmp_path, payload):
    path = tmp_path / "c.json"
    path.write_text(payload)
    code, _, err = run(capsys, "config", "validate", "--config", path)
    assert code == cli.EXIT_CONFIG and "config error" in err


def test_missing_config(capsys):
    assert run(capsys, "config", "validate")[0] == cli.EXIT_CONFIG


def test_config_validate_reports_case(capsys):
    code, out, _ = run(capsys, "--format", "json", "config", "validate", "--config", conf("s3_sbar12"))
    doc = json.loads(out)
    assert code == 0 and doc["params"]["case"] == "III" and doc["params"]["sprime"] == 4


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["tensor", "--left", "V1(eps)"])
    assert info.value.code == cli.EXIT_USAGE
    code, _, err = run(capsys, "tensor", "--config", conf("s3_sbar6"), "--left", "W2(eps; eta=0)",
                       "--right", "V1(eps)")
    assert code == cli.EXIT_USAGE and "^" in err


def test_green_express(capsys):
    code, out, _ = run(capsys, "green", "express", "--config", conf("case1"), "--module", "V5(eps)")
    assert code == 0
    assert out.strip() == "[V5(eps)] = y^4 - 3 * chr(free=[2]) * y^2 + chr(free=[4])"


def test_green_mul(capsys):
    code, out, _ = run(capsys, "green", "mul", "--config", conf("case2_s3"), "V2(eps)", "V2(eps)")
    assert code == 0 and out.strip() == "V1(chr(free=[2, z])) + V3(eps)"


def test_green_relations_and_basis(capsys):
    code, out, _ = run(capsys, "green", "relations", "--config", conf("case1"))
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "--format", "json", "green", "basis", "--config", conf("s2_sbar4"),
                       "--trunc", "12")
    assert code == 0 and json.loads(out)["ok"]


def test_selftest_is_deterministic(capsys):
    args = ["selftest", "--config", conf("s2_sbar4"), "--seed", "5", "--budget", "12",
            "--format", "json"]
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first == second
    assert first[0] == 0
    assert json.loads(first[1])["envelope"]["mismatches"] == 0


def test_selftest_catches_tampering(capsys):
    code, out, _ = run(capsys, "selftest", "--config", conf("s2_sbar4"), "--budget", "12", "--tamper")
    assert code == cli.EXIT_MISMATCH and "MISMATCH" in out
