import json

import pytest

from aec.cli import EXIT_DIV_ZERO, EXIT_FAIL, EXIT_INPUT, EXIT_INTERNAL, EXIT_NONSQUARE, EXIT_OK
from aec.errors import MixedDomainError
from aec.expressions import eval_tree, parse_expression
from aec.jsonio import dumps, instance_from_json, instance_to_json, load_instance


def _write(tmp_path, obj, name="inst.json"):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return path


# ---------------------------------------------------------------- json


def test_instance_json_round_trip():
    obj = {"variant": "ep", "ops": ["+"], "values": ["1", "2", "x"], "target": "x+3",
           "tree": [[None, None], None], "provenance": "hand made"}
    inst = instance_from_json(obj)
    assert instance_to_json(inst) == obj
    assert load_instance(dumps(obj)) == inst


def test_instance_json_accepts_integers_and_op_strings():
    inst = instance_from_json({"values": [3, 1], "target": 4, "ops": "+"})
    assert inst.variant == "std" and inst.values == (3, 1)


@pytest.mark.parametrize(
    "obj",
    [[], {"values": ["1"], "ops": ["+"]}, {"values": "1", "target": "1", "ops": ["+"]},
     {"values": [1.5], "target": "1", "ops": ["+"]}, {"values": ["1"], "target": "1", "ops": ["^"]},
     {"values": ["1"], "target": "1", "ops": ["+"], "variant": "xx"}],
)
def test_instance_json_rejects(obj):
    with pytest.raises(ValueError):
        instance_from_json(obj)


def test_declared_rational_domain():
    with pytest.raises(MixedDomainError):
        instance_from_json({"values": ["x"], "target": "x", "ops": ["+"], "domain": "rat"})
    assert instance_from_json({"values": ["2"], "target": "2", "ops": ["+"], "domain": "rat"}).domain == "rat"


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


# ---------------------------------------------------------------- solve


def test_solve_ninety_eight(tmp_path, cli):
    path = _write(tmp_path, {"values": ["11", "9", "4", "3", "1"], "target": "98", "ops": ["+", "-", "*", "/"]})
    code, out, _ = cli(["solve", path, "--no-timing"])
    res = json.loads(out)
    assert code == EXIT_OK and res["solvable"] and res["stats"]["millis"] is None
    tree, vals = parse_expression(res["witness"])
    assert eval_tree(tree, vals) == 98


def test_solve_unsolvable_and_variants(tmp_path, cli):
    code, out, _ = cli(["solve", _write(tmp_path, {"values": ["1", "2", "3"], "target": "7", "ops": ["-"],
                                                    "variant": "np"})])
    assert code == EXIT_OK and json.loads(out)["solvable"] is False
    ep = {"values": ["1", "2", "3", "4"], "target": "10", "ops": ["+"], "variant": "ep",
          "tree": [[None, None], [None, None]]}
    code, out, _ = cli(["solve", _write(tmp_path, ep)])
    assert code == EXIT_OK and json.loads(out)["solvable"]
    assert isinstance(json.loads(out)["stats"]["millis"], float)


def test_solve_errors(tmp_path, cli):
    assert cli(["solve", tmp_path / "missing.json"])[0] == EXIT_INPUT
    assert cli(["solve", _write(tmp_path, "{not json")])[0] == EXIT_INPUT
    bad_tree = {"values": ["1", "2"], "target": "3", "ops": ["+"], "variant": "ep", "tree": [[None, None], None]}
    assert cli(["solve", _write(tmp_path, bad_tree)])[0] == EXIT_INPUT
    big = {"values": ["1"] * 13, "target": "13", "ops": ["+"]}
    assert cli(["solve", _write(tmp_path, big)])[0] == EXIT_INTERNAL
    assert cli(["solve", _write(tmp_path, big), "--bound", "13"])[0] == EXIT_OK


def test_solve_stdin(monkeypatch, cli):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO('{"values":["7"],"target":"7","ops":["+"]}'))
    code, out, _ = cli(["solve", "-"])
    assert code == EXIT_OK and json.loads(out)["witness"] == "7"


# ---------------------------------------------------------------- reduce


def test_reduce_from_values(cli):
    code, out, _ = cli(["reduce", "--from", "product-partition-half", "--values", "1,4,2,2", "--ops", "+*"])
    obj = json.loads(out)
    assert code == EXIT_OK
    assert obj["values"] == ["x", "4*x", "2*x", "2*x"] and obj["target"] == "8*x^2"
    assert obj["variant"] == "np"


def test_reduce_from_file_and_ep(tmp_path, cli):
    path = _write(tmp_path, {"kind": "partition", "values": [1, 2, 3]}, "src.json")
    code, out, _ = cli(["reduce", path, "--ops", "+-", "--variant", "ep"])
    obj = json.loads(out)
    assert code == EXIT_OK and obj["tree"] == [[None, None], None]
    code, out, _ = cli(["solve", _write(tmp_path, out)])
    assert json.loads(out)["solvable"]


def test_reduce_errors(tmp_path, cli):
    nonsquare = ["reduce", "--from", "product-partition-half", "--values", "1,2,3,5", "--ops", "+*"]
    assert cli(nonsquare)[0] == EXIT_NONSQUARE
    code, out, _ = cli(nonsquare + ["--force-trivial-no"])
    assert code == EXIT_OK and json.loads(out)["values"] == ["1"]
    assert cli(["reduce", "--from", "partition", "--values", "1,2", "--ops", "+"])[0] == EXIT_INPUT
    assert cli(["reduce", "--values", "1,2", "--ops", "+-"])[0] == EXIT_INPUT
    path = _write(tmp_path, {"kind": "partition", "values": [1, 2]}, "src.json")
    assert cli(["reduce", path, "--from", "product-partition", "--ops", "*/"])[0] == EXIT_INPUT


# ---------------------------------------------------------------- verify


def test_verify_small(cli):
    code, out, err = cli(["verify", "--spec", "2.8", "--max-n", "4", "--max-value", "4", "--threads", "1"])
    obj = json.loads(out)
    assert code == EXIT_OK and obj["ok"] and len(obj["reports"]) == 1
    assert "2.8" in err


def test_verify_fails_on_defect(cli):
    code, out, _ = cli(["verify", "--spec", "2.1", "--max-n", "4", "--max-value", "4", "--threads", "1"])
    assert code == EXIT_FAIL and not json.loads(out)["ok"]


def test_verify_errors(cli):
    assert cli(["verify", "--spec", "7.7"])[0] == EXIT_INPUT
    assert cli(["verify", "--spec", "3", "--ops", "+*"])[0] == EXIT_INPUT


def test_verify_ops_filter(cli):
    code, out, _ = cli(["verify", "--spec", "3", "--ops", "/", "--max-n", "4", "--max-value", "3", "--threads", "1"])
    obj = json.loads(out)
    assert code == EXIT_OK and [r["ops"] for r in obj["reports"]] == ["/"]


# ---------------------------------------------------------------- oracle


def test_oracle_enumerate(cli):
    code, out, _ = cli(["oracle", "enumerate", "--values", "1,2,3", "--ops", "+-*/"])
    assert code == EXIT_OK and json.loads(out)["count"] == 192
    code, out, _ = cli(["oracle", "enumerate", "--variant", "np", "--values", "1,2,3", "--ops", "+-", "--limit", "2"])
    obj = json.loads(out)
    assert obj["count"] == 24 and len(obj["expressions"]) == 2
    code, out, _ = cli(["oracle", "enumerate", "--variant", "ep", "--values", "1,2,3,4", "--ops", "+",
                        "--tree", "[[null,null],[null,null]]"])
    assert json.loads(out)["count"] == 24
    assert cli(["oracle", "enumerate", "--variant", "ep", "--values", "1,2", "--ops", "+"])[0] == EXIT_INPUT
    assert cli(["oracle", "enumerate", "--values", "1,1,1,1,1,1,1", "--ops", "+"])[0] == EXIT_INTERNAL


def test_oracle_check_small(cli):
    code, out, _ = cli(["oracle", "check", "--variant", "std", "--max-n", "2", "--max-value", "3", "--threads", "1"])
    assert code == EXIT_OK and json.loads(out)["ok"]
    code, out, _ = cli(["oracle", "check", "--variant", "single", "--count", "50"])
    assert code == EXIT_OK and json.loads(out)["cases"] == 50


# ---------------------------------------------------------------- eval and shapes


@pytest.mark.parametrize(
    "argv,expected",
    [(["9*11-4/(3+1)"], "98"), (["x^2/x"], "x"), (["x*y+1", "--at", "x=2", "--at", "y=1/2"], "2"),
     (["[2*x*y]/y+[2*x]/1"], "4*x")],
)
def test_eval(cli, argv, expected):
    code, out, _ = cli(["eval"] + argv)
    assert code == EXIT_OK and out.strip() == expected


def test_eval_errors(cli):
    assert cli(["eval", "1/(2-2)"])[0] == EXIT_DIV_ZERO
    assert cli(["eval", "1/(x-1)", "--at", "x=1"])[0] == EXIT_DIV_ZERO
    assert cli(["eval", "1+"])[0] == EXIT_INPUT
    assert cli(["eval", "x+y", "--at", "x=1"])[0] == EXIT_INPUT
    assert cli(["eval", "x", "--at", "x"])[0] == EXIT_INPUT


def test_shapes(cli):
    code, out, _ = cli(["shapes", "--n", "5"])
    assert code == EXIT_OK and json.loads(out)["count"] == 3
    assert json.loads(cli(["shapes", "--n", "5", "--ordered"])[1])["count"] == 14
    assert json.loads(cli(["shapes", "--combs", "2,2"])[1])["tree"] == [[None, None], [None, None]]
    assert cli(["shapes", "--combs", "0,3"])[0] == EXIT_INPUT
    assert cli(["shapes"])[0] == EXIT_INPUT


def test_usage_errors_exit_2(cli):
    assert cli([])[0] == 2
    assert cli(["solve"])[0] == 2
