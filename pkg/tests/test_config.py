import math

import pytest

from maxhyp.config import parse_config, parse_sections
from maxhyp.errors import ParseError, ValidationError

BASE = """
[run]
system = ucm10
scenario = shear1d_mode
cfl = 0.5
t_end = 0.1

[params]
lambda = 1   # relaxation time

[scenario]
n = 64
"""


def test_parse_base():
    pc = parse_config(BASE)
    assert pc.run.cfl == 0.5 and pc.run.params.lam == 1.0
    assert pc.scenario.get("n") == 64
    assert pc.output_dir == "maxhyp_out"
    assert pc.echo()["params"] == {"lambda": 1.0}


def test_lambda_inf_echoed_as_string():
    pc = parse_config(BASE.replace("lambda = 1", "lambda = inf"))
    assert math.isinf(pc.run.params.lam)
    assert pc.echo()["params"]["lambda"] == "inf"


def test_unknown_key_suggests_spelling():
    with pytest.raises(ParseError) as exc:
        parse_config(BASE.replace("lambda = 1", "lamda = 1"))
    assert exc.value.line == 9
    assert "did you mean 'lambda'" in str(exc.value)


@pytest.mark.parametrize("text, match", [
    ("[runn]\nsystem = ucm10\n", "did you mean 'run'"),
    ("system = ucm10\n", "outside of any section"),
    ("[run]\nsystem\n", "key = value"),
    ("[run]\ncfl = 0.5\ncfl = 0.4\n", "duplicate key"),
    ("[run]\n[run]\n", "duplicate section"),
    ("[run]\ncfl = fast\n", "bad value"),
    ("[run]\ncfl = nan\n", "bad value"),
    ("[run]\ncfl =\n", "empty value"),
])
def test_parse_errors(text, match):
    with pytest.raises(ParseError, match=match):
        parse_sections(text)


@pytest.mark.parametrize("old, new, field", [
    ("cfl = 0.5", "cfl = 1.5", "cfl"),
    ("system = ucm10", "system = elasto7", "system"),
    ("n = 64", "n = 2", "n"),
    ("n = 64", "samples = 10", "samples"),
    ("lambda = 1", "lambda = -1", "lambda"),
])
def test_validation_errors(old, new, field):
    with pytest.raises(ValidationError) as exc:
        parse_config(BASE.replace(old, new))
    assert exc.value.field == field


def test_missing_required():
    with pytest.raises(ValidationError, match="system"):
        parse_config("[run]\nscenario = shear1d_mode\n")


def test_sweep_lambdas_span():
    text = ("[run]\nsystem = ucm10\nscenario = limit_sweep\n[scenario]\n"
            "lambdas = 0.01, 1, 10\n")
    with pytest.raises(ValidationError, match="4 decades"):
        parse_config(text)
    pc = parse_config(text.replace("0.01, 1, 10", "1e-3, 1, 10"))
    assert pc.scenario.get("lambdas") == (1e-3, 1.0, 10.0)


def test_output_dir_override():
    pc = parse_config(BASE + "[output]\ndir = here\n")
    assert pc.output_dir == "here"
    assert parse_config(BASE + "[output]\ndir = here\n", "there").output_dir == "there"
