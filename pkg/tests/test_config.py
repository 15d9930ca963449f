import math

import pytest

from qmeasure.config import load_config, parse_config, validate
from qmeasure.errors import ConfigError, PreconditionError

BASE = """
run.kind = "decoherence"
system.lambdas = [0.0, 1.0]
bath.kind = "ohmic"
bath.b = 1.5
thermal.beta = inf
time.t_max = 4.0
time.points = 5
"""


def test_dotted_keys_and_tables_agree():
    dotted = parse_config(BASE)
    tables = parse_config(
        """
        [run]
        kind = "decoherence"
        [system]
        lambdas = [0.0, 1.0]
        [bath]
        kind = "ohmic"
        b = 1.5
        [thermal]
        beta = inf
        [time]
        t_max = 4.0
        points = 5
        """
    )
    assert dotted == tables
    assert math.isinf(dotted.beta)
    assert dotted.bath.scale == 1.5
    assert list(dotted.time.times()) == [0.0, 1.0, 2.0, 3.0, 4.0]


def test_beta_string_and_complex_rho():
    cfg = parse_config(BASE.replace("beta = inf", 'beta = "inf"') + 'system.rho = [[0.5, "0.4-0.1j"], ["0.4+0.1j", 0.5]]\n')
    assert math.isinf(cfg.beta)
    assert cfg.rho[0][1] == 0.4 - 0.1j
    validate(cfg)


@pytest.mark.parametrize(
    "text",
    [
        "run.kind = ",
        BASE + "bath.colour = 3\n",
        BASE + "mystery.key = 1\n",
        BASE.replace("time.points = 5", 'time.points = "five"'),
        BASE.replace("time.points = 5", "time.points = 5.5"),
        BASE.replace('thermal.beta = inf', 'thermal.beta = "hot"'),
    ],
)
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/scenario.toml")


@pytest.mark.parametrize(
    "extra, key",
    [
        ("time.points = 0\n", "time.points"),
        ("time.values = []\n", "time.values"),
        ("time.t_min = 5.0\n", "time.t_max"),
        ('time.spacing = "log"\n', "time.t_min"),
        ("thermal.beta = -1.0\n", "thermal.beta"),
        ("bath.n = 0.0\n", "bath.n"),
        ("bath.modes = 0\n", "bath.modes"),
        ("system.lambdas = [1.0, 1.0]\n", "system.lambdas"),
        ("system.rho = [[1.0, 0.0], [0.0, 1.0]]\n", "system.rho"),
        ('bath.method = "closed"\nthermal.beta = 2.0\n', "bath.method"),
        ('bath.kind = "discrete"\n', "bath.omegas"),
        ('run.kind = "pointer"\n', "pointer"),
        ('run.kind = "nonsense"\n', "run.kind"),
    ],
)
def test_precondition_errors_name_the_key(extra, key):
    # later keys override earlier ones in our flat view, so drop duplicates first
    lines = [l for l in BASE.splitlines() if l.split("=")[0].strip() not in {e.split("=")[0].strip() for e in extra.splitlines()}]
    cfg = parse_config("\n".join(lines) + "\n" + extra)
    with pytest.raises(PreconditionError, match=key.replace(".", r"\.")):
        validate(cfg)


def test_sweep_validation():
    cfg = parse_config(BASE + 'sweep.parameter = "b"\nsweep.values = [0.0, 1.0]\n')
    validate(cfg, "sweep")
    bad = parse_config(BASE + 'sweep.parameter = "colour"\nsweep.values = [1.0]\n')
    with pytest.raises(PreconditionError, match="sweep.parameter"):
        validate(bad, "sweep")
    bad_n = parse_config(BASE + 'sweep.parameter = "n"\nsweep.values = [1.0, -1.0]\n')
    with pytest.raises(PreconditionError, match="bath.n"):
        validate(bad_n, "sweep")


def test_oracle_validation():
    cfg = parse_config(BASE.replace('run.kind = "decoherence"', 'run.kind = "oracle-compare"'))
    with pytest.raises(PreconditionError, match="bath.kind"):
        validate(cfg)
