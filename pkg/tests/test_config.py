import math
from pathlib import Path

import pytest

from pfreq.config import ConfigError, load_config, parse_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

SOLVE = """\
[experiment]
kind = "solve"
p = 2
q = 1
h = 0.0625

[domain]
kind = "box"
extents = [1.0, 1.0]
"""


def test_minimal_solve_parses():
    cfg = parse_config(SOLVE, "solve.toml")
    assert cfg.kind == "solve"
    assert cfg.params["p"] == 2 and cfg.params["q"] == 1 and cfg.params["h"] == 0.0625
    assert cfg.domain.kind == "box"


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.toml")), ids=lambda p: p.name)
def test_shipped_configs_are_valid(path):
    assert load_config(path).kind


def test_unknown_key_reports_line():
    text = SOLVE.replace("h = 0.0625", "h = 0.0625\nstepsize = 3")
    with pytest.raises(ConfigError) as exc:
        parse_config(text, "x.toml")
    msg = str(exc.value)
    assert msg.startswith("x.toml:6:") and "stepsize" in msg


def test_missing_p_is_an_error():
    with pytest.raises(ConfigError, match="missing required key 'p'"):
        parse_config(SOLVE.replace("p = 2\n", ""), "x.toml")


def test_lane_emden_route_needs_q_below_p():
    text = SOLVE.replace("q = 1", "q = 3").replace("h = 0.0625", 'h = 0.0625\nroute = "lane_emden"')
    with pytest.raises(ConfigError, match="q < p"):
        parse_config(text, "x.toml")


def test_q_inf_string():
    cfg = parse_config(SOLVE.replace("p = 2", "p = 4").replace("q = 1", 'q = "inf"'), "x.toml")
    assert cfg.params["q"] == math.inf


def test_bad_domain_reports_constraint():
    with pytest.raises(ConfigError, match="positive extents"):
        parse_config(SOLVE.replace("[1.0, 1.0]", "[1.0, -1.0]"), "x.toml")


def test_toml_syntax_error_has_location():
    with pytest.raises(ConfigError, match=r"^x\.toml:\d+"):
        parse_config(SOLVE.replace('kind = "solve"', "kind = solve"), "x.toml")


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/none.toml")


def test_strip_auto_resolution():
    cfg = load_config(CONFIGS / "strip.toml")
    assert cfg.params["h"] is None or cfg.params["h"] > 0
