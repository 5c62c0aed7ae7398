"""Experiment configuration: INI-style sections of ``key = value`` lines.

Lists are written in brackets (``N_grid = [250, 500, 1000]``) and parsed as
Python literals. A preset supplies every key; a config file overrides any
subset of them.
"""

from __future__ import annotations

import ast
import configparser
import copy
import re

from .errors import ConfigError, InputError
from .models import scenario_from_dict

PRESETS = {
    "ci": {
        "run": {"master_seed": 20140101, "trials": 100, "workers": 1, "policy": "min_norm"},
        "scenario": {"design": "gaussian_identity", "M": 5, "noise": "gaussian", "sigma": 1.0,
                     "target": "in_span", "t_star": "ones"},
        "rate": {"N_grid": [100, 200, 400, 800], "M_grid": [4, 8, 16, 32], "M_fixed_N": 1600,
                 "quantiles": [0.5, 0.9, 0.99], "x_grid": [2, 5, 10], "coverage_N": 200},
        "constants": {"kappa0": 0.5, "n_directions": 50, "n_samples": 20000},
        "prop3": {"N": 200, "M": 5, "x_grid": [2, 4, 8, 16], "trials": 2000, "c0": 20},
        "prop4": {"M": 10, "N": 50, "eta": 0.9, "xi_grid": [1, 11, 101, 1001], "trials": 200},
        "small_ball": {"N": 400, "kappa0": 0.5, "n_directions": 100, "seeds": 30},
        "multiplier": {"N": 400, "x": 10, "seeds": 200},
    },
    "desk": {
        "run": {"master_seed": 20140101, "trials": 300, "workers": 1, "policy": "min_norm"},
        "scenario": {"design": "gaussian_identity", "M": 10, "noise": "gaussian", "sigma": 1.0,
                     "target": "in_span", "t_star": "ones"},
        "rate": {"N_grid": [250, 500, 1000, 2000, 4000], "M_grid": [5, 10, 20, 40], "M_fixed_N": 4000,
                 "quantiles": [0.5, 0.9, 0.99], "x_grid": [2, 5, 10], "coverage_N": 1000},
        "constants": {"kappa0": 0.5, "n_directions": 200, "n_samples": 100000},
        "prop3": {"N": 200, "M": 5, "x_grid": [2, 4, 8, 16], "trials": 5000, "c0": 20},
        "prop4": {"M": 20, "N": 100, "eta": 0.9, "xi_grid": [1, 11, 101, 1001], "trials": 2000},
        "small_ball": {"N": 400, "kappa0": 0.5, "n_directions": 200, "seeds": 100},
        "multiplier": {"N": 400, "x": 10, "seeds": 1000},
    },
}

# fields that must be nonempty lists of positive numbers
_GRIDS = {("rate", "N_grid"), ("rate", "M_grid"), ("rate", "x_grid"), ("prop3", "x_grid"),
          ("prop4", "xi_grid"), ("rate", "quantiles")}
_POSITIVE_INTS = {("run", "trials"), ("rate", "M_fixed_N"), ("rate", "coverage_N"), ("prop3", "N"),
                  ("prop3", "M"), ("prop3", "trials"), ("prop4", "M"), ("prop4", "N"),
                  ("prop4", "trials"), ("small_ball", "N"), ("small_ball", "seeds"),
                  ("small_ball", "n_directions"), ("multiplier", "N"), ("multiplier", "seeds"),
                  ("constants", "n_directions"), ("constants", "n_samples")}


def _parse_value(raw: str):
    raw = raw.strip()
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        return raw


def _line_of(text: str, section: str, key: str):
    current = None
    for i, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        m = re.match(r"^\[(.+)\]$", s)
        if m:
            current = m.group(1).strip()
            continue
        if current == section and re.match(rf"^{re.escape(key)}\s*[=:]", s, flags=re.IGNORECASE):
            return i
    return None


def load_config(path=None, preset="ci", text=None) -> dict:
    """Resolve a config: preset values overridden by the file (or ``text``)."""
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}", field="preset")
    cfg = copy.deepcopy(PRESETS[preset])
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    if text is None:
        validate(cfg)
        return cfg
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"cannot parse config: {exc.message if hasattr(exc, 'message') else exc}",
                          line=line) from None
    for section in parser.sections():
        dest = cfg.setdefault(section, {})
        for key, raw in parser.items(section):
            dest[key] = _parse_value(raw)
    validate(cfg, text)
    return cfg


def validate(cfg: dict, text: str | None = None) -> None:
    def fail(section, key, msg):
        line = _line_of(text, section, key) if text else None
        raise ConfigError(f"[{section}] {key}: {msg}", field=f"{section}.{key}", line=line)

    for section, key in sorted(_GRIDS):
        v = cfg.get(section, {}).get(key)
        if not isinstance(v, (list, tuple)) or len(v) == 0:
            fail(section, key, "must be a nonempty list")
        if not all(isinstance(e, (int, float)) and not isinstance(e, bool) and e > 0 for e in v):
            fail(section, key, "entries must be positive numbers")
    for section, key in sorted(_POSITIVE_INTS):
        v = cfg.get(section, {}).get(key)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            fail(section, key, f"must be a positive integer, got {v!r}")
    seed = cfg["run"].get("master_seed")
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        fail("run", "master_seed", "must be an unsigned 64-bit integer")
    if cfg["run"].get("policy") != "min_norm":
        fail("run", "policy", "rate campaigns support only 'min_norm'")
    if not 0 < cfg["prop4"].get("eta", 0) < 1:
        fail("prop4", "eta", "must lie in (0, 1)")
    if any(q >= 1 for q in cfg["rate"]["quantiles"]):
        fail("rate", "quantiles", "must lie in (0, 1)")
    try:
        scenario_from_dict(cfg["scenario"])
    except InputError as exc:
        fail("scenario", "design", str(exc))


def scenario_for(cfg: dict, M=None):
    d = dict(cfg["scenario"])
    if M is not None:
        d["M"] = M
        if isinstance(d.get("t_star"), (list, tuple)):
            d["t_star"] = "ones"
    return scenario_from_dict(d)
