"""Experiment configuration files (TOML, one experiment per file).

Layout::

    [experiment]
    kind = "solve"        # solve | sweep_p | sweep_q | audit | tower | strip | geometry
    p = 2
    q = 1                 # number, "inf", or "p" (sweep_p only)
    nodes = 1024          # or h = 0.03125

    [domain]
    kind = "interval"
    a = 0.0
    b = 1.0

    [output]              # optional
    dir = "out"
    workers = 1

Nothing about p, q or the resolution is defaulted. Every field is validated
before any solve starts.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import tomli

from .geometry import KINDS, DomainError, DomainSpec, domain_from_dict

EXPERIMENT_KINDS = ("solve", "sweep_p", "sweep_q", "audit", "tower", "strip", "geometry")
ROUTES = ("auto", "lane_emden", "inverse_iteration", "point_sup", "radial", "one_d")

_COMMON = {"kind", "tol"}
_ALLOWED = {
    "solve": _COMMON | {"p", "q", "h", "nodes", "route"},
    "sweep_p": _COMMON | {"p", "q", "h", "betas"},
    "sweep_q": _COMMON | {"p", "q", "h", "nodes"},
    "audit": _COMMON | {"p", "q", "h", "nodes"},
    "tower": _COMMON | {"p", "q", "h", "m", "N"},
    "strip": _COMMON | {"h", "R", "R_prime"},
    "geometry": _COMMON | {"h"},
}
_REQUIRED = {
    "solve": ("p", "q"),
    "sweep_p": ("p", "q", "h"),
    "sweep_q": ("p", "q"),
    "audit": ("p", "q", "h"),
    "tower": ("p", "q", "h", "m"),
    "strip": ("h", "R"),
    "geometry": ("h",),
}
_NEEDS_DOMAIN = {"solve", "sweep_p", "sweep_q", "audit"}
_DOMAIN_KEYS = {
    "interval": {"a", "b"},
    "box": {"extents", "lower"},
    "ball": {"R", "N", "center"},
    "annulus": {"R_in", "R_out", "N", "center"},
    "tower": {"N", "m", "eps"},
    "punctured_box": {"N", "M", "eps"},
    "strip": {"alpha", "alpha2", "R"},
}
_OUTPUT_KEYS = {"dir", "workers", "plots"}


class ConfigError(ValueError):
    """Invalid configuration; the message starts with ``path:line:``."""


@dataclass
class ExperimentConfig:
    kind: str
    params: dict[str, Any]
    domain: DomainSpec | None
    domain_table: dict[str, Any] | None
    out_dir: str | None = None
    workers: int = 1
    plots: bool = False
    source: str = "<string>"
    extra: dict = field(default_factory=dict)


def _locate(text: str, table: str, key: str | None) -> int:
    """1-based line of ``key`` inside ``[table]`` (or of the table header); 0 if absent."""
    current = None
    header_line = 0
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"^\[([^\[\]]+)\]", s)
        if m:
            current = m.group(1).strip()
            if current == table:
                header_line = i
            continue
        if current == table and key is not None and re.match(rf"^{re.escape(key)}\s*=", s):
            return i
    return header_line


def _number(v, what: str, allow=()) -> float | str:
    if isinstance(v, str):
        if v in allow:
            return v
        if v.lower() in ("inf", "infinity") and "inf" in allow:
            return math.inf
        raise ValueError(f"{what} must be a number" + (f" or one of {list(allow)}" if allow else "") + f", got {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValueError(f"{what} must be a number, got {v!r}")
    return float(v)


def _q_value(v):
    q = _number(v, "q", allow=("inf", "p"))
    return math.inf if q == "inf" else q


def _list(v, what: str, conv) -> list:
    if not isinstance(v, list) or not v:
        raise ValueError(f"{what} must be a non-empty list")
    return [conv(x) for x in v]


def _validate(kind: str, e: dict, domain: DomainSpec | None) -> dict:
    """Semantic checks; failures raise _KeyedError naming the offending key."""
    out: dict[str, Any] = {}

    def fail(key, msg):
        raise _KeyedError(key, msg)

    def pos(key, v):
        try:
            x = _number(v, key)
        except ValueError as exc:
            fail(key, str(exc))
        if not x > 0:
            fail(key, f"{key} must be positive, got {v}")
        return x

    if "tol" in e:
        out["tol"] = pos("tol", e["tol"])
    if "h" in e:
        if kind == "strip" and e["h"] == "auto":
            out["h"] = None
        else:
            out["h"] = pos("h", e["h"])
    if "nodes" in e:
        if not isinstance(e["nodes"], int) or e["nodes"] < 2:
            fail("nodes", f"nodes must be an integer >= 2, got {e['nodes']!r}")
        out["nodes"] = int(e["nodes"])

    try:
        if kind in ("solve", "audit"):
            p = _number(e["p"], "p")
            q = _q_value(e["q"])
            if q == "p":
                q = p
            out.update(p=p, q=q)
        elif kind == "sweep_p":
            out["p"] = _list(e["p"], "p", lambda x: _number(x, "p"))
            out["q"] = _q_value(e["q"])
        elif kind == "sweep_q":
            out["p"] = _number(e["p"], "p")
            out["q"] = _list(e["q"], "q", _q_value)
        elif kind == "tower":
            out["p"] = _number(e["p"], "p")
            out["q"] = _number(e["q"], "q")
            out["m"] = _list(e["m"], "m", int)
            out["N"] = int(e.get("N", 2))
        elif kind == "strip":
            out["R"] = _list(e["R"], "R", lambda x: _number(x, "R"))
            out["R_prime"] = _list(e.get("R_prime", [2.0, 5.0, 8.0]), "R_prime", lambda x: _number(x, "R_prime"))
    except (ValueError, TypeError) as exc:
        key = str(exc).split()[0]
        fail(key if key in e else None, str(exc))

    p = out.get("p")
    if kind in ("solve", "audit", "tower"):
        if p <= 1:
            fail("p", f"p must exceed 1, got {p}")
        if out["q"] < 1:
            fail("q", f"q must be at least 1, got {out['q']}")
    if kind == "solve":
        route = e.get("route", "auto")
        if route not in ROUTES:
            fail("route", f"route must be one of {list(ROUTES)}, got {route!r}")
        out["route"] = route
        if route == "lane_emden" and not out["q"] < p:
            fail("q", f"lane_emden needs q < p, got p={p}, q={out['q']}")
        if route == "inverse_iteration" and out["q"] < p:
            fail("q", f"inverse_iteration needs q >= p, got p={p}, q={out['q']}")
        if route == "point_sup" and out["q"] != math.inf:
            fail("q", "point_sup needs q = inf")
        if route == "radial" and (domain is None or domain.kind != "ball"):
            fail("route", "the radial route needs a ball domain")
        if route == "one_d" and (domain is None or domain.kind != "interval"):
            fail("route", "the one_d route needs an interval domain")
        if "h" not in out and "nodes" not in out:
            fail("h", "give the grid spacing h or, for intervals and balls, nodes")
        if "nodes" in out and "h" not in out and domain.kind not in ("interval", "ball"):
            fail("nodes", "nodes applies to interval and ball domains only; give h")
        if out["q"] == math.inf and not p > domain.dimension:
            fail("p", f"q = inf needs p > N = {domain.dimension}, got p={p}")
    if kind == "sweep_p":
        ps = out["p"]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            fail("p", "p list must be increasing")
        q = out["q"]
        if q == math.inf and any(x <= domain.dimension for x in ps):
            fail("p", f"every p must exceed N = {domain.dimension} when q = inf")
        if q not in ("p", math.inf) and any(x <= q for x in ps):
            fail("p", f"every p must exceed q = {q}")
    if kind == "sweep_q":
        qs = out["q"]
        if any(not isinstance(x, float) for x in qs):
            fail("q", "q list entries must be numbers")
        if any(b <= a for a, b in zip(qs, qs[1:])) or qs[0] < out["p"]:
            fail("q", "q list must be increasing with min >= p")
        if not out["p"] > domain.dimension:
            fail("p", f"sweep_q needs p > N = {domain.dimension}")
        if "h" not in out and not (domain.kind == "ball" and "nodes" in out):
            fail("h", "give h, or nodes for the radial route on a ball")
    if kind == "tower":
        if out["p"] > out["N"]:
            fail("p", f"the tower experiment needs p <= N = {out['N']}")
        if not out["q"] < out["p"]:
            fail("q", f"the tower experiment needs q < p, got q={out['q']}")
        if any(m < 0 for m in out["m"]):
            fail("m", "tower levels must be nonnegative")
    if kind == "strip":
        Rs = out["R"]
        if any(b <= a for a, b in zip(Rs, Rs[1:])):
            fail("R", "R list must be increasing")
    return out


class _KeyedError(Exception):
    def __init__(self, key, msg):
        super().__init__(msg)
        self.key = key


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    def err(table, key, msg):
        return ConfigError(f"{source}:{_locate(text, table, key)}: [{table}]{'.' + key if key else ''}: {msg}")

    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"{source}:{m.group(1) if m else 0}: {exc}") from None
    for table in data:
        if table not in ("experiment", "domain", "output"):
            raise err(table, None, "unknown table")
    if "experiment" not in data:
        raise ConfigError(f"{source}:0: missing [experiment] table")
    e = data["experiment"]
    kind = e.get("kind")
    if kind not in EXPERIMENT_KINDS:
        raise err("experiment", "kind", f"kind must be one of {list(EXPERIMENT_KINDS)}, got {kind!r}")
    for key in e:
        if key not in _ALLOWED[kind]:
            raise err("experiment", key, f"unknown key for a {kind} experiment")
    for key in _REQUIRED[kind]:
        if key not in e:
            raise err("experiment", None, f"missing required key {key!r}")

    domain = None
    dt = data.get("domain")
    if kind in _NEEDS_DOMAIN:
        if dt is None:
            raise ConfigError(f"{source}:0: a {kind} experiment needs a [domain] table")
        dkind = dt.get("kind")
        if dkind not in KINDS:
            raise err("domain", "kind", f"domain kind must be one of {list(KINDS)}, got {dkind!r}")
        for key in dt:
            if key != "kind" and key not in _DOMAIN_KEYS[dkind]:
                raise err("domain", key, f"unknown key for a {dkind} domain")
        try:
            domain = domain_from_dict(dt)
        except (DomainError, KeyError, TypeError, ValueError) as exc:
            raise err("domain", None, str(exc)) from None
    elif kind == "strip":
        # the family parameter only; truncations come from the R list
        if dt is None or dt.get("kind") != "strip":
            raise ConfigError(f"{source}:{_locate(text, 'domain', None)}: a strip experiment needs "
                              "[domain] with kind = \"strip\"")
        for key in dt:
            if key not in ("kind", "alpha", "alpha2"):
                raise err("domain", key, "unknown key for a strip experiment (R belongs in [experiment])")
        try:
            domain = domain_from_dict({**dt, "R": 1.0})
        except (DomainError, KeyError, TypeError, ValueError) as exc:
            raise err("domain", None, str(exc)) from None
    elif dt is not None:
        raise err("domain", None, f"a {kind} experiment builds its own domains")

    try:
        params = _validate(kind, e, domain)
    except _KeyedError as exc:
        raise err("experiment", exc.key, str(exc)) from None

    out = data.get("output", {})
    for key in out:
        if key not in _OUTPUT_KEYS:
            raise err("output", key, "unknown key")
    workers = out.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        raise err("output", "workers", f"workers must be a positive integer, got {workers!r}")
    plots = out.get("plots", False)
    if not isinstance(plots, bool):
        raise err("output", "plots", "plots must be true or false")
    return ExperimentConfig(kind, params, domain, dt, out.get("dir"), workers, plots, source)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}:0: {exc.strerror}") from None
    return parse_config(text, str(path))
