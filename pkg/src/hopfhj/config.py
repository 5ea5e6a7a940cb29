"""Run-configuration files: a flat key-value format with section headers.

Grammar (one entry per line)::

    config   := (blank | comment | section | entry)*
    comment  := ('#' | ';') text
    section  := '[' name ']'
    entry    := key '=' value          # whitespace around key/value ignored

Values stay strings until a command asks for a typed view. Boxes are
written as per-axis "lo hi" pairs joined by ';', e.g. ``-10 10; -5 5``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .catalog import make_problem
from .conjugate import ConvexData
from .errors import ConfigError
from .hopf import (
    CONCAVE_IN_P,
    CONVEX_IN_P,
    STRICTLY_CONCAVE_IN_P,
    UNCLASSIFIED,
    HJProblem,
    Separable,
)

__all__ = ["RunConfig", "parse_config_text", "load_config"]


def parse_config_text(text: str) -> dict:
    """Parse the config grammar into {section: {key: value}}."""
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: entry before any [section] header")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        current[key] = value.strip()
    return sections


@dataclass
class RunConfig:
    """Parsed configuration: problem definition plus per-command sections."""

    sections: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        return self.sections.get(name, {})

    # typed getters -----------------------------------------------------------

    def get_float(self, section: str, key: str, default=None) -> float:
        raw = self.section(section).get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key {key!r} in [{section}]")
            return float(default)
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None

    def get_int(self, section: str, key: str, default=None) -> int:
        raw = self.section(section).get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key {key!r} in [{section}]")
            return int(default)
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None

    def get_box(self, section: str, key: str, default=None):
        raw = self.section(section).get(key)
        if raw is None:
            if default is None:
                raise ConfigError(f"missing required key {key!r} in [{section}]")
            return default
        return parse_box(raw, where=f"[{section}] {key}")

    def build_problem(self) -> HJProblem:
        prob_cfg = self.section("problem")
        if not prob_cfg:
            raise ConfigError("config needs a [problem] section")
        if "catalog" in prob_cfg:
            overrides = {}
            if "T" in prob_cfg:
                overrides["T"] = _to_float(prob_cfg["T"], "[problem] T")
            if "q_box" in prob_cfg:
                overrides["q_box"] = parse_box(prob_cfg["q_box"], "[problem] q_box")
            if "x_box" in prob_cfg:
                overrides["x_box"] = parse_box(prob_cfg["x_box"], "[problem] x_box")
            return make_problem(prob_cfg["catalog"], **overrides)
        for req in ("n", "T", "H", "sigma", "q_box", "x_box"):
            if req not in prob_cfg:
                raise ConfigError(f"inline [problem] misses required key {req!r}")
        n = _to_int(prob_cfg["n"], "[problem] n")
        a2_name = prob_cfg.get("a2_class", UNCLASSIFIED).strip().lower()
        if a2_name == "separable":
            for req in ("g", "h", "k"):
                if req not in prob_cfg:
                    raise ConfigError("separable a2_class needs keys g, h, k")
            a2 = Separable.from_strings(prob_cfg["g"], prob_cfg["h"], prob_cfg["k"], n)
        elif a2_name in (CONVEX_IN_P, CONCAVE_IN_P, STRICTLY_CONCAVE_IN_P, UNCLASSIFIED):
            a2 = a2_name
        else:
            raise ConfigError(f"unknown a2_class {a2_name!r}")
        dom = prob_cfg.get("sigma_star_domain")
        return HJProblem(
            n=n,
            T=_to_float(prob_cfg["T"], "[problem] T"),
            H=prob_cfg["H"],
            sigma=ConvexData(prob_cfg["sigma"], parse_box(prob_cfg["x_box"], "[problem] x_box")),
            q_box=parse_box(prob_cfg["q_box"], "[problem] q_box"),
            sigma_star=prob_cfg.get("sigma_star"),
            sigma_star_domain=parse_box(dom, "[problem] sigma_star_domain") if dom else None,
            a2_class=a2,
            name=prob_cfg.get("name", "inline"),
        )


def _to_float(raw: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {raw!r}") from None


def _to_int(raw: str, where: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {raw!r}") from None


def parse_box(raw: str, where: str = "box"):
    """Parse per-axis "lo hi" pairs joined by ';' into an (n, 2) list."""
    rows = []
    for axis in raw.split(";"):
        parts = axis.replace(",", " ").split()
        if len(parts) != 2:
            raise ConfigError(f"{where}: each axis needs 'lo hi', got {axis.strip()!r}")
        lo, hi = (_to_float(p, where) for p in parts)
        if hi <= lo:
            raise ConfigError(f"{where}: axis [{lo}, {hi}] has non-positive width")
        rows.append([lo, hi])
    return rows


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"cannot read config {path!r}: {err}") from None
    return RunConfig(sections=parse_config_text(text))
