"""Flat ``key = value`` experiment configuration.

Blank lines and ``#`` comments are ignored.  Recombination may be given
directly (``r1``, ``r2``) or as products with the natural log of K
(``r1_logK``, ``r2_logK``), never both for the same locus pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from sweepsim.engine import DEFAULT_EPS
from sweepsim.model import EcoParams, Geometry, ParameterError

MODES = ("simulate", "analytic", "compare", "diagnostics")


class ConfigError(ValueError):
    pass


def _int(v: str) -> int:
    return int(v)


def _levels(v: str) -> Tuple[int, ...]:
    return tuple(int(x) for x in v.replace(",", " ").split())


KEYS: Dict[str, Any] = {
    "f_A": float, "f_a": float, "D_A": float, "D_a": float,
    "C_AA": float, "C_Aa": float, "C_aA": float, "C_aa": float,
    "K": _int,
    "r1": float, "r1_logK": float, "r2": float, "r2_logK": float,
    "geometry": str,
    "d": _int,
    "n_fixed": _int,
    "master_seed": _int,
    "eps_diag": float,
    "out_csv": str,
    "out_json": str,
    "mode": str,
    "max_attempts": _int,
    "event_cap": _int,
    "upcross_levels": _levels,
}
REQUIRED = ("f_A", "f_a", "D_A", "D_a", "C_AA", "C_Aa", "C_aA", "C_aa", "K")
_TYPE_NAMES = {float: "number", _int: "integer", str: "string", _levels: "list of integers"}


@dataclass
class ExperimentConfig:
    params: EcoParams
    d: int = 1
    n_fixed: int = 100
    master_seed: int = 0
    eps_diag: float = DEFAULT_EPS
    out_csv: Optional[str] = None
    out_json: Optional[str] = None
    mode: str = "compare"
    max_attempts: Optional[int] = None
    event_cap: Optional[int] = None
    upcross_levels: Tuple[int, ...] = (5, 10, 20)
    raw: Dict[str, Any] = field(default_factory=dict)

    def echo(self) -> Dict[str, Any]:
        out = dict(self.raw)
        out.update(mode=self.mode, master_seed=self.master_seed, r1=self.params.r1,
                   r2=self.params.r2, geometry=self.params.geometry.value, d=self.d,
                   n_fixed=self.n_fixed, eps_diag=self.eps_diag)
        if "upcross_levels" in out:
            out["upcross_levels"] = list(out["upcross_levels"])
        return out


def parse_config(text: str) -> ExperimentConfig:
    values: Dict[str, Any] = {}
    lines: Dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split(sep, 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {lines[key]})")
        conv = KEYS[key]
        try:
            values[key] = conv(value)
        except ValueError:
            raise ConfigError(
                f"line {lineno}: {key}: expected {_TYPE_NAMES[conv]}, got {value!r}"
            ) from None
        lines[key] = lineno

    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")
    for j in ("1", "2"):
        direct, scaled = f"r{j}", f"r{j}_logK"
        if direct in values and scaled in values:
            raise ConfigError(
                f"line {lines[scaled]}: conflicting keys {direct!r} (line {lines[direct]}) "
                f"and {scaled!r}"
            )
        if direct not in values and scaled not in values:
            raise ConfigError(f"missing required key {direct!r} or {scaled!r}")

    K = values["K"]
    if K < 1:
        raise ConfigError(f"line {lines['K']}: K must be >= 1")
    r = {}
    for j in ("1", "2"):
        if f"r{j}" in values:
            r[j] = values[f"r{j}"]
        elif values[f"r{j}_logK"] == 0:
            r[j] = 0.0
        elif K == 1:
            raise ConfigError(f"line {lines[f'r{j}_logK']}: r{j}_logK needs K > 1")
        else:
            r[j] = values[f"r{j}_logK"] / math.log(K)

    geometry = values.get("geometry", "adjacent")
    try:
        geometry = Geometry(geometry.lower())
    except ValueError:
        raise ConfigError(
            f"line {lines['geometry']}: geometry must be 'adjacent' or 'separated', got {geometry!r}"
        ) from None
    mode = values.get("mode", "compare")
    if mode not in MODES:
        raise ConfigError(f"line {lines['mode']}: mode must be one of {', '.join(MODES)}")

    try:
        params = EcoParams(
            f_A=values["f_A"], f_a=values["f_a"], D_A=values["D_A"], D_a=values["D_a"],
            C=((values["C_AA"], values["C_Aa"]), (values["C_aA"], values["C_aa"])),
            K=K, r1=r["1"], r2=r["2"], geometry=geometry,
        )
    except ParameterError as exc:
        raise ConfigError(f"invalid parameters: {exc}") from None

    cfg = ExperimentConfig(params=params, mode=mode, raw=values)
    for key in ("d", "n_fixed", "master_seed", "eps_diag", "out_csv", "out_json",
                "max_attempts", "event_cap", "upcross_levels"):
        if key in values:
            setattr(cfg, key, values[key])
    check_config(cfg, lines)
    return cfg


def check_config(cfg: ExperimentConfig, lines: Optional[Dict[str, int]] = None) -> None:
    lines = lines or {}

    def where(key):
        return f"line {lines[key]}: " if key in lines else ""

    problems: List[str] = []
    if cfg.d < 1:
        problems.append(f"{where('d')}d must be >= 1")
    if cfg.mode in ("simulate", "compare") and cfg.n_fixed < 1:
        problems.append(f"{where('n_fixed')}n_fixed must be >= 1 in {cfg.mode} mode")
    if not 0 < cfg.eps_diag < 1:
        problems.append(f"{where('eps_diag')}eps_diag must lie in (0, 1)")
    if problems:
        raise ConfigError("; ".join(problems))


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
