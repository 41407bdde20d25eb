"""Job configuration files for the command line."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import ConfigInvalid
from .geometry import StripGeometry
from .quantization import Basepoint

_SYMBOL = re.compile(r"^[ab][1-8]$")
_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")

FORMATS = ("json", "tsv")


def parse_param(value: Any, where: str):
    """A parameter is a symbol "a1".."b8", a number, or a rational string "1/10"."""
    if isinstance(value, bool):
        raise ConfigInvalid(f"{where}: booleans are not parameters")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        if _SYMBOL.match(value):
            return value
        if _RATIONAL.match(value):
            return Fraction(value)
        raise ConfigInvalid(f"{where}: {value!r} is neither a symbol like 'a1' nor a rational like '1/10'")
    raise ConfigInvalid(f"{where}: unsupported parameter {value!r}")


def _param_json(p):
    if isinstance(p, Fraction):
        return str(p) if p.denominator != 1 else p.numerator
    return p


@dataclass(frozen=True)
class GeometryConfig:
    alphas: tuple = ()
    betas: tuple = ()
    framing: int = 0

    def build(self) -> StripGeometry:
        return StripGeometry(self.alphas, self.betas, self.framing)


@dataclass(frozen=True)
class NumericConfig:
    q: float
    x: float
    residues: int = 25
    terms: int = 25
    values: dict = field(default_factory=dict)  # numeric values of symbolic parameters

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ConfigInvalid(f"numeric.q must lie in (0, 1), got {self.q}")
        if self.residues < 0 or self.terms < 0:
            raise ConfigInvalid("numeric.residues and numeric.terms must be >= 0")


@dataclass(frozen=True)
class JobConfig:
    geometry: GeometryConfig
    basepoint: Basepoint = Basepoint.INF
    x_order: int = 6
    t_order: int = 12
    numeric: NumericConfig | None = None
    format: str = "json"
    name: str = ""

    def __post_init__(self):
        if self.x_order < 0:
            raise ConfigInvalid(f"truncation.x_order must be >= 0, got {self.x_order}")
        if self.t_order < 1:
            raise ConfigInvalid(f"truncation.t_order must be >= 1, got {self.t_order}")
        if self.format not in FORMATS:
            raise ConfigInvalid(f"format must be one of {FORMATS}, got {self.format!r}")
        geom = self.geometry.build()
        if self.basepoint is Basepoint.ONE and geom.f < -1:
            raise ConfigInvalid(f"basepoint 1 needs framing >= -1, got {geom.f}")
        if self.numeric is not None and self.numeric.values:
            names = set(geom.alphas + geom.betas) if geom.symbolic else set()
            extra = sorted(set(self.numeric.values) - names)
            if extra:
                raise ConfigInvalid(f"numeric.values names unknown parameters {extra}")
            missing = sorted(names - set(self.numeric.values))
            if missing:
                raise ConfigInvalid(f"numeric.values misses {missing}")

    @property
    def geom(self) -> StripGeometry:
        return self.geometry.build()

    def numeric_geom(self) -> StripGeometry | None:
        """The geometry with symbols replaced by numeric.values; None when not possible."""
        geom = self.geom
        if not geom.symbolic:
            return geom
        if self.numeric is None:
            return None
        vals = self.numeric.values
        if not all(p in vals for p in geom.alphas + geom.betas):
            return None
        return StripGeometry(tuple(vals[p] for p in geom.alphas), tuple(vals[p] for p in geom.betas), geom.f)

    def with_overrides(self, x_order: int | None = None, t_order: int | None = None,
                       fmt: str | None = None) -> "JobConfig":
        return JobConfig(
            self.geometry,
            self.basepoint,
            self.x_order if x_order is None else x_order,
            self.t_order if t_order is None else t_order,
            self.numeric,
            self.format if fmt is None else fmt,
            self.name,
        )

    def to_dict(self) -> dict:
        out = {
            "geometry": {
                "alphas": [_param_json(p) for p in self.geometry.alphas],
                "betas": [_param_json(p) for p in self.geometry.betas],
                "framing": self.geometry.framing,
            },
            "basepoint": self.basepoint.value,
            "truncation": {"x_order": self.x_order, "t_order": self.t_order},
            "format": self.format,
        }
        if self.numeric is not None:
            nb = asdict(self.numeric)
            nb["values"] = {k: _param_json(v) for k, v in sorted(self.numeric.values.items())}
            if not nb["values"]:
                del nb["values"]
            out["numeric"] = nb
        if self.name:
            out["name"] = self.name
        return out


_TOP_KEYS = {"geometry", "basepoint", "truncation", "numeric", "format", "name"}


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalid(f"{where} must be an integer, got {value!r}")
    return value


def _real(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigInvalid(f"{where} must be a number, got {value!r}")
    return float(value)


def _unknown(d: dict, allowed: set, where: str):
    extra = sorted(set(d) - allowed)
    if extra:
        raise ConfigInvalid(f"{where}: unknown keys {extra}")


def config_from_dict(data: dict) -> JobConfig:
    if not isinstance(data, dict):
        raise ConfigInvalid("config must be a JSON object")
    _unknown(data, _TOP_KEYS, "config")
    g = data.get("geometry")
    if not isinstance(g, dict):
        raise ConfigInvalid("config.geometry is required and must be an object")
    _unknown(g, {"alphas", "betas", "framing"}, "geometry")
    alphas = tuple(parse_param(v, f"geometry.alphas[{i}]") for i, v in enumerate(g.get("alphas", [])))
    betas = tuple(parse_param(v, f"geometry.betas[{i}]") for i, v in enumerate(g.get("betas", [])))
    params = alphas + betas
    symbolic = [isinstance(p, str) for p in params]
    if any(symbolic) and not all(symbolic):
        bad = next(p for p in params if not isinstance(p, str))
        raise ConfigInvalid(f"geometry mixes symbolic and numeric parameters (numeric entry {bad!r})")
    if "framing" not in g:
        raise ConfigInvalid("geometry.framing is required")
    geometry = GeometryConfig(alphas, betas, _int(g["framing"], "geometry.framing"))
    geometry.build()  # raises ConfigInvalid on bad symbols
    try:
        bp = Basepoint.parse(data.get("basepoint", "inf"))
    except (ValueError, KeyError):
        raise ConfigInvalid(f"basepoint must be 'inf' or '1', got {data.get('basepoint')!r}") from None
    tr = data.get("truncation", {})
    if not isinstance(tr, dict):
        raise ConfigInvalid("truncation must be an object")
    _unknown(tr, {"x_order", "t_order"}, "truncation")
    numeric = None
    if data.get("numeric") is not None:
        nb = data["numeric"]
        if not isinstance(nb, dict):
            raise ConfigInvalid("numeric must be an object")
        _unknown(nb, {"q", "x", "residues", "terms", "values"}, "numeric")
        raw_vals = nb.get("values", {})
        if not isinstance(raw_vals, dict):
            raise ConfigInvalid("numeric.values must be an object")
        values = {}
        for k, v in raw_vals.items():
            p = parse_param(v, f"numeric.values[{k!r}]")
            if isinstance(p, str):
                raise ConfigInvalid(f"numeric.values[{k!r}] must be a number")
            values[k] = p
        for key in ("q", "x"):
            if key not in nb:
                raise ConfigInvalid(f"numeric.{key} is required")
        numeric = NumericConfig(
            _real(nb["q"], "numeric.q"),
            _real(nb["x"], "numeric.x"),
            _int(nb.get("residues", 25), "numeric.residues"),
            _int(nb.get("terms", 25), "numeric.terms"),
            values,
        )
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ConfigInvalid("name must be a string")
    return JobConfig(
        geometry,
        bp,
        _int(tr.get("x_order", 6), "truncation.x_order"),
        _int(tr.get("t_order", 12), "truncation.t_order"),
        numeric,
        data.get("format", "json"),
        name,
    )


def load_config(path: str | Path) -> JobConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return config_from_dict(data)
