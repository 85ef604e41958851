"""Flat ``key = value`` model configuration files and model construction.

Keys carry their unit as a suffix (``r0_cm``, ``d_bar``, ``e_bar2``...).
Values are converted to SI once, when the models are built.
"""

from __future__ import annotations

from os import PathLike
from pathlib import Path
from typing import Any

from .actuator import ActuatorConfig, init_contraction
from .core import BAR, MuscleGeometry, PamError, convert
from .muscles import (
    AndrikopoulosParams,
    HoganParams,
    KTable,
    ModifiedMcKibbenParams,
    PolynomialFestoParams,
    RationalFestoParams,
    TheoreticalMcKibben,
)

MODEL_KINDS = ("hogan", "mckibben", "modified", "andrikopoulos", "festo", "polynomial")

# key -> value type; units are fixed by the suffix
NUMERIC_KEYS = (
    "r0_cm",
    "l0_cm",
    "alpha0_deg",
    "c_bar",
    "d_bar",
    "e_bar2",
    "q",
    "f_max_N",
    "eps_max",
    "R_cm",
    "eps0",
    "eps_threshold",
    "p_min_bar",
    "p_max_bar",
)
LIST_KEYS = ("poly_coeffs_bar", "k_table_bar")
KEYS = ("model",) + NUMERIC_KEYS + LIST_KEYS
UNIT_SUFFIXES = ("cm", "mm", "m", "deg", "rad", "bar", "bar2", "Pa", "kPa", "N")

# reference geometry and actuator set-ups used when nothing else is given
_FESTO_BASE = {
    "r0_cm": 1.09,
    "l0_cm": 40.0,
    "alpha0_deg": 25.5,
    "R_cm": 2.0,
    "eps_threshold": 0.025,
    "p_min_bar": 0.0,
    "p_max_bar": 5.0,
}
DEFAULTS: dict[str, dict[str, Any]] = {
    "hogan": {"f_max_N": 1500.0, "eps_max": 0.37, "l0_cm": 40.0, "R_cm": 2.0, "eps_threshold": 0.0},
    "mckibben": {
        "r0_cm": 1.0,
        "l0_cm": 40.0,
        "alpha0_deg": 23.5,
        "R_cm": 2.0,
        "eps_threshold": 0.0,
        "p_min_bar": 0.0,
        "p_max_bar": 5.0,
    },
    "festo": {**_FESTO_BASE, "c_bar": 0.0, "d_bar": -10.5, "e_bar2": -779.0},
    "modified": dict(_FESTO_BASE),
    "andrikopoulos": dict(_FESTO_BASE),
    "polynomial": dict(_FESTO_BASE),
}


class ConfigError(PamError, ValueError):
    """Malformed or inconsistent configuration."""


def _stem(key: str) -> tuple[str, str | None]:
    head, sep, tail = key.rpartition("_")
    if sep and tail in UNIT_SUFFIXES:
        return head, tail
    return key, None


def check_key(key: str) -> None:
    """Reject unknown keys, naming the expected unit when only the suffix is wrong."""
    if key in KEYS:
        return
    stem, _ = _stem(key)
    for known in KEYS:
        known_stem, known_unit = _stem(known)
        if known_unit and known_stem == stem:
            raise ConfigError(f"unit-suffix mismatch: {key!r} must be given as {known!r}")
    raise ConfigError(f"unknown configuration key {key!r}")


def _parse_value(key: str, raw: str) -> Any:
    if key == "model":
        value = raw.strip().strip("\"'")
        if value not in MODEL_KINDS:
            raise ConfigError(f"unknown model {value!r}; expected one of {', '.join(MODEL_KINDS)}")
        return value
    raw = raw.strip().strip("[]")
    try:
        if key == "poly_coeffs_bar":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if key == "k_table_bar":
            pairs = []
            for item in raw.split(","):
                if item.strip():
                    p, k = item.split(":")
                    pairs.append((float(p), float(k)))
            return tuple(pairs)
        return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    values: dict[str, Any] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{line_no}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        try:
            check_key(key)
            if key in values:
                raise ConfigError(f"duplicate key {key!r}")
            values[key] = _parse_value(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{line_no}: {exc}") from None
    return values


def load_config(path: str | PathLike) -> dict[str, Any]:
    path = Path(path)
    return parse_config_text(path.read_text(encoding="utf-8"), str(path))


def resolve(kind: str, values: dict[str, Any]) -> dict[str, Any]:
    """Reference defaults for ``kind`` overlaid with the given values."""
    if kind not in MODEL_KINDS:
        raise ConfigError(f"unknown model {kind!r}; expected one of {', '.join(MODEL_KINDS)}")
    merged = dict(DEFAULTS[kind])
    merged.update({k: v for k, v in values.items() if v is not None})
    return merged


def _require(values: dict[str, Any], *keys: str) -> None:
    missing = [k for k in keys if k not in values]
    if missing:
        raise ConfigError(f"missing configuration value(s): {', '.join(missing)}")


def build_geometry(values: dict[str, Any]) -> MuscleGeometry:
    _require(values, "r0_cm", "l0_cm", "alpha0_deg")
    return MuscleGeometry.from_human(values["r0_cm"], values["l0_cm"], values["alpha0_deg"])


def _k_table(values: dict[str, Any]) -> KTable:
    _require(values, "k_table_bar")
    pairs = sorted(values["k_table_bar"])
    return KTable(tuple(p * BAR for p, _ in pairs), tuple(k for _, k in pairs))


def build_muscle(kind: str, values: dict[str, Any]):
    """Muscle model of the given kind from human-unit values (already resolved)."""
    if kind == "hogan":
        _require(values, "f_max_N", "eps_max", "l0_cm")
        return HoganParams(values["f_max_N"], values["eps_max"], convert(values["l0_cm"], "cm", "m"))
    geom = build_geometry(values)
    if kind == "mckibben":
        return TheoreticalMcKibben(geom)
    if kind == "modified":
        return ModifiedMcKibbenParams(geom, _k_table(values))
    if kind == "andrikopoulos":
        _require(values, "q")
        return AndrikopoulosParams(geom, values["q"], _k_table(values))
    if kind == "festo":
        _require(values, "c_bar", "d_bar", "e_bar2")
        return RationalFestoParams(
            geom, c=values["c_bar"] * BAR, d=values["d_bar"] * BAR, e=values["e_bar2"] * BAR * BAR
        )
    if kind == "polynomial":
        _require(values, "poly_coeffs_bar")
        return PolynomialFestoParams(geom, tuple(c * BAR for c in values["poly_coeffs_bar"]))
    raise ConfigError(f"unknown model {kind!r}")


def build_actuator(kind: str, values: dict[str, Any]) -> ActuatorConfig:
    """Actuator for ``kind`` in {hogan, mckibben, festo}; eps0 defaults to half the maximum contraction."""
    muscle = build_muscle(kind, values)
    p_min = values.get("p_min_bar", 0.0) * BAR
    p_max = values.get("p_max_bar", 5.0) * BAR
    eps0 = values.get("eps0")
    if eps0 is None:
        if isinstance(muscle, RationalFestoParams):
            eps0 = init_contraction(muscle, p_max)
        elif isinstance(muscle, HoganParams):
            eps0 = muscle.eps_max / 2.0
        elif isinstance(muscle, TheoreticalMcKibben):
            eps0 = muscle.geometry.eps_max_theoretical / 2.0
        else:
            raise ConfigError(f"no actuator model for muscle kind {kind!r}")
    _require(values, "R_cm")
    return ActuatorConfig(
        R=convert(values["R_cm"], "cm", "m"),
        eps0=eps0,
        muscle=muscle,
        eps_threshold=values.get("eps_threshold", 0.025),
        p_min=p_min,
        p_max=p_max,
    )
