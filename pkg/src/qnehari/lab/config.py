"""Run configuration: a flat JSON object with defaults for every key."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from ..bmo import ArcFamily
from ..hardy import QuadratureSpec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class LabConfig:
    symbol: str = "suite"
    seed: int = 0
    ladder: tuple[int, ...] = (32, 64, 128, 256, 512)
    # quadrature for the volume-integral norms
    n_radial: int = 32
    n_angular: int = 128
    n_sphere: int = 8
    # Monte Carlo and search sizes
    mc_samples: int = 100_000
    hinf_samples: int = 100_000
    bilinear_random: int = 64
    bilinear_iter: int = 300
    bmo_slices: int = 32
    arc_levels: int = 8
    arc_n_theta: int = 64
    test_random: int = 50
    test_degree: int = 16
    kernel_N: int = 256
    suite_size: int = 20
    suite_degree: int = 32
    out: str = "out"
    figures: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ladder", tuple(int(n) for n in self.ladder))
        if not self.ladder or min(self.ladder) < 1:
            raise ConfigError("ladder must be a nonempty list of positive sizes")
        if list(self.ladder) != sorted(self.ladder):
            raise ConfigError("ladder must be increasing")
        for f in fields(self):
            v = getattr(self, f.name)
            if f.type == "int" and (isinstance(v, bool) or not isinstance(v, int)):
                raise ConfigError(f"{f.name} must be an integer")
        counts = (
            "n_radial n_angular n_sphere mc_samples hinf_samples bilinear_random bilinear_iter "
            "bmo_slices arc_n_theta test_random test_degree kernel_N suite_size suite_degree"
        ).split()
        for name in counts:
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.arc_levels < 0:
            raise ConfigError("arc_levels must be nonnegative")
        if self.arc_n_theta < 8:
            raise ConfigError("arc_n_theta must be at least 8")
        if not isinstance(self.symbol, str) or not self.symbol:
            raise ConfigError("symbol must be a nonempty string")
        # imported here to avoid a cycle; validates the generator name and parameters
        from .symbols import parse_symbol

        parse_symbol(self.symbol)

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(self.n_radial, self.n_angular, self.n_sphere, self.seed)

    @property
    def arcs(self) -> ArcFamily:
        return ArcFamily.dyadic(self.arc_levels, self.arc_n_theta)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["ladder"] = list(self.ladder)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "LabConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "LabConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(data)

    def override(self, **kw) -> "LabConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        try:
            return replace(self, **kw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
