"""Symbol generators and the default symbol suite.

Symbols are named by strings ``name`` or ``name:key=value,key=value``; quaternion
values are written ``x0/x1/x2/x3`` (missing trailing components are zero).
"""
from __future__ import annotations

import inspect
from typing import Any, Callable

import numpy as np

from ..hardy import kernel
from ..quat import as_array
from ..series import TruncatedSeries
from .config import ConfigError


def _quat(v) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.ndim != 1 or len(v) > 4:
        raise ConfigError(f"not a quaternion: {v}")
    return as_array(np.pad(v, (0, 4 - len(v))))


def monomial(m: int = 1, u=(1.0,)) -> TruncatedSeries:
    """``q^m u`` with ``u`` normalised to a unit quaternion."""
    u = _quat(u)
    n = np.linalg.norm(u)
    if m < 0 or n == 0:
        raise ConfigError("monomial needs m >= 0 and a nonzero u")
    return TruncatedSeries.monomial(m, u / n)


def geometric(rho: float = 0.5, deg: int = 32) -> TruncatedSeries:
    """``sum_{n <= deg} rho^n q^n``."""
    return TruncatedSeries(rho ** np.arange(deg + 1))


def random_poly(deg: int = 32, seed: int = 0, decay: float = 1.0) -> TruncatedSeries:
    """Gaussian quaternion coefficients damped by ``decay^n``."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((deg + 1, 4)) * (decay ** np.arange(deg + 1))[:, None]
    return TruncatedSeries(c)


def kernel_symbol(w=(0.5,), N: int = 64) -> TruncatedSeries:
    """Reproducing kernel at ``w`` cut at degree ``N``."""
    return kernel(_quat(w), N)


def lacunary(base: int = 2, deg: int = 256) -> TruncatedSeries:
    """``sum_k q^(base^k)`` over ``base^k <= deg``."""
    if base < 2:
        raise ConfigError("lacunary needs base >= 2")
    c = np.zeros(deg + 1)
    k = 1
    while k <= deg:
        c[k] = 1.0
        k *= base
    return TruncatedSeries(c)


def constant(c=(1.0,)) -> TruncatedSeries:
    return TruncatedSeries.constant(_quat(c))


def zero() -> TruncatedSeries:
    return TruncatedSeries.zero()


GENERATORS: dict[str, Callable[..., TruncatedSeries]] = {
    "monomial": monomial,
    "geometric": geometric,
    "random_poly": random_poly,
    "kernel_symbol": kernel_symbol,
    "lacunary": lacunary,
    "constant": constant,
    "zero": zero,
}
SUITE = "suite"
_INT_KEYS = {"m", "deg", "seed", "N", "base", "size"}
_QUAT_KEYS = {"u", "w", "c"}


def _parse_value(key: str, text: str) -> Any:
    try:
        if key in _QUAT_KEYS:
            parts = [float(p) for p in text.split("/")]
            if len(parts) > 4:
                raise ValueError("more than four components")
            return tuple(parts + [0.0] * (4 - len(parts)))
        if key in _INT_KEYS:
            return int(text)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def parse_symbol(spec: str) -> tuple[str, dict[str, Any]]:
    name, _, rest = spec.strip().partition(":")
    if name != SUITE and name not in GENERATORS:
        raise ConfigError(f"unknown symbol generator {name!r}")
    params: dict[str, Any] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ConfigError(f"expected key=value in {item!r}")
        params[key.strip()] = _parse_value(key.strip(), val.strip())
    allowed = {"size", "deg"} if name == SUITE else set(inspect.signature(GENERATORS[name]).parameters)
    bad = sorted(set(params) - allowed)
    if bad:
        raise ConfigError(f"{name} does not take {', '.join(bad)}")
    return name, params


def build_symbol(spec: str, seed: int = 0) -> TruncatedSeries:
    """Single symbol from a spec string; ``random_poly`` takes ``seed`` if none is given."""
    name, params = parse_symbol(spec)
    if name == SUITE:
        raise ConfigError("suite names several symbols; use symbol_suite")
    if name == "random_poly":
        params.setdefault("seed", seed)
    try:
        return GENERATORS[name](**params)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def symbol_suite(size: int = 20, deg: int = 32, seed: int = 0) -> list[tuple[str, TruncatedSeries]]:
    """Random degree-``deg`` polynomials with decay rates drawn in ``[0.85, 1]``."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(size):
        decay = float(rng.uniform(0.85, 1.0))
        s = int(rng.integers(2 ** 31))
        label = f"random_poly:deg={deg},seed={s},decay={decay!r}"
        out.append((label, random_poly(deg, s, decay)))
    return out


def resolve(spec: str, seed: int, suite_size: int = 20, suite_degree: int = 32) -> list[tuple[str, TruncatedSeries]]:
    """Labelled symbols named by ``spec``."""
    name, params = parse_symbol(spec)
    if name == SUITE:
        return symbol_suite(params.get("size", suite_size), params.get("deg", suite_degree), seed)
    return [(spec, build_symbol(spec, seed))]
