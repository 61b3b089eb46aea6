"""Network parameters, unit conversions and derived quantities."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path


class ConfigError(ValueError):
    """Invalid parameter set or configuration file."""


def from_decibels(x_db: float) -> float:
    """Convert a dB value to linear scale."""
    return 10.0 ** (x_db / 10.0)


def to_decibels(x: float) -> float:
    """Convert a positive linear value to dB."""
    if x <= 0:
        raise ValueError(f"cannot express {x!r} in dB")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class NetworkParams:
    """Physical and system parameters of the bipolar network.

    All values are linear scale. Defaults are the reference operating
    point: lambda=1e-3, P_t=50 dB, d0=10 m, theta=-5 dB, alpha=4,
    unit noise variances, v=0.5 and zeta=1.
    """

    lam: float = 1e-3
    p_t: float = 1e5
    d0: float = 10.0
    alpha: float = 4.0
    theta: float = 10.0 ** -0.5
    sigma2: float = 1.0
    sigma2_c: float = 1.0
    v: float = 0.5
    zeta: float = 1.0

    def __post_init__(self):
        checks = [
            (self.lam >= 0, "lam must be >= 0"),
            (self.p_t > 0, "p_t must be > 0"),
            (self.d0 > 0, "d0 must be > 0"),
            (self.alpha > 2, "alpha must be > 2"),
            (self.theta > 0, "theta must be > 0"),
            (self.sigma2 >= 0, "sigma2 must be >= 0"),
            (self.sigma2_c >= 0, "sigma2_c must be >= 0"),
            (0 < self.v <= 1, "v must lie in (0, 1]"),
            (0 < self.zeta <= 1, "zeta must lie in (0, 1]"),
        ]
        for name in ("lam", "p_t", "d0", "alpha", "theta", "sigma2", "sigma2_c", "v", "zeta"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def tau(self) -> float:
        return tau(self)

    def with_(self, **changes) -> "NetworkParams":
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkParams":
        """Build parameters from a mapping.

        Keys match field names; ``lambda`` is accepted for ``lam``. A key
        with a ``_db`` suffix (``p_t_db``, ``theta_db``, ...) is converted
        from dB. Supplying both forms of the same field is an error.
        """
        names = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            db = key.endswith("_db")
            base = key[:-3] if db else key
            if base == "lambda":
                base = "lam"
            if base == "pt":
                base = "p_t"
            if base not in names:
                raise ConfigError(f"unknown parameter {key!r}")
            if base in kwargs:
                raise ConfigError(f"parameter {base!r} given twice")
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"parameter {key!r} is not a number: {value!r}") from None
            kwargs[base] = from_decibels(value) if db else value
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "NetworkParams":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def tau(params: NetworkParams) -> float:
    """Path-loss inverse of the direct link, 1 + d0**alpha."""
    return 1.0 + params.d0 ** params.alpha


class Ordering(enum.Enum):
    BY_DISTANCE = "distance"
    BY_INSTANTANEOUS_POWER = "power"


@dataclass(frozen=True)
class SicConfig:
    """SIC depth and the order in which the simulator attempts interferers."""

    n_max: int = 1
    ordering: Ordering = Ordering.BY_DISTANCE

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 0:
            raise ConfigError("n_max must be a non-negative integer")
        object.__setattr__(self, "n_max", int(self.n_max))
        if not isinstance(self.ordering, Ordering):
            object.__setattr__(self, "ordering", Ordering(self.ordering))
