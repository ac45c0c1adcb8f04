"""Ideal-gas thermodynamics for the Lagrangian micropolar model.

Pressure, internal energy and entropy follow

    p = R theta / v = B v^(-gamma) exp((gamma - 1) s / R),   e = R theta / (gamma - 1)

and the acoustic characteristic speeds in mass coordinates are
lambda_{-/+} = -/+ sqrt(gamma p / v).  Everything here is a pure function
of its arguments and accepts numpy arrays as well as scalars.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np


class DomainError(ValueError):
    """Raised when a thermodynamic function is evaluated outside v, theta > 0."""


class Family(str, Enum):
    MINUS = "minus"
    PLUS = "plus"

    @property
    def sign(self) -> float:
        return -1.0 if self is Family.MINUS else 1.0


@dataclass(frozen=True)
class GasParams:
    """Physical constants.

    ``A`` is the microviscosity; ``B`` is the constant of the entropy form of
    the equation of state.
    """

    R: float = 1.0
    gamma: float = 5.0 / 3.0
    kappa: float = 1.0
    A: float = 1.0
    B: float = 1.0

    def __post_init__(self):
        for name in ("R", "kappa", "A", "B"):
            if not getattr(self, name) > 0:
                raise ValueError(f"GasParams.{name} must be positive, got {getattr(self, name)!r}")
        if not self.gamma > 1:
            raise ValueError(f"GasParams.gamma must exceed 1, got {self.gamma!r}")

    @property
    def cv(self) -> float:
        return self.R / (self.gamma - 1.0)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ThermoState:
    v: float
    u: float
    theta: float
    omega: float = 0.0

    def __post_init__(self):
        if not (self.v > 0 and self.theta > 0):
            raise DomainError(f"state needs v > 0 and theta > 0, got v={self.v!r}, theta={self.theta!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def _check_positive(**values):
    for name, value in values.items():
        if not np.all(np.asarray(value) > 0):
            raise DomainError(f"{name} must be positive")


def pressure(params: GasParams, v, theta):
    _check_positive(v=v, theta=theta)
    return params.R * theta / v


def internal_energy(params: GasParams, theta):
    _check_positive(theta=theta)
    return params.R * theta / (params.gamma - 1.0)


def entropy(params: GasParams, v, theta):
    _check_positive(v=v, theta=theta)
    return params.R / (params.gamma - 1.0) * np.log(params.R * theta / params.B) + params.R * np.log(v)


def pressure_from_entropy(params: GasParams, v, s):
    _check_positive(v=v)
    return params.B * v ** (-params.gamma) * np.exp((params.gamma - 1.0) * s / params.R)


def char_speed(params: GasParams, v, theta, family: Family | str):
    """Acoustic speed -/+ sqrt(gamma p / v) of the given family."""
    family = Family(family)
    return family.sign * np.sqrt(params.gamma * pressure(params, v, theta) / v)


def char_speed_entropy_form(params: GasParams, v, s, family: Family | str):
    family = Family(family)
    _check_positive(v=v)
    g = params.gamma
    return family.sign * np.sqrt(params.B * g * v ** (-g - 1.0) * np.exp((g - 1.0) * s / params.R))


def isentrope_constant(params: GasParams, v, theta):
    """K with |lambda(eta, s)| = K eta^(-(gamma+1)/2) along the isentrope through (v, theta)."""
    g = params.gamma
    return np.sqrt(g * pressure(params, v, theta) * v**g)
