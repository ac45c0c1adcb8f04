"""Run configuration: YAML file -> validated pydantic model, with dotted-key overrides."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, field_validator, model_validator

from .riemann import EndStates
from .thermo import GasParams, ThermoState

log = logging.getLogger(__name__)


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class GasConfig(_Model):
    R: PositiveFloat = 1.0
    gamma: float = Field(5.0 / 3.0, gt=1.0)
    kappa: PositiveFloat = 1.0
    A: PositiveFloat = 1.0
    B: PositiveFloat = 1.0

    def to_params(self) -> GasParams:
        return GasParams(R=self.R, gamma=self.gamma, kappa=self.kappa, A=self.A, B=self.B)


class StateConfig(_Model):
    v: PositiveFloat
    u: float = 0.0
    theta: PositiveFloat

    def to_state(self) -> ThermoState:
        return ThermoState(v=self.v, u=self.u, theta=self.theta)


class EndStatesConfig(_Model):
    left: StateConfig = StateConfig(v=2.0, u=0.0, theta=1.0)
    right: StateConfig = StateConfig(v=2.2, u=0.002643238885948512, theta=1.1)
    omega_far: tuple[float, float] = (0.0, 0.0)
    delta_cap: PositiveFloat = 0.2

    def to_end_states(self) -> EndStates:
        return EndStates(self.left.to_state(), self.right.to_state(), tuple(self.omega_far))


class FieldToggles(_Model):
    phi: bool = True
    psi: bool = True
    zeta: bool = True
    omega: bool = True


class PerturbationConfig(_Model):
    amplitude: float = Field(1e-2, ge=0.0)
    width: PositiveFloat = 1.0
    center: float = 0.0
    fields: FieldToggles = FieldToggles()


class GridConfig(_Model):
    L: PositiveFloat = 150.0
    n: int = Field(4096, ge=16)
    reconstruction: Literal["linear", "minmod", "constant"] = "linear"

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n):
        if n & (n - 1):
            log.warning("grid.n = %d is not a power of two", n)
        return n


class TimeConfig(_Model):
    T_final: PositiveFloat = 200.0
    snapshot_cadence: PositiveFloat = 50.0
    diagnostic_cadence: PositiveFloat = 1.0
    safety: float = Field(0.4, gt=0.0, le=1.0)


class ProfileConfig(_Model):
    Xi: Optional[PositiveFloat] = None
    bvp_n: int = Field(4001, ge=5)
    bvp_tol: PositiveFloat = 1e-10
    pattern_tol: PositiveFloat = 1e-12
    boundary_tol: PositiveFloat = 1e-8


class ManufacturedConfig(_Model):
    L: PositiveFloat = 4.0
    T_final: PositiveFloat = 0.05
    n_list: list[PositiveInt] = [512, 1024, 2048]
    min_order: PositiveFloat = 1.9


class DiagnosticsConfig(_Model):
    alpha: Optional[PositiveFloat] = None
    fit_t_min: PositiveFloat = 1.0
    fit_t_max: PositiveFloat = 100.0
    fit_samples: int = Field(9, ge=4)
    # log-log slope windows [lo, hi] for the remainder norms; null means unbounded
    windows: dict[str, tuple[Optional[float], Optional[float]]] = {
        "R1_linf": (-1.65, -1.35),
        "R1_l1": (-1.15, -0.85),
        "R1_l2": (-1.4, -1.1),
        "R2_l1": (None, -0.75),
    }
    residual_dx: PositiveFloat = 0.01
    # strong enough rarefactions for the residual rates to be asymptotic on [1, 100]
    residual_end_states: EndStatesConfig = EndStatesConfig(
        left=StateConfig(v=0.5, u=0.0, theta=1.0),
        right=StateConfig(v=0.55, u=1.003139334500865, theta=1.1),
    )
    manufactured: ManufacturedConfig = ManufacturedConfig()

    @model_validator(mode="after")
    def _window(self):
        if self.fit_t_max <= self.fit_t_min:
            raise ValueError("fit_t_max must exceed fit_t_min")
        return self


class OutputConfig(_Model):
    directory: Optional[str] = None
    formats: list[Literal["csv", "json"]] = ["csv", "json"]
    snapshots: bool = True


class RunConfig(_Model):
    gas: GasConfig = GasConfig()
    end_states: EndStatesConfig = EndStatesConfig()
    perturbation: PerturbationConfig = PerturbationConfig()
    grid: GridConfig = GridConfig()
    time: TimeConfig = TimeConfig()
    profiles: ProfileConfig = ProfileConfig()
    diagnostics: DiagnosticsConfig = DiagnosticsConfig()
    output: OutputConfig = OutputConfig()

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.model_dump(mode="json"), sort_keys=False)

    def bvp_options(self) -> dict:
        return {"Xi": self.profiles.Xi, "n": self.profiles.bvp_n, "tol": self.profiles.bvp_tol}


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``KEY=VALUE`` strings with dotted keys; values are parsed as YAML scalars."""
    for item in overrides or ():
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form KEY=VALUE")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ValueError(f"override {item!r}: {part!r} is not a section")
        node[parts[-1]] = yaml.safe_load(raw)
    return data


def _merge(base: dict, update: dict) -> dict:
    for key, val in update.items():
        if isinstance(val, dict) and isinstance(base.get(key), dict):
            _merge(base[key], val)
        else:
            base[key] = val
    return base


def load_config(path: str | Path | None = None, overrides=()) -> RunConfig:
    """Defaults, updated by the YAML file at ``path``, updated by ``overrides``."""
    data = RunConfig().model_dump(mode="json")
    if path is not None:
        loaded = yaml.safe_load(Path(path).read_text()) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"{path}: top level must be a mapping")
        _merge(data, loaded)
    return RunConfig.model_validate(apply_overrides(data, overrides))
