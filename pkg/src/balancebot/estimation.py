"""Estimator chain: leaky differentiator and per-tick state assembly.

The differentiator is y <- alpha*y + sign*(1-alpha)*(x_i - x_prev)/t_d, a
first-order low-pass over the raw finite difference (time constant
t_d/(1-alpha), 100 ms at the defaults). The estimator turns each sensor
frame into the controller's view (x, v, d, d_prime).
"""

from dataclasses import dataclass, replace

from balancebot import _core
from balancebot.errors import ConfigError
from balancebot.sensors import (
    Calibration,
    SensorFrame,
    SensorGeometry,
    ticks_to_position,
    tilt_proxy,
)
from balancebot.plant import PlantParams


@dataclass(frozen=True)
class DifferentiatorConfig:
    alpha: float = 0.99
    t_d: float = 0.001
    sign: int = 1

    def __post_init__(self):
        checks = [
            (0 <= self.alpha < 1, "0 <= alpha < 1"),
            (self.t_d > 0, "t_d > 0"),
            (self.sign in (1, -1), "sign in {+1, -1}"),
        ]
        for ok, inv in checks:
            if not ok:
                raise ConfigError(f"differentiator config violates {inv}")


@dataclass(frozen=True)
class DifferentiatorState:
    y: float = 0.0
    x_prev: float = 0.0
    primed: bool = False


@dataclass(frozen=True)
class EstimatedState:
    """Controller inputs: travel x, speed v, tilt proxy d, tilt rate d_prime."""

    x: float = 0.0
    v: float = 0.0
    d: float = 0.0
    d_prime: float = 0.0


def diff_step(
    cfg: DifferentiatorConfig, st: DifferentiatorState, x_i: float
) -> tuple:
    """One differentiator update; the first (unprimed) call returns y = 0."""
    if not st.primed:
        return DifferentiatorState(y=0.0, x_prev=x_i, primed=True), 0.0
    y = _core.leaky_diff(cfg.alpha, cfg.t_d, float(cfg.sign), st.y, st.x_prev, x_i)
    return DifferentiatorState(y=y, x_prev=x_i, primed=True), y


class Estimator:
    """Folds sensor frames into EstimatedState, one frame per tick.

    Owns the two differentiator states (one over x, one over d); reset()
    discards all history.
    """

    def __init__(
        self,
        params: PlantParams,
        geom: SensorGeometry,
        cal: Calibration,
        diff_cfg: DifferentiatorConfig = DifferentiatorConfig(),
    ):
        self._params = params
        self._geom = geom
        self._cal = cal
        self._cfg = diff_cfg
        self._v_state = DifferentiatorState()
        self._d_state = DifferentiatorState()

    def reset(self) -> None:
        self._v_state = DifferentiatorState()
        self._d_state = DifferentiatorState()

    def update(self, frame: SensorFrame) -> EstimatedState:
        mean_ticks = (frame.enc_left + frame.enc_right) / 2.0
        x = ticks_to_position(self._geom, self._params, mean_ticks)
        d = tilt_proxy(frame, self._cal)
        self._v_state, v = diff_step(self._cfg, self._v_state, x)
        self._d_state, d_prime = diff_step(self._cfg, self._d_state, d)
        return EstimatedState(x=x, v=v, d=d, d_prime=d_prime)
