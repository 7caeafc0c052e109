"""Nonlinear cart-pole plant: dynamics, RK4 stepping, linearization, energy.

The robot is modeled as a cart (base of mass M on wheels) carrying an
inverted pendulum (body of mass m, inertia J, center of mass l above the
axle). theta = 0 is upright and unstable; positive theta leans the body
toward -p, so a positive force (toward +p) fights a positive lean.
"""

from dataclasses import dataclass
from math import cos, isfinite, pi

import numpy as np

from balancebot import _core
from balancebot.errors import ConfigError, IntegrationDiverged


@dataclass(frozen=True)
class PlantParams:
    """Physical constants; defaults describe the desk-scale robot."""

    M: float = 1.0
    m: float = 0.5
    J: float = 0.015
    l: float = 0.3
    b: float = 0.1
    g: float = 9.81
    r: float = 0.0508

    def __post_init__(self):
        checks = [
            (self.M > 0, "M > 0"),
            (self.m > 0, "m > 0"),
            (self.l > 0, "l > 0"),
            (self.r > 0, "r > 0"),
            (self.J >= 0, "J >= 0"),
            (self.b >= 0, "b >= 0"),
            (self.g > 0, "g > 0"),
        ]
        for ok, inv in checks:
            if not ok:
                raise ConfigError(f"plant parameter violates {inv}")
        if not self.denominator > 0:
            raise ConfigError("plant parameters violate J*(M+m) + M*m*l^2 > 0")

    @property
    def denominator(self) -> float:
        """D = J(M+m) + M*m*l^2, the linearization denominator."""
        return self.J * (self.M + self.m) + self.M * self.m * self.l * self.l


@dataclass(frozen=True)
class PlantState:
    """Continuous truth state (p, theta, p_dot, theta_dot)."""

    p: float = 0.0
    theta: float = 0.0
    p_dot: float = 0.0
    theta_dot: float = 0.0

    def as_tuple(self) -> tuple:
        return (self.p, self.theta, self.p_dot, self.theta_dot)


@dataclass(frozen=True)
class StateSpace:
    """Linearized model about upright: x_dot = A x + B u, y = C x."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


def _check_finite(state: PlantState, force: float) -> None:
    if not (
        isfinite(state.p)
        and isfinite(state.theta)
        and isfinite(state.p_dot)
        and isfinite(state.theta_dot)
        and isfinite(force)
    ):
        raise ValueError("state and force must be finite")


def derivatives(params: PlantParams, state: PlantState, force: float) -> tuple:
    """State rate (p_dot, theta_dot, p_ddot, theta_ddot) at one instant."""
    _check_finite(state, force)
    ml = params.m * params.l
    c = cos(state.theta)
    det = (params.M + params.m) * (params.J + ml * params.l) - (ml * c) ** 2
    if det <= 0:
        raise ConfigError("singular mass matrix: (M+m)(J+ml^2) - (ml cos theta)^2 <= 0")
    p_ddot, theta_ddot = _core.cartpole_derivs(
        params.M, params.m, params.J, params.l, params.b, params.g,
        state.theta, state.p_dot, state.theta_dot, force,
    )
    return (state.p_dot, state.theta_dot, p_ddot, theta_ddot)


def step(params: PlantParams, state: PlantState, force: float, dt: float) -> PlantState:
    """Advance one RK4 step of length dt with the force held constant."""
    if dt <= 0:
        raise ConfigError("integrator step violates dt > 0")
    _check_finite(state, force)
    p, theta, p_dot, theta_dot = _core.rk4_step(
        params.M, params.m, params.J, params.l, params.b, params.g,
        state.p, state.theta, state.p_dot, state.theta_dot, force, dt,
    )
    if not (isfinite(p) and isfinite(theta) and isfinite(p_dot) and isfinite(theta_dot)):
        raise IntegrationDiverged(f"non-finite state after step from {state}")
    return PlantState(p, theta, p_dot, theta_dot)


def energy(params: PlantParams, state: PlantState) -> float:
    """Total mechanical energy; conserved along b = 0, F = 0 trajectories."""
    return _core.mech_energy(
        params.M, params.m, params.J, params.l, params.g,
        state.theta, state.p_dot, state.theta_dot,
    )


def linearize(params: PlantParams) -> StateSpace:
    """Closed-form (A, B, C) of the upright linearization.

    State order (p, theta, p_dot, theta_dot); output y = (p, theta).
    """
    M, m, J, l, b, g = params.M, params.m, params.J, params.l, params.b, params.g
    D = params.denominator
    A = np.array(
        [
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, m * m * g * l * l / D, -(J + m * l * l) * b / D, 0.0],
            [0.0, m * g * l * (M + m) / D, -(m * l * b) / D, 0.0],
        ]
    )
    B = np.array([[0.0], [0.0], [(J + m * l * l) / D], [m * l / D]])
    C = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    return StateSpace(A=A, B=B, C=C)


FALL_ANGLE = pi / 2
