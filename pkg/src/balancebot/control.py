"""Controllers and actuation: PD summing junction, full-state feedback,
LQR synthesis through a continuous algebraic Riccati solver, and the motor
model (saturation, deadband, backlash hysteresis).
"""

from dataclasses import dataclass
from math import isfinite

import numpy as np
import scipy.linalg

from balancebot.errors import ConfigError, SynthesisFailed
from balancebot.estimation import EstimatedState
from balancebot.plant import StateSpace

RICCATI_TOL = 1e-9
RICCATI_MAX_ITER = 200


@dataclass(frozen=True)
class GainSet:
    """PD summing-junction gains over (reference - x), d, d_prime, v.

    Defaults stabilize the default plant through the full sensor chain;
    they are tuned scenario configuration, not ground truth.
    """

    k_err: float = -0.05
    k_d: float = -11.4101
    k_dd: float = -2.0515
    k_v: float = 0.1117

    def __post_init__(self):
        if not all(map(isfinite, (self.k_err, self.k_d, self.k_dd, self.k_v))):
            raise ConfigError("gain set violates finite gains")


@dataclass(frozen=True)
class StateGain:
    """Full-state feedback row vector over (p, theta, p_dot, theta_dot)."""

    k: tuple

    def __post_init__(self):
        if len(self.k) != 4 or not all(isfinite(v) for v in self.k):
            raise ConfigError("state gain violates finite 4-vector k")


@dataclass(frozen=True)
class MotorModel:
    """Force actuator: normalized command in, Newtons out."""

    f_max: float = 20.0
    deadband: float = 0.0
    backlash_angle: float = 0.0

    def __post_init__(self):
        checks = [
            (self.f_max > 0, "f_max > 0"),
            (0 <= self.deadband < 1, "0 <= deadband < 1"),
            (self.backlash_angle >= 0, "backlash_angle >= 0"),
        ]
        for ok, inv in checks:
            if not ok:
                raise ConfigError(f"motor model violates {inv}")


@dataclass(frozen=True)
class BacklashState:
    """Slack position within [-backlash_angle/2, +backlash_angle/2]."""

    z: float = 0.0


def _default_q() -> tuple:
    return tuple(tuple(row) for row in np.diag([1.0, 10.0, 0.1, 0.1]).tolist())


@dataclass(frozen=True)
class LqrWeights:
    """Quadratic cost x'Qx + R u^2; Q stored as nested tuples for equality."""

    Q: tuple = None
    R: float = 1.0

    def __post_init__(self):
        Q = np.asarray(_default_q() if self.Q is None else self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise ConfigError("lqr weights violate Q square")
        if not np.array_equal(Q, Q.T):
            raise ConfigError("lqr weights violate Q = Q^T")
        if np.linalg.eigvalsh(Q).min() < -1e-12:
            raise ConfigError("lqr weights violate Q >= 0")
        if not self.R > 0:
            raise ConfigError("lqr weights violate R > 0")
        object.__setattr__(self, "Q", tuple(tuple(row) for row in Q.tolist()))

    def q_array(self) -> np.ndarray:
        return np.asarray(self.Q, dtype=float)


def pd_command(gains: GainSet, est: EstimatedState, reference: float) -> float:
    """The summing junction: position error plus tilt, tilt-rate, and speed terms."""
    return (
        gains.k_err * (reference - est.x)
        + gains.k_d * est.d
        + gains.k_dd * est.d_prime
        + gains.k_v * est.v
    )


def state_feedback(k: StateGain, state) -> float:
    """U = k . state over (p, theta, p_dot, theta_dot)."""
    return (
        k.k[0] * state[0] + k.k[1] * state[1] + k.k[2] * state[2] + k.k[3] * state[3]
    )


def care_solve(A, B, Q, R, tol: float = RICCATI_TOL, max_iter: int = RICCATI_MAX_ITER):
    """Solve A'P + PA - P B R^-1 B' P + Q = 0 for symmetric PSD P.

    Extracts the stable invariant subspace of the Hamiltonian matrix via an
    ordered real Schur decomposition, then polishes with Newton iterations
    (each a Lyapunov solve) until the residual max-norm is below
    tol * (1 + ||P||_inf). Raises SynthesisFailed if the subspace does not
    exist (pair not stabilizable) or the residual bound is never met.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    n = A.shape[0]

    R_inv = np.linalg.inv(R)
    G = B @ R_inv @ B.T
    H = np.block([[A, -G], [-Q, -A.T]])

    _, Z, sdim = scipy.linalg.schur(H, output="real", sort="lhp")
    if sdim != n:
        raise SynthesisFailed(
            f"Hamiltonian has {sdim} stable eigenvalues, expected {n}: "
            "pair (A, B) is not stabilizable"
        )
    U11 = Z[:n, :n]
    U21 = Z[n:, :n]
    try:
        P = np.linalg.solve(U11.T, U21.T).T
    except np.linalg.LinAlgError as exc:
        raise SynthesisFailed(f"stable subspace is not a graph over the state: {exc}")
    P = (P + P.T) / 2.0

    def residual(P):
        return A.T @ P + P @ A - P @ G @ P + Q

    res_norm = np.abs(residual(P)).max()
    for _ in range(max_iter):
        if res_norm < tol * (1.0 + np.abs(P).max()):
            return P
        K = R_inv @ B.T @ P
        A_cl = A - B @ K
        if np.linalg.eigvals(A_cl).real.max() >= 0:
            raise SynthesisFailed(
                f"Newton iterate lost closed-loop stability (residual {res_norm:.3e})"
            )
        P = scipy.linalg.solve_continuous_lyapunov(A_cl.T, -(Q + K.T @ R @ K))
        P = (P + P.T) / 2.0
        res_norm = np.abs(residual(P)).max()
    raise SynthesisFailed(
        f"Riccati residual {res_norm:.3e} after {max_iter} iterations "
        f"(bound {tol:.1e} * (1 + ||P||))"
    )


def lqr_gain(ss: StateSpace, w: LqrWeights) -> StateGain:
    """K = R^-1 B' P from the Riccati solution; closed loop must be stable."""
    P = care_solve(ss.A, ss.B, w.q_array(), w.R)
    K = (ss.B.T @ P) / w.R
    K = K.reshape(-1)
    eigs = np.linalg.eigvals(ss.A - ss.B @ K.reshape(1, -1))
    if eigs.real.max() >= 0:
        raise SynthesisFailed(
            f"closed loop not stable: max Re(eig) = {eigs.real.max():.3e}"
        )
    return StateGain(k=tuple(float(v) for v in K))


def motor_apply(model: MotorModel, u: float, wheel_state: BacklashState) -> tuple:
    """Map a normalized command to force through clamp, deadband, backlash.

    Backlash: commanding a direction whose slack is not taken up spends the
    call free-spinning (zero force) while the slack lands on that side;
    force transmits from the next call until the direction reverses.
    """
    u = min(max(u, -1.0), 1.0)
    if abs(u) < model.deadband:
        u = 0.0
    if u == 0.0:
        return 0.0, wheel_state
    if model.backlash_angle == 0.0:
        return u * model.f_max, wheel_state
    half = model.backlash_angle / 2.0
    side = half if u > 0 else -half
    if wheel_state.z == side:
        return u * model.f_max, wheel_state
    return 0.0, BacklashState(z=side)
