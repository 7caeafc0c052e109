"""Deterministic fixed-tick closed loop.

Each tick runs observe -> estimate -> control -> actuate -> integrate; the
controller acts on this tick's estimates (no actuation delay is modeled).
Timestamps come from an integer tick counter, never float accumulation, and
the only randomness is the seeded sensor-noise generator, so identical
scenarios produce bit-identical traces.
"""

from dataclasses import dataclass, field
from math import nan, floor, sqrt

import numpy as np

from balancebot import plant as plant_mod
from balancebot.control import (
    BacklashState,
    GainSet,
    LqrWeights,
    MotorModel,
    StateGain,
    lqr_gain,
    motor_apply,
    pd_command,
    state_feedback,
)
from balancebot.errors import ConfigError, ControllerError, FallenOver
from balancebot.estimation import DifferentiatorConfig, Estimator
from balancebot.plant import PlantParams, PlantState, linearize
from balancebot.sensors import (
    Calibration,
    NoiseConfig,
    SensorGeometry,
    check_geometry,
    observe,
    upright_calibration,
)

CSV_HEADER = "t,p,theta,p_dot,theta_dot,x_est,v_est,d,d_prime,u,force,reference"

CONTROLLER_TYPES = ("pd", "state_feedback", "lqr")


@dataclass(frozen=True)
class ControllerSpec:
    """Controller choice plus whichever parameters that choice needs."""

    type: str = "pd"
    gains: GainSet = field(default_factory=GainSet)
    k: StateGain = None
    weights: LqrWeights = field(default_factory=LqrWeights)

    def __post_init__(self):
        if self.type not in CONTROLLER_TYPES:
            raise ConfigError(
                f"controller type must be one of {', '.join(CONTROLLER_TYPES)}, "
                f"not {self.type!r}"
            )
        if self.type == "state_feedback" and self.k is None:
            raise ConfigError("controller type state_feedback requires gains k")


@dataclass(frozen=True)
class ReferenceSource:
    """Commanded base position: a constant, a step schedule, or live input."""

    mode: str = "constant"
    value: float = 0.0
    schedule: tuple = ()
    range: float = 0.5

    def __post_init__(self):
        if self.mode not in ("constant", "schedule", "live"):
            raise ConfigError(
                f"reference mode must be constant, schedule, or live, not {self.mode!r}"
            )
        if not self.range > 0:
            raise ConfigError("reference violates range > 0")
        if self.mode == "schedule":
            if not self.schedule:
                raise ConfigError("schedule reference requires a non-empty schedule")
            times = [t for t, _ in self.schedule]
            if times[0] != 0:
                raise ConfigError("schedule must start at t = 0")
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ConfigError("schedule times must be strictly increasing")


def reference_value(source: ReferenceSource, t: float, live_value: float = 0.0) -> float:
    """The commanded position at time t; schedules are right-continuous."""
    if source.mode == "constant":
        return source.value
    if source.mode == "schedule":
        current = source.schedule[0][1]
        for time, value in source.schedule:
            if time <= t:
                current = value
            else:
                break
        return current
    return min(max(live_value, -source.range), source.range)


@dataclass(frozen=True)
class Scenario:
    """Everything one episode needs; immutable and fully deterministic."""

    plant: PlantParams = field(default_factory=PlantParams)
    geometry: SensorGeometry = field(default_factory=SensorGeometry)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    motor: MotorModel = field(default_factory=MotorModel)
    controller: ControllerSpec = field(default_factory=ControllerSpec)
    estimator: DifferentiatorConfig = field(default_factory=DifferentiatorConfig)
    initial: PlantState = field(default_factory=lambda: PlantState(theta=0.05))
    reference: ReferenceSource = field(default_factory=ReferenceSource)
    duration: float = 10.0
    tick: float = 0.001
    seed: int = 42

    def __post_init__(self):
        if not self.duration > 0:
            raise ConfigError("scenario violates duration > 0")
        if not self.tick > 0:
            raise ConfigError("scenario violates tick > 0")
        check_geometry(self.plant, self.geometry)

    @property
    def tick_count(self) -> int:
        """floor(duration/tick), guarded against float-quotient dust."""
        return int(floor(self.duration / self.tick + 1e-9))


@dataclass(frozen=True)
class TraceRow:
    t: float
    p: float
    theta: float
    p_dot: float
    theta_dot: float
    x_est: float
    v_est: float
    d: float
    d_prime: float
    u: float
    force: float
    reference: float
    terminal: bool = False

    def csv_fields(self) -> tuple:
        return (
            self.t, self.p, self.theta, self.p_dot, self.theta_dot,
            self.x_est, self.v_est, self.d, self.d_prime,
            self.u, self.force, self.reference,
        )


@dataclass(frozen=True)
class Summary:
    settled: bool
    max_abs_theta: float
    rms_pos_error: float
    fell: bool

    def line(self) -> str:
        return (
            f"settled={'true' if self.settled else 'false'} "
            f"max_theta={self.max_abs_theta:.9g} "
            f"rms_pos_err={self.rms_pos_error:.9g} "
            f"fell={'true' if self.fell else 'false'}"
        )


@dataclass(frozen=True)
class EpisodeResult:
    rows: list
    summary: Summary
    fell: bool


_ZERO_CAL = Calibration()


class EpisodeRuntime:
    """One running episode: owns the state, RNG, estimator, and controller.

    Gain synthesis (for the lqr controller type) happens once at
    construction; reset() rewinds to tick 0 with the same seed, which makes
    episodes repeatable from the telemetry layer.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        ctl = scenario.controller
        if ctl.type == "lqr":
            self._k = lqr_gain(linearize(scenario.plant), ctl.weights)
        elif ctl.type == "state_feedback":
            self._k = ctl.k
        else:
            self._k = None
        self.gains = ctl.gains
        self.reset()

    def reset(self) -> None:
        sc = self.scenario
        self.n = 0
        self.state = sc.initial
        self.rng = np.random.default_rng(sc.seed)
        self.live_reference = 0.0
        self.fallen = False
        self.backlash = BacklashState()
        self.gains = sc.controller.gains
        starts_upright = sc.initial == PlantState()
        if starts_upright:
            self._cal = None  # captured from the first frame
            self._estimator = None
        else:
            self._cal = upright_calibration(sc.plant, sc.geometry)
            self._estimator = Estimator(sc.plant, sc.geometry, self._cal, sc.estimator)

    @property
    def t(self) -> float:
        return self.n * self.scenario.tick

    def set_gains(self, gains: GainSet) -> None:
        if self.scenario.controller.type != "pd":
            raise ControllerError("set_gains applies only to the pd controller")
        self.gains = gains

    def _observe_calibrated(self):
        sc = self.scenario
        frame = observe(sc.plant, sc.geometry, self._cal or _ZERO_CAL,
                        self.state, sc.noise, self.rng)
        if self._cal is None:
            self._cal = Calibration(
                ir_bias=(frame.ir_front[0], frame.ir_front[1],
                         frame.ir_back[0], frame.ir_back[1]),
                enc_zero=(frame.enc_left, frame.enc_right),
            )
            frame = type(frame)(
                ir_front=frame.ir_front,
                ir_back=frame.ir_back,
                enc_left=frame.enc_left - self._cal.enc_zero[0],
                enc_right=frame.enc_right - self._cal.enc_zero[1],
            )
            self._estimator = Estimator(sc.plant, sc.geometry, self._cal, sc.estimator)
        return frame

    def _command(self, est, ref: float) -> float:
        if self.scenario.controller.type == "pd":
            return pd_command(self.gains, est, ref)
        s = self.state
        error = (ref - s.p, -s.theta, -s.p_dot, -s.theta_dot)
        return state_feedback(self._k, error) / self.scenario.motor.f_max

    def step_once(self) -> TraceRow:
        """Run one tick and return its trace row; integrates afterward."""
        if self.fallen:
            raise FallenOver("episode already ended in a fall; reset() to restart")
        sc = self.scenario
        t = self.t
        ref = reference_value(sc.reference, t, self.live_reference)
        s = self.state
        try:
            frame = self._observe_calibrated()
        except FallenOver:
            self.fallen = True
            return TraceRow(t, s.p, s.theta, s.p_dot, s.theta_dot,
                            nan, nan, nan, nan, nan, nan, ref, terminal=True)
        est = self._estimator.update(frame)
        u_raw = self._command(est, ref)
        u = min(max(u_raw, -1.0), 1.0)
        force, self.backlash = motor_apply(sc.motor, u_raw, self.backlash)
        row = TraceRow(t, s.p, s.theta, s.p_dot, s.theta_dot,
                       est.x, est.v, est.d, est.d_prime, u, force, ref)
        self.state = plant_mod.step(sc.plant, s, force, sc.tick)
        self.n += 1
        return row


def run_episode(scenario: Scenario) -> EpisodeResult:
    """Run to duration or the first fall; returns all rows plus a summary."""
    runtime = EpisodeRuntime(scenario)
    rows = []
    for _ in range(scenario.tick_count + 1):
        row = runtime.step_once()
        rows.append(row)
        if row.terminal:
            break
    return EpisodeResult(rows=rows, summary=summarize(rows, scenario), fell=runtime.fallen)


def summarize(rows, scenario: Scenario) -> Summary:
    """Episode summary; settled means the final second stayed inside
    |theta| < 0.01 rad and |p - reference| < 0.02 m."""
    fell = bool(rows and rows[-1].terminal)
    max_abs_theta = max(abs(r.theta) for r in rows)
    rms = sqrt(sum((r.p - r.reference) ** 2 for r in rows) / len(rows))
    settled = False
    if not fell:
        t_end = rows[-1].t
        tail = [r for r in rows if r.t >= t_end - 1.0]
        settled = all(
            abs(r.theta) < 0.01 and abs(r.p - r.reference) < 0.02 for r in tail
        )
    return Summary(settled=settled, max_abs_theta=max_abs_theta,
                   rms_pos_error=rms, fell=fell)


def format_csv_value(v: float) -> str:
    return f"{v:.9g}"


def write_csv(rows, stream, downsample: int = 1) -> None:
    """Write the trace in the fixed column order, 9 significant digits.

    A downsample factor k keeps every k-th row plus the last row.
    """
    if downsample < 1:
        raise ConfigError("output violates downsample >= 1")
    stream.write(CSV_HEADER + "\n")
    last = len(rows) - 1
    for i, row in enumerate(rows):
        if i % downsample == 0 or i == last:
            stream.write(",".join(format_csv_value(v) for v in row.csv_fields()) + "\n")
