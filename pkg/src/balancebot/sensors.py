"""Sensor models: four IR floor-distance sensors and two shaft encoders.

The IR sensors sit q below the axle at longitudinal offsets +s (front pair)
and -s (back pair), looking body-down; their floor distance is
(r - q*cos(theta) +/- s*sin(theta)) / cos(theta), so the calibrated
front-minus-back difference is exactly 2*s*tan(theta). Encoders count
wheel-shaft ticks, truncated toward zero.
"""

from dataclasses import dataclass
from math import isfinite, pi

from balancebot import _core
from balancebot.errors import ConfigError, FallenOver
from balancebot.plant import FALL_ANGLE, PlantParams, PlantState


@dataclass(frozen=True)
class SensorGeometry:
    """Mounting geometry and digitization of the sensor suite."""

    s: float = 0.08
    q: float = 0.02
    N: int = 360
    adc_levels: int = 0
    adc_range: float = 0.5

    def __post_init__(self):
        checks = [
            (self.s > 0, "s > 0"),
            (self.q >= 0, "q >= 0"),
            (self.N >= 1, "N >= 1"),
            (self.adc_levels == 0 or self.adc_levels >= 2, "adc_levels == 0 or adc_levels >= 2"),
            (self.adc_range > 0, "adc_range > 0"),
        ]
        for ok, inv in checks:
            if not ok:
                raise ConfigError(f"sensor geometry violates {inv}")


@dataclass(frozen=True)
class NoiseConfig:
    """Measurement noise; sigma applies per IR channel, encoders stay exact."""

    ir_sigma: float = 0.0005

    def __post_init__(self):
        if not self.ir_sigma >= 0:
            raise ConfigError("noise config violates ir_sigma >= 0")


@dataclass(frozen=True)
class SensorFrame:
    """One tick of raw measurements."""

    ir_front: tuple
    ir_back: tuple
    enc_left: int
    enc_right: int


@dataclass(frozen=True)
class Calibration:
    """Per-sensor biases captured at upright rest, subtracted downstream."""

    ir_bias: tuple = (0.0, 0.0, 0.0, 0.0)
    enc_zero: tuple = (0, 0)

    def __post_init__(self):
        if not all(isfinite(v) for v in self.ir_bias):
            raise ConfigError("calibration violates finite ir_bias")


def check_geometry(params: PlantParams, geom: SensorGeometry) -> None:
    """Cross-invariant between plant and geometry: the IR heads clear the floor."""
    if not geom.q < params.r:
        raise ConfigError("sensor geometry violates 0 <= q < r")


def ir_distance(params: PlantParams, geom: SensorGeometry, theta: float, which: str) -> float:
    """Ideal floor distance of one IR pair ('front' or 'back') at tilt theta."""
    if abs(theta) >= FALL_ANGLE:
        raise FallenOver(f"|theta| = {abs(theta):.3f} >= pi/2")
    front, back = _core.ir_pair(params.r, geom.q, geom.s, theta)
    if which == "front":
        value = front
    elif which == "back":
        value = back
    else:
        raise ValueError(f"which must be 'front' or 'back', not {which!r}")
    if value <= 0:
        raise FallenOver(f"{which} IR distance {value:.4f} <= 0 at theta = {theta:.3f}")
    return value


def tilt_proxy(frame: SensorFrame, cal: Calibration) -> float:
    """Bias-corrected front-pair mean minus back-pair mean."""
    front = (
        (frame.ir_front[0] - cal.ir_bias[0]) + (frame.ir_front[1] - cal.ir_bias[1])
    ) / 2.0
    back = (
        (frame.ir_back[0] - cal.ir_bias[2]) + (frame.ir_back[1] - cal.ir_bias[3])
    ) / 2.0
    return front - back


def encoder_read(params: PlantParams, geom: SensorGeometry, p: float, cal: Calibration) -> tuple:
    """(left, right) tick counts at base position p, zeroed by calibration.

    Wheel angle p/r maps to N ticks per revolution, truncated toward zero;
    both wheels share the planar position.
    """
    raw = int(geom.N * (p / params.r) / (2.0 * pi))
    return (raw - cal.enc_zero[0], raw - cal.enc_zero[1])


def ticks_to_position(geom: SensorGeometry, params: PlantParams, ticks: float) -> float:
    """Ideal inverse of the encoder map; accepts fractional (averaged) ticks."""
    return 2.0 * pi * params.r * ticks / geom.N


def observe(
    params: PlantParams,
    geom: SensorGeometry,
    cal: Calibration,
    state: PlantState,
    noise: NoiseConfig,
    rng,
) -> SensorFrame:
    """Assemble one raw sensor frame from the true state.

    IR channels get independent Gaussian noise (4 draws per frame in the
    order front0, front1, back0, back1; none when sigma = 0), then optional
    ADC quantization. Encoders are digital: quantization only, no noise.
    """
    front = ir_distance(params, geom, state.theta, "front")
    back = ir_distance(params, geom, state.theta, "back")
    channels = [front, front, back, back]
    if noise.ir_sigma > 0:
        draws = rng.normal(0.0, noise.ir_sigma, size=4)
        channels = [v + e for v, e in zip(channels, draws)]
    if geom.adc_levels >= 2:
        channels = [_adc(v, geom.adc_levels, geom.adc_range) for v in channels]
    left, right = encoder_read(params, geom, state.p, cal)
    return SensorFrame(
        ir_front=(channels[0], channels[1]),
        ir_back=(channels[2], channels[3]),
        enc_left=left,
        enc_right=right,
    )


def _adc(value: float, levels: int, full_scale: float) -> float:
    clamped = min(max(value, 0.0), full_scale)
    code = round(clamped / full_scale * (levels - 1))
    return code * full_scale / (levels - 1)


def upright_calibration(params: PlantParams, geom: SensorGeometry) -> Calibration:
    """The noise-free calibration an operator captures at upright rest."""
    ideal = params.r - geom.q
    return Calibration(ir_bias=(ideal, ideal, ideal, ideal), enc_zero=(0, 0))
