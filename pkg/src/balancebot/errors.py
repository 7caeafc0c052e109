"""Exception types shared across the package.

The CLI maps these to distinct exit codes: ConfigError -> 2, FallenOver -> 3,
I/O problems -> 4, SynthesisFailed -> 5.
"""


class BalancebotError(Exception):
    """Base class for package errors."""


class ConfigError(BalancebotError):
    """Invalid parameter, scenario, or config document (cites the invariant)."""


class FallenOver(BalancebotError):
    """The robot has tipped past the sensors' working range."""


class IntegrationDiverged(BalancebotError):
    """The integrator produced a non-finite state."""


class SynthesisFailed(BalancebotError):
    """Gain synthesis did not converge or the closed loop is not stable."""


class ControllerError(BalancebotError):
    """A runtime command does not apply to the configured controller."""
