"""Deterministic cart-pole balancing workbench.

Simulates a two-wheeled self-balancing robot as a planar cart-pole: nonlinear
dynamics, IR floor-distance and shaft-encoder sensor models, a leaky-
differentiator estimator, PD and full-state-feedback controllers with LQR
synthesis, a fixed-tick closed loop with CSV traces, and a live telemetry
server for the browser cockpit.
"""

__version__ = "0.1.0"

from balancebot._core import BACKEND

__all__ = ["BACKEND", "__version__"]
