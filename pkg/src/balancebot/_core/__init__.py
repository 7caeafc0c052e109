"""Kernel backend selection.

Two interchangeable implementations of the hot numeric kernels exist: a
compiled extension (balancebot._core._native) and a pure-Python twin
(balancebot._core.pure). Both are written with identical arithmetic order
and produce bit-identical results; the extension is only faster.

Selection: the BALANCEBOT_BACKEND environment variable ("native" or "pure")
forces a backend; otherwise the extension is used when importable and the
pure twin is the fallback.
"""

import os

_FORCED = os.environ.get("BALANCEBOT_BACKEND", "").strip().lower()

if _FORCED == "pure":
    from balancebot._core import pure as _impl

    BACKEND = "pure"
elif _FORCED == "native":
    from balancebot._core import _native as _impl  # noqa: F401

    BACKEND = "native"
elif _FORCED == "":
    try:
        from balancebot._core import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        from balancebot._core import pure as _impl  # type: ignore[no-redef]

        BACKEND = "pure"
else:
    raise ImportError(
        f"BALANCEBOT_BACKEND={_FORCED!r} is not a backend (use 'native' or 'pure')"
    )

cartpole_derivs = _impl.cartpole_derivs
rk4_step = _impl.rk4_step
mech_energy = _impl.mech_energy
ir_pair = _impl.ir_pair
leaky_diff = _impl.leaky_diff


def load_backend(name):
    """Return a specific backend module by name, for benchmarks and tests."""
    if name == "pure":
        from balancebot._core import pure

        return pure
    if name == "native":
        from balancebot._core import _native

        return _native
    raise ImportError(f"unknown backend {name!r} (use 'native' or 'pure')")
