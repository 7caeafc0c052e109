"""Backend selection and cross-backend bit-identity of the kernels.

The compiled and pure-Python kernels share expression order and the same
libm, so every result must match bit for bit, not just approximately.
"""

import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balancebot._core import BACKEND, load_backend

pure = load_backend("pure")
try:
    native = load_backend("native")
except ImportError:
    native = None

needs_native = pytest.mark.skipif(native is None, reason="extension not built")

angle = st.floats(-1.5, 1.5)
vel = st.floats(-10.0, 10.0)


def run_with_backend(name, code):
    env = {**os.environ, "BALANCEBOT_BACKEND": name}
    return subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )


def test_default_backend_prefers_native():
    if native is not None:
        assert BACKEND == "native"
    else:
        assert BACKEND == "pure"


def test_unknown_backend_name_rejected():
    with pytest.raises(ImportError):
        load_backend("turbo")


def test_env_override_selects_pure():
    out = run_with_backend("pure", "import balancebot._core as c; print(c.BACKEND)")
    assert out.stdout.strip() == "pure"


@needs_native
def test_env_override_selects_native():
    out = run_with_backend("native", "import balancebot._core as c; print(c.BACKEND)")
    assert out.stdout.strip() == "native"


@needs_native
@settings(max_examples=300)
@given(theta=angle, p_dot=vel, theta_dot=vel, force=st.floats(-50, 50))
def test_derivs_bit_identical(theta, p_dot, theta_dot, force):
    args = (1.0, 0.5, 0.015, 0.3, 0.1, 9.81, theta, p_dot, theta_dot, force)
    assert pure.cartpole_derivs(*args) == native.cartpole_derivs(*args)


@needs_native
@settings(max_examples=300)
@given(
    p=st.floats(-5, 5), theta=angle, p_dot=vel, theta_dot=vel,
    force=st.floats(-50, 50),
)
def test_rk4_bit_identical(p, theta, p_dot, theta_dot, force):
    args = (1.0, 0.5, 0.015, 0.3, 0.1, 9.81, p, theta, p_dot, theta_dot, force, 0.001)
    assert pure.rk4_step(*args) == native.rk4_step(*args)


@needs_native
@settings(max_examples=300)
@given(theta=angle, p_dot=vel, theta_dot=vel)
def test_energy_bit_identical(theta, p_dot, theta_dot):
    args = (1.0, 0.5, 0.015, 0.3, 9.81, theta, p_dot, theta_dot)
    assert pure.mech_energy(*args) == native.mech_energy(*args)


@needs_native
@settings(max_examples=300)
@given(theta=st.floats(-1.5, 1.5))
def test_ir_pair_bit_identical(theta):
    args = (0.0508, 0.02, 0.08, theta)
    assert pure.ir_pair(*args) == native.ir_pair(*args)


@needs_native
@settings(max_examples=300)
@given(
    y=st.floats(-100, 100), x_prev=st.floats(-10, 10), x_i=st.floats(-10, 10),
)
def test_leaky_diff_bit_identical(y, x_prev, x_i):
    args = (0.99, 0.001, 1.0, y, x_prev, x_i)
    assert pure.leaky_diff(*args) == native.leaky_diff(*args)


@needs_native
def test_long_trajectory_stays_bit_identical():
    # accumulate 10k steps; any divergence in rounding would compound
    sp = sn = (0.0, 0.3, 0.0, 0.0)
    for i in range(10_000):
        force = 5.0 if (i // 100) % 2 == 0 else -5.0
        sp = pure.rk4_step(1.0, 0.5, 0.015, 0.3, 0.1, 9.81, *sp, force, 0.001)
        sn = native.rk4_step(1.0, 0.5, 0.015, 0.3, 0.1, 9.81, *sn, force, 0.001)
        assert sp == sn


def test_episode_runs_on_pure_backend():
    # the public API must work with the fallback kernels forced on
    code = (
        "from balancebot.simloop import Scenario, run_episode;"
        "from balancebot.sensors import NoiseConfig;"
        "r = run_episode(Scenario(noise=NoiseConfig(ir_sigma=0.0), duration=1.0));"
        "print(r.summary.fell, len(r.rows))"
    )
    out = run_with_backend("pure", code)
    assert out.stdout.strip() == "False 1001"
