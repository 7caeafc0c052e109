"""Kernel benchmark: runs the same closed-loop tick loop on the compiled
backend and the pure-Python one, times both, and checks the trajectories
are bit-identical (they share expression order and libm, so they must be).
"""

import time

from balancebot._core import BACKEND, load_backend


def _loop(impl, ticks: int) -> tuple:
    """A minimal PD episode touching every hot kernel each tick."""
    M, m, J, l, b, g = 1.0, 0.5, 0.015, 0.3, 0.1, 9.81
    r, q, s = 0.0508, 0.02, 0.08
    k_err, k_d, k_dd, k_v = -0.05, -11.4101, -2.0515, 0.1117
    f_max, dt = 20.0, 0.001
    alpha, t_d = 0.99, 0.001

    p = 0.0
    theta = 0.05
    p_dot = 0.0
    theta_dot = 0.0
    y_d = 0.0
    y_v = 0.0
    bias = r - q
    front, back = impl.ir_pair(r, q, s, theta)
    d_prev = (front - bias) - (back - bias)
    p_prev = p
    for _ in range(ticks):
        front, back = impl.ir_pair(r, q, s, theta)
        d = (front - bias) - (back - bias)
        y_d = impl.leaky_diff(alpha, t_d, 1.0, y_d, d_prev, d)
        y_v = impl.leaky_diff(alpha, t_d, 1.0, y_v, p_prev, p)
        d_prev = d
        p_prev = p
        u = k_err * (0.0 - p) + k_d * d + k_dd * y_d + k_v * y_v
        u = min(max(u, -1.0), 1.0)
        p, theta, p_dot, theta_dot = impl.rk4_step(
            M, m, J, l, b, g, p, theta, p_dot, theta_dot, f_max * u, dt
        )
    energy = impl.mech_energy(M, m, J, l, g, theta, p_dot, theta_dot)
    return p, theta, p_dot, theta_dot, energy


def _time(impl, ticks: int, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        _loop(impl, ticks)
        best = min(best, time.perf_counter() - t0)
    return best


def run_bench(ticks: int = 200_000, repeats: int = 3) -> None:
    backends = {"pure": load_backend("pure")}
    try:
        backends["native"] = load_backend("native")
    except ImportError:
        print("native backend not built; timing pure only")

    finals = {name: _loop(impl, min(ticks, 50_000))
              for name, impl in backends.items()}
    if len(finals) == 2:
        match = finals["pure"] == finals["native"]
        print(f"bit-identical trajectories: {'yes' if match else 'NO'}")
        if not match:
            print(f"  pure:   {finals['pure']}")
            print(f"  native: {finals['native']}")

    print(f"active backend: {BACKEND}")
    print(f"{'backend':<8} {'ticks':>9} {'total s':>9} {'ns/tick':>9} {'speedup':>8}")
    base = None
    for name in ("pure", "native"):
        impl = backends.get(name)
        if impl is None:
            continue
        elapsed = _time(impl, ticks, repeats)
        if base is None:
            base = elapsed
        print(f"{name:<8} {ticks:>9} {elapsed:>9.3f} "
              f"{elapsed / ticks * 1e9:>9.0f} {base / elapsed:>7.2f}x")
