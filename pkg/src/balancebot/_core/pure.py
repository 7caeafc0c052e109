"""Pure-Python kernel backend.

Every expression here has a line-for-line twin in _native.pyx; the two must
stay arithmetically identical (same operations, same order) so that both
backends produce bit-identical trajectories. math.* routes to the platform
libm, the same functions the compiled twin calls.
"""

from math import cos, sin


def cartpole_derivs(M, m, J, l, b, g, theta, p_dot, theta_dot, force):
    """Accelerations (p_ddot, theta_ddot) of the cart-pole pair.

    Solves the coupled 2x2 mass-matrix system
        (M+m) p_ddot - m*l*cos(theta) theta_ddot = F - b*p_dot - m*l*sin(theta)*theta_dot^2
        (J+m*l^2) theta_ddot - m*l*cos(theta) p_ddot = m*g*l*sin(theta)
    in which theta = 0 (upright) is the unstable equilibrium.
    """
    ml = m * l
    c = cos(theta)
    s = sin(theta)
    a11 = M + m
    a22 = J + ml * l
    a12 = -(ml * c)
    det = a11 * a22 - a12 * a12
    r1 = force - b * p_dot - ml * s * theta_dot * theta_dot
    r2 = m * g * l * s
    p_ddot = (a22 * r1 - a12 * r2) / det
    theta_ddot = (a11 * r2 - a12 * r1) / det
    return p_ddot, theta_ddot


def rk4_step(M, m, J, l, b, g, p, theta, p_dot, theta_dot, force, dt):
    """One classical Runge-Kutta step with the force held constant (ZOH)."""
    k1_pdd, k1_tdd = cartpole_derivs(M, m, J, l, b, g, theta, p_dot, theta_dot, force)

    th_a = theta + 0.5 * dt * theta_dot
    pd_a = p_dot + 0.5 * dt * k1_pdd
    td_a = theta_dot + 0.5 * dt * k1_tdd
    k2_pdd, k2_tdd = cartpole_derivs(M, m, J, l, b, g, th_a, pd_a, td_a, force)

    th_b = theta + 0.5 * dt * td_a
    pd_b = p_dot + 0.5 * dt * k2_pdd
    td_b = theta_dot + 0.5 * dt * k2_tdd
    k3_pdd, k3_tdd = cartpole_derivs(M, m, J, l, b, g, th_b, pd_b, td_b, force)

    th_c = theta + dt * td_b
    pd_c = p_dot + dt * k3_pdd
    td_c = theta_dot + dt * k3_tdd
    k4_pdd, k4_tdd = cartpole_derivs(M, m, J, l, b, g, th_c, pd_c, td_c, force)

    p_new = p + dt * (p_dot + 2.0 * pd_a + 2.0 * pd_b + pd_c) / 6.0
    theta_new = theta + dt * (theta_dot + 2.0 * td_a + 2.0 * td_b + td_c) / 6.0
    p_dot_new = p_dot + dt * (k1_pdd + 2.0 * k2_pdd + 2.0 * k3_pdd + k4_pdd) / 6.0
    theta_dot_new = theta_dot + dt * (k1_tdd + 2.0 * k2_tdd + 2.0 * k3_tdd + k4_tdd) / 6.0
    return p_new, theta_new, p_dot_new, theta_dot_new


def mech_energy(M, m, J, l, g, theta, p_dot, theta_dot):
    """Total mechanical energy; conserved when b = 0 and F = 0."""
    ml = m * l
    c = cos(theta)
    kinetic = (
        0.5 * (M + m) * p_dot * p_dot
        - ml * p_dot * theta_dot * c
        + 0.5 * (J + ml * l) * theta_dot * theta_dot
    )
    return kinetic + m * g * l * c


def ir_pair(r, q, s, theta):
    """Ideal (front, back) IR floor distances along the body-down boresight.

    front - back = 2*s*tan(theta); the caller guards the fallen-over domain.
    """
    c = cos(theta)
    sn = sin(theta)
    front = (r - q * c + s * sn) / c
    back = (r - q * c - s * sn) / c
    return front, back


def leaky_diff(alpha, t_d, sign, y, x_prev, x_i):
    """One leaky-differentiator update: new y from the previous y and input."""
    return alpha * y + sign * (1.0 - alpha) * (x_i - x_prev) / t_d
