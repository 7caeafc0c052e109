# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Line-for-line arithmetic twin of balancebot._core.pure; compiled with
-ffp-contract=off and -fno-builtin-sin/-cos (see setup.py) so results stay
bit-identical to the pure backend.
"""

from libc.math cimport cos, sin


cdef inline (double, double) _derivs(double M, double m, double J, double l,
                                     double b, double g, double theta,
                                     double p_dot, double theta_dot,
                                     double force) noexcept:
    cdef double ml = m * l
    cdef double c = cos(theta)
    cdef double s = sin(theta)
    cdef double a11 = M + m
    cdef double a22 = J + ml * l
    cdef double a12 = -(ml * c)
    cdef double det = a11 * a22 - a12 * a12
    cdef double r1 = force - b * p_dot - ml * s * theta_dot * theta_dot
    cdef double r2 = m * g * l * s
    cdef double p_ddot = (a22 * r1 - a12 * r2) / det
    cdef double theta_ddot = (a11 * r2 - a12 * r1) / det
    return p_ddot, theta_ddot


def cartpole_derivs(double M, double m, double J, double l, double b, double g,
                    double theta, double p_dot, double theta_dot, double force):
    """Accelerations (p_ddot, theta_ddot) of the cart-pole pair."""
    cdef double p_ddot, theta_ddot
    p_ddot, theta_ddot = _derivs(M, m, J, l, b, g, theta, p_dot, theta_dot, force)
    return p_ddot, theta_ddot


def rk4_step(double M, double m, double J, double l, double b, double g,
             double p, double theta, double p_dot, double theta_dot,
             double force, double dt):
    """One classical Runge-Kutta step with the force held constant (ZOH)."""
    cdef double k1_pdd, k1_tdd, k2_pdd, k2_tdd, k3_pdd, k3_tdd, k4_pdd, k4_tdd
    cdef double th_a, pd_a, td_a, th_b, pd_b, td_b, th_c, pd_c, td_c
    cdef double p_new, theta_new, p_dot_new, theta_dot_new

    k1_pdd, k1_tdd = _derivs(M, m, J, l, b, g, theta, p_dot, theta_dot, force)

    th_a = theta + 0.5 * dt * theta_dot
    pd_a = p_dot + 0.5 * dt * k1_pdd
    td_a = theta_dot + 0.5 * dt * k1_tdd
    k2_pdd, k2_tdd = _derivs(M, m, J, l, b, g, th_a, pd_a, td_a, force)

    th_b = theta + 0.5 * dt * td_a
    pd_b = p_dot + 0.5 * dt * k2_pdd
    td_b = theta_dot + 0.5 * dt * k2_tdd
    k3_pdd, k3_tdd = _derivs(M, m, J, l, b, g, th_b, pd_b, td_b, force)

    th_c = theta + dt * td_b
    pd_c = p_dot + dt * k3_pdd
    td_c = theta_dot + dt * k3_tdd
    k4_pdd, k4_tdd = _derivs(M, m, J, l, b, g, th_c, pd_c, td_c, force)

    p_new = p + dt * (p_dot + 2.0 * pd_a + 2.0 * pd_b + pd_c) / 6.0
    theta_new = theta + dt * (theta_dot + 2.0 * td_a + 2.0 * td_b + td_c) / 6.0
    p_dot_new = p_dot + dt * (k1_pdd + 2.0 * k2_pdd + 2.0 * k3_pdd + k4_pdd) / 6.0
    theta_dot_new = theta_dot + dt * (k1_tdd + 2.0 * k2_tdd + 2.0 * k3_tdd + k4_tdd) / 6.0
    return p_new, theta_new, p_dot_new, theta_dot_new


def mech_energy(double M, double m, double J, double l, double g,
                double theta, double p_dot, double theta_dot):
    """Total mechanical energy; conserved when b = 0 and F = 0."""
    cdef double ml = m * l
    cdef double c = cos(theta)
    cdef double kinetic = (
        0.5 * (M + m) * p_dot * p_dot
        - ml * p_dot * theta_dot * c
        + 0.5 * (J + ml * l) * theta_dot * theta_dot
    )
    return kinetic + m * g * l * c


def ir_pair(double r, double q, double s, double theta):
    """Ideal (front, back) IR floor distances along the body-down boresight."""
    cdef double c = cos(theta)
    cdef double sn = sin(theta)
    cdef double front = (r - q * c + s * sn) / c
    cdef double back = (r - q * c - s * sn) / c
    return front, back


def leaky_diff(double alpha, double t_d, double sign, double y,
               double x_prev, double x_i):
    """One leaky-differentiator update: new y from the previous y and input."""
    return alpha * y + sign * (1.0 - alpha) * (x_i - x_prev) / t_d
