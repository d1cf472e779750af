"""Independent numerical oracles used by the test suite.

These deliberately avoid the closed-form propagator under test: RK4 integrates
the continuous second-order ODE directly, so agreement certifies the discrete
matrices rather than assuming them.
"""

from __future__ import annotations

import numpy as np


def rk4_integrate(mass, damping, stiffness, s0, f_ext, duration, substep):
    """Integrate M·x'' + D·x' + K·x = f_ext from s0 = (x, x') over `duration`."""
    a = -damping / mass
    b = -stiffness / mass
    c = 1.0 / mass

    def deriv(s):
        return np.array([s[1], b * s[0] + a * s[1] + c * f_ext])

    n = int(round(duration / substep))
    h = duration / n if n else 0.0
    s = np.array(s0, dtype=float)
    for _ in range(n):
        k1 = deriv(s)
        k2 = deriv(s + 0.5 * h * k1)
        k3 = deriv(s + 0.5 * h * k2)
        k4 = deriv(s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s


def rk4_integrate_batch(mass, damping, stiffness, s0, f_ext, duration, substep):
    """Vectorized RK4 over a batch: all array args share leading dimension N.

    s0 has shape (N, 2); returns (N, 2) states after `duration` seconds.
    """
    mass = np.asarray(mass, dtype=float)
    a = -np.asarray(damping, dtype=float) / mass
    b = -np.asarray(stiffness, dtype=float) / mass
    c = 1.0 / mass
    f = np.asarray(f_ext, dtype=float)

    def deriv(s):
        return np.stack([s[:, 1], b * s[:, 0] + a * s[:, 1] + c * f], axis=1)

    n = int(round(duration / substep))
    h = duration / n if n else 0.0
    s = np.array(s0, dtype=float)
    for _ in range(n):
        k1 = deriv(s)
        k2 = deriv(s + 0.5 * h * k1)
        k3 = deriv(s + 0.5 * h * k2)
        k4 = deriv(s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s


def random_critically_damped(rng, n):
    """n random (M, K) pairs with natural frequency in [0.5, 10] rad/s."""
    mass = rng.uniform(0.2, 5.0, n)
    omega = rng.uniform(0.5, 10.0, n)
    stiffness = mass * omega**2
    return mass, stiffness
