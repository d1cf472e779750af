"""Virtual mass-spring-damper link dynamics with an exact discrete-time propagator.

Each link obeys  M·Δẍ + D·Δẋ + K·Δx = F_ext  per Cartesian axis.  Under critical
damping the system matrix has a single repeated eigenvalue λ = −D/(2M), so the
zero-order-hold discretization has a closed form (no matrix exponential call at
runtime).  The closed form is validated against expm/RK4 oracles in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# |ζ − 1| accepted by the closed-form propagator.  Loose enough to admit
# rounded published parameter sets (e.g. D quoted to 3 significant digits).
DEFAULT_ZETA_TOL = 1e-3

DEFAULT_MASS = 1.9
DEFAULT_STIFFNESS = 20.88
DEFAULT_VELOCITY_GAIN = 3.0


class NotCriticallyDamped(ValueError):
    """Raised when parameters are too far from ζ = 1 for the repeated-root form."""


@dataclass(frozen=True)
class ImpedanceParams:
    """Virtual link parameters: mass M, damping D, stiffness K, hand-velocity gain K_v."""

    mass: float
    damping: float
    stiffness: float
    velocity_gain: float = DEFAULT_VELOCITY_GAIN

    def __post_init__(self) -> None:
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not (self.stiffness > 0.0 and math.isfinite(self.stiffness)):
            raise ValueError(f"stiffness must be positive, got {self.stiffness}")
        if self.damping < 0.0 or not math.isfinite(self.damping):
            raise ValueError(f"damping must be >= 0, got {self.damping}")
        if self.velocity_gain < 0.0 or not math.isfinite(self.velocity_gain):
            raise ValueError(f"velocity_gain must be >= 0, got {self.velocity_gain}")

    @property
    def omega_n(self) -> float:
        """Natural frequency sqrt(K/M) in rad/s."""
        return math.sqrt(self.stiffness / self.mass)

    @property
    def zeta(self) -> float:
        """Damping ratio D / (2·sqrt(M·K))."""
        return self.damping / (2.0 * math.sqrt(self.mass * self.stiffness))


def critically_damped(
    mass: float,
    stiffness: float,
    velocity_gain: float = DEFAULT_VELOCITY_GAIN,
) -> ImpedanceParams:
    """Build params with D = 2·sqrt(M·K), i.e. ζ = 1 exactly."""
    if not (mass > 0.0 and math.isfinite(mass)):
        raise ValueError(f"mass must be positive, got {mass}")
    if not (stiffness > 0.0 and math.isfinite(stiffness)):
        raise ValueError(f"stiffness must be positive, got {stiffness}")
    return ImpedanceParams(
        mass=mass,
        damping=2.0 * math.sqrt(mass * stiffness),
        stiffness=stiffness,
        velocity_gain=velocity_gain,
    )


@dataclass(frozen=True)
class DerivedLinkConstants:
    """Scalar constants of the state-space form: a = −D/M, b = −K/M, c = 1/M."""

    a: float
    b: float
    c: float
    lam: float
    omega_n: float
    zeta: float


def derive_constants(
    p: ImpedanceParams, zeta_tol: float = DEFAULT_ZETA_TOL
) -> DerivedLinkConstants:
    """Derive (a, b, c, λ, ω_n, ζ) for a critically damped link.

    λ is the repeated root a/2 of λ² − aλ − b = 0.  Parameters with
    |ζ − 1| > zeta_tol are rejected: the closed-form propagator assumes a
    single eigenvalue and does not cover the general two-root case.
    """
    zeta = p.zeta
    if abs(zeta - 1.0) > zeta_tol:
        raise NotCriticallyDamped(
            f"not critically damped: zeta={zeta:.6g} (|zeta-1| > {zeta_tol:g}); "
            f"use critically_damped() or recompute D = 2*sqrt(M*K)"
        )
    a = -p.damping / p.mass
    b = -p.stiffness / p.mass
    return DerivedLinkConstants(
        a=a,
        b=b,
        c=1.0 / p.mass,
        lam=a / 2.0,
        omega_n=p.omega_n,
        zeta=zeta,
    )


@dataclass(frozen=True, eq=False)
class DiscreteLink:
    """Zero-order-hold propagator for one link: x_{k+1} = A_d·x_k + B_d·F_k."""

    dt: float
    a_d: np.ndarray  # 2x2
    b_d: np.ndarray  # 2
    constants: DerivedLinkConstants
    params: ImpedanceParams


def discretize(
    p: ImpedanceParams, dt: float, zeta_tol: float = DEFAULT_ZETA_TOL
) -> DiscreteLink:
    """Exact discretization over a step of dt seconds (input held constant).

    With repeated eigenvalue λ, e^{AT} = e^{λT}(I + (A − λI)T), giving

        A_d = e^{λT} [[1 − λT, T], [bT, 1 + (a − λ)T]]
        B_d = (c/b) [e^{λT}(1 − λT) − 1,  bT·e^{λT}]ᵀ
    """
    if dt < 0.0 or not math.isfinite(dt):
        raise ValueError(f"timestep must be >= 0, got {dt}")
    k = derive_constants(p, zeta_tol=zeta_tol)
    lam, a, b, c = k.lam, k.a, k.b, k.c
    e = math.exp(lam * dt)
    a_d = e * np.array(
        [[1.0 - lam * dt, dt], [b * dt, 1.0 + (a - lam) * dt]], dtype=float
    )
    b_d = (c / b) * np.array([e * (1.0 - lam * dt) - 1.0, b * dt * e], dtype=float)
    a_d.setflags(write=False)
    b_d.setflags(write=False)
    return DiscreteLink(dt=dt, a_d=a_d, b_d=b_d, constants=k, params=p)


@dataclass(frozen=True, eq=False)
class LinkState:
    """Per-link displacement state (Δx, Δẋ).

    dx/dv are scalars or same-shape arrays; each entry is one independent
    Cartesian axis (the system matrix is identical per axis).
    """

    dx: np.ndarray
    dv: np.ndarray

    @classmethod
    def zero(cls, axes: int = 3) -> "LinkState":
        return cls(dx=np.zeros(axes), dv=np.zeros(axes))


def step_link(link: DiscreteLink, s: LinkState, f_ext) -> LinkState:
    """One discrete step: [Δx, Δẋ]_{k+1} = A_d·[Δx, Δẋ]_k + B_d·F_ext."""
    f = np.asarray(f_ext, dtype=float)
    if not (np.all(np.isfinite(s.dx)) and np.all(np.isfinite(s.dv)) and np.all(np.isfinite(f))):
        raise ValueError("non-finite link state or force")
    a_d, b_d = link.a_d, link.b_d
    dx = a_d[0, 0] * s.dx + a_d[0, 1] * s.dv + b_d[0] * f
    dv = a_d[1, 0] * s.dx + a_d[1, 1] * s.dv + b_d[1] * f
    return LinkState(dx=dx, dv=dv)


def hand_force(velocity_gain: float, hand_velocity) -> np.ndarray:
    """Coupling force proportional to hand velocity: F = K_v·v_hand, per axis."""
    v = np.asarray(hand_velocity, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite hand velocity")
    return velocity_gain * v
