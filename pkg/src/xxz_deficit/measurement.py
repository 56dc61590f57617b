"""Entropy after a projective measurement on one spin of the dimer.

Measuring one site along a direction tilted by theta from the z axis
leaves a state whose spectrum has a closed form; the azimuthal direction
drops out because the X matrix has one vanishing antidiagonal pair.  The
entropy of that spectrum as a function of theta is even about both 0 and
pi/2, so its first derivative vanishes identically at the endpoints and
region boundaries are governed by the endpoint curvatures and by branch
crossings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import XThermalState, _xlnx

__all__ = [
    "HALF_PI",
    "DegenerateState",
    "PostMeasSpectrum",
    "binary_entropy",
    "branch_s0",
    "branch_s_halfpi",
    "endpoint_first_derivatives",
    "entropy_curve",
    "fd_second_derivative_at_0",
    "fd_second_derivative_at_halfpi",
    "post_meas_entropy",
    "post_meas_spectrum",
    "second_derivative_at_0",
    "second_derivative_at_halfpi",
]

HALF_PI = math.pi / 2.0


class DegenerateState(ValueError):
    """r = 0: the state is isotropic in the measured plane and the
    transverse direction carries no boundary information."""


@dataclass(frozen=True)
class PostMeasSpectrum:
    """Eigenvalues of the averaged post-measurement state."""

    A1: float
    A2: float
    A3: float
    A4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.A1, self.A2, self.A3, self.A4)


def post_meas_spectrum(s: XThermalState, theta: float) -> PostMeasSpectrum:
    """Closed-form spectrum after measuring at polar angle theta.

    At theta = 0 the multiset reduces to {a, d, b, b}; at theta = pi/2 it
    is twofold degenerate, {(1+r)/4, (1-r)/4} each twice.  Only v^2
    enters, so the spectrum is blind to the coherence sign.
    """
    c = math.cos(theta)
    sn = math.sin(theta)
    alpha = s.a - s.d
    beta = 1.0 - 4.0 * s.b
    cross = 2.0 * s.v * sn
    rp = math.hypot(alpha + beta * c, cross)
    rm = math.hypot(alpha - beta * c, cross)
    ac = alpha * c
    return PostMeasSpectrum(
        A1=0.25 * (1.0 + ac + rp),
        A2=max(0.25 * (1.0 + ac - rp), 0.0),
        A3=0.25 * (1.0 - ac + rm),
        A4=max(0.25 * (1.0 - ac - rm), 0.0),
    )


def post_meas_entropy(s: XThermalState, theta: float) -> float:
    """Post-measurement entropy S~(theta) in nats."""
    return -sum(_xlnx(x) for x in post_meas_spectrum(s, theta).as_tuple())


def entropy_curve(s: XThermalState, thetas) -> np.ndarray:
    """S~ sampled at an array of angles (vectorized scan path)."""
    th = np.asarray(thetas, dtype=float)
    c = np.cos(th)
    sn = np.sin(th)
    alpha = s.a - s.d
    beta = 1.0 - 4.0 * s.b
    cross = 2.0 * s.v * sn
    rp = np.hypot(alpha + beta * c, cross)
    rm = np.hypot(alpha - beta * c, cross)
    ac = alpha * c
    spec = 0.25 * np.stack(
        [1.0 + ac + rp, 1.0 + ac - rp, 1.0 - ac + rm, 1.0 - ac - rm]
    )
    spec = np.clip(spec, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(spec > 0.0, spec * np.log(spec), 0.0)
    return -terms.sum(axis=0)


def branch_s0(s: XThermalState) -> float:
    """Entropy after measuring along z: the coherence is erased and only
    the populations survive, -a ln a - d ln d - 2 b ln b."""
    return -(_xlnx(s.a) + _xlnx(s.d) + 2.0 * _xlnx(s.b))


def binary_entropy(x: float) -> float:
    return -(_xlnx(x) + _xlnx(1.0 - x))


def branch_s_halfpi(s: XThermalState) -> float:
    """Entropy after measuring in the equatorial plane:
    ln 2 + h((1 + r)/2), which lies in [ln 2, ln 4]."""
    x = 0.5 * (1.0 + min(s.r, 1.0))
    return math.log(2.0) + binary_entropy(x)


def endpoint_first_derivatives(
    s: XThermalState, h: float = 1e-5
) -> tuple[float, float]:
    """One-sided slope estimates of S~ at theta = 0 and pi/2.

    Both vanish identically for every state; this is a diagnostic that
    the caller can assert against.  Uses a three-point parabolic fit.
    """
    f0 = post_meas_entropy(s, 0.0)
    d0 = (
        -3.0 * f0 + 4.0 * post_meas_entropy(s, h) - post_meas_entropy(s, 2.0 * h)
    ) / (2.0 * h)
    f1 = post_meas_entropy(s, HALF_PI)
    d1 = (
        3.0 * f1
        - 4.0 * post_meas_entropy(s, HALF_PI - h)
        + post_meas_entropy(s, HALF_PI - 2.0 * h)
    ) / (2.0 * h)
    return d0, d1


def _log_slope(x: float, y: float) -> float:
    """(ln x - ln y) / (x - y), continued by its limit 1/y when x -> y."""
    if abs(x - y) < 1e-9:
        return 1.0 / y
    return math.log(x / y) / (x - y)


_POP_FLOOR = 1e-300  # keeps logs finite if a population underflows to 0


def second_derivative_at_0(s: XThermalState) -> float:
    """Closed-form curvature of S~ at theta = 0.

    Its zero set is the boundary at which an interior extremum detaches
    from the z endpoint; the difference quotients are switched to their
    analytic limits near a = b and b = d to avoid cancellation.
    """
    a = max(s.a, _POP_FLOOR)
    b = max(s.b, _POP_FLOOR)
    d = max(s.d, _POP_FLOOR)
    t_pop = (a - d) * math.log(a / d)
    t_bal = (1.0 - 4.0 * b) * math.log(a * d / (b * b))
    t_coh = 2.0 * s.v * s.v * (_log_slope(a, b) + _log_slope(b, d))
    return 0.25 * (t_pop + t_bal - t_coh)


def second_derivative_at_halfpi(s: XThermalState) -> float:
    """Closed-form curvature of S~ at theta = pi/2.

    Raises DegenerateState when r = 0 (S~ is then theta independent and
    there is no boundary information).  r is clamped just below 1 so the
    log stays finite at the floor-temperature limit.
    """
    if s.r <= 1e-12:
        raise DegenerateState("r = 0: entropy is independent of the angle")
    r = min(s.r, 1.0 - 1e-12)
    a, b, d, v = s.a, s.b, s.d, s.v
    beta = 1.0 - 4.0 * b
    t_coh = (
        8.0
        * v
        * v
        * ((a - b) * (b - d) + v * v)
        / r**3
        * math.log((1.0 + r) / (1.0 - r))
    )
    t_pop = (
        0.5
        * (a - d) ** 2
        * ((1.0 + beta / r) ** 2 / (1.0 + r) + (1.0 - beta / r) ** 2 / (1.0 - r))
    )
    return t_coh - t_pop


def fd_second_derivative_at_0(s: XThermalState, h: float = 1e-4) -> float:
    """Finite-difference curvature at theta = 0, exploiting evenness."""
    return 2.0 * (post_meas_entropy(s, h) - post_meas_entropy(s, 0.0)) / (h * h)


def fd_second_derivative_at_halfpi(s: XThermalState, h: float = 1e-4) -> float:
    """Finite-difference curvature at theta = pi/2, exploiting evenness."""
    return (
        2.0
        * (post_meas_entropy(s, HALF_PI - h) - post_meas_entropy(s, HALF_PI))
        / (h * h)
    )
