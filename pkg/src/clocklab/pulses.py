"""Measurement control pulses g(t): shapes, strength, derivatives.

A pulse is a non-negative function supported on ``[start, start + tau]``
whose time integral equals the measurement strength ``K``.  Larger ``K``
means a larger pointer shift per unit of measured energy, hence better
energy resolution.  The default shape is a raised cosine: smooth, compactly
supported, with a closed-form derivative (needed wherever g' of the clock
reading enters the dynamics).  Narrow pulses approximate the idealized
sudden-coupling limit and are flagged as such by their bandwidth, not by any
special-casing here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .clocks import ClockModel
from .tensor import OperatorMatrix

SHAPES = ("raised_cosine", "boxcar_smoothed", "gaussian_truncated")


@dataclass(frozen=True)
class PulseProfile:
    """Control function g with duration tau and strength K = integral of g.

    shape:       one of ``raised_cosine``, ``boxcar_smoothed``,
                 ``gaussian_truncated``
    tau:         pulse duration (time units)
    strength:    K, the time integral of g (>= 0; 0 disables the coupling)
    start:       support offset; g vanishes outside [start, start + tau]
    edge_width:  boxcar only; half-cosine ramp width at each edge (0 gives a
                 sharp, non-differentiable boxcar)
    cutoff:      truncated Gaussian only; support covers +/- cutoff standard
                 deviations
    """

    shape: str = "raised_cosine"
    tau: float = 1.0
    strength: float = 1.0
    start: float = 0.0
    edge_width: float = 0.0
    cutoff: float = 4.0

    def __post_init__(self) -> None:
        if self.shape not in SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; choose from {SHAPES}")
        if self.tau <= 0.0:
            raise ValueError("pulse duration must be positive")
        if self.strength < 0.0:
            raise ValueError("pulse strength must be non-negative")
        if self.shape == "boxcar_smoothed":
            if self.edge_width < 0.0 or 2.0 * self.edge_width >= self.tau:
                raise ValueError("boxcar edge width must satisfy 0 <= 2*edge_width < tau")
        if self.shape == "gaussian_truncated" and self.cutoff < 1.0:
            raise ValueError("gaussian cutoff must be at least 1 standard deviation")

    @property
    def end(self) -> float:
        return self.start + self.tau

    @property
    def differentiable(self) -> bool:
        return not (self.shape == "boxcar_smoothed" and self.edge_width == 0.0)

    # -- scalar profile -------------------------------------------------

    def __call__(self, t):
        return self.evaluate(t)

    def evaluate(self, t) -> np.ndarray | float:
        """g(t); exactly zero outside the support window."""
        t = np.asarray(t, dtype=float)
        u = t - self.start
        inside = (u >= 0.0) & (u <= self.tau)
        out = np.zeros_like(u)
        if self.strength > 0.0:
            out[inside] = self._profile(u[inside])
        return out if out.ndim else float(out)

    def derivative(self, t) -> np.ndarray | float:
        """Analytic g'(t); raises for the sharp boxcar."""
        if not self.differentiable:
            raise ValueError("sharp boxcar (edge_width=0) has no derivative; "
                             "use a positive edge_width")
        t = np.asarray(t, dtype=float)
        u = t - self.start
        inside = (u > 0.0) & (u < self.tau)
        out = np.zeros_like(u)
        if self.strength > 0.0:
            out[inside] = self._profile_derivative(u[inside])
        return out if out.ndim else float(out)

    def _profile(self, u: np.ndarray) -> np.ndarray:
        k, tau = self.strength, self.tau
        if self.shape == "raised_cosine":
            return (k / tau) * (1.0 - np.cos(2.0 * np.pi * u / tau))
        if self.shape == "boxcar_smoothed":
            w = self.edge_width
            if w == 0.0:
                return np.full_like(u, k / tau)
            amp = k / (tau - w)
            out = np.full_like(u, amp)
            rising = u < w
            falling = u > tau - w
            out[rising] = amp * 0.5 * (1.0 - np.cos(np.pi * u[rising] / w))
            out[falling] = amp * 0.5 * (1.0 - np.cos(np.pi * (tau - u[falling]) / w))
            return out
        # truncated Gaussian centered mid-pulse, normalized on the window
        s = tau / (2.0 * self.cutoff)
        amp = k / (s * math.sqrt(2.0 * math.pi) * erf(self.cutoff / math.sqrt(2.0)))
        return amp * np.exp(-((u - 0.5 * tau) ** 2) / (2.0 * s**2))

    def _profile_derivative(self, u: np.ndarray) -> np.ndarray:
        k, tau = self.strength, self.tau
        if self.shape == "raised_cosine":
            return (2.0 * np.pi * k / tau**2) * np.sin(2.0 * np.pi * u / tau)
        if self.shape == "boxcar_smoothed":
            w = self.edge_width
            amp = k / (tau - w)
            out = np.zeros_like(u)
            rising = u < w
            falling = u > tau - w
            out[rising] = amp * 0.5 * (np.pi / w) * np.sin(np.pi * u[rising] / w)
            out[falling] = -amp * 0.5 * (np.pi / w) * np.sin(np.pi * (tau - u[falling]) / w)
            return out
        s = tau / (2.0 * self.cutoff)
        amp = k / (s * math.sqrt(2.0 * math.pi) * erf(self.cutoff / math.sqrt(2.0)))
        center = u - 0.5 * tau
        return -amp * center / s**2 * np.exp(-(center**2) / (2.0 * s**2))

    # -- operator-argument evaluation ------------------------------------

    def as_clock_operator(self, clock: ClockModel, derivative: bool = False) -> OperatorMatrix:
        """Diagonal operator g(T) (or g'(T)) on the clock's time basis."""
        if self.start < 0.0 or self.end > clock.period:
            raise ValueError(
                f"pulse support [{self.start:.4g}, {self.end:.4g}] exceeds the "
                f"clock grid [0, {clock.period:.4g}]"
            )
        values = self.derivative(clock.t_grid) if derivative else self.evaluate(clock.t_grid)
        return OperatorMatrix(np.diag(np.asarray(values, dtype=np.complex128)), clock.layout)

    def grid_quadrature(self, clock: ClockModel) -> float:
        """dt * sum g(t_k): the discrete strength seen by the clock grid."""
        return float(clock.dt * np.sum(self.evaluate(clock.t_grid)))
