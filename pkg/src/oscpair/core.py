"""Data model for the coupled oscillator pair.

The system couples a damped oscillator u'' + u + u' = b v' to an
antidamped one v'' + v - epsilon v' = -b u' through the velocities.
With the state vector z = (u, u', v, v') this is the linear ODE
z' = A z for a fixed 4x4 matrix A, and everything else in the package
(spectra, regimes, propagators, modal extensions) is built on top of
the three primitives defined here: the parameter pair, the state, and
the energy E = (u^2 + u'^2 + v^2 + v'^2)/2 together with its exact
dissipation rate dE/dt = epsilon*v'^2 - u'^2.

The dissipation identity is exposed as a first-class function because
it holds exactly along any solution (the coupling terms cancel), which
turns every numerical trajectory into a self-checking computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Params",
    "State",
    "assemble_matrix",
    "energy",
    "energy_rate",
]


@dataclass(frozen=True)
class Params:
    """Parameter pair (epsilon, b): antidamping strength and coupling.

    epsilon >= 0 and b > 0 are required.  The dynamics depend on b only
    through b**2, so negative couplings are equivalent to |b|; use
    :meth:`from_signed_coupling` to normalize instead of silently taking
    absolute values here.
    """

    epsilon: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon >= 0.0):
            raise ValueError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if not (math.isfinite(self.b) and self.b > 0.0):
            raise ValueError(f"b must be finite and > 0, got {self.b}")

    @classmethod
    def from_signed_coupling(cls, epsilon: float, b: float) -> "Params":
        """Build Params from a coupling of either sign (b != 0)."""
        if b == 0.0:
            raise ValueError("coupling b must be nonzero")
        return cls(epsilon, abs(b))


@dataclass(frozen=True)
class State:
    """State vector (u, x, v, y) with x = u' and y = v'."""

    u: float
    x: float
    v: float
    y: float

    def __post_init__(self) -> None:
        for name in ("u", "x", "v", "y"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"state component {name} must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.u, self.x, self.v, self.y], dtype=float)

    @classmethod
    def from_array(cls, z: np.ndarray) -> "State":
        u, x, v, y = (float(c) for c in np.asarray(z, dtype=float))
        return cls(u, x, v, y)


def assemble_matrix(p: Params) -> np.ndarray:
    """4x4 system matrix A of z' = A z.

    Rows encode u' = x, x' = -u - x + b y, v' = y, y' = -b x - v + eps y.
    Its trace is epsilon - 1 and its determinant is 1 for every valid
    parameter pair.
    """
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, -1.0, 0.0, p.b],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, -p.b, -1.0, p.epsilon],
        ]
    )


def energy(s: State) -> float:
    """Total energy E = (u^2 + x^2 + v^2 + y^2) / 2."""
    return 0.5 * (s.u * s.u + s.x * s.x + s.v * s.v + s.y * s.y)


def energy_rate(s: State, p: Params) -> float:
    """Exact energy dissipation rate dE/dt = epsilon*y^2 - x^2.

    Differentiating E along the flow, the coupling terms +b*x*y and
    -b*x*y cancel, leaving the antidamping input epsilon*y^2 minus the
    damping loss x^2.  Valid along any solution, independent of b.
    """
    return p.epsilon * s.y * s.y - s.x * s.x
