"""Time-domain engine: propagators, trajectories, growth measurement.

The propagator S(t) = exp(t*A) is evaluated by scaling-and-squaring
rather than eigendecomposition: the parameter pairs where the spectrum
is defective, (eps=1, b=1) and (eps<1, b=(1+eps)/2), are exactly the
interesting ones, and an eigenvector basis degenerates there while the
matrix exponential does not care.

Trajectories are integrated with an adaptive embedded Runge-Kutta 5(4)
pair.  Alongside the four state components the integrator carries the
accumulated dissipation integral of epsilon*y^2 - x^2, so every
trajectory can be checked against the exact energy balance
E(t) - E(0) = int_0^t (epsilon*y^2 - x^2) ds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .core import Params, State, assemble_matrix
from .spectrum import growth_bound

__all__ = [
    "IntegrationError",
    "FitError",
    "PropagatorSample",
    "Trajectory",
    "FitResult",
    "operator_norm",
    "propagator",
    "integrate",
    "explicit_solution_eps1_b1",
    "asymptotic_propagator",
    "norm_growth_fit",
    "periodic_portrait_check",
]

# The solver is run this much tighter than the requested tolerance: the
# contracts (terminal state within 10*tol of the propagator, cumulative
# energy balance within 100*tol) are global-error statements while the
# solver's tolerance controls local error only.
_TOL_SAFETY = 1e-3
_MIN_SOLVER_TOL = 3e-14

_NORM_OVERFLOW = 1e100


class IntegrationError(RuntimeError):
    """Trajectory integration failed (step-size underflow, solver abort)."""


class FitError(RuntimeError):
    """Norm-growth fit rejected (overflow or excessive residual)."""


@dataclass(frozen=True)
class PropagatorSample:
    """Propagator matrix S(t) with its operator norm attached."""

    t: float
    matrix: np.ndarray
    operator_norm: float


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution: times, 4-column states, energies, dissipation.

    ``dissipated[k]`` is the integral of epsilon*y^2 - x^2 from 0 to
    times[k], accumulated by the integrator itself; the exact balance
    energies[k] - energies[0] = dissipated[k] holds up to solver error.
    """

    times: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    dissipated: np.ndarray

    def state(self, k: int) -> State:
        return State.from_array(self.states[k])

    @property
    def final_state(self) -> State:
        return self.state(-1)


def operator_norm(matrix: np.ndarray) -> float:
    """Largest singular value via one-sided Jacobi column rotations.

    Sweeps over column pairs, rotating each pair until all columns are
    mutually orthogonal; the largest column norm is then the largest
    singular value.  For 4x4 inputs this converges in a handful of
    sweeps and is deterministic to ~1e-12, independent of any LAPACK
    build details.
    """
    u = np.array(matrix, dtype=float, copy=True)
    n = u.shape[1]
    for _ in range(40):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                aii = float(u[:, i] @ u[:, i])
                ajj = float(u[:, j] @ u[:, j])
                aij = float(u[:, i] @ u[:, j])
                if abs(aij) <= 1e-15 * math.sqrt(aii * ajj) + 1e-300:
                    continue
                rotated = True
                zeta = (ajj - aii) / (2.0 * aij)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                cs = 1.0 / math.sqrt(1.0 + t * t)
                sn = cs * t
                gi = u[:, i].copy()
                u[:, i] = cs * gi - sn * u[:, j]
                u[:, j] = sn * gi + cs * u[:, j]
        if not rotated:
            break
    return max(math.sqrt(float(u[:, k] @ u[:, k])) for k in range(n))


def propagator(p: Params, t: float) -> PropagatorSample:
    """Propagator S(t) = exp(t*A) by scaling-and-squaring.

    Accurate at the defective parameter pairs where eigendecomposition
    breaks down.  Rejects negative or non-finite t.
    """
    if not math.isfinite(t) or t < 0.0:
        raise ValueError(f"propagator time must be finite and >= 0, got {t}")
    m = expm(t * assemble_matrix(p))
    return PropagatorSample(t=t, matrix=m, operator_norm=operator_norm(m))


def integrate(
    p: Params,
    z0: State,
    t_end: float,
    tol: float = 1e-10,
    samples: int = 800,
) -> Trajectory:
    """Integrate z' = A z from z0 over [0, t_end] at the given tolerance.

    Adaptive RK 5(4); the returned trajectory is sampled on a uniform
    grid of ``samples`` intervals.  The terminal state agrees with
    propagator(p, t_end) @ z0 within 10*tol and the cumulative energy
    balance holds within 100*tol.
    """
    if not (t_end > 0.0 and math.isfinite(t_end)):
        raise ValueError(f"t_end must be finite and > 0, got {t_end}")
    if not (tol > 0.0):
        raise ValueError(f"tol must be > 0, got {tol}")

    m = assemble_matrix(p)
    eps = p.epsilon

    def rhs(t: float, zq: np.ndarray) -> np.ndarray:
        out = np.empty(5)
        out[:4] = m @ zq[:4]
        out[4] = eps * zq[3] * zq[3] - zq[1] * zq[1]
        return out

    solver_tol = max(tol * _TOL_SAFETY, _MIN_SOLVER_TOL)
    t_eval = np.linspace(0.0, t_end, samples + 1)
    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        np.append(z0.as_array(), 0.0),
        method="RK45",
        rtol=solver_tol,
        atol=solver_tol,
        t_eval=t_eval,
    )
    if not sol.success:
        raise IntegrationError(f"integration failed: {sol.message}")
    states = sol.y[:4].T.copy()
    energies = 0.5 * np.sum(states * states, axis=1)
    return Trajectory(
        times=sol.t.copy(),
        states=states,
        energies=energies,
        dissipated=sol.y[4].copy(),
    )


def explicit_solution_eps1_b1(z0: State, t: float) -> State:
    """Exact solution at the defective point eps = 1, b = 1.

    The displacement components are

        u(t) = [(2u0 - t u0 + t v0) cos t
                + (u0 - v0 + 2x0 - t x0 + t y0) sin t] / 2
        v(t) = [(-t u0 + 2v0 + t v0) cos t
                + (u0 - v0 - t x0 + 2y0 + t y0) sin t] / 2

    and the velocities are their exact derivatives.  The linear-in-t
    amplitudes are the polynomial blow-up of the defective spectrum made
    explicit; this function is the oracle the integrator and propagator
    are tested against.
    """
    u0, x0, v0, y0 = z0.u, z0.x, z0.v, z0.y
    ct, st = math.cos(t), math.sin(t)
    u = 0.5 * ((2 * u0 - t * u0 + t * v0) * ct + (u0 - v0 + 2 * x0 - t * x0 + t * y0) * st)
    x = 0.5 * ((2 * x0 - t * x0 + t * y0) * ct + (t * u0 - 2 * u0 - t * v0 - x0 + y0) * st)
    v = 0.5 * ((-t * u0 + 2 * v0 + t * v0) * ct + (u0 - v0 - t * x0 + 2 * y0 + t * y0) * st)
    y = 0.5 * ((2 * y0 - t * x0 + t * y0) * ct + (t * u0 - 2 * v0 - t * v0 - x0 + y0) * st)
    return State(u, x, v, y)


def asymptotic_propagator(b: float, t: float) -> np.ndarray:
    """Large-b limit of the propagator at eps = 1.

    Block rotation form: the displacements (u, v) rotate slowly with
    angular frequency 1/b while the velocities (x, y) counter-rotate
    fast with frequency b.  Valid as an approximation for eps = 1 and
    large b; exact only in the b -> infinity limit.
    """
    if not b > 1.0:
        raise ValueError(f"asymptotic form requires b > 1, got {b}")
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"time must be finite and >= 0, got {t}")
    cs, ss = math.cos(t / b), math.sin(t / b)
    cf, sf = math.cos(b * t), math.sin(b * t)
    return np.array(
        [
            [cs, 0.0, -ss, 0.0],
            [0.0, cf, 0.0, sf],
            [ss, 0.0, cs, 0.0],
            [0.0, -sf, 0.0, cf],
        ]
    )


class FitResult(NamedTuple):
    rate: float
    poly_degree: float
    log_amplitude: float
    rms_residual: float


def _trend_lstsq(ts: np.ndarray, logs: np.ndarray) -> tuple[np.ndarray, float]:
    design = np.column_stack([np.ones_like(ts), np.log1p(ts), ts])
    coef, *_ = np.linalg.lstsq(design, logs, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - logs) ** 2)))
    return coef, rms


def norm_growth_fit(
    p: Params,
    t_max: float | None = None,
    samples: int = 400,
    max_rms: float = 1.0,
) -> FitResult:
    """Fit log ||S(t)|| ~ log C + d*log(1+t) + w*t over [t_max/2, t_max].

    Measures the exponential rate w and the polynomial correction degree
    d of the propagator norm.  The fit window starts at t_max/2 to
    suppress transients.  When ``t_max`` is omitted it defaults to 60 in
    blowing-up regimes (overflow guard) and 200 otherwise.

    When the dominant eigenvalues are regular and complex, the norm
    oscillates periodically around its envelope and a plain least-squares
    fit leaks the oscillation into the trend columns.  In that case the
    fit is repeated through the local maxima of the detrended signal:
    the envelope touch points recur at a common phase, so they lie
    exactly on the trend and carry no oscillation bias.

    Raises FitError if a sampled norm exceeds 1e100 or the fit residual
    exceeds ``max_rms``.
    """
    if t_max is None:
        t_max = 60.0 if growth_bound(p) > 1e-12 else 200.0
    m = assemble_matrix(p)
    ts = np.linspace(t_max / 2.0, t_max, samples)
    logs = np.empty(samples)
    for k, t in enumerate(ts):
        nrm = operator_norm(expm(t * m))
        if nrm > _NORM_OVERFLOW:
            raise FitError(f"propagator norm {nrm:.3e} exceeds overflow guard at t={t:g}")
        logs[k] = math.log(nrm)

    coef, rms = _trend_lstsq(ts, logs)
    if rms > 1e-2:
        design = np.column_stack([np.ones_like(ts), np.log1p(ts), ts])
        for _ in range(2):
            resid = logs - design @ coef
            peaks = [
                k for k in range(1, samples - 1)
                if resid[k] >= resid[k - 1] and resid[k] > resid[k + 1]
            ]
            if len(peaks) < 4:
                break
            coef, rms = _trend_lstsq(ts[peaks], logs[peaks])
    if rms > max_rms:
        raise FitError(f"norm-growth fit residual {rms:.3e} exceeds {max_rms:g}")
    return FitResult(
        rate=float(coef[2]),
        poly_degree=float(coef[1]),
        log_amplitude=float(coef[0]),
        rms_residual=rms,
    )


def periodic_portrait_check(
    b: float,
    t_max: float = 200.0,
    ratio_tol: float = 1e-9,
    recurrence_tol: float = 1e-6,
) -> tuple[bool, float]:
    """Decide whether the eps = 1, b > 1 phase portrait is periodic.

    The two angular frequencies are w+- = (sqrt(b^2+3) +- sqrt(b^2-1))/2
    and the portrait closes iff their ratio is rational.  Rationality is
    decided by continued-fraction approximation with denominators capped
    at 1e4; float input cannot certify rationality beyond that scale.
    Returns (True, T) with T the common period, or (False, nan).

    Either verdict is cross-checked against the trajectory z(t) = S(t)z0
    with z0 = (1,0,0,0): a periodic verdict must recur to within
    ``recurrence_tol`` at T, an aperiodic one must not recur anywhere on
    a sampled grid over (0, t_max].  Violations raise IntegrationError.
    """
    if not b > 1.0:
        raise ValueError(f"periodicity check requires b > 1, got {b}")
    w_plus = (math.sqrt(b * b + 3.0) + math.sqrt(b * b - 1.0)) / 2.0
    w_minus = (math.sqrt(b * b + 3.0) - math.sqrt(b * b - 1.0)) / 2.0
    ratio = w_plus / w_minus
    frac = Fraction(ratio).limit_denominator(10_000)
    is_periodic = abs(ratio - float(frac)) <= ratio_tol

    m = assemble_matrix(Params(1.0, b))
    z0 = np.array([1.0, 0.0, 0.0, 0.0])
    if is_periodic:
        period = 2.0 * math.pi * frac.denominator / w_minus
        gap = float(np.linalg.norm(expm(period * m) @ z0 - z0))
        if gap > recurrence_tol:
            raise IntegrationError(
                f"predicted period {period:g} fails recurrence: gap {gap:.3e}"
            )
        return True, period
    for t in np.linspace(0.5, t_max, 1024):
        if float(np.linalg.norm(expm(t * m) @ z0 - z0)) <= recurrence_tol:
            raise IntegrationError(
                f"aperiodic verdict contradicted by recurrence at t={t:g}"
            )
    return False, math.nan
