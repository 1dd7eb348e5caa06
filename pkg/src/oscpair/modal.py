"""Per-mode analysis of the abstract extension with stiffness operator A.

Replacing the unit stiffness by a strictly positive selfadjoint operator
(e.g. the Dirichlet Laplacian) and projecting onto its eigenvectors
yields one independent 4x4 system per operator eigenvalue mu:

    u'' + mu*u + u' = b v',    v'' + mu*v - eps*v' = -b u'

whose characteristic polynomial works out to

    lam^4 + (1-eps)*lam^3 + (2*mu + b^2 - eps)*lam^2
          + mu*(1-eps)*lam + mu^2 = 0.

At mu = 1 this is the base system.  For eps < 1 the optimal coupling is
still b = (1+eps)/2, but the achievable rate degrades when the first
operator eigenvalue is small: the full rate (1-eps)/4 is recovered
exactly when mu >= (1-eps)^2/16.

Mode growth bounds use a dense eigensolver (the closed forms of the
spectrum module are specific to mu = 1) followed by cluster averaging:
a defective double root computed by LAPACK splits by ~sqrt(machine eps),
but the mean of the split pair is coefficient-accurate, so replacing
each root cluster by its mean restores ~1e-13 accuracy exactly at the
defective modes the analysis cares about.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .core import Params, assemble_matrix

__all__ = [
    "ModeFamily",
    "FamilyBound",
    "mode_matrix",
    "mode_characteristic_coeffs",
    "mode_growth_bound",
    "family_growth_bound",
    "threshold_check",
    "load_mode_family",
    "dirichlet_modes",
]

# Cluster radii by multiplicity: a defect-d root computed in double
# precision splits like eps_machine^(1/(d+1)), so wider radii are needed
# (and safe) only when more roots coalesce.
_CLUSTER_RADIUS = {4: 1e-3, 3: 1e-4, 2: 1e-6}


@dataclass(frozen=True)
class ModeFamily:
    """Finite list of operator eigenvalues mu, sorted strictly increasing.

    Input order does not matter and exact duplicates are dropped, so the
    family is a set; all entries must be positive (strictly positive
    operator).
    """

    mu: tuple[float, ...]
    label: str = ""

    def __init__(self, mu: Iterable[float], label: str = "") -> None:
        values = sorted({float(m) for m in mu})
        if not values:
            raise ValueError("mode family must contain at least one eigenvalue")
        if values[0] <= 0.0 or not all(math.isfinite(m) for m in values):
            raise ValueError("operator eigenvalues must be finite and > 0")
        object.__setattr__(self, "mu", tuple(values))
        object.__setattr__(self, "label", label)

    def __len__(self) -> int:
        return len(self.mu)


def dirichlet_modes(count: int, length: float = 1.0, label: str = "") -> ModeFamily:
    """First ``count`` Dirichlet Laplacian eigenvalues (k*pi/length)^2."""
    if count < 1:
        raise ValueError("count must be >= 1")
    mu = [(k * math.pi / length) ** 2 for k in range(1, count + 1)]
    return ModeFamily(mu, label=label or f"dirichlet[{count}] L={length:g}")


def load_mode_family(path: str | Path, label: str = "") -> ModeFamily:
    """Read a mode family from a text file: one positive real per line.

    Blank lines are skipped and ``#`` starts a comment (full-line or
    trailing).
    """
    values = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        values.append(float(line))
    return ModeFamily(values, label=label or str(path))


def mode_matrix(mu: float, p: Params) -> np.ndarray:
    """4x4 matrix of the mode system at operator eigenvalue mu.

    Identical to the base system matrix except that the unit stiffness
    is replaced by mu; trace is eps - 1, determinant is mu^2.
    """
    if not (mu > 0.0 and math.isfinite(mu)):
        raise ValueError(f"mu must be finite and > 0, got {mu}")
    m = assemble_matrix(p)
    m[1, 0] = -mu
    m[3, 2] = -mu
    return m


def mode_characteristic_coeffs(mu: float, p: Params) -> tuple[float, float, float, float, float]:
    """Coefficients (1, 1-eps, 2mu+b^2-eps, mu(1-eps), mu^2) of the mode quartic."""
    eps, b = p.epsilon, p.b
    return (1.0, 1.0 - eps, 2.0 * mu + b * b - eps, mu * (1.0 - eps), mu * mu)


def _cluster_representatives(eigs: np.ndarray) -> list[complex]:
    """Collapse root clusters to their means, largest multiplicity first.

    Means of clusters are insensitive to the sqrt-of-eps splitting of
    defective roots, which individual eigenvalues are not.
    """
    eigs = list(eigs)
    scale = 1.0 + max(abs(e) for e in eigs)
    n = len(eigs)

    if n == 4:
        spread = max(abs(x - y) for x in eigs for y in eigs)
        if spread <= _CLUSTER_RADIUS[4] * scale:
            return [sum(eigs) / 4.0]
        for drop in range(4):
            trio = [e for k, e in enumerate(eigs) if k != drop]
            if max(abs(x - y) for x in trio for y in trio) <= _CLUSTER_RADIUS[3] * scale:
                return [sum(trio) / 3.0, eigs[drop]]

    order = sorted(range(n), key=lambda k: (eigs[k].real, eigs[k].imag))
    used = [False] * n
    reps: list[complex] = []
    for pos, k in enumerate(order):
        if used[k]:
            continue
        used[k] = True
        partner = None
        best = _CLUSTER_RADIUS[2] * scale
        for m in order[pos + 1:]:
            if not used[m] and abs(eigs[k] - eigs[m]) <= best:
                best = abs(eigs[k] - eigs[m])
                partner = m
        if partner is None:
            reps.append(eigs[k])
        else:
            used[partner] = True
            reps.append(0.5 * (eigs[k] + eigs[partner]))
    return reps


def mode_growth_bound(mu: float, p: Params) -> float:
    """Max real part of the mode-system eigenvalues at stiffness mu."""
    eigs = np.linalg.eigvals(mode_matrix(mu, p))
    return float(max(rep.real for rep in _cluster_representatives(eigs)))


class FamilyBound(NamedTuple):
    value: float
    index: int
    mu: float


def family_growth_bound(f: ModeFamily, p: Params, tail_check: int = 8) -> FamilyBound:
    """Supremum of per-mode growth bounds over a finite mode family.

    Returns the supremum, the (0-based) index of the first mode
    attaining it within 1e-9, and that mode's eigenvalue.  The bound
    over the last ``tail_check`` modes must be stabilizing: consecutive
    tail differences may not grow (beyond a 1e-10 noise floor), since a
    growing tail would mean the finite truncation says nothing about the
    full family.  A non-stabilizing tail raises ArithmeticError.
    """
    bounds = [mode_growth_bound(mu, p) for mu in f.mu]
    top = max(bounds)
    index = next(k for k, g in enumerate(bounds) if g >= top - 1e-9 * (1.0 + abs(top)))

    tail = bounds[-min(tail_check, len(bounds)):]
    diffs = [abs(tail[k + 1] - tail[k]) for k in range(len(tail) - 1)]
    floor = 1e-10 * (1.0 + abs(top))
    for k in range(len(diffs) - 1):
        if diffs[k + 1] > diffs[k] and diffs[k + 1] > floor:
            raise ArithmeticError(
                f"mode tail not stabilizing: |diff| grows from {diffs[k]:.3e} "
                f"to {diffs[k + 1]:.3e} near mode {len(bounds) - len(diffs) + k}"
            )
    return FamilyBound(value=top, index=index, mu=f.mu[index])


def threshold_check(f: ModeFamily, epsilon: float) -> bool:
    """Whether the first operator eigenvalue clears (1-eps)^2/16.

    Above the threshold (inclusive) the optimally coupled family decays
    at the full rate (1-eps)/4; below it, the first mode drags the rate.
    Only meaningful for epsilon in [0, 1).
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"threshold requires 0 <= epsilon < 1, got {epsilon}")
    return f.mu[0] >= (1.0 - epsilon) ** 2 / 16.0
