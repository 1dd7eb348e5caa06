"""Figure reproduction: trajectory CSV files plus declarative plot scripts.

Each figure is a FigureSpec: one initial state, a time window, and one
or more parameter sets.  Rendering is out of scope; the writer emits a
CSV with header ``t,u,x,v,y,E`` (one block per parameter set, separated
by a blank line, 17-digit shortest round-trip floats) and a small
renderer-agnostic ``.plot`` script that references the CSV columns by
name only.

The built-in specs fig1..fig9 cover: the three energy regimes at
eps = 1 (fig1), the periodic phase portrait at b = sqrt(q + 1/q - 1)
(fig2), energies for growing b > 1 with zero and nonzero initial
velocity (fig3, fig4), numerical versus asymptotic solutions (fig5,
fig6), the three energy regimes at eps = 1/2 (fig7), and decaying
phase portraits at eps = 1/2 (fig8, fig9).  Each figure fixes its
initial state; coupling values and time windows are chosen to make the
qualitative behavior visible and are part of the defaults below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Params, State, energy
from .sim import Trajectory, asymptotic_propagator, integrate, periodic_portrait_check
from .spectrum import growth_bound

__all__ = [
    "ENERGY_OVERFLOW",
    "FIGURE_IDS",
    "FigureSpec",
    "default_figure_spec",
    "write_figure",
]

ENERGY_OVERFLOW = 1e100

FIGURE_IDS = tuple(f"fig{k}" for k in range(1, 10))

_PORTRAIT_FIGURES = {"fig2", "fig8", "fig9"}
_ASYMPTOTIC_FIGURES = {"fig5", "fig6"}

# three-regime comparison figures carry three parameter sets, the rest one
_PARAM_COUNTS = {fig: (3 if fig in ("fig1", "fig3", "fig4", "fig7") else 1) for fig in FIGURE_IDS}


@dataclass(frozen=True)
class FigureSpec:
    """One figure: parameter sets, shared initial state, time window."""

    figure_id: str
    params: tuple[Params, ...]
    z0: State
    t_end: float
    output_stem: str
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}")
        want = _PARAM_COUNTS[self.figure_id]
        if len(self.params) != want:
            raise ValueError(
                f"{self.figure_id} requires {want} parameter set(s), got {len(self.params)}"
            )
        if self.labels and len(self.labels) != len(self.params):
            raise ValueError("labels must match parameter sets one-to-one")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be finite and > 0, got {self.t_end}")

    @property
    def portrait(self) -> bool:
        return self.figure_id in _PORTRAIT_FIGURES

    @property
    def with_asymptotic(self) -> bool:
        return self.figure_id in _ASYMPTOTIC_FIGURES


def _b_from_q(q: float) -> float:
    if not q > 1.0:
        raise ValueError(f"q must be > 1 (q = 1 is the defective b = 1), got {q}")
    return math.sqrt(q + 1.0 / q - 1.0)


def default_figure_spec(
    figure_id: str,
    output_stem: str | None = None,
    q: float = 4.0,
    t_end: float | None = None,
    z0: State | None = None,
) -> FigureSpec:
    """Built-in spec for fig1..fig9, with optional overrides."""
    if figure_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {figure_id!r}")
    stem = output_stem if output_stem is not None else figure_id

    if figure_id == "fig1":
        bs, z, t = (0.5, 1.0, 2.0), State(1, 0, 0, 0), 30.0
        eps = (1.0,) * 3
    elif figure_id == "fig2":
        b = _b_from_q(q)
        periodic, period = periodic_portrait_check(b)
        bs, z = (b,), State(1, 0, 0, 0)
        t = period if periodic else 40.0
        eps = (1.0,)
    elif figure_id == "fig3":
        bs, z, t = (1.5, 3.0, 10.0), State(1, 0, 0, 0), 70.0
        eps = (1.0,) * 3
    elif figure_id == "fig4":
        bs, z, t = (1.5, 3.0, 10.0), State(1, 0.5, 0, 0), 70.0
        eps = (1.0,) * 3
    elif figure_id == "fig5":
        bs, z, t = (5.0,), State(1, 0.1, 0, 0), 20.0
        eps = (1.0,)
    elif figure_id == "fig6":
        bs, z, t = (20.0,), State(1, 0.1, 0, 0), 20.0
        eps = (1.0,)
    elif figure_id == "fig7":
        root = math.sqrt(0.5)
        bs, z, t = (0.35, root, 1.5), State(1, 0, 0, 0), 40.0
        eps = (0.5,) * 3
    elif figure_id == "fig8":
        bs, z, t = (1.0,), State(1, 1, 1, 1), 60.0
        eps = (0.5,)
    else:  # fig9
        bs, z, t = (2.0,), State(1, 1, 1, 1), 60.0
        eps = (0.5,)

    params = tuple(Params(e, b) for e, b in zip(eps, bs))
    labels = tuple(f"epsilon={e:g} b={b:g}" for e, b in zip(eps, bs))
    return FigureSpec(
        figure_id=figure_id,
        params=params,
        z0=z0 if z0 is not None else z,
        t_end=t_end if t_end is not None else t,
        output_stem=stem,
        labels=labels,
    )


def _block_trajectory(p: Params, spec: FigureSpec, tol: float, samples: int) -> tuple[Trajectory, bool]:
    """Integrate one block, stopping early if the energy would overflow."""
    t_end = spec.t_end
    omega = growth_bound(p)
    truncated = False
    if omega > 1e-9:
        e0 = max(energy(spec.z0), 1e-12)
        t_over = (math.log(ENERGY_OVERFLOW) - math.log(2.0 * e0)) / (2.0 * omega)
        if t_over < t_end:
            t_end = min(t_end, 1.02 * t_over + 1.0)
            truncated = True
    traj = integrate(p, spec.z0, t_end, tol=tol, samples=samples)
    return traj, truncated


def _format_row(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def write_figure(
    spec: FigureSpec,
    tol: float = 1e-10,
    samples: int = 1200,
    directory: str | Path = ".",
) -> tuple[Path, Path]:
    """Write ``<stem>.csv`` and ``<stem>.plot`` for a figure spec.

    Deterministic: the same spec produces byte-identical files.  Floats
    are printed with shortest round-trip precision, so re-parsing the
    CSV reproduces the computed trajectory exactly.  In blowing-up
    regimes the series is truncated at E > 1e100 and a note row is
    inserted.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{spec.output_stem}.csv"
    plot_path = directory / f"{spec.output_stem}.plot"

    header = "t,u,x,v,y,E"
    if spec.with_asymptotic:
        header += ",u_asym,v_asym"

    lines = [header]
    labels = spec.labels or tuple(
        f"epsilon={p.epsilon:g} b={p.b:g}" for p in spec.params
    )
    for k, p in enumerate(spec.params):
        if k > 0:
            lines.append("")
        lines.append(f"# block {k}: {labels[k]}")
        traj, truncated = _block_trajectory(p, spec, tol, samples)
        z0 = spec.z0.as_array()
        for i, t in enumerate(traj.times):
            e = traj.energies[i]
            if e > ENERGY_OVERFLOW:
                truncated = True
                break
            row = [t, *traj.states[i], e]
            if spec.with_asymptotic:
                za = asymptotic_propagator(p.b, float(t)) @ z0
                row.extend([za[0], za[2]])
            lines.append(_format_row(row))
        if truncated:
            lines.append(f"# truncated: E > {ENERGY_OVERFLOW:g} beyond this point")
    csv_path.write_text("\n".join(lines) + "\n")

    plot_path.write_text(_plot_script(spec, csv_path.name, labels))
    return csv_path, plot_path


def _plot_script(spec: FigureSpec, csv_name: str, labels: tuple[str, ...]) -> str:
    """Declarative plot description referencing CSV columns by name."""
    out = [
        f"# plot script for {csv_name}",
        "# blocks are blank-line separated; '#' lines are comments",
        f"data {csv_name}",
    ]
    if spec.portrait:
        out += ["xlabel u", "ylabel du/dt", "aspect equal"]
        for k in range(len(spec.params)):
            out.append(f'curve block={k} x=u y=x label="{labels[k]}"')
    elif spec.with_asymptotic:
        out += ["xlabel t", "ylabel u, v"]
        for name in ("u", "u_asym", "v", "v_asym"):
            out.append(f'curve block=0 x=t y={name} label="{name} ({labels[0]})"')
    else:
        out += ["xlabel t", "ylabel E"]
        for k in range(len(spec.params)):
            out.append(f'curve block={k} x=t y=E label="{labels[k]}"')
    return "\n".join(out) + "\n"


def parse_figure_csv(path: str | Path) -> list[dict[str, np.ndarray]]:
    """Read back a figure CSV into one column dict per block."""
    text = Path(path).read_text().splitlines()
    header = text[0].split(",")
    blocks: list[list[list[float]]] = [[]]
    for line in text[1:]:
        if not line.strip():
            if blocks[-1]:
                blocks.append([])
            continue
        if line.startswith("#"):
            continue
        blocks[-1].append([float(tok) for tok in line.split(",")])
    return [
        {name: np.array([row[j] for row in block]) for j, name in enumerate(header)}
        for block in blocks
        if block
    ]
