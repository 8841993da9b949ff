"""Explicit wave solver on a 2D strip (decomposition along x only).

Same three-level scheme as the 1D kernel with the five-point Laplacian,

    u^{n+1} = 2 u^n - u^{n-1} + (c dt)^2 (dxx + dyy) u^n + dt^2 f^n,

Taylor start included, on a strip (x_left, x_right) x (y0, y1). The y
boundaries always carry physical Dirichlet data (pinned rows, applied
last so they own the corner nodes); the x boundaries take interface
traces of any kind, with one sample column per y node. Neumann/Robin
ghost columns mirror the 1D formulas row by row.

Stability: c dt sqrt(1/dx^2 + 1/dy^2) <= 1 against the largest step.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import CflViolation, IncompatibleGrids
from ..grids import InterfaceTrace, SpaceGrid1D, TimeGrid, TraceKind, grids_equal
from .problems import SpaceTimeField

__all__ = ["solve_wave_strip_2d"]

CFL_SLACK = 1e-12


def _check_bc(bc: InterfaceTrace, tgrid: TimeGrid, ny: int, side: str) -> None:
    if not grids_equal(bc.grid, tgrid):
        raise IncompatibleGrids(f"{side} boundary trace is not on the solve's time grid")
    if not bc.is_2d or bc.samples.shape[1] != ny + 1:
        raise IncompatibleGrids(f"{side} boundary trace must have one column per y node")


def _ghost_column(v: np.ndarray, dx: float, bc: InterfaceTrace, n: int, side: str) -> np.ndarray:
    """Mirror ghost column next to an x boundary at time step n."""
    if side == "left":
        inner, bound = v[1, :], v[0, :]
        sgn = -1.0
    else:
        inner, bound = v[-2, :], v[-1, :]
        sgn = 1.0
    if bc.kind is TraceKind.NEUMANN:
        return inner + sgn * 2.0 * dx * bc.samples[n]
    # Robin: data is outward-oriented, so both sides take the same form.
    return inner + 2.0 * dx * (bc.samples[n] - bc.robin_p * bound)


def solve_wave_strip_2d(
    xgrid: SpaceGrid1D,
    ygrid: SpaceGrid1D,
    c: float,
    tgrid: TimeGrid,
    initial_u: np.ndarray,
    initial_ut: np.ndarray,
    left_bc: InterfaceTrace,
    right_bc: InterfaceTrace,
    bottom: np.ndarray,
    top: np.ndarray,
    source=None,
) -> SpaceTimeField:
    """March the explicit wave scheme on one strip.

    ``initial_u``/``initial_ut`` are nodal arrays (nx+1, ny+1);
    ``bottom``/``top`` are pre-sampled physical Dirichlet histories of
    shape (M+1, nx+1) on the y boundaries.
    """
    ny = ygrid.n_cells
    _check_bc(left_bc, tgrid, ny, "left")
    _check_bc(right_bc, tgrid, ny, "right")
    if c <= 0:
        raise ValueError("wave speed must be positive")
    nx = xgrid.n_cells
    if nx < 2 or ny < 2:
        raise ValueError("a strip needs at least 2 cells in each direction")
    dx = xgrid.dx
    dy = ygrid.dx
    times = tgrid.times
    steps = np.diff(times)
    m_steps = len(steps)

    courant = c * steps.max() * math.sqrt(1.0 / dx**2 + 1.0 / dy**2)
    if courant > 1.0 + CFL_SLACK:
        raise CflViolation(f"c*dt*sqrt(1/dx^2+1/dy^2) = {courant!r} exceeds 1")

    u0 = np.asarray(initial_u, dtype=float)
    v0 = np.asarray(initial_ut, dtype=float)
    if u0.shape != (nx + 1, ny + 1) or v0.shape != (nx + 1, ny + 1):
        raise ValueError("initial data must be nodal (nx+1, ny+1) arrays")
    bottom = np.asarray(bottom, dtype=float)
    top = np.asarray(top, dtype=float)
    if bottom.shape != (m_steps + 1, nx + 1) or top.shape != (m_steps + 1, nx + 1):
        raise ValueError("bottom/top data must be (M+1, nx+1) histories")

    left_pinned = left_bc.kind is TraceKind.DIRICHLET
    right_pinned = right_bc.kind is TraceKind.DIRICHLET
    c2 = c**2
    if source is not None:
        xx = xgrid.nodes[:, None]
        yy = ygrid.nodes[None, :]

    u = np.empty((m_steps + 1, nx + 1, ny + 1))
    u[0] = u0

    def accel(n: int) -> np.ndarray:
        v = u[n]
        lap = np.zeros_like(v)
        # x part, ghost columns where the boundary is not pinned
        lap[1:-1, :] = (v[:-2, :] - 2.0 * v[1:-1, :] + v[2:, :]) / dx**2
        if not left_pinned:
            ghost = _ghost_column(v, dx, left_bc, n, "left")
            lap[0, :] = (ghost - 2.0 * v[0, :] + v[1, :]) / dx**2
        if not right_pinned:
            ghost = _ghost_column(v, dx, right_bc, n, "right")
            lap[-1, :] = (v[-2, :] - 2.0 * v[-1, :] + ghost) / dx**2
        # y part, interior rows only (y boundaries are pinned)
        lap[:, 1:-1] += (v[:, :-2] - 2.0 * v[:, 1:-1] + v[:, 2:]) / dy**2
        a = c2 * lap
        if source is not None:
            a = a + source(xx, yy, times[n])
        return a

    def pin(n: int) -> None:
        if left_pinned:
            u[n, 0, 1:-1] = left_bc.samples[n, 1:-1]
        if right_pinned:
            u[n, -1, 1:-1] = right_bc.samples[n, 1:-1]
        u[n, :, 0] = bottom[n]
        u[n, :, -1] = top[n]

    tau0 = steps[0]
    u[1] = u0 + tau0 * v0 + 0.5 * tau0**2 * accel(0)
    pin(1)

    for n in range(1, m_steps):
        tau = steps[n]
        tau_prev = steps[n - 1]
        u[n + 1] = (
            ((tau + tau_prev) / tau_prev) * u[n]
            - (tau / tau_prev) * u[n - 1]
            + 0.5 * tau * (tau + tau_prev) * accel(n)
        )
        pin(n + 1)

    return SpaceTimeField(
        xgrid=xgrid,
        tgrid=tgrid,
        values=u,
        left_kind=left_bc.kind,
        right_kind=right_bc.kind,
        ygrid=ygrid,
        initial_rate=v0,
    )
