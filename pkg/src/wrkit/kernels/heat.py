"""Backward-Euler heat solver on one subdomain, plus flux extraction.

Discretization: implicit first-order time stepping with the standard
three-point second difference,

    (u^{n+1} - u^n)/dt = nu * dxx u^{n+1} + f^{n+1},

so each step solves a tridiagonal system with r = nu dt/dx^2 on the
diagonal pattern (-r, 1+2r, -r). Boundary conditions:

* Dirichlet: the node is pinned and removed from the unknown set; its
  coupling moves to the right-hand side.
* Neumann (given w = u_x in +x orientation): a mirror ghost node
  eliminates the derivative, u_ghost = u_in -/+ 2 dx w (left/right), and
  the boundary row becomes (1+2r) u_b - 2r u_in = rhs -/+ 2 r dx w.
* Robin (given rho = (d/dn + p) u, outward normal): same ghost trick,
  adding 2 dx r p to the boundary diagonal and 2 r dx rho to the rhs.

Neumann/Robin rows are scaled by 1/2, which symmetrizes the matrix; it
is then positive definite for every r > 0 (and p > 0), so one banded
Cholesky factorization per distinct step size serves the whole window.

Flux extraction recovers u_x at a boundary from the one-sided difference
plus a half-cell correction that replaces the second space derivative
through the PDE itself:

    w = +/- [ (u_in - u_b)/dx - (dx/(2 nu)) * (du_b/dt - f_b) ]

with the backward time difference at each step. With this exact pairing
the flux extracted from a subdomain solve equals the centered difference
of the underlying single-domain solution whenever the subdomain data came
from that solution: the multidomain fixed point is the monodomain scheme.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from ..errors import IncompatibleGrids, SingularSystem, WrongBoundaryKind
from ..grids import InterfaceTrace, SpaceGrid1D, TimeGrid, TraceKind, grids_equal
from .problems import SpaceTimeField

__all__ = ["solve_heat_subdomain", "heat_interface_flux"]


def _check_bc(bc: InterfaceTrace, tgrid: TimeGrid, side: str) -> None:
    if not grids_equal(bc.grid, tgrid):
        raise IncompatibleGrids(f"{side} boundary trace is not on the solve's time grid")
    if bc.is_2d:
        raise IncompatibleGrids(f"{side} boundary trace is 2D; this solver is 1D")


def _factorize(ab: np.ndarray):
    try:
        return cholesky_banded(ab, lower=False)
    except LinAlgError as exc:  # defensive: the scaled system is SPD
        raise SingularSystem(str(exc)) from exc


def _build_matrix(r: float, dx: float, n_unk: int, left_bc, right_bc, left_open: bool, right_open: bool):
    """Upper banded (2, n) matrix for one step size.

    ``left_open``/``right_open`` say whether the boundary node is an
    unknown (Neumann/Robin) rather than pinned (Dirichlet).
    """
    ab = np.zeros((2, n_unk))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r
    if left_open:
        diag = 1.0 + 2.0 * r
        if left_bc.kind is TraceKind.ROBIN:
            diag += 2.0 * dx * r * left_bc.robin_p
        ab[1, 0] = 0.5 * diag
    if right_open:
        diag = 1.0 + 2.0 * r
        if right_bc.kind is TraceKind.ROBIN:
            diag += 2.0 * dx * r * right_bc.robin_p
        ab[1, -1] = 0.5 * diag
    return ab


def solve_heat_subdomain(
    grid: SpaceGrid1D,
    nu: float,
    tgrid: TimeGrid,
    initial: np.ndarray,
    left_bc: InterfaceTrace,
    right_bc: InterfaceTrace,
    source=None,
) -> SpaceTimeField:
    """March the implicit heat scheme across the window on one subdomain.

    ``initial`` holds nodal values of u(x, 0); the boundary traces must
    live on ``tgrid``. Returns the full space-time field.
    """
    _check_bc(left_bc, tgrid, "left")
    _check_bc(right_bc, tgrid, "right")
    if nu <= 0:
        raise ValueError("nu must be positive")
    nx = grid.n_cells
    if nx < 2:
        raise ValueError("a subdomain needs at least 2 cells")
    dx = grid.dx
    x = grid.nodes
    times = tgrid.times
    m_steps = len(times) - 1

    initial = np.asarray(initial, dtype=float)
    if initial.shape != (nx + 1,):
        raise ValueError("initial data must have one value per node")

    left_open = left_bc.kind is not TraceKind.DIRICHLET
    right_open = right_bc.kind is not TraceKind.DIRICHLET
    lo = 0 if left_open else 1
    hi = nx if right_open else nx - 1
    n_unk = hi - lo + 1

    u = np.empty((m_steps + 1, nx + 1))
    u[0] = initial

    g_left = left_bc.samples
    g_right = right_bc.samples
    x_unk = x[lo : hi + 1]
    factors: dict[float, tuple] = {}

    for n in range(m_steps):
        dt = times[n + 1] - times[n]
        r = nu * dt / dx**2
        key = dt
        if key not in factors:
            factors[key] = (_factorize(_build_matrix(r, dx, n_unk, left_bc, right_bc, left_open, right_open)), r)
        cb, r = factors[key]

        b = u[n, lo : hi + 1].copy()
        if source is not None:
            b += dt * source(x_unk, times[n + 1])

        if left_open:
            if left_bc.kind is TraceKind.NEUMANN:
                b[0] -= 2.0 * r * dx * g_left[n + 1]
            else:
                b[0] += 2.0 * r * dx * g_left[n + 1]
            b[0] *= 0.5
        else:
            b[0] += r * g_left[n + 1]
        if right_open:
            # Neumann and Robin enter with the same sign at the right end.
            b[-1] += 2.0 * r * dx * g_right[n + 1]
            b[-1] *= 0.5
        else:
            b[-1] += r * g_right[n + 1]

        u[n + 1, lo : hi + 1] = cho_solve_banded((cb, False), b)
        if not left_open:
            u[n + 1, 0] = g_left[n + 1]
        if not right_open:
            u[n + 1, nx] = g_right[n + 1]

    return SpaceTimeField(
        xgrid=grid,
        tgrid=tgrid,
        values=u,
        left_kind=left_bc.kind,
        right_kind=right_bc.kind,
    )


def heat_interface_flux(
    field: SpaceTimeField,
    side: str,
    nu: float,
    source=None,
) -> InterfaceTrace:
    """Recover the +x-oriented boundary derivative history of a heat solve.

    Requires a boundary where the solution value was imposed (Dirichlet;
    Robin also works since the extraction only uses the PDE at the node).
    Raises :class:`WrongBoundaryKind` at a Neumann boundary, where the
    derivative was the input. The t=0 sample uses a forward time
    difference; no implicit step ever consumes it.
    """
    if field.is_2d:
        raise ValueError("heat_interface_flux expects a 1D field")
    if field.boundary_kind(side) is TraceKind.NEUMANN:
        raise WrongBoundaryKind(f"{side} boundary carried Neumann data; flux is not recoverable")
    u = field.values
    dx = field.xgrid.dx
    times = field.tgrid.times
    steps = np.diff(times)
    if side == "left":
        j0, j1, sgn = 0, 1, 1.0
        x0 = field.xgrid.x_left
    else:
        j0, j1, sgn = field.xgrid.n_cells, field.xgrid.n_cells - 1, -1.0
        x0 = field.xgrid.x_right

    ub = u[:, j0]
    dudt = np.empty(len(times))
    dudt[1:] = (ub[1:] - ub[:-1]) / steps
    dudt[0] = (ub[1] - ub[0]) / steps[0]
    fvals = source(x0, times) if source is not None else 0.0

    w = sgn * ((u[:, j1] - ub) / dx - (0.5 * dx / nu) * (dudt - fvals))
    return InterfaceTrace(TraceKind.NEUMANN, field.tgrid, w)
