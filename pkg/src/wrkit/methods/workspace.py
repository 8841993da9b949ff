"""Shared plumbing for the waveform-relaxation drivers.

This module owns everything the three drivers have in common: the
per-run grid bundle, one solver adapter per subdomain (model dispatch,
physical boundary data, flux extraction), projection-plan caching
between per-subdomain time grids, reference resolution for the error
metric, normalization of initial guesses, and the per-iteration
monitor that applies the stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IncompatibleGrids, NoReference, ValidationError
from ..grids import (
    InterfaceTrace,
    Partition1D,
    SpaceGrid1D,
    TimeGrid,
    TraceKind,
    grids_equal,
    make_time_grid,
    make_time_grid_clipped,
    zero_trace,
)
from ..kernels import (
    HeatProblem,
    Wave2DProblem,
    WaveProblem,
    heat_interface_flux,
    sample,
    solve_heat_subdomain,
    solve_monodomain,
    solve_wave_strip_2d,
    solve_wave_subdomain,
    wave_interface_flux,
)
from ..kernels.problems import SpaceTimeField
from ..projection import build_plan, project_trace
from .config import IterationHistory, Method, WrConfig
from .schedule import arrangement_schedule, producer_map

__all__ = [
    "RunGrids",
    "make_run_grids",
    "guess_grids",
    "traces_from_field",
    "swr_state_from_field",
]

_INTERVAL_RTOL = 1e-12


@dataclass(frozen=True)
class RunGrids:
    """Discretization of one run: shared dx, per-subdomain time grids, dy in 2D.

    The lattice spacing is shared by all subdomains (interfaces must sit
    on lattice nodes); the time grids may differ between subdomains, in
    which case traces are re-sampled in time whenever they cross an
    interface.
    """

    dx: float
    tgrids: tuple[TimeGrid, ...]
    dy: float | None = None


def make_run_grids(
    partition: Partition1D,
    dx: float,
    T: float,
    dt,
    dy: float | None = None,
    clip: bool = False,
) -> RunGrids:
    """Build the grid bundle from a spacing, a window, and step sizes.

    ``dt`` is one step size for all subdomains or a sequence with one per
    subdomain. With ``clip=True`` steps that do not divide ``T`` get a
    shorter final step instead of raising.
    """
    maker = make_time_grid_clipped if clip else make_time_grid
    if np.ndim(dt) == 0:
        tgrid = maker(T, float(dt))
        tgrids = (tgrid,) * partition.n_subdomains
    else:
        values = [float(v) for v in dt]
        if len(values) != partition.n_subdomains:
            raise ValidationError(
                f"need one dt per subdomain ({partition.n_subdomains}), got {len(values)}"
            )
        tgrids = tuple(maker(T, v) for v in values)
    return RunGrids(float(dx), tgrids, None if dy is None else float(dy))


def guess_grids(partition: Partition1D, grids: RunGrids, config: WrConfig) -> tuple[TimeGrid, ...]:
    """Per-interface time grids on which initial guesses must live.

    The Dirichlet-Neumann sweep keeps each interface trace on the time
    grid of the subdomain whose solve refreshes it; the symmetric methods
    (Neumann-Neumann, Schwarz) use the finer of the two neighbor grids.
    """
    n = partition.n_subdomains
    if config.method is Method.DNWR:
        producer = producer_map(arrangement_schedule(n, config.arrangement))
        return tuple(grids.tgrids[producer[i] - 1] for i in range(1, n))
    out = []
    for i in range(1, n):
        left, right = grids.tgrids[i - 1], grids.tgrids[i]
        out.append(left if left.n_steps >= right.n_steps else right)
    return tuple(out)


class _PlanCache:
    """Projection plans between the handful of time grids of one run."""

    def __init__(self):
        self._plans: dict[tuple[int, int], object] = {}

    def project(self, trace: InterfaceTrace, dst: TimeGrid) -> InterfaceTrace:
        if trace.grid is dst or grids_equal(trace.grid, dst):
            return trace
        key = (id(trace.grid), id(dst))
        plan = self._plans.get(key)
        if plan is None:
            # The plan holds references to both grids, so the ids in the
            # key cannot be recycled while the cache entry is alive.
            plan = build_plan(trace.grid, dst)
            self._plans[key] = plan
        return project_trace(trace, plan)


class _Workspace:
    """Solver adapter for one subdomain. Internal to the drivers."""

    def __init__(
        self,
        problem,
        grids: RunGrids,
        index: int,
        lo: float,
        hi: float,
        tgrid: TimeGrid,
        ygrid: SpaceGrid1D | None,
        speed: float | None,
    ):
        self.problem = problem
        self.index = index
        self.xgrid = SpaceGrid1D.with_spacing(lo, hi, grids.dx)
        self.tgrid = tgrid
        self.ygrid = ygrid

        x = self.xgrid.nodes
        t = tgrid.times
        if isinstance(problem, HeatProblem):
            self.nu = problem.nu
            self.u0 = sample(problem.initial, x.shape, x)
        elif isinstance(problem, WaveProblem):
            self.c = float(speed)
            self.u0 = sample(problem.initial_u, x.shape, x)
            self.v0 = sample(problem.initial_ut, x.shape, x)
        elif isinstance(problem, Wave2DProblem):
            self.c = float(speed)
            y = ygrid.nodes
            node_shape = (len(x), len(y))
            lid_shape = (len(t), len(x))
            self.u0 = sample(problem.initial_u, node_shape, x[:, None], y[None, :])
            self.v0 = sample(problem.initial_ut, node_shape, x[:, None], y[None, :])
            self.bottom = sample(problem.boundary_bottom, lid_shape, x[None, :], t[:, None])
            self.top = sample(problem.boundary_top, lid_shape, x[None, :], t[:, None])
        else:
            raise TypeError(f"unsupported problem type: {type(problem).__name__}")

    @property
    def ny(self) -> int | None:
        return None if self.ygrid is None else self.ygrid.n_cells

    def physical_trace(self, side: str) -> InterfaceTrace:
        """The problem's Dirichlet data at a physical x boundary."""
        fn = (
            self.problem.boundary_left if side == "left" else self.problem.boundary_right
        )
        t = self.tgrid.times
        if self.ygrid is None:
            values = sample(fn, t.shape, t)
        else:
            y = self.ygrid.nodes
            values = sample(fn, (len(t), len(y)), y[None, :], t[:, None])
        return InterfaceTrace(TraceKind.DIRICHLET, self.tgrid, values)

    def zero_dirichlet(self) -> InterfaceTrace:
        return zero_trace(self.tgrid, TraceKind.DIRICHLET, ny=self.ny)

    def solve(
        self,
        left_bc: InterfaceTrace,
        right_bc: InterfaceTrace,
        homogeneous: bool = False,
    ) -> SpaceTimeField:
        """Solve this subdomain's problem with the given boundary traces.

        ``homogeneous=True`` replaces initial data and source (and the
        physical y data in 2D) by zero; the Neumann-Neumann correction
        stage solves that way.
        """
        problem = self.problem
        if isinstance(problem, HeatProblem):
            u0 = np.zeros_like(self.u0) if homogeneous else self.u0
            source = None if homogeneous else problem.source
            return solve_heat_subdomain(
                self.xgrid, self.nu, self.tgrid, u0, left_bc, right_bc, source
            )
        if isinstance(problem, WaveProblem):
            u0 = np.zeros_like(self.u0) if homogeneous else self.u0
            v0 = np.zeros_like(self.v0) if homogeneous else self.v0
            source = None if homogeneous else problem.source
            return solve_wave_subdomain(
                self.xgrid, self.c, self.tgrid, u0, v0, left_bc, right_bc, source
            )
        if homogeneous:
            u0 = np.zeros_like(self.u0)
            v0 = np.zeros_like(self.v0)
            bottom = np.zeros_like(self.bottom)
            top = np.zeros_like(self.top)
            source = None
        else:
            u0, v0, bottom, top = self.u0, self.v0, self.bottom, self.top
            source = problem.source
        return solve_wave_strip_2d(
            self.xgrid, self.ygrid, self.c, self.tgrid, u0, v0, left_bc, right_bc, bottom, top, source
        )

    def flux(self, field: SpaceTimeField, side: str, homogeneous: bool = False) -> InterfaceTrace:
        """Schur-consistent +x derivative history at one boundary of a solve."""
        source = None if homogeneous else self.problem.source
        if isinstance(self.problem, HeatProblem):
            return heat_interface_flux(field, side, self.nu, source)
        return wave_interface_flux(field, side, self.c, source)

    def dirichlet_trace(self, field: SpaceTimeField, side: str) -> InterfaceTrace:
        """Solution history on one boundary of a solve, as a trace."""
        return InterfaceTrace(TraceKind.DIRICHLET, self.tgrid, field.boundary_values(side))


def exchange_scale(producer: _Workspace, consumer: _Workspace) -> float:
    """Neumann transmission factor between two subdomains.

    The quantity carried across an interface is the impedance-weighted
    slope c du/dx, so a consumer with its own speed imposes the
    producer's extracted slope times c_producer / c_consumer. Matching
    speeds (and the heat model, whose diffusivity is shared) scale by
    exactly one. With this weighting the relaxed sweep keeps its exact
    reflection cancellation at speed jumps, and the fixed point is the
    piecewise monodomain scheme.
    """
    cp = getattr(producer, "c", None)
    cc = getattr(consumer, "c", None)
    if cp is None or cc is None or cp == cc:
        return 1.0
    return cp / cc


def _problem_interval(problem) -> tuple[float, float]:
    return problem.x_interval if isinstance(problem, Wave2DProblem) else problem.interval


def _resolve_speeds(problem, n: int) -> list[float | None]:
    if isinstance(problem, HeatProblem):
        return [None] * n
    if isinstance(problem, Wave2DProblem):
        return [float(problem.speed)] * n
    if np.ndim(problem.speed) == 0:
        return [float(problem.speed)] * n
    speeds = [float(c) for c in problem.speed]
    if len(speeds) != n:
        raise ValidationError(f"need one wave speed per subdomain ({n}), got {len(speeds)}")
    return speeds


def _make_ygrid(problem: Wave2DProblem, dy: float) -> SpaceGrid1D:
    """The shared y grid of a strip decomposition.

    The requested spacing is snapped to the nearest node count, so
    apparently non-divisible values (0.16 on a width-pi strip, say)
    resolve to the obvious lattice instead of raising.
    """
    y0, y1 = problem.y_interval
    n = max(2, round((y1 - y0) / dy))
    return SpaceGrid1D.with_cells(y0, y1, n)


def build_workspaces(
    problem,
    partition: Partition1D,
    grids: RunGrids,
    bounds: dict[int, tuple[float, float]] | None = None,
) -> tuple[dict[int, _Workspace], SpaceGrid1D | None]:
    """One solver adapter per subdomain, plus the shared y grid (2D only).

    ``bounds`` optionally overrides subdomain intervals; the overlapping
    Schwarz driver extends its subdomains this way.
    """
    n = partition.n_subdomains
    if len(grids.tgrids) != n:
        raise ValidationError(f"need one time grid per subdomain ({n}), got {len(grids.tgrids)}")
    T0 = grids.tgrids[0].T
    for tg in grids.tgrids[1:]:
        if abs(tg.T - T0) > 1e-12 * max(1.0, abs(T0)):
            raise ValidationError("all subdomains must cover the same time window")

    a, b = _problem_interval(problem)
    pa, pb = partition.interval
    scale = max(1.0, abs(a), abs(b))
    if abs(a - pa) > _INTERVAL_RTOL * scale or abs(b - pb) > _INTERVAL_RTOL * scale:
        raise ValidationError(
            f"partition interval ({pa!r}, {pb!r}) does not match the problem's ({a!r}, {b!r})"
        )

    ygrid = None
    if isinstance(problem, Wave2DProblem):
        if grids.dy is None:
            raise ValidationError("2D strip runs need dy in RunGrids")
        ygrid = _make_ygrid(problem, grids.dy)

    speeds = _resolve_speeds(problem, n)
    spaces: dict[int, _Workspace] = {}
    for i in range(1, n + 1):
        lo, hi = partition.bounds(i)
        if bounds is not None and i in bounds:
            lo, hi = bounds[i]
        spaces[i] = _Workspace(problem, grids, i, lo, hi, grids.tgrids[i - 1], ygrid, speeds[i - 1])
    return spaces, ygrid


def _initial_value_fn(problem):
    return problem.initial if isinstance(problem, HeatProblem) else problem.initial_u


def force_compatible(
    trace: InterfaceTrace,
    problem,
    x: float,
    ygrid: SpaceGrid1D | None,
) -> InterfaceTrace:
    """Overwrite the rows of a Dirichlet guess that the scheme determines.

    The t=0 sample of an interface trace must equal the initial condition
    there: solvers write row 0 of every field from the initial data, so a
    guess that disagrees at t=0 would leave a never-decaying error in the
    monitored history (and spoil finite-step convergence). In 2D the
    corner columns belong to the physical y boundaries for the same
    reason. Guesses that already satisfy both come back unchanged in
    value.
    """
    values = np.array(trace.samples, dtype=float)
    u0 = _initial_value_fn(problem)
    if trace.is_2d:
        y = ygrid.nodes
        t = trace.grid.times
        values[0, :] = sample(u0, y.shape, x, y)
        values[:, 0] = sample(problem.boundary_bottom, t.shape, x, t)
        values[:, -1] = sample(problem.boundary_top, t.shape, x, t)
    else:
        values[0] = float(np.asarray(u0(x), dtype=float))
    return trace.with_samples(values)


def normalize_guesses(
    problem,
    partition: Partition1D,
    init_guesses,
    target_grids: tuple[TimeGrid, ...],
    ygrid: SpaceGrid1D | None,
) -> list[InterfaceTrace]:
    """Validate one Dirichlet guess per interface and force compatibility."""
    guesses = list(init_guesses)
    if len(guesses) != partition.n_interfaces:
        raise ValidationError(
            f"need one initial guess per interface ({partition.n_interfaces}), got {len(guesses)}"
        )
    out = []
    for i, trace in enumerate(guesses, start=1):
        if not isinstance(trace, InterfaceTrace) or trace.kind is not TraceKind.DIRICHLET:
            raise ValidationError(f"initial guess {i} must be a Dirichlet interface trace")
        if not grids_equal(trace.grid, target_grids[i - 1]):
            raise IncompatibleGrids(f"initial guess {i} is not on its interface time grid")
        if trace.is_2d != (ygrid is not None) or (
            trace.is_2d and trace.samples.shape[1] != ygrid.n_nodes
        ):
            raise IncompatibleGrids(f"initial guess {i} does not match the y grid")
        out.append(force_compatible(trace, problem, partition.interface_position(i), ygrid))
    return out


def traces_from_field(
    field: SpaceTimeField,
    partition: Partition1D,
    target_grids: tuple[TimeGrid, ...] | None = None,
) -> tuple[InterfaceTrace, ...]:
    """Dirichlet interface histories of a full-domain field.

    Returns one trace per interface, re-sampled onto ``target_grids``
    when given. Used for warm starts, references, and the error metric.
    """
    out = []
    for i in range(1, partition.n_interfaces + 1):
        j = field.xgrid.node_index(partition.interface_position(i))
        values = field.values[:, j] if not field.is_2d else field.values[:, j, :]
        trace = InterfaceTrace(TraceKind.DIRICHLET, field.tgrid, values)
        if target_grids is not None:
            trace = project_trace(trace, build_plan(field.tgrid, target_grids[i - 1]))
        out.append(trace)
    return tuple(out)


def reference_from_monodomain(
    problem,
    partition: Partition1D,
    grids: RunGrids,
    ygrid: SpaceGrid1D | None,
) -> tuple[InterfaceTrace, ...]:
    """Interface histories of the single-domain solve, on the finest time grid."""
    xgrid = SpaceGrid1D.with_spacing(*partition.interval, grids.dx)
    tgrid = max(grids.tgrids, key=lambda tg: tg.n_steps)
    field = solve_monodomain(problem, xgrid, tgrid, ygrid=ygrid, partition=partition)
    return traces_from_field(field, partition)


def resolve_reference(
    problem,
    partition: Partition1D,
    grids: RunGrids,
    reference,
    monitor_grids: tuple[TimeGrid, ...],
    ygrid: SpaceGrid1D | None,
) -> tuple[tuple[InterfaceTrace, ...] | None, str]:
    """Turn the ``reference`` argument of a driver into reference traces.

    ``"auto"`` solves the problem on the undecomposed domain and reads
    the interface histories off that field; ``"zero"`` compares against
    zero (error-equation runs, where all problem data vanishes and the
    interface traces themselves are the error); an explicit sequence
    supplies one trace per interface; ``None`` means no reference, and
    the drivers monitor the size of each update instead.
    """
    if reference is None:
        return None, "update_drop"
    if isinstance(reference, str):
        if reference == "zero":
            ny = None if ygrid is None else ygrid.n_cells
            ref = tuple(zero_trace(g, TraceKind.DIRICHLET, ny=ny) for g in monitor_grids)
            return ref, "reference"
        if reference == "auto":
            return reference_from_monodomain(problem, partition, grids, ygrid), "reference"
        raise NoReference(
            f"no reference called {reference!r}: use 'auto', 'zero', explicit traces, or None"
        )
    ref = tuple(reference)
    if len(ref) != partition.n_interfaces:
        raise ValidationError(
            f"need one reference trace per interface ({partition.n_interfaces}), got {len(ref)}"
        )
    return ref, "reference"


class _Monitor:
    """Collects per-iteration results and applies the stopping rule.

    With a reference, the monitored error is the max-abs distance of each
    interface trace to its reference trace, compared on the reference's
    time grid. Without one, it is the max-abs size of the latest update
    relative to the trace's own scale (clipped below at 1), so the rule
    degrades gracefully for traces near zero.
    """

    def __init__(self, config, cache, reference, metric, initial, prev):
        self.config = config
        self.cache = cache
        self.reference = reference
        self.metric = metric
        self.initial = tuple(initial)
        self.prev = list(prev)
        self.dirichlet: list[tuple[InterfaceTrace, ...]] = []
        self.fluxes: list[tuple[InterfaceTrace, ...]] = []
        self.errors: list[tuple[float, ...]] = []
        self.max_errors: list[float] = []
        self.converged_at: int | None = None

    def record(self, k: int, traces, fluxes) -> bool:
        """Append iteration ``k``; True when the run should stop."""
        if self.metric == "reference":
            errs = tuple(
                float(np.max(np.abs(self.cache.project(tr, ref.grid).samples - ref.samples)))
                for tr, ref in zip(traces, self.reference)
            )
        else:
            values = []
            for tr, old in zip(traces, self.prev):
                jump = float(np.max(np.abs(tr.samples - old.samples)))
                scale = max(1.0, float(np.max(np.abs(tr.samples))))
                values.append(jump / scale)
            errs = tuple(values)
        self.dirichlet.append(tuple(traces))
        self.fluxes.append(tuple(fluxes))
        self.errors.append(errs)
        worst = max(errs)
        self.max_errors.append(worst)
        self.prev = list(traces)
        if worst <= self.config.tol:
            self.converged_at = k
            return True
        return False

    def history(self) -> IterationHistory:
        return IterationHistory(
            config=self.config,
            initial=self.initial,
            dirichlet=tuple(self.dirichlet),
            fluxes=tuple(self.fluxes),
            errors=tuple(self.errors),
            max_errors=tuple(self.max_errors),
            converged_at=self.converged_at,
            metric=self.metric,
            reference=self.reference,
        )


def swr_state_from_field(
    field: SpaceTimeField,
    partition: Partition1D,
    grids: RunGrids,
    config: WrConfig,
) -> list[tuple[InterfaceTrace, InterfaceTrace]]:
    """Schwarz transmission state sampled from a full-domain field.

    Returns, per interface, the pair of data traces the two neighbors
    would consume next: for classical Schwarz the solution histories at
    the interface pushed outward by the overlap, for Robin Schwarz the
    outward Robin combinations built from the field's centered derivative
    at the interface. Feeding this state into :func:`~wrkit.methods.swr_run`
    warm-starts the iteration at the discrete fixed point.
    """
    cache = _PlanCache()
    out = []
    for i in range(1, partition.n_interfaces + 1):
        xi = partition.interface_position(i)
        left_grid = grids.tgrids[i - 1]
        right_grid = grids.tgrids[i]
        if config.method is Method.SWR_CLASSICAL:
            shift = config.overlap_cells * grids.dx
            j_right = field.xgrid.node_index(xi + shift)
            j_left = field.xgrid.node_index(xi - shift)
            vals_right = field.values[:, j_right] if not field.is_2d else field.values[:, j_right, :]
            vals_left = field.values[:, j_left] if not field.is_2d else field.values[:, j_left, :]
            for_left_sub = InterfaceTrace(TraceKind.DIRICHLET, field.tgrid, vals_right)
            for_right_sub = InterfaceTrace(TraceKind.DIRICHLET, field.tgrid, vals_left)
        elif config.method is Method.SWR_ROBIN:
            p = config.robin_p
            j = field.xgrid.node_index(xi)
            u = field.values[:, j] if not field.is_2d else field.values[:, j, :]
            w = (
                (field.values[:, j + 1] - field.values[:, j - 1])
                if not field.is_2d
                else (field.values[:, j + 1, :] - field.values[:, j - 1, :])
            ) / (2.0 * field.xgrid.dx)
            for_left_sub = InterfaceTrace(TraceKind.ROBIN, field.tgrid, w + p * u, robin_p=p)
            for_right_sub = InterfaceTrace(TraceKind.ROBIN, field.tgrid, -w + p * u, robin_p=p)
        else:
            raise ValidationError("transmission state applies to the Schwarz methods only")
        out.append(
            (cache.project(for_left_sub, left_grid), cache.project(for_right_sub, right_grid))
        )
    return out
