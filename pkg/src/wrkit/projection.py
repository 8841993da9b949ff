"""Moving interface traces between time grids.

Subdomains may advance with different time steps, so transmission data
recorded on one grid has to be re-sampled on another before it can be
consumed. Re-sampling is piecewise-linear interpolation in time; the
interpolation weights for a (source, destination) pair are precomputed
once into a :class:`ProjectionPlan` by a single merged sweep over both
node lists, and applying a plan is a vectorized gather.

Linear interpolation keeps values inside the convex hull of neighbouring
samples (no overshoot) and reproduces linear-in-time data exactly, which
is what makes coarse->fine->coarse round trips of linear traces lossless.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleGrids, WindowMismatch
from .grids import InterfaceTrace, TimeGrid, grids_equal

__all__ = ["ProjectionPlan", "build_plan", "project_trace"]

#: Windows must agree to this tolerance (relative to max(1, T)).
WINDOW_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectionPlan:
    """Precomputed linear-interpolation weights from ``src`` to ``dst``.

    For destination node ``k`` the value is
    ``w0[k] * samples[idx0[k]] + w1[k] * samples[idx1[k]]``; weights lie
    in [0, 1] and sum to 1 per node, and the bracketing indices are
    nondecreasing in ``k``. ``work`` counts the elementary steps the
    construction sweep performed (for cost accounting: it grows linearly
    with the total node count).
    """

    src: TimeGrid
    dst: TimeGrid
    idx0: np.ndarray
    idx1: np.ndarray
    w0: np.ndarray
    w1: np.ndarray
    identity: bool
    work: int

    def __post_init__(self):
        for name in ("idx0", "idx1", "w0", "w1"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def build_plan(src: TimeGrid, dst: TimeGrid) -> ProjectionPlan:
    """Plan the projection of traces from grid ``src`` onto grid ``dst``.

    Raises :class:`WindowMismatch` when the two grids cover different
    windows [0, T]; projection never extrapolates.
    """
    if abs(src.T - dst.T) > WINDOW_RTOL * max(1.0, abs(src.T), abs(dst.T)):
        raise WindowMismatch(
            f"source window T={src.T!r} differs from destination T={dst.T!r}"
        )

    identity = grids_equal(src, dst)
    ts = src.times
    td = dst.times
    n_dst = len(td)
    idx0 = np.empty(n_dst, dtype=np.intp)
    w0 = np.empty(n_dst)
    work = 0

    # Merged sweep: both node lists are increasing, so the bracketing
    # source interval only ever moves forward.
    j = 0
    last = len(ts) - 2
    for k in range(n_dst):
        t = td[k]
        while j < last and ts[j + 1] < t:
            j += 1
            work += 1
        tau = ts[j + 1] - ts[j]
        theta = (t - ts[j]) / tau
        # Clamp away the float fuzz at shared endpoints.
        theta = min(1.0, max(0.0, theta))
        idx0[k] = j
        w0[k] = 1.0 - theta
        work += 1

    idx1 = np.minimum(idx0 + 1, len(ts) - 1)
    return ProjectionPlan(
        src=src,
        dst=dst,
        idx0=idx0,
        idx1=idx1,
        w0=w0,
        w1=1.0 - w0,
        identity=identity,
        work=work,
    )


def project_trace(trace: InterfaceTrace, plan: ProjectionPlan) -> InterfaceTrace:
    """Re-sample ``trace`` on the plan's destination grid.

    The trace must live on the plan's source grid. When the grids are
    identical the original (immutable) trace is returned as-is.
    """
    if not grids_equal(trace.grid, plan.src):
        raise IncompatibleGrids("trace does not live on the plan's source grid")
    if plan.identity:
        return trace

    samples = trace.samples
    if samples.ndim == 1:
        out = plan.w0 * samples[plan.idx0] + plan.w1 * samples[plan.idx1]
    else:
        out = (
            plan.w0[:, None] * samples[plan.idx0]
            + plan.w1[:, None] * samples[plan.idx1]
        )
    return InterfaceTrace(trace.kind, plan.dst, out, robin_p=trace.robin_p)
