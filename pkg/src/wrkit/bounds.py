"""Closed-form convergence envelopes for the relaxation iterations.

For the heat equation the Dirichlet-Neumann iteration with theta=1/2
contracts superlinearly; the envelope has the shape

    B(k) = (multiplier)^k * erfc(k * h_min / (2 sqrt(nu T)))

where the multiplier counts how strongly interface errors can amplify in
one sweep (it depends on the subdomain widths), and the erfc factor is
the probability-tail decay of how far heat information diffuses across
the thinnest subdomain in the window [0, T]. For equal widths the
multiplier can be replaced by a reflection series Q whenever that is
smaller, which matters for short windows.

For the wave equation convergence is exact after finitely many sweeps:
one sweep propagates exact boundary information a distance min(h_i/c_i)
in time, so a window of length T needs k sweeps with T <= k*min(h_i/c_i),
plus one final sweep to distribute the result.

Everything here is relative to the initial interface error, so B(0) = 1.

The complementary error function is implemented in-house (Maclaurin
series for small arguments, continued fraction for large ones) to keep
this module free of heavyweight dependencies; tests cross-check it
against a high-precision oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EvenCount, OddCount, QDiverged, UnequalWidths

__all__ = [
    "BoundCurve",
    "erfc_eval",
    "reflection_series",
    "heat_bound_unequal",
    "heat_bound_even",
    "heat_bound_equal",
    "wave_steps_needed",
    "bound_region",
    "make_bound_curve",
]

#: Switch point between the Maclaurin series and the continued fraction.
_ERFC_SWITCH = 2.0

#: Hard cap on reflection-series terms (defensive; see reflection_series).
_Q_MAX_TERMS = 400

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _erf_series(x: float) -> float:
    """Maclaurin series of erf, adequate for |x| <= ~2."""
    x2 = x * x
    term = x
    total = x
    n = 1
    while True:
        term *= -x2 * (2 * n - 1) / (n * (2 * n + 1))
        total += term
        if abs(term) < 1e-18 * abs(total) or n > 200:
            break
        n += 1
    return _TWO_OVER_SQRT_PI * total


def _erfc_continued_fraction(x: float) -> float:
    """Gauss continued fraction for erfc, adequate for x >= ~2.

    erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    evaluated with the modified Lentz algorithm.
    """
    tiny = 1e-300
    f = x if x != 0 else tiny
    c = f
    d = 0.0
    for n in range(1, 200):
        a = 0.5 * n
        d = x + a * d
        if d == 0.0:
            d = tiny
        c = x + a / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return math.exp(-x * x) / math.sqrt(math.pi) / f


def erfc_eval(x: float) -> float:
    """Complementary error function, relative accuracy <= 1e-12 on |x| <= 10."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("erfc_eval needs a finite argument")
    if x < 0.0:
        return 2.0 - erfc_eval(-x)
    if x <= _ERFC_SWITCH:
        return 1.0 - _erf_series(x)
    if x > 26.6:
        # exp(-x^2) underflows; erfc is far below any representable scale.
        return 0.0
    return _erfc_continued_fraction(x)


def reflection_series(h: float, nu: float, T: float) -> float:
    """The reflection sum Q(h, nu, T) used by the equal-width envelope.

    Q = 2 erfc(a) + sum_{i>=0} 2^{i+1} erfc(i a)   with a = h/(2 sqrt(nu T)).

    Terms decay like 2^i exp(-i^2 a^2), so the sum is finite for every
    positive h, nu, T, but the number of terms needed grows like 1/a^2;
    summation stops when a term drops below 1e-16 of the partial sum and
    aborts with QDiverged if 400 terms are not enough (very large nu*T/h^2).
    """
    if h <= 0 or nu <= 0 or T <= 0:
        raise ValueError("h, nu, T must be positive")
    a = h / (2.0 * math.sqrt(nu * T))
    total = 2.0 * erfc_eval(a)
    for i in range(_Q_MAX_TERMS):
        term = 2.0 ** (i + 1) * erfc_eval(i * a)
        total += term
        if term < 1e-16 * total:
            return total
    raise QDiverged(
        f"reflection series for h={h!r}, nu={nu!r}, T={T!r} did not settle "
        f"within {_Q_MAX_TERMS} terms"
    )


def _check_positive(nu: float, T: float, k: int) -> None:
    if nu <= 0 or T <= 0:
        raise ValueError("nu and T must be positive")
    if k < 0 or k != int(k):
        raise ValueError("iteration index k must be a nonnegative integer")


def heat_bound_unequal(m: int, widths: Sequence[float], nu: float, T: float, k: int) -> float:
    """Superlinear envelope for an odd count 2m+1 of (possibly) unequal widths.

    B(k) = (2m - 3 + 2 h_max/h_{m+1})^k * erfc(k h_min / (2 sqrt(nu T))),
    where h_{m+1} is the width of the middle subdomain.
    """
    w = np.asarray(widths, dtype=float)
    if len(w) % 2 == 0:
        raise EvenCount("odd subdomain count required; use heat_bound_even")
    if len(w) != 2 * m + 1:
        raise ValueError(f"expected 2m+1={2*m+1} widths, got {len(w)}")
    _check_positive(nu, T, k)
    multiplier = 2 * m - 3 + 2.0 * w.max() / w[m]
    return multiplier**k * erfc_eval(k * w.min() / (2.0 * math.sqrt(nu * T)))


def heat_bound_even(m: int, widths: Sequence[float], nu: float, T: float, k: int) -> float:
    """Superlinear envelope for an even count 2m+2 of subdomains.

    B(k) = (2m - 1 + 2 h_max/h_{m+1})^k * erfc(k h_min / (2 sqrt(nu T))).
    """
    w = np.asarray(widths, dtype=float)
    if len(w) % 2 == 1:
        raise OddCount("even subdomain count required; use heat_bound_unequal")
    if len(w) != 2 * m + 2:
        raise ValueError(f"expected 2m+2={2*m+2} widths, got {len(w)}")
    _check_positive(nu, T, k)
    multiplier = 2 * m - 1 + 2.0 * w.max() / w[m]
    return multiplier**k * erfc_eval(k * w.min() / (2.0 * math.sqrt(nu * T)))


def heat_bound_equal(count: int, h, nu: float, T: float, k: int) -> float:
    """Tightened envelope for an odd count 2m+1 of equal-width subdomains.

    B(k) = (min{2m - 1, Q(h, nu, T)})^k * erfc(k h / (2 sqrt(nu T))).

    ``h`` may be a scalar width or the full width list (which must then be
    uniform; otherwise UnequalWidths).
    """
    if count < 3 or count % 2 == 0:
        raise EvenCount("equal-width envelope is defined for odd counts 2m+1 >= 3")
    if np.ndim(h) > 0:
        w = np.asarray(h, dtype=float)
        if len(w) != count:
            raise ValueError(f"expected {count} widths, got {len(w)}")
        if not np.allclose(w, w[0], rtol=1e-12, atol=0.0):
            raise UnequalWidths(f"widths are not equal: {w.tolist()}")
        h = float(w[0])
    h = float(h)
    _check_positive(nu, T, k)
    m = (count - 1) // 2
    multiplier = min(2 * m - 1, reflection_series(h, nu, T))
    return multiplier**k * erfc_eval(k * h / (2.0 * math.sqrt(nu * T)))


def wave_steps_needed(T: float, widths, speeds, strict_2d: bool = False) -> int:
    """Iterations after which the wave iteration is exact.

    One sweep extends the region of exact interface data by
    ``min_i(h_i / c_i)`` in time; ``k`` sweeps cover a window with
    ``T <= k * min_i(h_i/c_i)`` (strict inequality for the 2D strip
    variant), and one more sweep propagates the final data, so the
    returned count is ``k + 1``.

    Per-subdomain speeds are reduced with ``min(h_i/c_i)``; that
    extension of the single-speed statement is a heuristic and is
    reported as such by the harness.
    """
    w = np.atleast_1d(np.asarray(widths, dtype=float))
    c = np.atleast_1d(np.asarray(speeds, dtype=float))
    if np.any(w <= 0) or np.any(c <= 0) or T <= 0:
        raise ValueError("T, widths, speeds must be positive")
    if len(c) == 1:
        c = np.full(len(w), c[0])
    if len(c) != len(w):
        raise ValueError("speeds must be scalar or one per subdomain")
    hoc = float((w / c).min())
    ratio = T / hoc
    if strict_2d:
        k = math.floor(ratio + 1e-12) + 1
    else:
        k = math.ceil(ratio - 1e-12)
    return max(k, 1) + 1


def bound_region(m: int, h: float, nu: float, T: float) -> str:
    """Which equal-width multiplier is smaller: ``2m-1`` or the Q series.

    Returns ``"Q_estimate"`` when Q(h, nu, T) < 2m - 1 and
    ``"multiplier_estimate"`` otherwise (ties and diverging Q both mean
    the plain multiplier is the binding one).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    try:
        q = reflection_series(h, nu, T)
    except QDiverged:
        return "multiplier_estimate"
    return "Q_estimate" if q < 2 * m - 1 else "multiplier_estimate"


@dataclass(frozen=True, eq=False)
class BoundCurve:
    """Envelope values B(k) for k = ks[0]..ks[-1], with a tag naming the model."""

    ks: np.ndarray
    values: np.ndarray
    tag: str

    def __post_init__(self):
        ks = np.asarray(self.ks, dtype=int)
        vals = np.asarray(self.values, dtype=float)
        if ks.shape != vals.shape or ks.ndim != 1:
            raise ValueError("ks and values must be matching 1D arrays")
        if np.any(vals < 0):
            raise ValueError("bound values must be nonnegative")
        if len(ks) and ks[0] == 0 and not math.isclose(vals[0], 1.0, rel_tol=1e-12):
            raise ValueError("bounds are relative to the initial error: B(0) = 1")
        ks.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "values", vals)


def make_bound_curve(fn: Callable[[int], float], kmax: int, tag: str) -> BoundCurve:
    """Tabulate ``fn(k)`` for k = 0..kmax into a BoundCurve."""
    ks = np.arange(kmax + 1)
    return BoundCurve(ks, np.array([fn(int(k)) for k in ks]), tag)
