"""Periodized sinc power sums with certified truncation error.

For ``r >= 1`` the function

    f_r(x) = sum_{m in Z} h(x + m)**r,    h(x) = sinc(pi x)**2

is 1-periodic and symmetric about ``x = 1/2``.  Everything here works on
``x in [0, 1]``; callers reduce other arguments by periodicity first.

The truncated sum pairs the terms ``m`` and ``-(m + 1)`` so that every
partial sum is exactly symmetric under ``x -> 1 - x``::

    S_N(x) = sum_{m=0}^{N} h(x + m)**r + h(x - m - 1)**r

The dropped terms are bounded by an integral comparison (midpoint rule,
valid because the terms are convex in ``m``), see :func:`tail_bound`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps
SINC_TAYLOR_CUTOFF = 1e-4
DEFAULT_MAX_TERMS = 10**7

# number of (point, term) pairs handled per vectorized block
_BLOCK = 1 << 20


class EvaluationError(RuntimeError):
    """Raised when a requested tolerance cannot be met within the term cap."""


@dataclass(frozen=True)
class EvalParams:
    r: float
    tol: float = 1e-12
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if not (self.r >= 1 and math.isfinite(self.r)):
            raise ValueError(f"exponent r must be a finite number >= 1, got {self.r}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 2:
            raise ValueError(f"max_terms must be an integer >= 2, got {self.max_terms}")


@dataclass(frozen=True)
class CertifiedValue:
    value: float
    error_bound: float
    terms: int = 0

    def __post_init__(self):
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be nonnegative")

    @property
    def lo(self) -> float:
        return self.value - self.error_bound

    @property
    def hi(self) -> float:
        return self.value + self.error_bound

    def contains(self, other: float, slack: float = 0.0) -> bool:
        return abs(other - self.value) <= self.error_bound + slack

    def __str__(self):
        return f"{self.value:.17g} +/- {self.error_bound:.3e}"


@dataclass(frozen=True)
class PhiPoint:
    u: float
    D: float

    def __post_init__(self):
        if abs(self.u) > 0.5:
            raise ValueError(f"|u| must be <= 1/2, got u={self.u}")
        if self.D < 0.5:
            raise ValueError(f"D must be >= 1/2, got D={self.D}")

    @classmethod
    def from_m(cls, m: int, u: float) -> "PhiPoint":
        return cls(u=u, D=m + 0.5)


def sinc(x):
    """Unnormalized sinc, ``sin(x)/x`` with ``sinc(0) = 1``.

    Below ``|x| = 1e-4`` the Taylor polynomial ``1 - x**2/6`` is used; its
    truncation error there is below ``x**4/120 < 1e-18``.
    """
    xa = np.asarray(x, dtype=float)
    small = np.abs(xa) < SINC_TAYLOR_CUTOFF
    safe = np.where(small, 1.0, xa)
    out = np.where(small, 1.0 - xa * xa / 6.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def _sin_pi(x):
    # sin(pi x) with exact reduction to [-1/2, 1/2]; x - round(x) is exact.
    k = np.rint(x)
    f = x - k
    sign = np.where(np.fmod(k, 2.0) == 0.0, 1.0, -1.0)
    return sign * np.sin(np.pi * f)


def h(x):
    """``sinc(pi x)**2``.  Equals 1 only at 0 and vanishes at nonzero integers."""
    xa = np.asarray(x, dtype=float)
    near0 = np.abs(xa) < 0.5
    safe = np.where(near0, 1.0, xa)
    far = _sin_pi(safe) / (np.pi * safe)
    out = np.where(near0, sinc(np.pi * np.where(near0, xa, 0.0)), far)
    out = out * out
    return float(out) if out.ndim == 0 else out


def _check_unit(x):
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0) or np.any(xa > 1):
        raise ValueError("x must lie in [0, 1]; reduce by periodicity first")
    return xa


def _sin2_pi_unit(x):
    # sin^2(pi x) on [0, 1], using 1 - x (exact for x >= 1/2) near the right end
    xa = np.asarray(x, dtype=float)
    return np.sin(np.pi * np.minimum(xa, 1.0 - xa)) ** 2


def s_m(m: int, x):
    """Paired term ``h(x + m) + h(x - (m + 1))`` in closed form.

    Uses ``sin^2(pi x)/pi^2 * ((m + x)^-2 + (m + 1 - x)^-2)``; for ``m = 0``
    the two factors are folded back into sinc so the endpoints are regular.
    """
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    xa = _check_unit(x)
    if m == 0:
        out = sinc(np.pi * xa) ** 2 + sinc(np.pi * (1.0 - xa)) ** 2
    else:
        out = _sin2_pi_unit(xa) / np.pi**2 * (1.0 / (m + xa) ** 2 + 1.0 / (m + 1.0 - xa) ** 2)
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def y_half(m):
    """``s_m(1/2) = 8 / (pi^2 (2m + 1)^2)``."""
    ma = np.asarray(m, dtype=float)
    if np.any(ma < 0):
        raise ValueError("m must be nonnegative")
    out = 8.0 / (np.pi**2 * (2.0 * ma + 1.0) ** 2)
    return float(out) if out.ndim == 0 else out


def tail_bound(N: int, r: float, x):
    """Upper bound on ``sum_{|m| > N} h(x + m)**r`` for ``x`` in [0, 1].

    Those terms are ``(sin^2(pi x)/pi^2)^r * (m + x)^(-2r)`` for ``m > N``
    and ``(k - x)^(-2r)`` for ``k = -m > N``.  Each is convex in its index,
    so the sum over indices ``>= N + 1`` is at most the integral from
    ``N + 1/2``.  The paired partial sum keeps the ``m = -(N + 1)`` term as
    well, so its truncation error is covered too.
    """
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if not r >= 1:
        raise ValueError(f"r must be >= 1, got {r}")
    xa = _check_unit(x)
    p = 2.0 * r - 1.0
    amp = (_sin2_pi_unit(xa) / np.pi**2) ** r
    out = amp / p * ((N + 0.5 + xa) ** (-p) + (N + 0.5 - xa) ** (-p))
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def terms_for_tol(r: float, tol: float, max_terms: int = DEFAULT_MAX_TERMS, x=0.5) -> int:
    """Smallest ``N`` in ``[2, max_terms]`` with ``tail_bound(N, r, x) <= tol``.

    ``x`` may be an array, in which case the worst point decides.
    """
    def worst(n):
        return float(np.max(tail_bound(n, r, x)))

    if worst(2) <= tol:
        return 2
    if worst(max_terms) > tol:
        raise EvaluationError(
            f"tail bound {worst(max_terms):.3e} at N={max_terms} exceeds tol={tol:.3e} "
            f"(r={r}); raise max_terms or loosen tol"
        )
    lo, hi = 2, int(max_terms)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if worst(mid) <= tol:
            hi = mid
        else:
            lo = mid
    return hi


def partial_sum(x, r: float, N: int):
    """Paired partial sum ``S_N(x)`` for an array of points in [0, 1].

    The two near-singular terms (``m = 0`` and ``m = -1``) go through
    :func:`h`; the rest share the factor ``sin^2(pi x)``.  Terms are added
    from the far tail inwards.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    amp = _sin2_pi_unit(xa) / np.pi**2
    acc = np.zeros_like(xa)
    if N >= 1:
        width = max(1, _BLOCK // max(1, xa.size))
        top = N
        while top >= 1:
            lo = max(1, top - width + 1)
            m = np.arange(top, lo - 1, -1, dtype=float)[None, :]
            xc = xa[:, None]
            right = (amp[:, None] / (xc + m) ** 2) ** r
            left = (amp[:, None] / (m + 1.0 - xc) ** 2) ** r
            acc += np.sum(right + left, axis=1)
            top = lo - 1
    acc += h(xa) ** r + h(xa - 1.0) ** r
    return acc


def rounding_allowance(n_terms: int, total, r: float = 1.0):
    # raising a base with a few ulps of error to the power r scales that error by r
    return (n_terms + 4.0 * r) * 4.0 * EPS * np.abs(total)


def f_r_grid(x, r: float, N: int):
    """Values and certified bounds of ``f_r`` on a grid with a shared ``N``."""
    xa = _check_unit(np.atleast_1d(x))
    vals = partial_sum(xa, r, N)
    errs = tail_bound(N, r, xa) + rounding_allowance(2 * N + 2, vals, r)
    return vals, np.asarray(errs, dtype=float)


def f_r_certified(x: float, params: EvalParams) -> CertifiedValue:
    """Evaluate ``f_r(x)`` with the smallest truncation meeting ``params.tol``.

    >>> f_r_certified(0.0, EvalParams(r=3.0)).value
    1.0
    """
    xf = float(_check_unit(x))
    N = terms_for_tol(params.r, params.tol, params.max_terms, xf)
    val = float(partial_sum(xf, params.r, N)[0])
    err = float(tail_bound(N, params.r, xf)) + float(rounding_allowance(2 * N + 2, val, params.r))
    return CertifiedValue(val, err, terms=2 * N + 2)


def f_half_closed(r: float, tol: float, max_terms: int = DEFAULT_MAX_TERMS) -> CertifiedValue:
    """``f_r(1/2) = 2^(1-r) * sum_{m>=0} y_half(m)^r`` with a certified tail.

    Past index ``M`` the tail is at most
    ``2^(1-r) (8/pi^2)^r (2M + 2)^(1-2r) / (2 (2r - 1))``.
    """
    EvalParams(r=r, tol=tol, max_terms=max_terms)
    scale = 2.0 ** (1.0 - r)
    lead = (8.0 / np.pi**2) ** r

    def tail(M):
        return scale * lead * (2.0 * M + 2.0) ** (1.0 - 2.0 * r) / (2.0 * (2.0 * r - 1.0))

    if tail(max_terms) > tol:
        raise EvaluationError(f"f_half_closed: tol={tol:.3e} unreachable within {max_terms} terms")
    lo, hi = -1, int(max_terms)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail(mid) <= tol:
            hi = mid
        else:
            lo = mid
    M = hi
    total = 0.0
    for start in range(M - M % _BLOCK, -1, -_BLOCK):
        m = np.arange(start, min(start + _BLOCK, M + 1), dtype=float)
        total += float(np.sum(y_half(m[::-1]) ** r))
    val = scale * total
    err = tail(M) + float(rounding_allowance(M + 1, val, r))
    return CertifiedValue(val, err, terms=M + 1)


def phi(p: PhiPoint) -> float:
    """``cos^2(pi u) * ((D + u)^-2 + (D - u)^-2)``; equals ``pi^2 s_m(u + 1/2)`` at ``D = m + 1/2``."""
    u, D = abs(p.u), p.D
    c = math.sin(math.pi * (0.5 - u))  # cos(pi u), accurate near u = 1/2
    if D == 0.5:
        # c / (1/2 - u) -> pi as u -> 1/2
        near = math.pi * sinc(math.pi * (0.5 - u))
        return c * c / (D + u) ** 2 + near * near
    return c * c * (1.0 / (D + u) ** 2 + 1.0 / (D - u) ** 2)


def phi_log_deriv(p: PhiPoint) -> float:
    """Logarithmic derivative of :func:`phi` in ``u``, for ``u in (0, 1/2)``, ``D >= 3/2``."""
    u, D = p.u, p.D
    if not 0.0 < u < 0.5:
        raise ValueError(f"u must lie in (0, 1/2), got {u}")
    if D < 1.5:
        raise ValueError(f"D must be >= 3/2, got {D}")
    return -2.0 * math.pi * math.tan(math.pi * u) + 2.0 * u / (D * D + u * u) + 4.0 * u / (D * D - u * u)


def log_deriv_bound(u: float) -> float:
    """``u (3 - 2 pi^2)``, the upper bound on :func:`phi_log_deriv`."""
    return u * (3.0 - 2.0 * math.pi**2)
