"""One-crossing pairs of vectors and the mass-transfer argument.

If ``x`` and ``y`` have equal sums and there is a threshold ``t`` such that
``x`` sits below ``y`` wherever ``y < t`` and above it wherever ``y >= t``,
then ``sum g(x) >= sum g(y)`` for every nondecreasing convex ``g``.

:func:`transfer_sequence` turns ``y`` into ``x`` by moving mass from the
low coordinates to the high ones, one pair at a time; each move can only
increase ``sum g``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

SUM_RTOL = 1e-12
HYP_TOL = 1e-12
DOMINANCE_RTOL = 1e-10


class OneCrossingError(ValueError):
    """The pair violates one of the one-crossing hypotheses."""

    def __init__(self, check: "CrossingCheck"):
        super().__init__(check.message)
        self.check = check


@dataclass(frozen=True)
class CrossingInstance:
    x: tuple
    y: tuple
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return len(self.x)

    def low(self) -> list[int]:
        return [k for k, v in enumerate(self.y) if v < self.t]

    def high(self) -> list[int]:
        return [k for k, v in enumerate(self.y) if v >= self.t]


@dataclass(frozen=True)
class TransferStep:
    i: int
    j: int
    delta: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"transfer must move positive mass, got {self.delta}")

    def apply(self, z: list[float], x: Sequence[float], pin: str) -> None:
        # The pinned end is set to its target so the pin is exact.
        if pin == "i":
            z[self.i] = x[self.i]
            z[self.j] += self.delta
        elif pin == "j":
            z[self.j] = x[self.j]
            z[self.i] -= self.delta
        else:
            z[self.i] = x[self.i]
            z[self.j] = x[self.j]


class CrossingCheck(NamedTuple):
    ok: bool
    index: int | None = None
    hypothesis: str | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _validate(x, y):
    if len(x) != len(y):
        raise ValueError(f"length mismatch: len(x)={len(x)}, len(y)={len(y)}")
    for name, v in (("x", x), ("y", y)):
        for k, e in enumerate(v):
            if not e >= 0:
                raise ValueError(f"{name}[{k}] = {e} is negative")


def check_one_crossing(x: Sequence[float], y: Sequence[float], t: float) -> CrossingCheck:
    """Check equal sums and the one-crossing condition, within 1e-12.

    >>> check_one_crossing([1, 2], [2, 1], 1.5)
    CrossingCheck(ok=False, index=0, hypothesis='ii', message='y[0]=2 >= t but x[0]=1 < y[0]')
    """
    _validate(x, y)
    sx, sy = math.fsum(x), math.fsum(y)
    if abs(sx - sy) > SUM_RTOL * max(1.0, abs(sy)):
        return CrossingCheck(False, None, "i", f"sums differ: sum(x)={sx!r}, sum(y)={sy!r}")
    for k, (a, b) in enumerate(zip(x, y)):
        slack = HYP_TOL * max(1.0, abs(b))
        if b < t and a > b + slack:
            return CrossingCheck(False, k, "ii", f"y[{k}]={b:g} < t but x[{k}]={a:g} > y[{k}]")
        if b >= t and a < b - slack:
            return CrossingCheck(False, k, "ii", f"y[{k}]={b:g} >= t but x[{k}]={a:g} < y[{k}]")
    return CrossingCheck(True)


def _require(inst: CrossingInstance):
    check = check_one_crossing(inst.x, inst.y, inst.t)
    if not check:
        raise OneCrossingError(check)


def iter_transfers(inst: CrossingInstance):
    """Yield ``(step, z)`` pairs, ``z`` being the state after each step.

    Smallest eligible index on each side is used.  Eligibility is exact
    (``z_i > x_i``, ``z_j < x_j``) and every step sets at least one end to
    its target exactly, which bounds the number of steps by ``n - 1``.
    Whatever mass is left when one side runs out is rounding noise and must
    be within the sum tolerance.
    """
    _require(inst)
    x = inst.x
    z = list(inst.y)
    low, high = inst.low(), inst.high()
    drift_tol = SUM_RTOL * max(1.0, abs(math.fsum(inst.y)))
    while True:
        i = next((k for k in low if z[k] > x[k]), None)
        j = next((k for k in high if z[k] < x[k]), None)
        if i is None or j is None:
            k = max(range(len(z)), key=lambda k: abs(z[k] - x[k]))
            if abs(z[k] - x[k]) > drift_tol:
                raise ArithmeticError(f"transfer stalled with residual {abs(z[k] - x[k]):.3e} at index {k}")
            return
        gi, gj = z[i] - x[i], x[j] - z[j]
        if gi < gj:
            step, pin = TransferStep(i, j, gi), "i"
        elif gj < gi:
            step, pin = TransferStep(i, j, gj), "j"
        else:
            step, pin = TransferStep(i, j, gi), "both"
        step.apply(z, x, pin)
        yield step, list(z)


def transfer_sequence(inst: CrossingInstance) -> list[TransferStep]:
    """Mass transfers carrying ``inst.y`` to ``inst.x``; at most ``n - 1`` of them.

    Raises :class:`OneCrossingError` if the hypotheses fail.
    """
    return [step for step, _ in iter_transfers(inst)]


def power(r: float) -> Callable[[float], float]:
    if not r >= 1:
        raise ValueError(f"r must be >= 1, got {r}")
    r = float(r)
    return lambda u: u**r


@dataclass
class DominanceResult:
    passed: bool
    margin: float
    sum_x: float
    sum_y: float
    steps: list[TransferStep] = field(default_factory=list)
    trace: list[float] = field(default_factory=list)  # sum g(z) from z = y onwards
    step_gains: list[float] = field(default_factory=list)
    monotone: bool = True


def dominance_verify(inst: CrossingInstance, r: float = 1.0, g: Callable | None = None) -> DominanceResult:
    """Check ``sum g(x) >= sum g(y)`` for ``g(u) = u**r`` (or a supplied scalar ``g``).

    Each transfer step is checked on its own: the two touched coordinates
    must not lower ``sum g``, up to rounding of the pair.
    """
    _require(inst)
    if g is None:
        g = power(r)

    def gsum(v):
        return math.fsum(g(e) for e in v)

    sx, sy = gsum(inst.x), gsum(inst.y)
    margin = sx - sy
    scale = max(1.0, abs(sy))
    res = DominanceResult(
        passed=margin >= -DOMINANCE_RTOL * scale, margin=margin, sum_x=sx, sum_y=sy, trace=[sy]
    )
    prev = list(inst.y)
    for step, z in iter_transfers(inst):
        before = g(prev[step.i]) + g(prev[step.j])
        after = g(z[step.i]) + g(z[step.j])
        gain = after - before
        if gain < -DOMINANCE_RTOL * max(1.0, abs(before)):
            res.monotone = False
        res.steps.append(step)
        res.step_gains.append(gain)
        res.trace.append(gsum(z))
        prev = z
    res.passed = res.passed and res.monotone
    return res


def random_instance(n: int, seed: int) -> CrossingInstance:
    """Deterministic random instance satisfying both hypotheses.

    ``y`` is drawn, ``t`` is placed strictly between two distinct sorted
    values, a random fraction of each low entry is removed and the removed
    mass is spread over the high entries.  Some low entries are left
    untouched to exercise ties.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    y = rng.exponential(1.0, size=n)
    if rng.random() < 0.2:
        y[rng.integers(n)] = 0.0
    vals = np.unique(y)
    if vals.size < 2:
        return CrossingInstance(tuple(y), tuple(y), float(vals[0]))
    cut = rng.integers(1, vals.size)
    t = 0.5 * (vals[cut - 1] + vals[cut])
    low = y < t
    frac = rng.random(n) * (rng.random(n) > 0.15)
    x = y.copy()
    x[low] = y[low] * (1.0 - frac[low])
    removed = math.fsum((y[low] - x[low]).tolist())
    w = rng.dirichlet(np.ones(int((~low).sum())))
    x[~low] = y[~low] + removed * w
    return CrossingInstance(tuple(x), tuple(y), float(t))
