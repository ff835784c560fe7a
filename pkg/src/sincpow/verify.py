"""Grid and optimizer checks for the identities and inequalities around f_r.

Every check returns a :class:`VerificationReport`.  A report's margin is
signed so that negative means "violated"; the check passes when the worst
margin is at least ``-tolerance``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import core
from .core import EvaluationError, PhiPoint
from .dominance import CrossingInstance, check_one_crossing, dominance_verify, random_instance

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
Y0, Y1 = core.y_half(0), core.y_half(1)
THRESHOLD = 0.5 * (Y0 + Y1)

# point-term pairs allowed for one shared-N grid evaluation
GRID_WORK = 5 * 10**7


@dataclass(frozen=True)
class GridSpec:
    n_points: int
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be positive")
        if self.n_points >= 2 and not self.lo < self.hi:
            raise ValueError("need lo < hi")

    @classmethod
    def single(cls, x: float) -> "GridSpec":
        return cls(1, x, x)

    def points(self) -> np.ndarray:
        if self.n_points == 1:
            return np.array([float(self.lo)])
        return np.linspace(self.lo, self.hi, self.n_points)


@dataclass
class VerificationReport:
    name: str
    passed: bool
    worst_margin: float
    witness: float
    points_checked: int
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=False, default=float)

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name}: worst margin {self.worst_margin:.3e} "
            f"at {self.witness:.17g} ({self.points_checked} points, tol {self.tolerance:.1e})"
        )


def _report(name, margins, args, tol, ok=True, details=None) -> VerificationReport:
    margins = np.asarray(margins, dtype=float)
    k = int(np.argmin(margins))
    worst = float(margins[k])
    return VerificationReport(
        name=name,
        passed=bool(ok and worst >= -tol),
        worst_margin=worst,
        witness=float(np.asarray(args, dtype=float)[k]),
        points_checked=int(margins.size),
        tolerance=float(tol),
        details=details or {},
    )


def shared_terms(r: float, xs, eval_tol: float, work: int = GRID_WORK) -> int:
    """Truncation ``N`` for a grid: meets ``eval_tol`` if affordable, else the work cap.

    The certified error bound is reported either way, so a capped ``N`` only
    loosens the certificate.
    """
    n = max(1, np.size(xs))
    budget = max(2, work // (2 * n))
    try:
        return core.terms_for_tol(r, eval_tol, budget, xs)
    except EvaluationError:
        return budget


def verify_parseval(grid: GridSpec, tol: float = 1e-10, eval_tol: float = 1e-6) -> VerificationReport:
    xs = grid.points()
    N = shared_terms(1.0, xs, eval_tol)
    vals, errs = core.f_r_grid(xs, 1.0, N)
    margins = errs - np.abs(vals - 1.0)
    return _report(
        "parseval", margins, xs, tol,
        details={"N": N, "max_error_bound": float(errs.max()), "max_deviation": float(np.abs(vals - 1).max())},
    )


def verify_half_closed(rs=(1.0, 1.5, 2.0, 5.0, 10.0, 158.6), tol: float = 0.0) -> VerificationReport:
    """Compare the closed form at 1/2 with the direct certified sum."""
    margins = []
    for r in rs:
        eps = 1e-6 if r < 1.1 else 1e-13
        a = core.f_half_closed(r, eps)
        b = core.f_r_certified(0.5, core.EvalParams(r=r, tol=eps))
        margins.append(a.error_bound + b.error_bound - abs(a.value - b.value))
    return _report("half_closed_form", margins, rs, tol)


def verify_s0_min(grid: GridSpec, tol: float = 1e-12) -> VerificationReport:
    xs = grid.points()
    margins = np.atleast_1d(core.s_m(0, xs)) - Y0
    return _report("s0_min", margins, xs, tol)


def verify_sm_max(m: int, grid: GridSpec, tol: float = 1e-12) -> VerificationReport:
    if m < 1:
        raise ValueError("the maximum at 1/2 holds for m >= 1 only")
    xs = grid.points()
    margins = core.y_half(m) - np.atleast_1d(core.s_m(m, xs))
    return _report(f"s{m}_max", margins, xs, tol)


def verify_sm_max_range(m_max: int, grid: GridSpec, tol: float = 1e-12) -> VerificationReport:
    reports = [verify_sm_max(m, grid, tol) for m in range(1, m_max + 1)]
    worst = min(reports, key=lambda rep: rep.worst_margin)
    return VerificationReport(
        name=f"sm_max[1..{m_max}]",
        passed=all(rep.passed for rep in reports),
        worst_margin=worst.worst_margin,
        witness=worst.witness,
        points_checked=sum(rep.points_checked for rep in reports),
        tolerance=tol,
        details={"worst_m": int(worst.name[1:].split("_")[0])},
    )


def log_phi_fd(u: float, D: float, step: float = 1e-6) -> float:
    """Centered finite difference of ``log phi`` in ``u``."""
    return (math.log(core.phi(PhiPoint(u + step, D))) - math.log(core.phi(PhiPoint(u - step, D)))) / (2 * step)


def verify_log_deriv_bound(
    m_max: int = 100, grid: GridSpec = GridSpec(49, 0.01, 0.49), fd_rtol: float = 1e-6
) -> VerificationReport:
    us = grid.points()
    if us.min() <= 0 or us.max() >= 0.5:
        raise ValueError("u grid must lie strictly inside (0, 1/2)")
    margins, args = [], []
    worst_fd = 0.0
    for m in range(1, m_max + 1):
        D = m + 0.5
        for u in us:
            d = core.phi_log_deriv(PhiPoint(u, D))
            margins.append(core.log_deriv_bound(u) - d)
            args.append(u)
            fd = log_phi_fd(u, D)
            worst_fd = max(worst_fd, abs(d - fd) / abs(d))
    return _report(
        "log_deriv_bound", margins, args, 0.0, ok=worst_fd <= fd_rtol,
        details={"max_fd_rel_error": worst_fd, "fd_rtol": fd_rtol},
    )


@dataclass(frozen=True)
class TruncatedPair:
    xs: tuple
    ys: tuple
    N: int
    t: float

    def instance(self) -> CrossingInstance:
        return CrossingInstance(self.xs, self.ys, self.t)


def tail_mass_half(N: int) -> float:
    """``Y_N = 1 - sum_{m<=N} y_half(m)``."""
    return max(0.0, 1.0 - math.fsum(core.y_half(np.arange(N + 1)).tolist()))


def smallest_valid_n(t: float = THRESHOLD, limit: int = 10**6) -> int:
    """First ``N`` with ``Y_N < t``."""
    for N in range(limit):
        if tail_mass_half(N) < t:
            return N
    raise EvaluationError(f"Y_N stays above t={t} up to N={limit}")


N0 = smallest_valid_n()


def _pair_rows(xs: np.ndarray, N: int) -> np.ndarray:
    # row k holds (s_0(x_k), ..., s_N(x_k), X_N)
    rows = np.empty((xs.size, N + 2))
    for m in range(N + 1):
        rows[:, m] = core.s_m(m, xs)
    partial = np.sum(rows[:, N::-1], axis=1)
    rows[:, N + 1] = np.maximum(0.0, 1.0 - partial)
    return rows


def _half_row(N: int) -> tuple:
    ys = core.y_half(np.arange(N + 1)).tolist()
    return tuple(ys) + (tail_mass_half(N),)


def build_truncated_pair(x: float, N: int | None = None) -> TruncatedPair:
    """Finite vectors ``(x_0..x_N, X_N)`` and ``(y_0..y_N, Y_N)`` with tails from ``1 - partial``.

    Defaults to ``N = N0 + 10``.
    """
    if N is None:
        N = N0 + 10
    if N < N0:
        raise ValueError(f"N={N} is below N0={N0}: Y_N >= t")
    row = _pair_rows(np.array([float(x)]), N)[0]
    return TruncatedPair(tuple(row.tolist()), _half_row(N), N, THRESHOLD)


def truncated_gap(pair: TruncatedPair, r: float) -> float:
    """``sum x^r + X_N^r - (sum y^r + Y_N^r)`` over the truncated vectors."""
    return math.fsum(v**r for v in pair.xs) - math.fsum(v**r for v in pair.ys)


def pipeline_check(x: float, r: float, N: int | None = None) -> tuple[bool, float]:
    pair = build_truncated_pair(x, N)
    if not check_one_crossing(pair.xs, pair.ys, pair.t):
        return False, -math.inf
    res = dominance_verify(pair.instance(), r)
    return res.passed, res.margin


def verify_proposition(
    r: float,
    grid: GridSpec,
    tol: float = 1e-8,
    eval_tol: float = 1e-12,
    pipeline: bool = True,
    pipeline_N: int | None = None,
) -> VerificationReport:
    """``f_r(x) >= f_r(1/2)`` on the grid, plus the finite-vector argument at every point."""
    if not r >= 1:
        raise ValueError("r must be >= 1")
    xs = grid.points()
    N = shared_terms(r, np.append(xs, 0.5), eval_tol)
    vals, errs = core.f_r_grid(xs, r, N)
    hv, he = core.f_r_grid(np.array([0.5]), r, N)
    margins = vals - hv[0] + errs + he[0]

    pipe_fail = []
    if pipeline:
        pN = N0 + 10 if pipeline_N is None else pipeline_N
        rows = _pair_rows(xs, pN)
        ys = _half_row(pN)
        for x, row in zip(xs, rows):
            inst = CrossingInstance(tuple(row.tolist()), ys, THRESHOLD)
            if not check_one_crossing(inst.x, inst.y, inst.t) or not dominance_verify(inst, r).passed:
                pipe_fail.append(float(x))
    return _report(
        f"proposition[r={r:g}]", margins, xs, tol, ok=not pipe_fail,
        details={
            "N": N,
            "max_error_bound": float(errs.max() + he[0]),
            "f_half": float(hv[0]),
            "pipeline_points": int(xs.size) if pipeline else 0,
            "pipeline_failures": pipe_fail[:10],
        },
    )


def golden_section(f, a: float, b: float, tol: float) -> float:
    """Minimize a unimodal ``f`` on ``[a, b]`` to an interval of width ``tol``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def find_min(r: float, tol: float = 1e-6, coarse: int = 101) -> float:
    """Argmin of ``f_r`` on [0, 1]: coarse scan, then golden-section on the best bracket.

    ``f_1`` is constant, so ``r == 1`` returns 1/2.
    """
    if not r >= 1:
        raise ValueError("r must be >= 1")
    if r == 1:
        return 0.5
    xs = np.linspace(0.0, 1.0, coarse)
    N = shared_terms(r, 0.5, 1e-14, work=10**6)
    vals = core.partial_sum(xs, r, N)
    k = int(np.argmin(vals))
    a, b = xs[max(k - 1, 0)], xs[min(k + 1, coarse - 1)]
    return golden_section(lambda x: float(core.partial_sum(x, r, N)[0]), a, b, tol)


def verify_find_min(rs, tol: float = 1e-6) -> VerificationReport:
    found = [find_min(r, tol) for r in rs]
    margins = [tol - abs(x - 0.5) for x in found]
    return _report("find_min", margins, rs, 0.0, details={"argmins": dict(zip(map(str, rs), found))})


def verify_dominance(n_instances: int = 1000, rs=(1.0, 1.5, 2.0, 4.0, 8.0), n: int = 10) -> VerificationReport:
    """Random one-crossing instances: hypotheses, step count, per-step gains, final inequality."""
    margins, seeds = [], []
    ok = True
    for seed in range(n_instances):
        inst = random_instance(n, seed)
        ok &= bool(check_one_crossing(inst.x, inst.y, inst.t))
        for r in rs:
            res = dominance_verify(inst, r)
            ok &= res.passed and len(res.steps) <= inst.n - 1
            margins.append(res.margin / max(1.0, res.sum_y))
            seeds.append(seed)
    return _report("dominance_random", margins, seeds, 1e-10, ok=ok)


def verify_pipeline(n_points: int = 100, rs=(1.5, 2.0, 5.0), seed: int = 0) -> VerificationReport:
    """Truncated-vector argument at random points ``x`` with ``N = N0 + 10``."""
    rng = np.random.default_rng(seed)
    xs = rng.random(n_points)
    margins, args = [], []
    ok = True
    for x in xs:
        for r in rs:
            good, margin = pipeline_check(float(x), r)
            ok &= good
            margins.append(margin)
            args.append(x)
    return _report("proof_pipeline", margins, args, 1e-10, ok=ok)


LEVELS = {
    "fast": {"grid": 1001, "sm_grid": 1001, "dominance": 200, "pipeline": 20, "rs": (1.02, 1.5, 2.0, 5.0, 20.0)},
    "release": {
        "grid": 10**5, "sm_grid": 10**4, "dominance": 1000, "pipeline": 100,
        "rs": (1.0, 1.02, 1.5, 2.0, 5.0, 20.0, 1.02**256),
    },
}


def run_all(level: str = "fast", corrupt: bool = False):
    """Yield every suite's report in a fixed order.

    ``corrupt`` sets an impossible tolerance on the ``s0_min`` suite; it
    exists to test the failure path of the harness.
    """
    cfg = LEVELS[level]
    g = GridSpec(cfg["grid"])
    yield verify_parseval(g)
    yield verify_half_closed()
    yield verify_s0_min(GridSpec(cfg["sm_grid"]), tol=-1.0 if corrupt else 1e-12)
    yield verify_sm_max_range(50, GridSpec(cfg["sm_grid"]))
    yield verify_log_deriv_bound()
    for r in cfg["rs"]:
        # the proof pipeline is r-independent up to g, so run it on a sub-grid
        yield verify_proposition(r, g, pipeline=True) if cfg["grid"] <= 1001 else _proposition_release(r, g)
    yield verify_find_min([r for r in cfg["rs"] if r > 1])
    yield verify_dominance(cfg["dominance"])
    yield verify_pipeline(cfg["pipeline"])


def _proposition_release(r, g):
    rep = verify_proposition(r, g, pipeline=False)
    sub = verify_proposition(r, GridSpec(1001), pipeline=True)
    rep.passed = rep.passed and sub.passed
    rep.details["pipeline_points"] = sub.details["pipeline_points"]
    rep.details["pipeline_failures"] = sub.details["pipeline_failures"]
    return rep
