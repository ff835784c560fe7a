import json
import math

import numpy as np
import pytest

from sincpow import core, verify
from sincpow.dominance import check_one_crossing
from sincpow.verify import GridSpec, VerificationReport


def test_grid_spec():
    assert GridSpec(3).points().tolist() == [0.0, 0.5, 1.0]
    assert GridSpec.single(0.25).points().tolist() == [0.25]
    with pytest.raises(ValueError):
        GridSpec(5, 1.0, 0.0)


def test_report_json_fields():
    rep = verify.verify_s0_min(GridSpec(11))
    rec = json.loads(rep.to_json())
    for key in ("name", "passed", "worst_margin", "witness", "points_checked"):
        assert key in rec
    assert rec["passed"] is True
    assert "PASS" in rep.to_text()


def test_report_pass_rule():
    rep = verify._report("demo", [0.1, -1e-13, 3.0], [0.0, 0.5, 1.0], 1e-12)
    assert rep.passed and rep.witness == 0.5
    rep = verify._report("demo", [0.1, -1e-11], [0.0, 0.5], 1e-12)
    assert not rep.passed


# -- Parseval ---------------------------------------------------------------

def test_parseval_grid():
    assert verify.verify_parseval(GridSpec(1001)).passed


def test_parseval_at_zero():
    rep = verify.verify_parseval(GridSpec.single(0.0))
    assert rep.passed and abs(rep.worst_margin) < 1e-13


def test_parseval_at_half():
    rep = verify.verify_parseval(GridSpec.single(0.5))
    assert rep.passed
    # sum_m y_half(m) = 2 sum_m h(m + 1/2) = 1 from the odd-square sum pi^2/8
    m = np.arange(10**6, dtype=float)
    brute = math.fsum(core.y_half(m[::-1]).tolist())
    paired = 2 * math.fsum((np.sinc(m[::-1] + 0.5) ** 2).tolist())
    tail = 8 / math.pi**2 / (4 * 10**6)
    assert brute == pytest.approx(paired, abs=1e-12)
    assert 0 < 1.0 - brute < 1.01 * tail
    assert core.f_half_closed(1.0, 1e-7).contains(1.0)


# -- block sums s_0 and s_m ------------------------------------------------

def test_s0_min_examples():
    half = verify.verify_s0_min(GridSpec.single(0.5))
    assert half.passed and abs(half.worst_margin) < 1e-15
    zero = verify.verify_s0_min(GridSpec.single(0.0))
    assert zero.worst_margin == pytest.approx(1 - 8 / math.pi**2)


def test_s0_min_fine_grid():
    rep = verify.verify_s0_min(GridSpec(10**5))
    assert rep.passed and rep.points_checked == 10**5


def test_sm_max_examples():
    half = verify.verify_sm_max(1, GridSpec.single(0.5))
    assert half.passed and abs(half.worst_margin) < 1e-15
    zero = verify.verify_sm_max(1, GridSpec.single(0.0))
    assert zero.worst_margin == pytest.approx(core.y_half(1))


def test_sm_max_rejects_m0():
    with pytest.raises(ValueError):
        verify.verify_sm_max(0, GridSpec(10))


def test_sm_max_range():
    rep = verify.verify_sm_max_range(50, GridSpec(10**4))
    assert rep.passed and rep.points_checked == 50 * 10**4


def test_log_deriv_bound_report():
    rep = verify.verify_log_deriv_bound(100)
    assert rep.passed
    assert rep.points_checked == 100 * 49
    assert rep.details["max_fd_rel_error"] <= 1e-6


def test_log_deriv_margin_grows_with_m():
    m1 = verify.verify_log_deriv_bound(1, GridSpec.single(0.25))
    u = 0.25
    d100 = core.phi_log_deriv(core.PhiPoint.from_m(100, u))
    assert m1.worst_margin > 0
    assert core.log_deriv_bound(u) - d100 > m1.worst_margin


def test_log_deriv_near_endpoint():
    assert verify.verify_log_deriv_bound(5, GridSpec(3, 0.47, 0.49)).passed


# -- truncated pairs --------------------------------------------------------

def test_n0_and_tail_monotone():
    Ys = [verify.tail_mass_half(N) for N in range(60)]
    assert all(b < a for a, b in zip(Ys, Ys[1:]))
    assert Ys[verify.N0] < verify.THRESHOLD
    assert verify.N0 == 0  # Y_0 = 1 - 8/pi^2 < (y_0 + y_1)/2
    assert verify.Y1 < verify.THRESHOLD < verify.Y0


def test_truncated_pair_at_half():
    pair = verify.build_truncated_pair(0.5, 8)
    assert np.allclose(pair.xs, pair.ys, rtol=1e-14, atol=1e-15)


def test_truncated_pair_at_03():
    pair = verify.build_truncated_pair(0.3, 10)
    assert len(pair.xs) == len(pair.ys) == 12
    assert check_one_crossing(pair.xs, pair.ys, pair.t)
    assert math.fsum(pair.xs) == pytest.approx(1.0, abs=1e-10)
    assert math.fsum(pair.ys) == pytest.approx(1.0, abs=1e-10)
    assert pair.xs[-1] <= pair.ys[-1] < pair.t


def test_truncated_pair_rejects_small_n(monkeypatch):
    monkeypatch.setattr(verify, "N0", 3)
    with pytest.raises(ValueError):
        verify.build_truncated_pair(0.3, 2)


@pytest.mark.parametrize("x", [0.01, 0.2, 0.37, 0.61, 0.93])
@pytest.mark.parametrize("r", [1.5, 2.0, 5.0])
def test_truncated_gap_converges(x, r):
    N = 20
    near = verify.build_truncated_pair(x, N)
    far = verify.build_truncated_pair(x, 10 * N)
    gap_near, gap_far = verify.truncated_gap(near, r), verify.truncated_gap(far, r)
    assert gap_near >= -1e-12 and gap_far >= -1e-12
    # dropping u -> u^r superadditivity: each tail block moves the gap by at most X_N^r, Y_N^r
    assert abs(gap_near - gap_far) <= near.xs[-1] ** r + near.ys[-1] ** r + 1e-14


def test_truncated_gap_matches_infinite_sums():
    # at large N the tail entries are negligible and the gap is the plain partial-sum difference
    x, r = 0.3, 2.0
    pair = verify.build_truncated_pair(x, 4000)
    m = np.arange(4001)
    xs = np.array([core.s_m(int(k), x) for k in m])
    direct = math.fsum((xs**r).tolist()) - math.fsum((core.y_half(m) ** r).tolist())
    assert verify.truncated_gap(pair, r) == pytest.approx(direct, abs=1e-7)


# -- proposition ------------------------------------------------------------

def test_proposition_r1():
    rep = verify.verify_proposition(1.0, GridSpec(201))
    assert rep.passed


def test_proposition_r2():
    rep = verify.verify_proposition(2.0, GridSpec(1001))
    assert rep.passed
    assert rep.details["f_half"] == pytest.approx(1 / 3, abs=1e-10)
    assert rep.details["pipeline_points"] == 1001 and not rep.details["pipeline_failures"]


def test_proposition_largest_figure_exponent():
    assert verify.verify_proposition(1.02**256, GridSpec(101)).passed


def test_proposition_minimum_sits_at_half():
    xs = GridSpec(2001).points()
    vals, _ = core.f_r_grid(xs, 3.0, 500)
    assert xs[np.argmin(vals)] == 0.5


# -- minimization -----------------------------------------------------------

def test_golden_section_on_parabola():
    assert verify.golden_section(lambda x: (x - 0.3) ** 2, 0.0, 1.0, 1e-9) == pytest.approx(0.3, abs=1e-9)


@pytest.mark.parametrize("r", [2.0, 10.0, 1.02, 158.6])
def test_find_min(r):
    assert verify.find_min(r) == pytest.approx(0.5, abs=1e-6)


def test_find_min_r1_convention():
    assert verify.find_min(1.0) == 0.5


@pytest.mark.parametrize("r", [2.0, 10.0])
def test_find_min_agrees_with_grid_scan(r):
    xs = np.linspace(0.0, 1.0, 10**5)
    vals, _ = core.f_r_grid(xs, r, 200)
    spacing = xs[1] - xs[0]
    assert abs(verify.find_min(r) - xs[np.argmin(vals)]) <= 2 * spacing


# -- aggregate --------------------------------------------------------------

def test_run_all_fast():
    reports = list(verify.run_all("fast"))
    assert len(reports) >= 7
    assert all(isinstance(r, VerificationReport) for r in reports)
    assert all(r.passed for r in reports), [r.to_text() for r in reports if not r.passed]


def test_run_all_corrupted_tolerance_fails():
    reports = list(verify.run_all("fast", corrupt=True))
    failed = [r for r in reports if not r.passed]
    assert [r.name for r in failed] == ["s0_min"]
