import math
import random
from math import factorial

import mpmath
import numpy as np
import pytest

from zetabound.curves import (
    CurveSegment,
    LimitFunction,
    PolynomialFunction,
    RotatedFunction,
    Window,
    ZetaFunction,
    a3_lhs,
    check_H_decreasing,
    check_inequality_A3,
    check_U_minimum,
    classify_segment,
    covered_cells,
    em_float_jet,
    f_g_eval,
    f_g_tail_bound,
    find_turning_points,
    H_eval,
    half_period,
    segment_csv,
    segments_svg,
    solve_u_of_t,
    trace_real_curves,
    turning_points_on,
    U_eval,
    verify_turning_bound,
    winding_number,
)
from zetabound.errors import DomainError, NoTurningPointError, ZeroOnContourError
from zetabound.numerics import PrecisionContext
from zetabound.zeta_eval import zeta_jet

E_GOLDEN = "2.813014020252898367527255401216686963846140560"
CTX = PrecisionContext(30)


def mp(x, dps=60):
    with mpmath.workdps(dps):
        return mpmath.mpf(x)


# ---------------------------------------------------------------- f, g, U, H


def test_f_g_at_half_period():
    T = half_period(PrecisionContext(40))
    for sigma in (0.5, 2, 3.7):
        f, g = f_g_eval(sigma, T, ctx=CTX)
        assert abs(f) < 1e-28
        with mpmath.workdps(50):
            assert abs(g + mpmath.log(2) / (2**mp(sigma) + 1)) < 1e-28


def test_f_g_at_zero():
    f, g = f_g_eval(2, 0, ctx=CTX)
    assert f == 0
    with mpmath.workdps(50):
        assert abs(g - mpmath.log(2) / 3) < 1e-28


def test_series_matches_closed_within_tail():
    rng = random.Random(2)
    for _ in range(50):
        sigma, t = rng.uniform(0.5, 5), rng.uniform(-20, 20)
        N = rng.randint(5, 60)
        fc, gc = f_g_eval(sigma, t, "closed", ctx=CTX)
        fs, gs = f_g_eval(sigma, t, "series", N=N, ctx=CTX)
        bound = f_g_tail_bound(sigma, N)
        assert abs(fc - fs) <= bound + 1e-25
        assert abs(gc - gs) <= bound + 1e-25


def test_g_is_t_derivative_of_f():
    rng = random.Random(4)
    h = mpmath.mpf("1e-5")
    for _ in range(20):
        sigma, t = rng.uniform(0.5, 5), rng.uniform(-10, 10)
        with mpmath.workdps(40):
            fd = (f_g_eval(sigma, t + h, ctx=CTX)[0] - f_g_eval(sigma, t - h, ctx=CTX)[0]) / (2 * h)
        assert abs(fd - f_g_eval(sigma, t, ctx=CTX)[1]) < 10 * h * h


def test_f_g_periodic():
    with mpmath.workdps(40):
        T = 2 * half_period(PrecisionContext(40))
    for t in (0.3, 1.0, 4.2):
        a = f_g_eval(2.2, t, ctx=CTX)
        with mpmath.workdps(40):
            b = f_g_eval(2.2, t + T, ctx=CTX)
        assert abs(a[0] - b[0]) < 1e-27 and abs(a[1] - b[1]) < 1e-27


def test_f_g_domain():
    with pytest.raises(DomainError):
        f_g_eval(0, 1)
    with pytest.raises(DomainError):
        f_g_eval(1, 1, "series")


def test_U_tends_to_one():
    for t in (0.3, 1, 2):
        assert abs(U_eval(40, t, CTX) - 1) < 1e-10


def test_U_at_half_period_closed_form():
    T = half_period(PrecisionContext(40))
    with mpmath.workdps(40):
        w = mpmath.mpf(4)
        expected = (w / mpmath.log(2)) ** 2 * (mpmath.log(2) / (w + 1)) ** 2
    assert abs(U_eval(2, T, CTX) - expected) < 1e-27


def test_H_decreasing_and_formula():
    vals = [H_eval(x, CTX) for x in (1.5, 2, 2.5, 3)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert check_H_decreasing() == []
    with mpmath.workdps(50):
        s = mpmath.mpf(2)
        direct = (4 / mpmath.log(2)) ** 2 * (mpmath.zeta(s, derivative=1) / mpmath.zeta(s) + mpmath.log(2) / 3) ** 2
        assert abs(H_eval(2, CTX) - direct) < 1e-26
    with pytest.raises(DomainError):
        H_eval(1, CTX)


def test_H_against_prime_sum():
    # H = (2^s/log2)^2 (sum_{p>=3} log p/(p^s - 1))^2, truncated prime sum with tail
    from zetabound.numerics import primes_up_to

    p = primes_up_to(10**6).primes[1:].astype(float)
    s = 3.0
    head = math.fsum(np.log(p) / (p**s - 1))
    tail = 2 * math.log(1e6) * 1e6 ** (1 - s) / (s - 1)
    c = (2**s / math.log(2)) ** 2
    H = float(H_eval(s, CTX))
    assert c * head**2 <= H <= c * (head + tail) ** 2 + 1e-12


# ---------------------------------------------------------------- u(t)


def test_u_at_half_period_is_E():
    T = half_period(PrecisionContext(60))
    u = solve_u_of_t(T, 35)
    with mpmath.workdps(60):
        assert abs(u.value - mpmath.mpf(E_GOLDEN)) < mpmath.mpf(10) ** -30


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 3.0])
def test_u_below_E(t):
    u = solve_u_of_t(t, 15)
    assert u.value <= mp(E_GOLDEN) + 1e-10
    # above the root U > H
    for x in (u.value + mpmath.mpf("0.01"), u.value + 1, 7):
        assert U_eval(x, t, CTX) > H_eval(x, CTX)


def test_u_periodic():
    with mpmath.workdps(40):
        T = 2 * half_period(PrecisionContext(40))
    a = solve_u_of_t(1.0, 20)
    with mpmath.workdps(40):
        t = 1 + T
    b = solve_u_of_t(t, 20)
    assert abs(a.value - b.value) < 1e-18


# ---------------------------------------------------------------- inequality grids


def test_A3_grid_has_no_violations():
    assert check_inequality_A3(100, 100) == []


def test_A3_equality_at_pi_and_symmetry():
    with mpmath.workdps(40):
        for i in range(1, 20):
            x = mpmath.mpf(i) / 20
            assert abs(a3_lhs(x, mpmath.pi) - (x / (1 + x)) ** 2) < mpmath.mpf(10) ** -35
            for th in (0.1, 0.7, 2.0):
                assert abs(a3_lhs(x, mpmath.pi - th) - a3_lhs(x, mpmath.pi + th)) < mpmath.mpf(10) ** -35


def test_A3_rejects_small_grid():
    with pytest.raises(DomainError):
        check_inequality_A3(5, 100)


def test_U_minimum_grid():
    assert check_U_minimum(50, 50) == []


# ---------------------------------------------------------------- evaluators


def test_float_em_against_mpmath():
    rng = np.random.default_rng(1)
    s = rng.uniform(0.2, 4, 40) + 1j * rng.uniform(-3000, 3000, 40)
    vals = em_float_jet(s, 2)
    for i in range(40):
        for k in range(3):
            ref = complex(mpmath.zeta(mpmath.mpc(s[i]), derivative=k))
            assert abs(vals[k][i] - ref) < 1e-10 * max(1, abs(ref))


def borwein_zeta(s, n=80):
    """Alternating-series acceleration for zeta, independent of Euler-Maclaurin."""
    acc, d = 0, []
    for i in range(n + 1):
        acc += factorial(n + i - 1) * 4**i * n // (factorial(n - i) * factorial(2 * i))
        d.append(acc)
    k = np.arange(n)
    w = np.array([(-1) ** j * float(d[j] - d[n]) for j in k])
    s = np.asarray(s, complex)
    flat = s.ravel()
    out = np.empty(flat.size, complex)
    for lo in range(0, flat.size, 20000):
        sc = flat[lo : lo + 20000]
        S = (w[None, :] * np.exp(-np.outer(sc, np.log(k + 1.0)))).sum(1)
        out[lo : lo + 20000] = -S / (float(d[n]) * (1 - 2 ** (1 - sc)))
    return out.reshape(s.shape)


def test_borwein_oracle_sane():
    assert abs(borwein_zeta(np.array([2.0]))[0] - math.pi**2 / 6) < 1e-13
    assert abs(borwein_zeta(np.array([1.5 + 30j]))[0] - complex(mpmath.zeta(1.5 + 30j))) < 1e-12


# ---------------------------------------------------------------- tracing


@pytest.fixture(scope="module")
def strip():
    W = Window.parse("1.2,3,1,50")
    return W, trace_real_curves(W)


def test_window_validation():
    with pytest.raises(DomainError):
        Window(2, 1, 0, 1)
    with pytest.raises(DomainError):
        Window(1, 2, 0, 1, grid_step="0.5")
    with pytest.raises(DomainError):
        Window.parse("1,2,3")
    with pytest.raises(DomainError):
        trace_real_curves(Window(0.5, 2, 1, 10))
    with pytest.raises(DomainError):
        trace_real_curves(Window(0.05, 2, 1, 10), heavy=True)


def test_real_axis_is_traced():
    W = Window.parse("1.2,3,-0.5,0.5")
    segs = trace_real_curves(W)
    assert len(segs) == 1
    seg = segs[0]
    assert np.max(np.abs(seg.tau)) < 1e-12
    assert seg.kind == "I1"


def test_trace_covers_fine_grid_sign_changes(strip):
    W, segs = strip
    xs, ys = W.axes(0)
    # independent scan with an alternating-series evaluator on a 10x finer grid
    def refine(a):
        return np.concatenate([np.linspace(a[k], a[k + 1], 11)[:-1] for k in range(len(a) - 1)] + [a[-1:]])

    fx, fy = refine(xs), refine(ys)
    X, Y = np.meshgrid(fx, fy, indexing="ij")
    pos = borwein_zeta(X + 1j * Y).imag >= 0
    c = pos[:-1, :-1].astype(int) + pos[1:, :-1] + pos[:-1, 1:] + pos[1:, 1:]
    fine = np.argwhere((c > 0) & (c < 4))
    oracle = {(int(i) // 10, int(j) // 10) for i, j in fine}
    assert oracle <= covered_cells(segs, W)
    assert covered_cells(segs, W, margin=0) <= oracle


def test_traced_points_on_curve_at_doubled_precision(strip):
    _, segs = strip
    ctx = PrecisionContext(40)
    for seg in segs:
        for p in seg.points[:: max(1, len(seg) // 6)]:
            v = zeta_jet(p, 0, None, ctx)[0]
            assert abs(v.imag) < 1e-9


def test_segment_invariants(strip):
    W, segs = strip
    step = float(W.grid_step)
    assert len(segs) >= 5
    for seg in segs:
        P = seg.sigma + 1j * seg.tau
        assert np.all(np.abs(np.diff(P)) < 2 * step)
        assert seg.kind == classify_segment(seg)
        if seg.kind == "I2":
            assert abs(seg.sigma[0] - 1.2) < 1e-9 and abs(seg.sigma[-1] - 1.2) < 1e-9
    assert {s.kind for s in segs} >= {"I1", "I2"}


def test_conjugate_symmetry(strip):
    W, segs = strip
    mirror = trace_real_curves(Window.parse("1.2,3,-50,-1"))
    assert len(mirror) == len(segs)
    for a in segs:
        pa = a.sigma - 1j * a.tau
        best = min(mirror, key=lambda b: np.min(np.abs(b.sigma + 1j * b.tau - pa[0])))
        pb = best.sigma + 1j * best.tau
        d = [np.min(np.abs(pb - z)) for z in pa]
        assert max(d) < float(W.grid_step)
        assert best.kind == a.kind


def test_classify_definitions():
    W = Window(1, 2, 0, 1)
    seg = CurveSegment(np.array([1.0, 1.5]), np.array([0.2, 0.5]), W, ends=("left", "left"))
    assert classify_segment(seg) == "I2"
    seg.ends = ("left", "right")
    assert classify_segment(seg) == "I1"
    seg.ends = ("left", "top")
    assert classify_segment(seg) == "unknown"


def test_re_zero_overlay_traces_other_level_set():
    W = Window.parse("1.2,3,1,50")
    segs = trace_real_curves(W, RotatedFunction(ZetaFunction(), 1j))
    for seg in segs:
        for p in seg.points[:3]:
            assert abs(complex(mpmath.zeta(p)).real) < 1e-9


def test_csv_and_svg(strip):
    W, segs = strip
    text = segment_csv(segs[0])
    lines = text.splitlines()
    assert lines[0].startswith("# kind=") and lines[2] == "sigma,t"
    assert len(lines) == len(segs[0]) + 3
    assert text == segment_csv(segs[0])
    svg = segments_svg(segs, W)
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg)
    paths = [e for e in root.iter() if e.tag.endswith("path")]
    assert len(paths) == len(segs)


# ---------------------------------------------------------------- turning points


def test_limit_function_turning_point_at_E():
    tp = find_turning_points(mpmath.mpc(2.8, 0), LimitFunction(), PrecisionContext(45))
    assert tp.residual < mpmath.mpf(10) ** -20
    with mpmath.workdps(60):
        assert abs(tp.location - mpmath.mpf(E_GOLDEN)) < mpmath.mpf(10) ** -40
    report = verify_turning_bound([tp], 45)
    assert not report["falsified"]
    assert abs(mpmath.mpf(report["entries"][0]["re_minus_E"])) < 1e-40


def test_zeta_turning_points_on_loops(strip):
    W, segs = strip
    fn = ZetaFunction()
    tps = turning_points_on(segs, fn, CTX)
    assert tps
    for tp in tps:
        with mpmath.workdps(40):
            assert abs(mpmath.zeta(tp.location).imag) < 1e-14
            assert abs(mpmath.zeta(tp.location, derivative=1).real) < 1e-14
        assert tp.residual < 10 ** -(CTX.digits // 2)
        near = min(np.min(np.abs(s.sigma + 1j * s.tau - complex(tp.location))) for s in segs)
        assert near < 2 * float(W.grid_step)
    assert not verify_turning_bound(tps)["falsified"]


def test_turning_point_divergence_reported():
    with pytest.raises(NoTurningPointError):
        find_turning_points(mpmath.mpc(3, 1e-3), PolynomialFunction([1j, 1]), CTX)


def test_verify_empty():
    assert verify_turning_bound([]) == {"E": None, "entries": [], "falsified": False}


# ---------------------------------------------------------------- winding


def test_winding_prop_example_and_stability():
    P = PolynomialFunction([1, 0, 1, -1])
    assert winding_number(0, 0.1, P) == 1
    assert winding_number(0, 0.1, P, samples=128) == 1
    assert winding_number(0, 0.1, P, samples=1024) == 1


def test_winding_argument_principle():
    assert winding_number(0, 1, PolynomialFunction([0, 1]), of="value") == 1
    assert winding_number(0, 1, PolynomialFunction([0, 0, 1]), of="value") == 2
    assert winding_number(0, 1, PolynomialFunction([1]), of="value") == 0
    assert winding_number(3, 1, PolynomialFunction([0, 1]), of="value") == 0


def test_winding_zero_on_contour():
    with pytest.raises(ZeroOnContourError):
        winding_number(0, 1, PolynomialFunction([1]))
    with pytest.raises(ZeroOnContourError):
        winding_number(0, 1, PolynomialFunction([-1, 1]), of="value")


def test_winding_certificate_limit_function():
    tp = find_turning_points(mpmath.mpc(2.8, 0), LimitFunction(), PrecisionContext(30), certify=True)
    assert tp.winding_certificate[2] == 1
    for n in (64, 128):
        assert winding_number(mp(E_GOLDEN), 0.05, LimitFunction(), samples=n) == 1


def test_callable_function_handle():
    fn = lambda s, order: [s**2 + 1, 2 * s, 2 + 0 * s][: order + 1]
    assert winding_number(1j, 0.5, fn, of="value") == 1
