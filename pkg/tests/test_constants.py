import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from zetabound.constants import (
    ConstantSpec,
    arcsin_prime_sum,
    arcsin_prime_sum_direct,
    character_table,
    e_split_form,
    l_function,
    sigma_one_eq1,
    solve,
    solve_A,
    solve_E,
    solve_l_bound,
    solve_sigma_a,
    solve_sigma_one,
    verified_bisect,
)
from zetabound.errors import DomainError, PrecisionEscalationError, RedirectError
from zetabound.numerics import PrecisionContext
from zetabound.zeta_eval import EvalResult, zeta, zeta_log_derivative

SIGMA_ONE = "1.94010168374362528601746939052554887823024760"
E_VALUE = "2.813014020252898367527255401216686963846140560"
A_VALUE = "1.192347337186193202897504427425597883401119230"


def exact(f):
    def fn(x, ctx):
        with ctx.workdps():
            return EvalResult(mpmath.mpc(f(mpmath.mpf(x))), 0)

    return fn


def agree(root, golden, digits):
    with mpmath.workdps(digits + 15):
        return abs(root.value - mpmath.mpf(golden)) < mpmath.mpf(10) ** (-digits)


def test_bisect_sqrt_two():
    r = verified_bisect(exact(lambda x: x * x - 2), (1, 2), 30)
    with mpmath.workdps(50):
        assert abs(r.value - mpmath.sqrt(2)) < mpmath.mpf(10) ** -30
        assert r.bracket[0] <= mpmath.sqrt(2) <= r.bracket[1]
        assert r.enclosure_width <= mpmath.mpf(10) ** -30 * (1 + mpmath.mpf(10) ** -10)


def test_bisect_linear_exact():
    r = verified_bisect(exact(lambda x: x - 1), (0, 2), 20)
    assert r.value == 1 and r.residual == 0


def test_bisect_requires_sign_change():
    with pytest.raises(DomainError):
        verified_bisect(exact(lambda x: x * x + 1), (0, 1), 20)


def test_bisect_escalates_when_signs_uncertifiable():
    def noisy(x, ctx):
        return EvalResult(mpmath.mpc(x - mpmath.mpf("0.5")), 10)

    with pytest.raises(PrecisionEscalationError) as err:
        verified_bisect(noisy, (0, 1), 20)
    assert err.value.required_digits > 20


def test_bisect_on_sigma_one_equation():
    r = verified_bisect(sigma_one_eq1, (1.5, 2.5), 30)
    assert agree(r, SIGMA_ONE, 30)


def test_sigma_one_golden_and_forms():
    r1 = solve_sigma_one(45)
    r2 = solve_sigma_one(45, form="eq2")
    assert agree(r1, SIGMA_ONE, 44)
    assert not r1.disjoint_from(r2)
    with mpmath.workdps(60):
        x = r1.value
        z = mpmath.zeta(x)
        assert abs(z - (2**x + 1) / (2**x - 1)) < mpmath.mpf(10) ** -43


def test_E_golden_and_split_form():
    r = solve_E(45)
    assert agree(r, E_VALUE, 44)
    assert 2 < r.value < 3
    split = e_split_form(r.value, PrecisionContext(40))
    assert abs(split.value) <= split.error_radius + 1e-30


def test_A_golden():
    r = solve_A(45)
    assert agree(r, A_VALUE, 44)


def test_A_bracketed_by_direct_prime_sum():
    half_pi = math.pi / 2
    below = arcsin_prime_sum_direct(1.18, 10**6)
    above = arcsin_prime_sum_direct(1.20, 10**6)
    assert below[0] > half_pi and above[1] < half_pi
    assert 1.18 < solve_A(15).value < 1.20


def test_arcsin_sum_decreasing():
    ctx = PrecisionContext(15)
    vals = [arcsin_prime_sum(x, ctx).real for x in np.linspace(1.1, 1.3, 12)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_ordering_A_sigma_one_E():
    a, s1, e = solve_A(30), solve_sigma_one(30), solve_E(30)
    assert a.bracket[1] < s1.bracket[0] and s1.bracket[1] < e.bracket[0]


@pytest.mark.parametrize(
    "q,a,golden",
    [
        (4, 1, "1.8877909267081189271963215420351166682234701260"),
        (7, 1, "1.8384345030973149401669429967608206780491613150"),
        (4, Fraction(1, 2), "1.3353871957453111331201066998785750083328782900"),
    ],
)
def test_l_bound_golden(q, a, golden):
    assert agree(solve_l_bound(q, a, 45), golden, 44)


def test_l_bound_trivial_modulus_is_sigma_one():
    assert agree(solve_l_bound(1, 1, 30), SIGMA_ONE, 30)


def test_l_bound_rejects_bad_input():
    with pytest.raises(DomainError):
        solve_l_bound(4, 2, 20)
    with pytest.raises(DomainError):
        solve_l_bound(0, 1, 20)


def sigma_a_oracle(a):
    # bisection on float partial sums with integral tail, independent of the library
    n = np.arange(1, 200001, dtype=np.float64)

    def z(x):
        N = 200000
        return math.fsum(n**-x) + N ** (1 - x) / (x - 1) - 0.5 * N**-x

    f = (lambda x: z(x) - a) if a > 1 else (lambda x: z(2 * x) / z(x) - a)
    lo, hi = 1.05, 6.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if (f(mid) > 0) == (f(lo) > 0):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def test_sigma_a_two():
    r = solve_sigma_a(2, 20)
    assert abs(float(r.value) - sigma_a_oracle(2)) < 1e-9
    assert str(float(r.value)).startswith("1.7286472389")


def test_sigma_a_half():
    r = solve_sigma_a(Fraction(1, 2), 20)
    assert abs(float(r.value) - sigma_a_oracle(0.5)) < 1e-9


def test_sigma_a_inverts_zeta():
    ctx = PrecisionContext(40)
    a = zeta(1.5, None, ctx).real
    r = solve_sigma_a(a, 30)
    assert r.contains(mpmath.mpf(1.5)) or abs(r.value - mpmath.mpf(1.5)) < mpmath.mpf(10) ** -29


def test_sigma_a_redirect_and_domain():
    with pytest.raises(RedirectError) as err:
        solve_sigma_a(1, 20)
    assert "sigma_one" in str(err.value)
    with pytest.raises(DomainError):
        solve_sigma_a(-1, 20)
    with pytest.raises(RedirectError):
        ConstantSpec("sigma_of_a", a=1)


@pytest.mark.parametrize("a", [0.3, 0.7, 1.5, 3])
def test_sigma_a_continuous_on_branches(a):
    r1 = solve_sigma_a(a, 12)
    r2 = solve_sigma_a(a + 1e-6, 12)
    assert abs(r1.value - r2.value) < 1e-4


def test_ratio_increasing():
    ctx = PrecisionContext(15)
    vals = []
    for x in np.linspace(1.05, 10, 100):
        vals.append(zeta(2 * x, None, ctx).real / zeta(x, None, ctx).real)
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_solve_dispatch():
    r = solve(ConstantSpec("l_bound", digits=20, modulus=4))
    assert str(r.value).startswith("1.88779092")


def test_character_tables():
    chi4 = character_table(4)
    assert len(chi4) == 2
    nontrivial = chi4[1]
    assert nontrivial.values[3] == -1 and nontrivial.values[2] == 0
    chi7 = character_table(7)
    assert len(chi7) == 6
    assert abs(sum(c.values[3] for c in chi7)) < 1e-12
    for c in chi4 + chi7:
        q = c.modulus
        for m in range(q):
            for n in range(q):
                assert abs(c.values[m * n % q] - c.values[m] * c.values[n]) < 1e-12
    for i, a in enumerate(chi7):
        for j, b in enumerate(chi7):
            inner = sum(a.values[r] * b.values[r].conjugate() for r in range(7))
            assert abs(inner - (6 if i == j else 0)) < 1e-12
    with pytest.raises(DomainError):
        character_table(5)


def test_l_function_catalan():
    chi = character_table(4)[1]
    r = l_function(2, chi, PrecisionContext(30))
    k = np.arange(0, 2 * 10**6, dtype=np.float64)
    leibniz = math.fsum((-1.0) ** k / (2 * k + 1) ** 2)
    assert abs(float(r.real) - leibniz) < 1 / (4 * 10**6 + 1) ** 2 + 1e-14
    assert str(r.real).startswith("0.915965594177219")


def test_l_function_principal_and_large_sigma():
    ctx = PrecisionContext(30)
    chi0 = character_table(4)[0]
    r = l_function(2, chi0, ctx)
    with mpmath.workdps(50):
        assert abs(r.value - (1 - mpmath.mpf(2) ** -2) * mpmath.zeta(2)) < 1e-28
    for chi in character_table(7):
        r = l_function(40, chi, ctx)
        approx = 1 + chi(2) * mpmath.mpf(2) ** -40 + chi(3) * mpmath.mpf(3) ** -40
        assert abs(r.value - approx) < 1e-11
    with pytest.raises(DomainError):
        l_function(1, chi0, ctx)


def test_results_independent_of_global_precision():
    mpmath.mp.dps = 15
    r = solve_sigma_one(40)
    assert agree(r, SIGMA_ONE, 39)
    lz = zeta_log_derivative(2, PrecisionContext(40))
    with mpmath.workdps(60):
        assert abs(lz.value - mpmath.zeta(2, derivative=1) / mpmath.zeta(2)) < mpmath.mpf(10) ** -38


def test_certified_root_json():
    d = solve_E(12).to_dict()
    assert d["value"].startswith("2.81301402025")
    assert set(d) >= {"value", "enclosure", "enclosure_width", "residual"}
