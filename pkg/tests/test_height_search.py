import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from zetabound.errors import DependentRowsError, DomainError, NoRootError, NoSentinelRowError
from zetabound.height_search import (
    E_MINUS_SIGMA_ONE,
    LatticeBasis,
    LatticeParams,
    build_lattice,
    diagnose_limits,
    dumps,
    extract_heights,
    gram_schmidt_check,
    lattice_coordinates,
    lll_reduce,
    make_candidate,
    refine_root,
    search_report,
    sentinel,
)
from zetabound.numerics import PrecisionContext
from zetabound.zeta_eval import zeta_jet


@pytest.fixture(scope="module")
def default_run():
    params = LatticeParams()
    basis = build_lattice(params)
    reduced = lll_reduce(basis)
    return params, basis, reduced, extract_heights(reduced, params)


def test_small_lattice_entries():
    p = LatticeParams(n=2, weights=(1, 1), nu=10, r=0)
    rows = build_lattice(p).rows
    assert rows[0][0] == 6433 == math.floor(2 * math.pi * 1024)
    assert rows[3][2] == 16384 == sentinel(p)
    assert rows[2][0] == 709
    assert rows[2][3] == 1 and rows[3][0] == -math.floor(math.pi * 1024)


def test_params_validation():
    with pytest.raises(DomainError):
        LatticeParams(n=1)
    with pytest.raises(DomainError):
        LatticeParams(nu=10, r=10)
    with pytest.raises(DomainError):
        LatticeParams(n=2, weights=(1, -1))


def test_lll_textbook_example():
    basis = LatticeBasis([(1, 1, 1), (-1, 0, 2), (3, 5, 6)])
    out = lll_reduce(basis)
    assert out.rows == ((0, 1, 0), (1, 0, 1), (-1, 0, 2))
    assert abs(out.gram_determinant()) == abs(basis.gram_determinant()) == 9


def test_lll_shortest_vectors_by_enumeration():
    basis = LatticeBasis([(1, 1, 1), (-1, 0, 2), (3, 5, 6)])
    out = lll_reduce(basis)
    norms = []
    for c in itertools.product(range(-6, 7), repeat=3):
        if any(c):
            v = [sum(ci * r[k] for ci, r in zip(c, basis.rows)) for k in range(3)]
            norms.append(sum(x * x for x in v))
    assert sum(x * x for x in out.rows[0]) == min(norms)


def test_lll_identity_and_dependent():
    eye = LatticeBasis([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert lll_reduce(eye).rows == eye.rows
    with pytest.raises(DependentRowsError):
        lll_reduce(LatticeBasis([(1, 2, 3), (2, 4, 6), (0, 0, 1)]))


def test_lll_random_bases_are_reduced_and_unimodular():
    rng = np.random.default_rng(5)
    for _ in range(10):
        rows = rng.integers(-50, 50, size=(5, 5)).tolist()
        basis = LatticeBasis(rows)
        if basis.gram_determinant() == 0:
            continue
        out = lll_reduce(basis)
        assert gram_schmidt_check(out)
        assert out.gram_determinant() == basis.gram_determinant()
        for row in out.rows:
            assert all(c.denominator == 1 for c in lattice_coordinates(basis, row))


def test_default_pipeline(default_run):
    params, basis, reduced, cands = default_run
    assert gram_schmidt_check(reduced)
    assert reduced.gram_determinant() == basis.gram_determinant()
    best = cands[0]
    assert best.score < 0.1
    assert best.t == Fraction(best.x, 2**params.r)
    coords = lattice_coordinates(basis, best.row)
    assert all(c.denominator == 1 for c in coords)


def test_residuals_independent_phase_arithmetic(default_run):
    params, _, _, cands = default_run
    best = cands[0]
    with mpmath.workdps(60):
        t = mpmath.mpf(best.t.numerator) / best.t.denominator
        for p, th, res in zip(params.primes, params.theta_values(), best.residuals):
            x = mpmath.fmod(t * mpmath.log(p) - th, 2 * mpmath.pi)
            alt = min(abs(x), 2 * mpmath.pi - abs(x))
            assert abs(alt - abs(res)) < 1e-20


def test_sine_bound_and_diagnostics(default_run):
    params, _, _, cands = default_run
    best = cands[0]
    dist = diagnose_limits(best, params.primes)
    assert dist[2] < 2 * math.sin(float(best.score) / 2) + 1e-20
    assert all(v < 0.12 for v in dist.values())


def test_diagnose_trivial_heights():
    d0 = diagnose_limits(0, [2, 3, 5])
    assert d0[2] == 2 and d0[3] == 0 and d0[5] == 0
    d1 = diagnose_limits(mpmath.pi / mpmath.log(2), [2])
    assert d1[2] < 1e-15


def test_extract_requires_sentinel():
    params = LatticeParams(n=2, weights=(1, 1), nu=10, r=0)
    with pytest.raises(NoSentinelRowError):
        extract_heights(LatticeBasis([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]), params)


def test_score_improves_with_nu():
    for n in (4, 6, 8):
        scores = []
        for nu, r in ((30, 8), (45, 12), (60, 16)):
            p = LatticeParams(n=n, nu=nu, r=r)
            scores.append(extract_heights(lll_reduce(build_lattice(p)), p)[0].score)
        assert scores[0] >= scores[1] >= scores[2]


def test_score_to_value_bound(default_run):
    # zeta at the candidate height vs. the limit function: bounded by the phase perturbation
    params, _, _, cands = default_run
    from zetabound.zeta_eval import EulerProduct

    ep = EulerProduct(cands[0].t, 10**6)
    for sigma in np.linspace(1.5, 3, 5):
        z, r = ep.jet(float(sigma), 0.0, 0)
        with mpmath.workdps(30):
            limit = complex((2**sigma - 1) / (2**sigma + 1) * mpmath.zeta(sigma))
        eps = float(cands[0].score)
        perturb = sum(eps * p**-sigma / (1 - p**-sigma) ** 2 for p in params.primes)
        tail = sum(2 * p**-sigma / (1 - p**-sigma) for p in range(31, 10**5) if all(p % q for q in range(2, int(p**0.5) + 1)))
        bound = abs(limit) * (math.exp(perturb + tail) - 1) + r[0]
        assert abs(z[0] - limit) <= bound


def test_refine_roots_at_default_height(default_run):
    params, _, _, cands = default_run
    from zetabound.height_search import pair_at

    pair = pair_at(cands[0].t)
    assert pair.s_one.value.real > 1.85
    assert pair.rho.value.real > 2.7
    assert abs(pair.delta.real - E_MINUS_SIGMA_ONE) < 0.1
    assert pair.bound_violations() == []


def test_refine_moderate_height_and_idempotence():
    ctx = PrecisionContext(30)
    root = refine_root("zeta_equals_one", mpmath.mpc(1.5, 148), ctx)
    with mpmath.workdps(40):
        oracle = mpmath.findroot(lambda s: mpmath.zeta(s) - 1, mpmath.mpc("1.5", 148))
        assert abs(root.value - oracle) < 1e-14
    jet = zeta_jet(root.value, 0, None, ctx)
    assert abs(jet[0].value - 1) < 1e-14
    again = refine_root("zeta_equals_one", root.value, ctx)
    assert abs(again.value - root.value) < 1e-15


def test_refine_rejects_real_axis():
    with pytest.raises(NoRootError):
        refine_root("zeta_equals_one", mpmath.mpc(3, 0))
    with pytest.raises(DomainError):
        refine_root("zeta_equals_one", mpmath.mpc(1.0, 5))


def test_weak_search_report_is_valid_json():
    report = search_report(LatticeParams(n=3, nu=20, r=5), refine=False)
    text = dumps(report)
    assert text == dumps(search_report(LatticeParams(n=3, nu=20, r=5), refine=False))
    assert '"x"' in text and report["candidates"][0]["score"]


def test_conjugation_canonical():
    p = LatticeParams(n=3, nu=20, r=5)
    c = make_candidate(-12345, p)
    c2 = make_candidate(12345, p)
    assert c.score == c2.score
