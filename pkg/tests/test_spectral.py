import numpy as np
import pytest

from igpswitch.equilibria import hurwitz_stable, routh_hurwitz, solve_coexistence
from igpswitch.spectral import cardano_roots, silnikov_check

from conftest import companion_roots, match


@pytest.fixture
def random_triples():
    return np.random.default_rng(7).uniform(-10, 10, size=(1000, 3))


def test_factored_cubic():
    ca = cardano_roots(-6.0, 11.0, -6.0)
    assert [r.real for r in ca.roots] == pytest.approx([1.0, 2.0, 3.0], abs=1e-12)
    assert all(r.imag == 0 for r in ca.roots)


def test_triple_root_at_zero():
    ca = cardano_roots(0.0, 0.0, 0.0)
    assert ca.roots == (0j, 0j, 0j)


def test_triple_root_shifted():
    # (lam + 2)^3
    ca = cardano_roots(6.0, 12.0, 8.0)
    assert all(abs(r + 2) < 1e-12 for r in ca.roots)


def test_double_root_is_flagged_degenerate():
    # (lam - 1)^2 (lam + 2) = lam^3 - 3 lam + 2
    ca = cardano_roots(0.0, -3.0, 2.0)
    assert ca.degenerate
    assert sorted(r.real for r in ca.roots) == pytest.approx([-2.0, 1.0, 1.0])
    v = silnikov_check(ca)
    assert v.marginal and not v.chaotic


def test_unstable_spectrum_at_c0(ref):
    p = ref.replace(c=0.0)
    rh = routh_hurwitz(p, solve_coexistence(p).point)
    ca = cardano_roots(rh.sigma1, rh.sigma2, rh.sigma3)
    assert ca.roots[0].real == pytest.approx(-1.5765, abs=1e-3)
    assert ca.roots[1].real == pytest.approx(0.2049, abs=1e-3)
    assert ca.roots[1].imag == pytest.approx(2.4647, abs=1e-3)
    assert ca.roots[2] == ca.roots[1].conjugate()


def test_root_residuals(random_triples):
    for s1, s2, s3 in random_triples:
        ca = cardano_roots(s1, s2, s3)
        for r in ca.roots:
            res = abs(r ** 3 + s1 * r ** 2 + s2 * r + s3)
            assert res <= 1e-8 * (1 + abs(r) ** 3)


def test_agrees_with_companion_matrix(random_triples):
    for s1, s2, s3 in random_triples:
        ca = cardano_roots(s1, s2, s3)
        assert match(ca.roots, companion_roots(s1, s2, s3)) < 1e-8


def test_complex_pair_is_exact_conjugate(random_triples):
    for s in random_triples:
        ca = cardano_roots(*s)
        if ca.roots[1].imag != 0:
            assert ca.roots[1].imag > 0
            assert abs(ca.roots[1].imag + ca.roots[2].imag) < 1e-12
            assert ca.roots[1].real == ca.roots[2].real


def test_cardano_formula_roots_reproduced(random_triples):
    # lam_1 = R - H/R - A1, lam_2 = R w - (H/R) w^2 - A1, lam_3 = R w^2 - (H/R) w - A1
    w = complex(-0.5, np.sqrt(3) / 2)
    for s in random_triples[:200]:
        ca = cardano_roots(*s)
        if ca.Delta <= 0 or ca.degenerate:
            continue
        R, hr = ca.R, ca.H / ca.R
        lams = [R - hr - ca.A1, R * w - hr * w ** 2 - ca.A1, R * w ** 2 - hr * w - ca.A1]
        assert match(ca.roots, lams) < 1e-9 * (1 + max(abs(x) for x in lams))


def test_silnikov_certificate_at_c0(ref):
    p = ref.replace(c=0.0)
    rh = routh_hurwitz(p, solve_coexistence(p).point)
    ca = cardano_roots(rh.sigma1, rh.sigma2, rh.sigma3)
    v = silnikov_check(ca)
    ef = v.expression_form
    assert ca.Delta == pytest.approx(76.9751, abs=1e-2)
    assert ef["RplusHR"] == pytest.approx(2.8460, abs=1e-2)
    assert ef["sign_branch_value"] == pytest.approx(-0.4099, abs=1e-2)
    assert ca.A3 == pytest.approx(9.6432, abs=1e-2)
    assert ef["magnitude_gap"] == pytest.approx(1.3716, abs=1e-2)
    assert v.chaotic and v.forms_agree


def test_stable_roots_are_not_saddle_focus():
    # roots -1, -0.1 +/- 2i  ->  (lam + 1)(lam^2 + 0.2 lam + 4.01)
    s1, s2, s3 = 1.2, 4.21, 4.01
    v = silnikov_check(cardano_roots(s1, s2, s3))
    assert v.gamma == pytest.approx(-1.0)
    assert v.alpha == pytest.approx(-0.1)
    assert not v.conditions["gamma_alpha_opposite"]
    assert not v.chaotic


def test_all_real_spectrum_inapplicable():
    v = silnikov_check(cardano_roots(-6.0, 11.0, -6.0))
    assert not v.chaotic
    assert all(c is None for c in v.conditions.values())


def test_expression_form_agrees_with_eigenvalue_form():
    rng = np.random.default_rng(99)
    n = 0
    while n < 1000:
        s = rng.uniform(-10, 10, 3)
        ca = cardano_roots(*s)
        if not ca.Delta > 0 or ca.degenerate:
            continue
        n += 1
        assert silnikov_check(ca).forms_agree


def test_routh_hurwitz_predicate_matches_spectrum(random_triples):
    agree = 0
    for s1, s2, s3 in random_triples:
        hurwitz = hurwitz_stable(s1, s2, s3)
        stable = max(r.real for r in cardano_roots(s1, s2, s3).roots) < 0
        assert hurwitz == stable
        agree += 1
    assert agree == 1000
