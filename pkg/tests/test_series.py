"""Series arithmetic, cyclotomic factors, and the Iwasawa algebra layer."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwa.scalars import PadicScalar, Precision, PrecisionError, QuadExtScalar
from iwa.series import (
    DivisibilityError,
    FiniteCharacter,
    IwasawaElement,
    Series,
    cyclotomic_factor,
    divide_series,
    u_for,
)

from oracles import log1plus_coeffs, phi_ppow_coeffs, poly_compose_affine, poly_mul

P5 = Precision(5, 20, 16)


def frac_series(coeffs, prec=P5, poly=True, rel=None):
    return Series.make(prec, [Fraction(c) for c in coeffs], rel=rel, is_polynomial=poly)


def as_fracs(s: Series):
    return [c.lift() for c in s.a]


# ------------------------------------------------------------------- Series


def test_series_mul_matches_exact_polynomials():
    f = frac_series([1, 2, 3])
    g = frac_series([Fraction(1, 2), 0, 7, 1])
    h = f * g
    want = poly_mul(as_fracs(f), as_fracs(g))
    assert h.is_polynomial and len(h.a) == 6
    for got, expect in zip(h.a, want):
        assert got == PadicScalar.from_fraction(expect, P5, rel=25)


def test_series_mul_truncates_at_x_prec():
    prec = Precision(5, 10, 4)
    f = Series.make(prec, [1] * 4, is_polynomial=False)
    g = Series.make(prec, [1] * 4, is_polynomial=False)
    h = f * g
    assert len(h.a) == 4 and not h.is_polynomial
    assert [c.lift() for c in h.a] == [1, 2, 3, 4]


def test_series_known_length_shrinks_with_truncated_inputs():
    # product of two non-polynomial prefixes is only known to the shorter window
    f = Series.make(P5, [1, 1, 1], is_polynomial=False)
    g = Series.make(P5, [2, 1], is_polynomial=False)
    h = f * g
    assert len(h.a) == 2
    # a factor of X on one side delays the other side's unknown tail
    f2 = Series.make(P5, [0, 1, 1], is_polynomial=False)
    assert len((f2 * g).a) == 3


def test_series_mul_precision_is_min_rule():
    f = Series.make(P5, [PadicScalar.from_int(1, P5, rel=8)], is_polynomial=True)
    g = Series.make(
        P5,
        [PadicScalar.from_int(1, P5, rel=12), PadicScalar.from_int(5, P5, rel=12)],
        is_polynomial=True,
    )
    h = f * g
    assert h.a[0].rel == 8
    # second coefficient: valuation 1, same window mod 5^8
    assert h.a[1].val == 1 and h.a[1].val + h.a[1].rel == 8


def test_series_add_keeps_polynomial_lengths():
    f = frac_series([1, 0, 0, 4])
    g = frac_series([1])
    s = f + g
    assert s.is_polynomial and len(s.a) == 4
    assert as_fracs(s) == [2, 0, 0, 4]


def test_series_alpha_mixing():
    # (alpha X) * (alpha X) = alpha^2 X^2 = -eps p^(k+1) X^2
    prec = Precision(5, 20, 8)
    al = QuadExtScalar.alpha(prec, 2, 1)
    f = Series.make(prec, [QuadExtScalar.zero(prec, 2, 1), al], is_polynomial=True)
    h = f * f
    assert h.b is not None
    assert h.coeff(2) == QuadExtScalar.from_padic(
        PadicScalar.from_int(-125, prec), 2, 1
    )
    assert h.coeff(1).is_zero_to_precision


def test_series_form_mixing_rules():
    prec = Precision(5, 20, 8)
    plain = frac_series([1, 1], prec=prec)
    formed = Series.make(
        prec, [QuadExtScalar.one(prec, 1, 2)], is_polynomial=True
    )
    prod = plain * formed
    assert prod.form == (1, 2)
    other = Series.make(prec, [QuadExtScalar.one(prec, 2, 2)], is_polynomial=True)
    with pytest.raises(ValueError):
        formed * other


def test_shift_val_is_exact():
    f = frac_series([1, 5, 25])
    g = f.shift_val(-2)
    assert [c.val for c in g.a] == [-2, -1, 0]
    assert [c.rel for c in g.a] == [c.rel for c in f.a]


def test_compose_affine_polynomial_exact():
    # f(X) = X^2 at 5 + 6X: 25 + 60X + 36X^2
    f = frac_series([0, 0, 1])
    c = PadicScalar.from_int(5, P5, rel=30)
    d = PadicScalar.from_int(6, P5, rel=30)
    g = f.compose_affine(c, d)
    assert as_fracs(g) == [25, 60, 36]
    assert g.is_polynomial


def test_compose_affine_matches_oracle_on_random_polys():
    import random

    rng = random.Random(7)
    for _ in range(20):
        coeffs = [Fraction(rng.randrange(-20, 20)) for _ in range(rng.randrange(1, 8))]
        f = frac_series(coeffs, rel=30)
        cv, dv = Fraction(5 * rng.randrange(1, 9)), Fraction(rng.choice([1, 2, 3, 6, 11]))
        got = f.compose_affine(
            PadicScalar.from_fraction(cv, P5, rel=30),
            PadicScalar.from_fraction(dv, P5, rel=30),
        )
        want = poly_compose_affine(coeffs, cv, dv)
        for gc, wc in zip(got.a, want):
            assert gc == PadicScalar.from_fraction(wc, P5, rel=22)


def test_compose_affine_caps_tail_of_truncated_series():
    # non-polynomial input: top coefficients can only be trusted to (L-j)*v(c)
    f = Series.make(P5, [1] * 6, is_polynomial=False)
    c = PadicScalar.from_int(5, P5, rel=40)
    d = PadicScalar.from_int(1, P5, rel=40)
    g = f.compose_affine(c, d)
    assert g.a[5].abs_prec <= 1
    assert g.a[0].abs_prec <= 6


def test_evaluate_polynomial_any_point():
    f = frac_series([1, 2, 1])
    x = PadicScalar.from_int(3, P5)
    assert f.evaluate(x) == PadicScalar.from_int(16, P5)


def test_evaluate_truncated_series_caps_precision():
    f = Series.make(P5, [1] * 10, is_polynomial=False)
    x = PadicScalar.from_int(5, P5)
    v = f.evaluate(x)
    # true value 1/(1-5) agrees mod 5^10 only
    assert v.abs_prec == 10
    assert v == PadicScalar.from_fraction(Fraction(1, 1 - 5), P5, rel=10)


def test_evaluate_at_exact_zero_returns_constant_term():
    f = Series.make(P5, [7, 9, 11], is_polynomial=False)
    assert f.evaluate(PadicScalar.exact_zero(P5)) == 7


# -------------------------------------------------------- cyclotomic factors


def test_cyclotomic_factor_p3_spec_case():
    prec = Precision(3, 10, 8)
    phi = cyclotomic_factor(1, 0, prec)
    assert phi.is_polynomial and len(phi.a) == 3
    assert as_fracs(phi) == [3, 3, 1]


def test_cyclotomic_factor_p5_m3_mod_25():
    prec = Precision(5, 2, 2)
    phi = cyclotomic_factor(3, 0, prec)
    assert phi.a[0] == PadicScalar.from_int(5, prec, rel=2)
    assert phi.a[1] == PadicScalar.exact_zero(prec)  # 0 mod 25


def test_cyclotomic_factor_value_at_one_is_p():
    for p, m in [(3, 2), (5, 1), (5, 2), (7, 3)]:
        prec = Precision(p, 12, p ** (m - 1) * (p - 1) + 2)
        phi = cyclotomic_factor(m, 0, prec)
        assert phi.evaluate(PadicScalar.exact_zero(prec)) == p


def test_cyclotomic_factor_matches_binomial_oracle():
    for p, m, j in [(5, 2, 0), (5, 2, 3), (7, 1, 2), (3, 3, 1)]:
        W = 14
        prec = Precision(p, W, 12)
        phi = cyclotomic_factor(m, j, prec)
        oracle = phi_ppow_coeffs(p, m, j, u_for(p), p**W, min(12, len(phi.a)))
        for n, want in enumerate(oracle):
            got = phi.a[n]
            assert got == PadicScalar.from_unit_val(prec, want, 0, rel=W) or (
                want == 0 and got.is_zero_to_precision
            )


def test_cyclotomic_factor_truncation_flag():
    prec = Precision(5, 5, 8)  # deg Phi_25 = 20 > 8
    phi = cyclotomic_factor(2, 0, prec)
    assert not phi.is_polynomial and len(phi.a) == 8


# ------------------------------------------------------------ IwasawaElement


def x_in_component(i: int, prec=P5) -> IwasawaElement:
    return IwasawaElement.from_component(i, Series.x(prec))


def test_elem_add_zero():
    F = x_in_component(2)
    assert F + IwasawaElement.zero(P5) == F


def test_elem_monomial_product():
    F = x_in_component(0)
    G = F * F
    want = IwasawaElement.from_component(0, Series.monomial(2, P5))
    assert G == want


def test_elem_orthogonal_idempotents():
    e1 = IwasawaElement.from_component(1, Series.constant(1, P5))
    e2 = IwasawaElement.from_component(2, Series.constant(1, P5))
    assert (e1 * e2).is_zero_to_precision


def test_elem_precision_mismatch_rejected():
    F = x_in_component(0)
    G = x_in_component(0, Precision(5, 10, 16))
    with pytest.raises(PrecisionError):
        F + G


def test_twist_of_monomial_spec_case():
    # twist(e_i X, 1) = e_{i-1} (6X + 5) at p = 5
    for i in range(4):
        F = x_in_component(i)
        T = F.twist(1)
        want = IwasawaElement.from_component(
            (i - 1) % 4, Series.make(P5, [5, 6], is_polynomial=True)
        )
        assert T == want


def test_twist_zero_is_identity():
    F = x_in_component(3)
    assert F.twist(0) is F


def test_twist_inverse_composes_to_identity():
    F = IwasawaElement.from_component(2, frac_series([2, 0, 1, 7]))
    assert F.twist(3).twist(-3) == F


def test_twist_is_ring_homomorphism_on_random_polys():
    import random

    rng = random.Random(3)
    for _ in range(10):
        f = frac_series([rng.randrange(-9, 9) for _ in range(4)], rel=30)
        g = frac_series([rng.randrange(-9, 9) for _ in range(4)], rel=30)
        i, jj, n = rng.randrange(4), rng.randrange(4), rng.choice([1, 2, -1])
        F = IwasawaElement.from_component(i, f)
        G = IwasawaElement.from_component(jj, g)
        assert (F * G).twist(n) == F.twist(n) * G.twist(n)


def test_project_resolution_of_identity():
    F = IwasawaElement(
        P5, [frac_series([i, 1]) for i in range(4)]
    )
    total = IwasawaElement.zero(P5)
    for j in range(4):
        total = total + F.idempotent_project(j)
    assert total == F
    P1 = F.idempotent_project(1)
    assert P1.idempotent_project(1) == P1


def test_project_annihilates_other_components():
    F = IwasawaElement.from_component(2, Series.monomial(3, P5))
    assert F.idempotent_project(1).is_zero_to_precision


def test_evaluate_at_character_monomial():
    # e_0 X at t = 1 evaluates to u - 1 = p
    F = x_in_component(0)
    v = F.evaluate_at_character(FiniteCharacter(0, 0, 1))
    assert v == PadicScalar.from_int(5, P5)


def test_evaluate_constant_any_twist():
    F = IwasawaElement.from_diagonal(Series.constant(Fraction(7, 3), P5))
    for t in (0, 1, 5):
        v = F.evaluate_at_character(FiniteCharacter(2, 0, t))
        assert v == PadicScalar.from_fraction(Fraction(7, 3), P5)


def test_evaluate_rejects_wild():
    F = x_in_component(0)
    with pytest.raises(ValueError):
        F.evaluate_at_character(FiniteCharacter(0, 1, 0))


def test_evaluate_is_ring_homomorphism():
    import random

    rng = random.Random(9)
    for _ in range(10):
        f = frac_series([rng.randrange(-9, 9) for _ in range(5)], rel=30)
        g = frac_series([rng.randrange(-9, 9) for _ in range(5)], rel=30)
        F, G = IwasawaElement.from_diagonal(f), IwasawaElement.from_diagonal(g)
        ch = FiniteCharacter(rng.randrange(4), 0, rng.choice([0, 1, 2]))
        assert (F * G).evaluate_at_character(ch) == F.evaluate_at_character(
            ch
        ) * G.evaluate_at_character(ch)


# ------------------------------------------------------------------ remainder


def test_remainder_of_constant_is_itself():
    prec = Precision(5, 20, 8)
    F = IwasawaElement.one(prec)
    r = F.remainder_mod_cyclotomic(1, 0)
    assert r == Series.constant(1, prec)


def test_remainder_detects_multiples():
    prec = Precision(5, 20, 24)
    phi = cyclotomic_factor(1, 0, prec, rel=26)
    f = frac_series([3, 1, 0, 2, 1], prec=prec, rel=26)
    F = IwasawaElement.from_diagonal(phi * f)
    r = F.remainder_mod_cyclotomic(1, 0)
    assert r.is_zero_to_precision
    G = IwasawaElement.from_diagonal(phi * f + Series.constant(1, prec))
    assert not G.remainder_mod_cyclotomic(1, 0).is_zero_to_precision


def test_remainder_respects_j_twist():
    prec = Precision(5, 18, 24)
    phi3 = cyclotomic_factor(1, 3, prec, rel=20)
    F = IwasawaElement.from_diagonal(phi3 * frac_series([1, 4], prec=prec, rel=20))
    assert F.remainder_mod_cyclotomic(1, 3).is_zero_to_precision
    assert not F.remainder_mod_cyclotomic(1, 0).is_zero_to_precision


def test_remainder_requires_room():
    prec = Precision(5, 10, 8)
    F = IwasawaElement.one(prec)
    with pytest.raises(PrecisionError):
        F.remainder_mod_cyclotomic(2, 0)  # deg 20 > 8


# ------------------------------------------------------------------- division


def test_divide_monomial():
    G = frac_series([3, 1, 4])
    F = Series.x(P5) * G
    Q = divide_series(F, Series.x(P5))
    assert Q == G


def test_divide_one_by_x_fails():
    with pytest.raises(DivisibilityError) as ei:
        divide_series(Series.constant(1, P5), Series.x(P5))
    assert ei.value.degree == 0


def test_divide_roundtrip_random():
    import random

    rng = random.Random(17)
    for _ in range(15):
        f = frac_series(
            [rng.randrange(-9, 9) for _ in range(rng.randrange(1, 6))], rel=30
        )
        g = frac_series(
            [0] * rng.randrange(0, 3)
            + [rng.choice([1, 2, 3, 4, 6, 7])]
            + [rng.randrange(-9, 9) for _ in range(3)],
            rel=30,
        )
        Q = divide_series(f * g, g)
        assert Q == f


def test_divide_reports_attained_length():
    F = Series.make(P5, [0, 1, 1, 1, 1, 1], is_polynomial=False)
    Q = divide_series(F, Series.x(P5))
    assert len(Q.a) == 5
