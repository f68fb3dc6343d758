import math
import random
from fractions import Fraction

import pytest
from scipy import integrate

from torsorcount.constants import (
    DENSITY_MONOMIALS,
    EFFECTIVE_CONE,
    REGION_PIECES,
    ConeSpec,
    QuadratureError,
    alpha,
    archimedean_volume_quadrature,
    archimedean_volume_regions,
    density_formula,
    euler_factor,
    euler_product,
    fp_count,
    fp_count_bruteforce,
    integrate_quadrant,
    is_prime,
    local_density,
    predicted_constant,
    primes_up_to,
    region_quadrature,
)
from torsorcount.cox import DivisorTag

D1, D2 = DivisorTag.D1, DivisorTag.D2
PRIMES_100 = [p for p in range(2, 101) if is_prime(p)]


# --- alpha -----------------------------------------------------------------


def test_alpha_is_one_sixth():
    a = alpha()
    assert isinstance(a, Fraction) and a == Fraction(1, 6)


def test_alpha_matches_dual_cone_integral():
    # dual cone of <(0,1),(1,-1)> is t1 >= t2 >= 0; integrate exp(-<L, t>)
    val, err = integrate.dblquad(
        lambda t1, t2: math.exp(-(3 * t1 - t2)), 0, math.inf, lambda t2: t2, lambda t2: math.inf
    )
    assert abs(val - 1 / 6) < 1e-8


def random_unimodular(rng):
    m = [[1, 0], [0, 1]]
    for _ in range(6):
        i, j = rng.sample([0, 1], 2)
        k = rng.randint(-3, 3)
        m[i] = [m[i][0] + k * m[j][0], m[i][1] + k * m[j][1]]
        if rng.random() < 0.3:
            m[i] = [-v for v in m[i]]
    assert abs(m[0][0] * m[1][1] - m[0][1] * m[1][0]) == 1
    return m


def apply(m, v):
    return tuple(m[i][0] * v[0] + m[i][1] * v[1] for i in range(2))


def test_alpha_invariant_under_unimodular_basis_changes():
    rng = random.Random(20261015)
    for _ in range(100):
        m = random_unimodular(rng)
        cone = ConeSpec(tuple(apply(m, g) for g in EFFECTIVE_CONE.generators), apply(m, EFFECTIVE_CONE.target))
        assert alpha(cone) == Fraction(1, 6)


def test_alpha_depends_only_on_the_rays():
    # the dual cone depends only on the rays, so rescaling a generator changes nothing
    assert alpha(ConeSpec(((0, 2), (1, -1)), (3, -1))) == Fraction(1, 6)
    assert alpha(ConeSpec(((1, 0), (0, 1)), (2, 3))) == Fraction(1, 6)
    assert alpha(ConeSpec(((1, 0), (0, 1)), (1, 1))) == 1
    assert alpha(ConeSpec(((1, 0, 0), (0, 1, 0), (0, 0, 1)), (1, 1, 1))) == Fraction(1, 2)


def test_alpha_errors():
    with pytest.raises(ValueError):
        alpha(ConeSpec(((1, 0), (2, 0)), (1, 0)))
    with pytest.raises(ValueError):
        alpha(ConeSpec(((0, 1), (1, -1)), (-1, 0)))
    with pytest.raises(ValueError):
        ConeSpec(((1, 0),), (1, 0))


# --- finite places ---------------------------------------------------------


@pytest.mark.parametrize("d, p, expected", [(D1, 2, 12), (D1, 3, 36), (D1, 5, 150), (D2, 2, 10), (D2, 3, 33)])
def test_fp_count_examples(d, p, expected):
    # D1: p^3 + p^2;  D2: p^3 + p^2 - p
    assert fp_count(d, p) == expected


@pytest.mark.parametrize("d", list(DivisorTag))
@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_fp_count_matches_bruteforce(d, p):
    assert fp_count(d, p) == fp_count_bruteforce(d, p)


@pytest.mark.parametrize("d", list(DivisorTag))
def test_local_density_for_primes_up_to_100(d):
    for p in PRIMES_100:
        ld = local_density(d, p)
        assert isinstance(ld.value, Fraction)
        assert ld.value == density_formula(d, p)


def test_density_examples():
    assert density_formula(D1, 2) == Fraction(3, 2)
    assert density_formula(D2, 2) == Fraction(5, 4)
    assert local_density(D2, 5).value == Fraction(29, 25)
    assert local_density(D1, 2).value == Fraction(3, 2)
    assert euler_factor(D1, 2) == Fraction(3, 4)
    assert euler_factor(D2, 2) == Fraction(5, 8)


def test_prime_validation():
    with pytest.raises(ValueError):
        fp_count(D1, 4)
    with pytest.raises(ValueError):
        local_density(D1, 10007)
    with pytest.raises(ValueError):
        fp_count_bruteforce(D1, 13)


def test_primes_up_to():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert primes_up_to(1).tolist() == []


def test_euler_product_small():
    assert euler_product(D1, 3)[0] == pytest.approx(3 / 4 * 8 / 9, rel=1e-14)
    assert euler_product(D2, 2)[0] == pytest.approx(5 / 8, rel=1e-14)
    with pytest.raises(ValueError):
        euler_product(D1, 1)


def test_euler_product_d1_is_inverse_zeta2():
    partial, tail = euler_product(D1, 10**6)
    truth = 6 / math.pi**2
    assert partial * math.exp(-tail) <= truth <= partial


@pytest.mark.parametrize("d", list(DivisorTag))
def test_euler_tail_bound_encloses_longer_product(d):
    partial, tail = euler_product(d, 10**5)
    longer, _ = euler_product(d, 10**7)
    assert partial * math.exp(-tail) <= longer <= partial


@pytest.mark.parametrize("d", list(DivisorTag))
def test_euler_product_decreasing(d):
    vals = [euler_product(d, P)[0] for P in (2, 10, 100, 1000)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


# --- archimedean -----------------------------------------------------------


@pytest.mark.parametrize("d", list(DivisorTag))
def test_region_decomposition_is_exact_twenty(d):
    total, pieces = archimedean_volume_regions(d)
    assert total == 20
    assert len(pieces) == 3


def test_d1_region_values():
    _, pieces = archimedean_volume_regions(D1)
    assert [v for _, v in pieces] == [Fraction(20, 3), Fraction(4), Fraction(28, 3)]
    third = REGION_PIECES[D1][2]
    assert [p.exact() for p in third.parts] == [Fraction(4), Fraction(16, 3)]


def test_d2_region_values():
    _, pieces = archimedean_volume_regions(D2)
    assert [v for _, v in pieces] == [Fraction(20, 3), Fraction(16, 3), Fraction(8)]


@pytest.mark.parametrize("d", list(DivisorTag))
def test_quadrature_volume(d):
    assert abs(archimedean_volume_quadrature(d, tol=1e-6) - 20) <= 1e-6


@pytest.mark.parametrize("d", list(DivisorTag))
def test_region_quadrature_matches_closed_form(d):
    for piece in REGION_PIECES[d]:
        assert abs(region_quadrature(d, piece, tol=1e-6) - float(piece.exact())) <= 1e-5
        for part in piece.parts:
            assert abs(region_quadrature(d, part, tol=1e-6) - float(part.exact())) <= 1e-5


def test_d1_first_piece_literal_integrand():
    # over |a| <= 1, |a^2 c| <= 1 the density reduces to 1/max(1, c^2)
    val, _ = integrate_quadrant([(0, 0), (0, 2)], REGION_PIECES[D1][0].cells, tol=1e-7)
    assert abs(val - 20 / 3) < 1e-6


def test_quadrature_simple_known_integral():
    # 4 * int int 1/max(1, u^2, v^2) over the plane quadrant diverges; bound v
    val, _ = integrate_quadrant([(0, 0), (2, 0), (0, 2)], [[((0, 1), (0, 0)), ((1, 0), (0, 0))]])
    assert val == pytest.approx(4.0, abs=1e-8)


def test_quadrature_error_raised_on_divergence():
    with pytest.raises(QuadratureError):
        integrate_quadrant([(0, 0), (1, 0)])


def test_density_monomials_are_distinct():
    for monos in DENSITY_MONOMIALS.values():
        assert len(set(monos)) == len(monos)


# --- assembled -------------------------------------------------------------


def test_predicted_constant_d1():
    br = predicted_constant(D1, 10**6, 1e-4)
    c1 = 40 / math.pi**2
    assert br.contains(c1)
    assert br.width <= 1e-4
    assert br.alpha == Fraction(1, 6)
    assert br.tau_infinity_regions == 40
    assert br.prediction == pytest.approx(c1, rel=1e-5)


def test_predicted_constant_d2():
    br = predicted_constant(D2, 10**6, 1e-4)
    assert br.contains(2.854997091)
    assert br.width <= 1e-4
    d = br.as_dict()
    assert d["divisor"] == "D2" and d["alpha"] == "1/6" and d["c_real"] == 2
