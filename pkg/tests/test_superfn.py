import math
import random
from fractions import Fraction

import pytest

from superdiff import Polynomial, Superfunction, map_external, substitute_generators
from superdiff.errors import DimensionError, ParityError
from superdiff.sampling import (
    random_grassmann_morphism,
    random_polynomial,
    random_superfunction,
)


def sf(text_m, n, p, terms):
    return Superfunction(text_m, n, p, terms)


def x(i, m=2, n=2, p=2):
    return Superfunction.coordinate(i, m, n, p)


def th(j, m=2, n=2, p=2):
    return Superfunction.theta(j, m, n, p)


def tau(k, m=2, n=2, p=2):
    return Superfunction.tau(k, m, n, p)


# -- polynomials -------------------------------------------------------


def test_polynomial_arithmetic():
    rng = random.Random(1)
    for _ in range(100):
        a = random_polynomial(rng, 3)
        b = random_polynomial(rng, 3)
        c = random_polynomial(rng, 3)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
    q = Polynomial.variable(1, 2) + Polynomial.const(1, 2)
    assert q ** 3 == q * q * q
    assert q ** 0 == Polynomial.const(1, 2)


def test_polynomial_diff_leibniz():
    rng = random.Random(2)
    for _ in range(100):
        a = random_polynomial(rng, 2)
        b = random_polynomial(rng, 2)
        i = rng.choice([1, 2])
        assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


def test_polynomial_degree():
    assert Polynomial.zero(2).degree() == -1
    assert Polynomial.const(3, 2).degree() == 0
    assert (Polynomial.variable(1, 2) ** 4).degree() == 4


# -- superfunctions ----------------------------------------------------


def test_odd_coordinates_square_to_zero():
    assert (th(1) * th(1)).is_zero()
    assert (tau(2) * tau(2)).is_zero()


def test_koszul_sign_theta_tau():
    # odd symbols from the two layers anticommute with each other
    assert th(1) * tau(1) == -(tau(1) * th(1))
    assert th(1) * th(2) == -(th(2) * th(1))
    assert tau(1) * tau(2) == -(tau(2) * tau(1))
    # storage order keeps th before t; the product th2 * t1 * th1 needs
    # two swaps: th2 t1 th1 = -th2 th1 t1 = th1 th2 t1
    prod = th(2) * tau(1) * th(1)
    expect = th(1) * th(2) * tau(1)
    assert prod == expect


def test_ring_axioms_random():
    rng = random.Random(3)
    for _ in range(150):
        a = random_superfunction(rng, 2, 2, 2)
        b = random_superfunction(rng, 2, 2, 2)
        c = random_superfunction(rng, 2, 2, 2)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c


def test_supercommutativity_random():
    rng = random.Random(4)
    for _ in range(150):
        pa, pb = rng.choice([0, 1]), rng.choice([0, 1])
        a = random_superfunction(rng, 2, 2, 2, parity=pa)
        b = random_superfunction(rng, 2, 2, 2, parity=pb)
        sign = -1 if pa and pb else 1
        assert a * b == (b * a).scale(sign)


def test_even_elements_are_central():
    rng = random.Random(5)
    for _ in range(80):
        a = random_superfunction(rng, 2, 2, 2, parity=0)
        b = random_superfunction(rng, 2, 2, 2)
        assert a * b == b * a


def test_diff_theta_signs():
    # d/dth2 (th1 th2) = -th1: the operator walks past th1 first
    f = th(1) * th(2)
    assert f.diff_theta(2) == -th(1)
    assert f.diff_theta(1) == th(2)
    # t factors sit to the right and cost nothing
    g = th(1) * tau(1)
    assert g.diff_theta(1) == tau(1)


def test_diff_theta_superleibniz():
    rng = random.Random(6)
    for _ in range(120):
        pa = rng.choice([0, 1])
        a = random_superfunction(rng, 2, 2, 2, parity=pa)
        b = random_superfunction(rng, 2, 2, 2)
        j = rng.choice([1, 2])
        sign = -1 if pa else 1
        lhs = (a * b).diff_theta(j)
        rhs = a.diff_theta(j) * b + (a * b.diff_theta(j)).scale(sign)
        assert lhs == rhs


def test_diff_x_leibniz_and_commuting():
    rng = random.Random(7)
    for _ in range(100):
        a = random_superfunction(rng, 2, 2, 2)
        b = random_superfunction(rng, 2, 2, 2)
        assert (a * b).diff_x(1) == a.diff_x(1) * b + a * b.diff_x(1)
        assert a.diff_x(1).diff_x(2) == a.diff_x(2).diff_x(1)
        j = rng.choice([1, 2])
        assert a.diff_theta(j).diff_theta(j).is_zero()


def test_parity_bookkeeping():
    assert x(1).parity() == 0
    assert th(1).parity() == 1
    assert tau(1).parity() == 1
    assert (th(1) * tau(2)).parity() == 0
    assert (x(1) + th(1)).parity() is None
    assert Superfunction.zero(2, 2, 2).parity() == 0


def test_j_degree_counts_theta_only():
    assert x(1).j_degree() == 0
    assert th(1).j_degree() == 1
    assert (th(1) * th(2)).j_degree() == 2
    assert tau(1).j_degree() == 0  # external factors do not count
    assert Superfunction.zero(2, 2, 2).j_degree() == math.inf
    mixed = x(1) + th(1) * th(2)
    assert mixed.j_degree() == 0
    assert mixed.reduce_mod_j(1) == x(1)


def test_external_coefficient_reconstructs():
    rng = random.Random(8)
    for _ in range(100):
        f = random_superfunction(rng, 2, 2, 3)
        total = Superfunction.zero(2, 2, 3)
        for key in f.external_support():
            coeff = f.external_coefficient(key)
            assert coeff.p == 0
            total = total + Superfunction.monomial(
                2, 2, 3, Polynomial.const(1, 2), (), key
            ) * coeff.lift(3)
        assert total == f


def test_external_coefficient_sign():
    # th1 t1 stored as ((1,),(1,)): pulling t1 left past th1 flips sign
    f = th(1) * tau(1)
    assert f.external_coefficient((1,)) == -th(1, p=0)
    g = tau(1) * th(1)
    assert g.external_coefficient((1,)) == th(1, p=0)


def test_lift_embed_restrict():
    f = x(1, 2, 2, 1) + th(1, 2, 2, 1) * tau(1, 2, 2, 1)
    g = f.lift(3)
    assert g.p == 3 and g.external_coefficient((1,)) == f.external_coefficient((1,))
    with pytest.raises(DimensionError):
        g.lift(1)
    h = x(1, 2, 2, 3).restrict_rank(0)
    assert h.p == 0
    with pytest.raises(DimensionError):
        (th(1) * tau(2)).restrict_rank(1)
    wide = f.embed(3, 4, 2)
    assert (wide.m, wide.n, wide.p) == (3, 4, 2)
    assert wide * Superfunction.theta(4, 3, 4, 2) != Superfunction.zero(3, 4, 2)


def test_substitution_is_algebra_map():
    rng = random.Random(9)
    for _ in range(60):
        x_imgs = [random_superfunction(rng, 2, 2, 2, parity=0) for _ in range(2)]
        th_imgs = [random_superfunction(rng, 2, 2, 2, parity=1) for _ in range(2)]
        a = random_superfunction(rng, 2, 2, 2, degree=2)
        b = random_superfunction(rng, 2, 2, 2, degree=2)
        fa = substitute_generators(a, x_imgs, th_imgs)
        fb = substitute_generators(b, x_imgs, th_imgs)
        fab = substitute_generators(a * b, x_imgs, th_imgs)
        assert fab == fa * fb


def test_substitution_fixes_external_generators():
    x_imgs = [x(1, 1, 2, 2) + tau(1, 1, 2, 2) * th(1, 1, 2, 2)]
    th_imgs = [th(1, 1, 2, 2), th(2, 1, 2, 2)]
    f = tau(2, 1, 2, 2)
    assert substitute_generators(f, x_imgs, th_imgs) == f


def test_substitution_parity_checks():
    with pytest.raises(ParityError):
        substitute_generators(x(1, 1, 1, 0), [Superfunction.theta(1, 1, 1, 0)], [Superfunction.theta(1, 1, 1, 0)])
    with pytest.raises(ParityError):
        substitute_generators(
            x(1, 1, 1, 0),
            [Superfunction.coordinate(1, 1, 1, 0)],
            [Superfunction.coordinate(1, 1, 1, 0)],
        )


def test_map_external_is_linear_over_internal():
    rng = random.Random(10)
    for _ in range(60):
        g = random_grassmann_morphism(rng, 2, 3)
        a = random_superfunction(rng, 2, 2, 2)
        b = random_superfunction(rng, 2, 2, 2)
        assert map_external(a + b, g) == map_external(a, g) + map_external(b, g)
        assert map_external(a * b, g) == map_external(a, g) * map_external(b, g)


def test_max_degree():
    f = x(1) ** 3 * th(1) + x(2)
    assert f.max_degree() == 3
