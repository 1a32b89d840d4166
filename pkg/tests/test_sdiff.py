import random
from fractions import Fraction

import pytest

from superdiff import (
    Polynomial,
    SDiffPoint,
    SuperDerivation,
    SuperMorphism,
    Superfunction,
    compose,
    compose_factored,
    differential_action,
    functor_map,
    invert,
    is_invertible,
    pushforward,
    recombine,
    split,
)
from superdiff.errors import InvertibilityError
from superdiff.sampling import (
    random_derivation,
    random_grassmann_morphism,
    random_point,
)


def test_is_invertible_verdicts():
    m, n, p = 1, 1, 1
    x1 = Superfunction.coordinate(1, m, n, p)
    th1 = Superfunction.theta(1, m, n, p)
    good = SuperMorphism(m, n, p, [x1 + th1 * Superfunction.tau(1, m, n, p)], [th1])
    verdict = is_invertible(good)
    assert verdict.status == "invertible"
    assert verdict.body is not None
    bad = SuperMorphism(m, n, p, [x1 ** 2], [th1])
    assert is_invertible(bad).status == "unknown"


def test_constructing_uninvertible_point_raises():
    m, n, p = 1, 1, 1
    sq = Superfunction.coordinate(1, m, n, p) ** 2
    th1 = Superfunction.theta(1, m, n, p)
    with pytest.raises(InvertibilityError):
        SDiffPoint.from_morphism(SuperMorphism(m, n, p, [sq], [th1]))


def test_group_axioms():
    rng = random.Random(60)
    ident = SDiffPoint.identity(2, 2, 2)
    for _ in range(15):
        a = random_point(rng, 2, 2, 2, degree=1)
        b = random_point(rng, 2, 2, 2, degree=1)
        c = random_point(rng, 2, 2, 2, degree=1)
        assert compose(a, ident) == a
        assert compose(ident, a) == a
        assert compose(compose(a, b), c) == compose(a, compose(b, c))
        ai = invert(a)
        assert compose(ai, a) == ident
        assert compose(a, ai) == ident


def test_inverse_of_composite():
    rng = random.Random(61)
    for _ in range(10):
        a = random_point(rng, 2, 2, 2, degree=1)
        b = random_point(rng, 2, 2, 2, degree=1)
        assert invert(compose(a, b)) == compose(invert(b), invert(a))


def test_compose_factored_matches():
    rng = random.Random(62)
    for _ in range(15):
        a = random_point(rng, 2, 2, 2, degree=1)
        b = random_point(rng, 2, 2, 2, degree=1)
        assert compose_factored(a, b) == compose(a, b).morphism


def test_inverse_fields_formula():
    # the components of the inverse are the negated pushforwards
    rng = random.Random(63)
    for _ in range(10):
        a = random_point(rng, 2, 2, 2, degree=1)
        b = invert(a)
        for key, field in a.fields.items():
            moved = -pushforward(a.body, field)
            if moved.is_zero():
                assert key not in b.fields
            else:
                assert b.fields[key] == moved


def test_kernel_is_normal_and_closed():
    rng = random.Random(64)
    for _ in range(10):
        g = random_point(rng, 2, 2, 2, degree=1)
        k = split(random_point(rng, 2, 2, 2, degree=1)).kernel
        k2 = split(random_point(rng, 2, 2, 2, degree=1)).kernel
        assert k.in_kernel() and k2.in_kernel()
        assert compose(k, k2).in_kernel()
        conj = compose(compose(g, k), invert(g))
        assert conj.in_kernel()


def test_split_recombine():
    rng = random.Random(65)
    for _ in range(15):
        a = random_point(rng, 2, 2, 2, degree=1)
        parts = split(a)
        assert parts.kernel.in_kernel()
        assert parts.body.images_x == a.body.images_x
        assert recombine(parts) == a


def test_split_respects_product_law():
    # (k1, g1) (k2, g2) multiplies as k1 * (g1 k2 g1^-1) on kernel parts
    rng = random.Random(66)
    for _ in range(8):
        a = random_point(rng, 2, 2, 2, degree=1)
        b = random_point(rng, 2, 2, 2, degree=1)
        pa, pb = split(a), split(b)
        pc = split(compose(a, b))
        g1 = SDiffPoint.constant_family(pa.body, 2)
        twisted = compose(compose(g1, pb.kernel), invert(g1))
        assert pc.kernel == compose(pa.kernel, twisted)
        assert pc.body == pa.body.compose(pb.body)


def test_functor_map_is_group_hom():
    rng = random.Random(67)
    for _ in range(8):
        gm = random_grassmann_morphism(rng, 3, 2)
        a = random_point(rng, 1, 2, 3, degree=1)
        b = random_point(rng, 1, 2, 3, degree=1)
        lhs = functor_map(gm, compose(a, b))
        rhs = compose(functor_map(gm, a), functor_map(gm, b))
        assert lhs == rhs
    gm = random_grassmann_morphism(rng, 3, 2)
    assert functor_map(gm, SDiffPoint.identity(1, 2, 3)) == SDiffPoint.identity(1, 2, 2)


def test_functor_map_respects_inverse():
    rng = random.Random(68)
    for _ in range(8):
        gm = random_grassmann_morphism(rng, 2, 3)
        a = random_point(rng, 2, 1, 2, degree=1)
        assert functor_map(gm, invert(a)) == invert(functor_map(gm, a))


def test_differential_action_on_kernel_free_point():
    # for a constant family the action is plain pushforward
    rng = random.Random(69)
    from superdiff.sampling import random_body

    for _ in range(10):
        body = random_body(rng, 2, 2, degree=1)
        point = SDiffPoint.constant_family(body, 2)
        Y = random_derivation(rng, 2, 2, 2, degree=1, parity=0)
        assert differential_action(point, Y) == pushforward_family(body, Y)


def pushforward_family(body, Y):
    # transport a field with external coefficients slotwise through the body
    from superdiff.substitution import UnderlyingMorphism

    m, n, p = Y.m, Y.n, Y.p
    inv = body.inverse
    coords = [Superfunction.coordinate(i, m, n) for i in range(1, m + 1)] + [
        Superfunction.theta(j, m, n) for j in range(1, n + 1)
    ]
    values = [
        inv.apply(Y.apply(body.apply(g).lift(p))) for g in coords
    ]
    return SuperDerivation(m, n, p, values[:m], values[m:])


def test_differential_action_even_linearity():
    rng = random.Random(70)
    for _ in range(12):
        point = random_point(rng, 2, 2, 2, degree=1)
        Y = random_derivation(rng, 2, 2, 2, degree=1, parity=0)
        scalar = Superfunction.monomial(
            2, 2, 2, Polynomial.const(Fraction(2, 3), 2), (), (1, 2)
        )
        lhs = differential_action(point, Y.premultiply(scalar))
        rhs = differential_action(point, Y).premultiply(scalar)
        assert lhs == rhs


def test_differential_action_of_identity():
    Y = random_derivation(random.Random(71), 2, 2, 2, degree=1, parity=0)
    ident = SDiffPoint.identity(2, 2, 2)
    assert differential_action(ident, Y) == Y
