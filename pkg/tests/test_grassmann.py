import random
from fractions import Fraction

import pytest

from superdiff import (
    GrassmannElement,
    GrassmannMorphism,
    eps,
    unit_embed,
    merge_indices,
)
from superdiff.errors import DimensionError, ParityError
from superdiff.sampling import random_grassmann, random_grassmann_morphism


def gen(i, n=4):
    return GrassmannElement.generator(i, n)


def test_merge_disjoint_counts_transpositions():
    assert merge_indices((1,), (2,)) == (1, (1, 2))
    assert merge_indices((2,), (1,)) == (-1, (1, 2))
    assert merge_indices((), (1, 3)) == (1, (1, 3))
    # moving 2 past one remaining left entry flips the sign once
    assert merge_indices((1, 3), (2,)) == (-1, (1, 2, 3))
    assert merge_indices((2, 4), (1, 3)) == (-1, (1, 2, 3, 4))


def test_merge_overlap_is_none():
    assert merge_indices((1, 2), (2,)) is None
    assert merge_indices((3,), (3,)) is None


def test_generators_anticommute():
    a, b = gen(1), gen(2)
    assert (a * b + b * a).is_zero()
    assert (a * a).is_zero()


def test_known_product():
    # (1 + t1)(1 + t2) = 1 + t1 + t2 + t1 t2
    one = GrassmannElement.scalar(1, 2)
    lhs = (one + gen(1, 2)) * (one + gen(2, 2))
    assert lhs.terms == {
        (): Fraction(1),
        (1,): Fraction(1),
        (2,): Fraction(1),
        (1, 2): Fraction(1),
    }


def test_sign_of_reordered_triple():
    # t2 t3 t1 = + t1 t2 t3 (two transpositions)
    lhs = gen(2) * gen(3) * gen(1)
    assert lhs == GrassmannElement.monomial((1, 2, 3), 4)
    # t3 t2 t1 = - t1 t2 t3
    assert gen(3) * gen(2) * gen(1) == -GrassmannElement.monomial((1, 2, 3), 4)


def test_ring_axioms_random():
    rng = random.Random(101)
    for _ in range(200):
        a = random_grassmann(rng, 4)
        b = random_grassmann(rng, 4)
        c = random_grassmann(rng, 4)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a + b) * c == a * c + b * c


def test_supercommutativity_random():
    rng = random.Random(102)
    for _ in range(200):
        pa = rng.choice([0, 1])
        pb = rng.choice([0, 1])
        a = random_grassmann(rng, 4, parity=pa)
        b = random_grassmann(rng, 4, parity=pb)
        sign = -1 if pa and pb else 1
        assert a * b == (b * a).scale(sign)


def test_parity_and_body():
    a = GrassmannElement.scalar(Fraction(3, 2), 3) + GrassmannElement.monomial((1, 2), 3)
    assert a.parity() == 0
    assert a.body == Fraction(3, 2)
    assert a.soul() == GrassmannElement.monomial((1, 2), 3)
    mixed = a + gen(1, 3)
    assert mixed.parity() is None
    assert GrassmannElement.zero(3).parity() == 0


def test_nilpotency_of_soul():
    rng = random.Random(103)
    for _ in range(50):
        a = random_grassmann(rng, 4)
        s = a.soul()
        power = GrassmannElement.scalar(1, 4)
        for _ in range(5):
            power = power * s
        assert power.is_zero()  # 5 factors from a 4-generator algebra


def test_eps_unit_embed():
    a = GrassmannElement.scalar(Fraction(-2, 7), 3) + gen(2, 3)
    assert eps(a) == Fraction(-2, 7)
    assert unit_embed(Fraction(5, 3), 3) == GrassmannElement.scalar(Fraction(5, 3), 3)
    # eps is an algebra map
    rng = random.Random(104)
    for _ in range(50):
        u = random_grassmann(rng, 3)
        v = random_grassmann(rng, 3)
        assert eps(u * v) == eps(u) * eps(v)


def test_validation():
    with pytest.raises(DimensionError):
        GrassmannElement(2, {(3,): Fraction(1)})
    with pytest.raises(ValueError):
        GrassmannElement(3, {(2, 1): Fraction(1)})
    with pytest.raises(DimensionError):
        GrassmannElement.generator(0, 2)


def test_morphism_images_must_be_odd():
    with pytest.raises(ParityError):
        GrassmannMorphism(1, 2, [GrassmannElement.scalar(1, 2)])
    # zero image is allowed
    GrassmannMorphism(1, 2, [GrassmannElement.zero(2)])


def test_morphism_is_algebra_map():
    rng = random.Random(105)
    for _ in range(60):
        f = random_grassmann_morphism(rng, 3, 4)
        a = random_grassmann(rng, 3)
        b = random_grassmann(rng, 3)
        assert f.apply(a * b) == f.apply(a) * f.apply(b)
        assert f.apply(a + b) == f.apply(a) + f.apply(b)
    ident = GrassmannMorphism.identity(3)
    a = random_grassmann(rng, 3)
    assert ident.apply(a) == a


def test_morphism_composition():
    rng = random.Random(106)
    for _ in range(40):
        f = random_grassmann_morphism(rng, 2, 3)
        g = random_grassmann_morphism(rng, 3, 4)
        a = random_grassmann(rng, 2)
        assert g.compose(f).apply(a) == g.apply(f.apply(a))


def test_to_from_scalars():
    drop = GrassmannMorphism.to_scalars(3)
    a = GrassmannElement.scalar(4, 3) + gen(1, 3) + gen(1, 3) * gen(2, 3)
    assert drop.apply(a) == GrassmannElement.scalar(4, 0)
    raise_ = GrassmannMorphism.from_scalars(2)
    assert raise_.apply(GrassmannElement.scalar(7, 0)) == GrassmannElement.scalar(7, 2)
