"""
The group of invertible families and its semidirect structure
=============================================================

Points compose and invert exactly; each one splits into a kernel part
(trivial underlying substitution) and a constant part.
"""

import random

from superdiff import (
    SDiffPoint,
    compose,
    compose_factored,
    functor_map,
    invert,
    recombine,
    split,
)
from superdiff.sampling import random_grassmann_morphism, random_point

rng = random.Random(4)
a = random_point(rng, 2, 2, 2, degree=1)
b = random_point(rng, 2, 2, 2, degree=1)

# group structure: inverses cancel and composition is associative
print("a * a^-1 is the unit:", compose(a, invert(a)).is_identity())
c = random_point(rng, 2, 2, 2, degree=1)
print(
    "(a*b)*c == a*(b*c):   ",
    compose(compose(a, b), c) == compose(a, compose(b, c)),
)

# an independent composition formula working purely on factored data
print("factored composition agrees:", compose_factored(a, b) == compose(a, b).morphism)

# semidirect split: kernel times constant part, recombined exactly
parts = split(a)
print("kernel part is a kernel element:", parts.kernel.in_kernel())
print("recombine(split(a)) == a:       ", recombine(parts) == a)

# relabeling the external generators is functorial
gm = random_grassmann_morphism(rng, 2, 3)
lhs = functor_map(gm, compose(a, b))
rhs = compose(functor_map(gm, a), functor_map(gm, b))
print("relabeling is a group hom:      ", lhs == rhs)
print(
    "unit goes to unit:              ",
    functor_map(gm, SDiffPoint.identity(2, 2, 2)) == SDiffPoint.identity(2, 2, 3),
)
