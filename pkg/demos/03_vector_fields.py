"""
Vector fields: brackets, symmetrized application, exp and log
=============================================================

A derivation is determined by its coefficients on the coordinates; the
graded commutator and the unipotent exponential stay exact throughout.
"""

from superdiff import (
    SuperDerivation,
    Superfunction,
    exp_nilpotent,
    log_unipotent,
    symmetrize_apply,
)
from superdiff.parser import format_derivation

m, n = 2, 2
x1 = Superfunction.coordinate(1, m, n)
th1 = Superfunction.theta(1, m, n)
th2 = Superfunction.theta(2, m, n)
zero = Superfunction.zero(m, n)

# d/dth1 and th1*d/dx1 are both odd; their bracket is even
d_th1 = SuperDerivation(m, n, 0, [zero, zero], [Superfunction.scalar(1, m, n), zero])
moved = SuperDerivation(m, n, 0, [th1, zero], [zero, zero])
print("A            =", format_derivation(d_th1))
print("B            =", format_derivation(moved))
print("[A, B]       =", format_derivation(d_th1.bracket(moved)))

# symmetrized application averages every composition order
f = x1 * th2
avg = symmetrize_apply([d_th1, moved], f)
print("sym(A,B)(x1*th2) =", avg)

# an even field that raises the odd degree by 2 exponentiates to a
# unipotent substitution, and log recovers it exactly
X = SuperDerivation(m, n, 0, [th1 * th2, zero], [zero, zero])
phi = exp_nilpotent(X)
print("exp(X): x1  ->", phi.images_x[0])
print("log(exp(X)) == X:", log_unipotent(phi) == X)
