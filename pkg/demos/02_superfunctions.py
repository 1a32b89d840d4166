"""
Superfunctions: polynomial coefficients, odd coordinates, external scalars
==========================================================================

A superfunction lives on a domain with m even coordinates x and n odd
coordinates th, tensored with an external algebra on p odd generators t.
"""

from superdiff import Superfunction
from superdiff.parser import format_superfunction, parse_superfunction

m, n, p = 2, 2, 2
x1 = Superfunction.coordinate(1, m, n, p)
x2 = Superfunction.coordinate(2, m, n, p)
th1 = Superfunction.theta(1, m, n, p)
th2 = Superfunction.theta(2, m, n, p)
t1 = Superfunction.tau(1, m, n, p)

# odd coordinates anticommute among themselves and with the t block
print("th1*th2 + th2*th1 =", th1 * th2 + th2 * th1)
print("th1*t1            =", th1 * t1)
print("t1*th1            =", t1 * th1)

# even elements are central; mixed products pick up the reordering sign
f = x1 * x1 + x2 * th1 * th2
g = th1 * t1
print("f*g               =", f * g)
print("g*f               =", g * f)

# partial derivatives: the odd ones obey the signed product rule
print("d/dx1 (f*g)       =", (f * g).diff_x(1))
print("d/dth1 (th1*th2)  =", (th1 * th2).diff_theta(1))
print("d/dth2 (th1*th2)  =", (th1 * th2).diff_theta(2))

# text form round trips through the parser byte for byte
text = format_superfunction(f + g)
print("printed           =", text)
print("reparses equal    =", parse_superfunction(text, m, n, p) == f + g)
