"""Fields with external odd coefficients, as a functor of the coefficient algebra.

A `LambdaSection` is a super vector field whose coefficients may involve
the external generators t[1..p] and whose total parity is even: each
d/dx coefficient has an even number of odd factors (th and t combined),
each d/dth coefficient an odd number.  These are exactly the elements
the group layer exponentiates, and their count over a basis matches the
dimension of (even part of Lambda_p) x (even fields) plus (odd part of
Lambda_p) x (odd fields).
"""

from __future__ import annotations

from itertools import combinations

from .derivation import SuperDerivation
from .errors import DimensionError, ParityError
from .grassmann import GrassmannMorphism
from .superfn import Polynomial, Superfunction, map_external

IndexTuple = tuple[int, ...]


class LambdaSection:
    """An even super vector field with external odd coefficients."""

    __slots__ = ("field",)

    def __init__(self, field: SuperDerivation):
        if field.parity() != 0:
            raise ParityError("a section must be even overall")
        self.field = field

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def p(self) -> int:
        return self.field.p

    def apply(self, f: Superfunction) -> Superfunction:
        return self.field.apply(f)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LambdaSection) and self.field == other.field

    def __str__(self) -> str:
        return str(self.field)

    def __repr__(self) -> str:
        return f"LambdaSection({self.m}|{self.n};{self.p})"


def _monomials_up_to(m: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples of total degree <= degree, in graded lex order."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: tuple[int, ...], remaining: int) -> None:
        if remaining == 0:
            out.append(prefix)
            return
        for e in range(degree - sum(prefix) + 1):
            rec(prefix + (e,), remaining - 1)

    rec((), m)
    return sorted(out, key=lambda t: (sum(t), t))


def section_basis(m: int, n: int, p: int, degree: int) -> list[LambdaSection]:
    """Ordered basis of the even fields with coefficients of bounded degree.

    One basis element per (slot, monomial) pair: slots run over d/dx_1
    ... d/dx_m then d/dth_1 ... d/dth_n, and for each slot the coefficient
    monomials x^a th[K] t[J] run over deg(a) <= degree with len(K)+len(J)
    matching the slot parity (even for d/dx, odd for d/dth).
    """
    if degree < 0:
        raise DimensionError("degree bound must be nonnegative")
    exponents = _monomials_up_to(m, degree)
    theta_sets = [
        key for size in range(n + 1) for key in combinations(range(1, n + 1), size)
    ]
    tau_sets = [
        key for size in range(p + 1) for key in combinations(range(1, p + 1), size)
    ]
    basis: list[LambdaSection] = []

    def coefficient(exps, theta_key, tau_key) -> Superfunction:
        return Superfunction.monomial(
            m, n, p, Polynomial(m, {tuple(exps): 1}), theta_key, tau_key
        )

    zero = Superfunction.zero(m, n, p)
    for slot in range(m):
        for theta_key in theta_sets:
            for tau_key in tau_sets:
                if (len(theta_key) + len(tau_key)) % 2 != 0:
                    continue
                for exps in exponents:
                    x_coeffs = [zero] * m
                    x_coeffs[slot] = coefficient(exps, theta_key, tau_key)
                    basis.append(
                        LambdaSection(
                            SuperDerivation(m, n, p, x_coeffs, [zero] * n)
                        )
                    )
    for slot in range(n):
        for theta_key in theta_sets:
            for tau_key in tau_sets:
                if (len(theta_key) + len(tau_key)) % 2 != 1:
                    continue
                for exps in exponents:
                    th_coeffs = [zero] * n
                    th_coeffs[slot] = coefficient(exps, theta_key, tau_key)
                    basis.append(
                        LambdaSection(
                            SuperDerivation(m, n, p, [zero] * m, th_coeffs)
                        )
                    )
    return basis


def functor_action(morphism: GrassmannMorphism, section: LambdaSection) -> LambdaSection:
    """Relabel external generators of a section along a Grassmann map."""
    field = section.field
    if field.p != morphism.source_n:
        raise DimensionError(
            f"section has external rank {field.p}, morphism expects {morphism.source_n}"
        )
    return LambdaSection(
        SuperDerivation(
            field.m,
            field.n,
            morphism.target_n,
            [map_external(g, morphism) for g in field.x_coeffs],
            [map_external(g, morphism) for g in field.th_coeffs],
        )
    )


def skeleton_decompose(section: LambdaSection) -> dict[IndexTuple, SuperDerivation]:
    """Write the section as  sum_J t[J] * X_J  with t-free fields X_J.

    Each X_J has parity len(J) mod 2; reassembling with `premultiply`
    recovers the section exactly.  Only nonzero components are listed.
    """
    field = section.field
    support: set[IndexTuple] = set()
    for g in list(field.x_coeffs) + list(field.th_coeffs):
        support.update(g.external_support())
    out: dict[IndexTuple, SuperDerivation] = {}
    for tau_key in sorted(support, key=lambda j: (len(j), j)):
        component = SuperDerivation(
            field.m,
            field.n,
            0,
            [g.external_coefficient(tau_key) for g in field.x_coeffs],
            [g.external_coefficient(tau_key) for g in field.th_coeffs],
        )
        if component.is_zero():
            continue
        if component.parity() != len(tau_key) % 2:
            raise ParityError("decomposition produced a component of wrong parity")
        out[tau_key] = component
    return out


def reassemble(
    m: int, n: int, p: int, components: dict[IndexTuple, SuperDerivation]
) -> LambdaSection:
    """Inverse of `skeleton_decompose`."""
    total = SuperDerivation.zero(m, n, p)
    for tau_key in sorted(components, key=lambda j: (len(j), j)):
        prefix = Superfunction.monomial(m, n, p, Polynomial.const(1, m), (), tau_key)
        total = total + components[tau_key].lift(p).premultiply(prefix)
    return LambdaSection(total)
