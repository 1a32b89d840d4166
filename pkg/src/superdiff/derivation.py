"""Super vector fields on a superdomain and the calculus built on them.

A `SuperDerivation` is a first-order operator

    sum_i  c_i * d/dx_i  +  sum_j  g_j * d/dth_j

whose coefficients are superfunctions (possibly involving external odd
constants t[k]).  It acts on a superfunction by differentiating term by
term and multiplying each result by the coefficient from the left.

The module also provides the combinatorial helpers used by the group
layer: ordered two-block splits and unordered partitions of an index
set, the symmetrized composition of several such operators, transport
of a field along an invertible substitution, and the terminating
exponential/logarithm series between fields of high filtration degree
and unipotent substitutions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .errors import DimensionError, DomainError, InvertibilityError, ParityError
from .substitution import UnderlyingMorphism
from .superfn import Superfunction

Scalar = Union[int, Fraction]
IndexTuple = tuple[int, ...]


class SuperDerivation:
    """A super vector field with superfunction coefficients."""

    __slots__ = ("m", "n", "p", "x_coeffs", "th_coeffs")

    def __init__(
        self,
        m: int,
        n: int,
        p: int,
        x_coeffs: Sequence[Superfunction],
        th_coeffs: Sequence[Superfunction],
    ):
        x_coeffs = tuple(x_coeffs)
        th_coeffs = tuple(th_coeffs)
        if len(x_coeffs) != m or len(th_coeffs) != n:
            raise DimensionError(
                f"expected {m} even and {n} odd coefficients, "
                f"got {len(x_coeffs)} and {len(th_coeffs)}"
            )
        for g in x_coeffs + th_coeffs:
            if (g.m, g.n, g.p) != (m, n, p):
                raise DimensionError("coefficient lives on the wrong domain")
        self.m = m
        self.n = n
        self.p = p
        self.x_coeffs = x_coeffs
        self.th_coeffs = th_coeffs

    @classmethod
    def zero(cls, m: int, n: int, p: int = 0) -> "SuperDerivation":
        z = Superfunction.zero(m, n, p)
        return cls(m, n, p, [z] * m, [z] * n)

    @classmethod
    def d_dx(cls, i: int, m: int, n: int, p: int = 0) -> "SuperDerivation":
        base = cls.zero(m, n, p)
        coeffs = list(base.x_coeffs)
        coeffs[i - 1] = Superfunction.scalar(1, m, n, p)
        return cls(m, n, p, coeffs, base.th_coeffs)

    @classmethod
    def d_dtheta(cls, j: int, m: int, n: int, p: int = 0) -> "SuperDerivation":
        base = cls.zero(m, n, p)
        coeffs = list(base.th_coeffs)
        coeffs[j - 1] = Superfunction.scalar(1, m, n, p)
        return cls(m, n, p, base.x_coeffs, coeffs)

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.x_coeffs + self.th_coeffs)

    # -- grading -------------------------------------------------------

    def parity(self) -> Optional[int]:
        """Total parity (counting th and t factors); None if mixed."""
        parities = set()
        for g in self.x_coeffs:
            q = g.parity()
            if q is None:
                return None
            if not g.is_zero():
                parities.add(q)
        for g in self.th_coeffs:
            q = g.parity()
            if q is None:
                return None
            if not g.is_zero():
                parities.add((q + 1) % 2)
        if not parities:
            return 0
        return parities.pop() if len(parities) == 1 else None

    def filtration_degree(self) -> Union[int, float]:
        """How much the operator raises the th filtration, at worst.

        Coefficients of d/dx contribute their j_degree, coefficients of
        d/dth contribute one less; the zero field reports +inf.
        """
        degree: Union[int, float] = math.inf
        for g in self.x_coeffs:
            degree = min(degree, g.j_degree())
        for g in self.th_coeffs:
            degree = min(degree, g.j_degree() - 1)
        return degree

    # -- linear structure ----------------------------------------------

    def _check(self, other: "SuperDerivation") -> None:
        if (self.m, self.n, self.p) != (other.m, other.n, other.p):
            raise DimensionError("fields live on different domains")

    def __add__(self, other: "SuperDerivation") -> "SuperDerivation":
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        self._check(other)
        return SuperDerivation(
            self.m,
            self.n,
            self.p,
            [a + b for a, b in zip(self.x_coeffs, other.x_coeffs)],
            [a + b for a, b in zip(self.th_coeffs, other.th_coeffs)],
        )

    def __neg__(self) -> "SuperDerivation":
        return SuperDerivation(
            self.m,
            self.n,
            self.p,
            [-g for g in self.x_coeffs],
            [-g for g in self.th_coeffs],
        )

    def __sub__(self, other: "SuperDerivation") -> "SuperDerivation":
        return self + (-other)

    def scale(self, c: Scalar) -> "SuperDerivation":
        return SuperDerivation(
            self.m,
            self.n,
            self.p,
            [g.scale(c) for g in self.x_coeffs],
            [g.scale(c) for g in self.th_coeffs],
        )

    def __mul__(self, other: Scalar) -> "SuperDerivation":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: Scalar) -> "SuperDerivation":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def premultiply(self, g: Superfunction) -> "SuperDerivation":
        """The operator f -> g * self(f); still a derivation."""
        return SuperDerivation(
            self.m,
            self.n,
            self.p,
            [g * c for c in self.x_coeffs],
            [g * c for c in self.th_coeffs],
        )

    def lift(self, p_new: int) -> "SuperDerivation":
        if p_new == self.p:
            return self
        return SuperDerivation(
            self.m,
            self.n,
            p_new,
            [g.lift(p_new) for g in self.x_coeffs],
            [g.lift(p_new) for g in self.th_coeffs],
        )

    # -- action ----------------------------------------------------------

    def apply(self, f: Superfunction) -> Superfunction:
        """Act on a superfunction."""
        if (f.m, f.n, f.p) != (self.m, self.n, self.p):
            raise DimensionError("field and superfunction live on different domains")
        result = Superfunction.zero(self.m, self.n, self.p)
        for i, c in enumerate(self.x_coeffs, start=1):
            if not c.is_zero():
                d = f.diff_x(i)
                if not d.is_zero():
                    result = result + c * d
        for j, g in enumerate(self.th_coeffs, start=1):
            if not g.is_zero():
                d = f.diff_theta(j)
                if not d.is_zero():
                    result = result + g * d
        return result

    def bracket(self, other: "SuperDerivation") -> "SuperDerivation":
        """The supercommutator [self, other].

        The sign in front of the reversed composition is fixed by the
        parities, so the fields must be homogeneous (a mixed field is
        tolerated when the other one is even, where no sign ambiguity
        arises).  The composite of two derivations is not a derivation,
        but this combination is, so it is assembled from its values on
        the coordinates.
        """
        self._check(other)
        qa, qb = self.parity(), other.parity()
        if qa is None and qb is None:
            raise ParityError("bracket requires parity-homogeneous fields")
        if qa is None or qb is None:
            # one side mixed: fine only when the homogeneous side is even,
            # because then both parity components get the same sign
            if (qa if qa is not None else qb) != 0:
                raise ParityError(
                    "bracket of a mixed field needs an even partner"
                )
            sign = 1
        else:
            sign = -1 if (qa * qb) % 2 else 1
        m, n, p = self.m, self.n, self.p
        x_out = []
        for i in range(1, m + 1):
            gen = Superfunction.coordinate(i, m, n, p)
            x_out.append(
                self.apply(other.apply(gen)) - other.apply(self.apply(gen)).scale(sign)
            )
        th_out = []
        for j in range(1, n + 1):
            gen = Superfunction.theta(j, m, n, p)
            th_out.append(
                self.apply(other.apply(gen)) - other.apply(self.apply(gen)).scale(sign)
            )
        return SuperDerivation(m, n, p, x_out, th_out)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SuperDerivation)
            and (self.m, self.n, self.p) == (other.m, other.n, other.p)
            and self.x_coeffs == other.x_coeffs
            and self.th_coeffs == other.th_coeffs
        )

    def __str__(self) -> str:
        from .parser import format_derivation

        return format_derivation(self)

    def __repr__(self) -> str:
        return f"SuperDerivation({self.m}|{self.n};{self.p})"


def bracket(a: SuperDerivation, b: SuperDerivation) -> SuperDerivation:
    return a.bracket(b)


# -- index combinatorics ------------------------------------------------


class IndexPartition(NamedTuple):
    """An unordered partition of an index tuple into nonempty blocks.

    Blocks keep the induced increasing order and are listed sorted by
    their first entry, so each partition has exactly one representation.
    """

    parent: IndexTuple
    blocks: tuple[IndexTuple, ...]


def ordered_splits(indices: Iterable[int]) -> list[tuple[IndexTuple, IndexTuple]]:
    """All ordered pairs (K, L) of complementary sublists of `indices`.

    Both parts keep the induced order and may be empty, so a list of
    length k yields 2^k splits.
    """
    indices = tuple(indices)
    out: list[tuple[IndexTuple, IndexTuple]] = []
    for size in range(len(indices) + 1):
        for left in combinations(indices, size):
            chosen = set(left)
            right = tuple(i for i in indices if i not in chosen)
            out.append((left, right))
    return out


def unordered_partitions(indices: Iterable[int]) -> list[IndexPartition]:
    """All partitions of `indices` into disjoint nonempty blocks.

    The count is the Bell number of len(indices); the empty tuple has
    exactly one partition, the empty one.
    """
    indices = tuple(indices)
    if not indices:
        return [IndexPartition(indices, ())]

    def rec(items: IndexTuple) -> list[list[IndexTuple]]:
        if len(items) == 1:
            return [[items]]
        head, rest = items[0], items[1:]
        result: list[list[IndexTuple]] = []
        for partial in rec(rest):
            for b, block in enumerate(partial):
                result.append(partial[:b] + [(head,) + block] + partial[b + 1 :])
            result.append([(head,)] + partial)
        return result

    out = []
    for blocks in rec(indices):
        ordered = tuple(sorted(blocks, key=lambda block: block[0]))
        out.append(IndexPartition(indices, ordered))
    return out


PrefixedOp = Union[SuperDerivation, tuple[Optional[Superfunction], SuperDerivation]]


def _normalize_op(op: PrefixedOp) -> SuperDerivation:
    if isinstance(op, SuperDerivation):
        return op
    prefix, field = op
    if prefix is None:
        return field
    return field.lift(prefix.p).premultiply(prefix)


def symmetrize_apply(ops: Sequence[PrefixedOp], f: Superfunction) -> Superfunction:
    """Average of all k! composition orders of the operators, applied to f.

    Each entry is either a field or a (prefix, field) pair; a pair acts
    by differentiating and then multiplying by the prefix from the left,
    which is folded into the field's coefficients up front.
    """
    fields = [_normalize_op(op) for op in ops]
    if not fields:
        return f
    total = Superfunction.zero(f.m, f.n, f.p)
    for order in permutations(range(len(fields))):
        value = f
        for idx in reversed(order):
            value = fields[idx].apply(value)
            if value.is_zero():
                break
        total = total + value
    return total.scale(Fraction(1, math.factorial(len(fields))))


# -- transport along substitutions ---------------------------------------


def pushforward(phi0: UnderlyingMorphism, field: SuperDerivation) -> SuperDerivation:
    """Transport a field along an invertible substitution.

    The result satisfies  field(phi0(f)) == phi0(result(f))  for every f;
    concretely each new coefficient is phi0^{-1}(field(phi0(coordinate))).
    Requires a certified inverse on phi0.
    """
    if (phi0.m, phi0.n) != (field.m, field.n):
        raise DimensionError("substitution and field live on different domains")
    if phi0.inverse is None:
        raise InvertibilityError("pushforward needs a certified inverse")
    inv = phi0.inverse
    x_out = [inv.apply(field.apply(g.lift(field.p))) for g in phi0.images_x]
    th_out = [inv.apply(field.apply(g.lift(field.p))) for g in phi0.images_th]
    return SuperDerivation(field.m, field.n, field.p, x_out, th_out)


# -- exponential and logarithm -------------------------------------------


def exp_nilpotent(field: SuperDerivation) -> UnderlyingMorphism:
    """Exponentiate an even field of filtration degree at least 2.

    Each application of the field adds at least two th factors, so the
    series for every coordinate image breaks off; the result is a
    substitution automorphism fixing coordinates up to terms of
    filtration 2, and it carries exp(-field) as a certified inverse.
    """
    if field.p != 0:
        raise DomainError("exponential is defined for fields without external part")
    if field.parity() != 0:
        raise ParityError("exponential requires an even field")
    if field.filtration_degree() < 2:
        raise DomainError("exponential requires filtration degree at least 2")

    def series(x: SuperDerivation, gen: Superfunction) -> Superfunction:
        total = gen
        term = gen
        k = 1
        while True:
            term = x.apply(term)
            if term.is_zero():
                return total
            total = total + term.scale(Fraction(1, math.factorial(k)))
            k += 1

    m, n = field.m, field.n
    fwd = UnderlyingMorphism(
        m,
        n,
        [series(field, Superfunction.coordinate(i, m, n)) for i in range(1, m + 1)],
        [series(field, Superfunction.theta(j, m, n)) for j in range(1, n + 1)],
    )
    neg = -field
    bwd = UnderlyingMorphism(
        m,
        n,
        [series(neg, Superfunction.coordinate(i, m, n)) for i in range(1, m + 1)],
        [series(neg, Superfunction.theta(j, m, n)) for j in range(1, n + 1)],
    )
    return fwd.with_inverse(bwd)


def log_unipotent(phi: UnderlyingMorphism) -> SuperDerivation:
    """Logarithm of a unipotent substitution.

    Inverse of `exp_nilpotent`: evaluates the alternating series
    sum_{l>=1} (-1)^(l+1) (phi - id)^l / l on each coordinate, which
    terminates because phi - id raises the filtration degree.
    """
    if not phi.is_unipotent():
        raise DomainError("logarithm requires a unipotent substitution")

    def series(gen: Superfunction) -> Superfunction:
        total = Superfunction.zero(phi.m, phi.n)
        term = phi.apply(gen) - gen
        l = 1
        while not term.is_zero():
            total = total + term.scale(Fraction((-1) ** (l + 1), l))
            term = phi.apply(term) - term
            l += 1
        return total

    m, n = phi.m, phi.n
    field = SuperDerivation(
        m,
        n,
        0,
        [series(Superfunction.coordinate(i, m, n)) for i in range(1, m + 1)],
        [series(Superfunction.theta(j, m, n)) for j in range(1, n + 1)],
    )
    if field.parity() != 0:
        raise ParityError("logarithm produced a field of mixed parity")
    return field
