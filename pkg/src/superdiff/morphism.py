"""Families of superdomain morphisms over a Grassmann algebra.

A `SuperMorphism` is an algebra map from the coordinate ring of R^{m|n}
into the same ring tensored with p external odd generators t[1..p]; it
is determined by parity-correct images of the coordinates.  Such a
family decomposes uniquely as

    phi = exp( sum_I t[I] * X_I ) o phi0

where phi0 is the ordinary substitution obtained by dropping every t
factor and each X_I is a field without external part whose parity
equals len(I) mod 2.  `factorize` recovers (phi0, {X_I}) from the
images, `expand_factored` rebuilds the images from the data, and the
two are exact mutual inverses.

Inverse certification for the underlying substitution lives here too:
identity and affine parts are inverted by exact linear algebra and any
unipotent remainder through the logarithm/exponential pair, after which
the candidate is checked exactly on every coordinate.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .derivation import (
    SuperDerivation,
    exp_nilpotent,
    log_unipotent,
    symmetrize_apply,
    unordered_partitions,
)
from .errors import (
    DimensionError,
    DomainError,
    InvertibilityError,
    ParityError,
)
from .grassmann import GrassmannMorphism
from .substitution import UnderlyingMorphism
from .superfn import Polynomial, Superfunction, map_external, substitute_generators

IndexTuple = tuple[int, ...]
FieldFamily = dict[IndexTuple, SuperDerivation]


def subsets_of_rank(p: int, include_empty: bool = False) -> list[IndexTuple]:
    """Increasing index tuples from {1..p}, ordered by size then lexicographically."""
    from itertools import combinations

    start = 0 if include_empty else 1
    out: list[IndexTuple] = []
    for size in range(start, p + 1):
        out.extend(combinations(range(1, p + 1), size))
    return out


class SuperMorphism:
    """An algebra map determined by coordinate images with external part."""

    __slots__ = ("m", "n", "p", "images_x", "images_th", "inverse_hint")

    def __init__(
        self,
        m: int,
        n: int,
        p: int,
        images_x: Sequence[Superfunction],
        images_th: Sequence[Superfunction],
        inverse_hint: Optional[UnderlyingMorphism] = None,
    ):
        images_x = tuple(images_x)
        images_th = tuple(images_th)
        if len(images_x) != m or len(images_th) != n:
            raise DimensionError(
                f"expected {m} even and {n} odd images, "
                f"got {len(images_x)} and {len(images_th)}"
            )
        for i, g in enumerate(images_x, start=1):
            if (g.m, g.n, g.p) != (m, n, p):
                raise DimensionError(f"image of x{i} lives on the wrong domain")
            if g.parity() != 0:
                raise ParityError(f"image of x{i} must be even")
        for j, g in enumerate(images_th, start=1):
            if (g.m, g.n, g.p) != (m, n, p):
                raise DimensionError(f"image of th{j} lives on the wrong domain")
            if not g.is_zero() and g.parity() != 1:
                raise ParityError(f"image of th{j} must be odd")
        self.m = m
        self.n = n
        self.p = p
        self.images_x = images_x
        self.images_th = images_th
        # optional user-supplied inverse for the underlying part; checked
        # exactly before anything relies on it
        self.inverse_hint = inverse_hint

    @classmethod
    def identity(cls, m: int, n: int, p: int) -> "SuperMorphism":
        return cls(
            m,
            n,
            p,
            [Superfunction.coordinate(i, m, n, p) for i in range(1, m + 1)],
            [Superfunction.theta(j, m, n, p) for j in range(1, n + 1)],
        )

    @classmethod
    def constant_family(cls, body: UnderlyingMorphism, p: int) -> "SuperMorphism":
        """The family with no external dependence at all."""
        return cls(
            body.m,
            body.n,
            p,
            [g.lift(p) for g in body.images_x],
            [g.lift(p) for g in body.images_th],
        )

    # -- action ------------------------------------------------------

    def apply_extended(self, h: Superfunction) -> Superfunction:
        """Apply to an element that may already contain t factors.

        The external generators are held fixed; this is the canonical
        extension of the map to the tensored ring.
        """
        if (h.m, h.n, h.p) != (self.m, self.n, self.p):
            raise DimensionError("element lives on the wrong domain for this map")
        return substitute_generators(h, self.images_x, self.images_th)

    def apply(self, f: Superfunction) -> Superfunction:
        """Apply to an element of the plain coordinate ring (no t factors)."""
        if f.p != 0:
            raise DimensionError(
                "apply expects an element without external generators; "
                "use apply_extended for those"
            )
        return self.apply_extended(f.lift(self.p))

    def skeleton(self, f: Superfunction) -> dict[IndexTuple, Superfunction]:
        """Components of the image of f along the external monomials.

        Returns a map J -> alpha_J(f) with every alpha_J(f) free of t
        factors; alpha_() is multiplicative, the others obey twisted
        Leibniz rules over it.  Only nonzero components are listed.
        """
        image = self.apply(f)
        out: dict[IndexTuple, Superfunction] = {}
        for tau_key in image.external_support():
            comp = image.external_coefficient(tau_key)
            if not comp.is_zero():
                out[tau_key] = comp
        return out

    def underlying(self) -> UnderlyingMorphism:
        """Drop all t terms from the images; the ordinary substitution below."""
        return UnderlyingMorphism(
            self.m,
            self.n,
            [g.external_coefficient(()) for g in self.images_x],
            [g.external_coefficient(()) for g in self.images_th],
        )

    def compose(self, inner: "SuperMorphism") -> "SuperMorphism":
        """self after inner, external generators shared and held fixed."""
        if (self.m, self.n, self.p) != (inner.m, inner.n, inner.p):
            raise DimensionError("cannot compose maps of different domains or ranks")
        return SuperMorphism(
            self.m,
            self.n,
            self.p,
            [self.apply_extended(g) for g in inner.images_x],
            [self.apply_extended(g) for g in inner.images_th],
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SuperMorphism)
            and (self.m, self.n, self.p) == (other.m, other.n, other.p)
            and self.images_x == other.images_x
            and self.images_th == other.images_th
        )

    def __str__(self) -> str:
        from .parser import format_morphism

        return format_morphism(self)

    def __repr__(self) -> str:
        return f"SuperMorphism({self.m}|{self.n};{self.p})"


def hom_apply(phi: SuperMorphism, f: Superfunction) -> Superfunction:
    """Image of f under the ring map; t factors are carried along fixed."""
    if f.p > phi.p:
        raise DimensionError("element uses more external generators than the map")
    return phi.apply_extended(f.lift(phi.p))


def gr_push(morphism: GrassmannMorphism, phi: SuperMorphism) -> SuperMorphism:
    """Relabel the external generators of a family along a Grassmann map.

    The underlying substitution is untouched because generator monomials
    never map to terms of lower degree.
    """
    if phi.p != morphism.source_n:
        raise DimensionError(
            f"family has external rank {phi.p}, morphism expects {morphism.source_n}"
        )
    return SuperMorphism(
        phi.m,
        phi.n,
        morphism.target_n,
        [map_external(g, morphism) for g in phi.images_x],
        [map_external(g, morphism) for g in phi.images_th],
        inverse_hint=phi.inverse_hint,
    )


# -- inverse certification ------------------------------------------------


def certify_inverse(
    body: UnderlyingMorphism, hint: Optional[UnderlyingMorphism] = None
) -> Optional[UnderlyingMorphism]:
    """Try to equip a substitution with an exactly verified inverse.

    Routes, in order: an already attached certificate; a user-supplied
    candidate (checked on every coordinate); the identity; an affine
    part inverted by rational linear algebra, with any unipotent
    remainder inverted through the logarithm.  Returns None when no
    route certifies -- which means "unknown", never "not invertible".
    """
    if body.inverse is not None:
        return body
    if hint is not None:
        try:
            return body.with_inverse(hint)
        except DomainError:
            pass  # a bad hint only disables this route
    if body.is_identity():
        return UnderlyingMorphism.identity(body.m, body.n)
    affine = body.affine_part()
    if affine is None or affine.inverse is None:
        return None
    unipot = body.compose(affine.inverse)
    if not unipot.is_unipotent():
        return None
    log_field = log_unipotent(unipot)
    unipot_exp = exp_nilpotent(log_field)
    if unipot_exp.inverse is None:
        return None
    candidate = affine.inverse.compose(unipot_exp.inverse)
    try:
        return body.with_inverse(candidate)
    except DomainError:
        return None


# -- factored form ----------------------------------------------------------


def _validate_family(
    m: int, n: int, p: int, fields: Mapping[IndexTuple, SuperDerivation]
) -> FieldFamily:
    clean: FieldFamily = {}
    for key, field in fields.items():
        key = tuple(key)
        if not key or any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
            raise ValueError(f"field index {key} must be nonempty and increasing")
        if key[0] < 1 or key[-1] > p:
            raise DimensionError(f"field index {key} out of range for rank {p}")
        if (field.m, field.n, field.p) != (m, n, 0):
            raise DimensionError(f"field for {key} lives on the wrong domain")
        if field.is_zero():
            continue
        if field.parity() != len(key) % 2:
            raise ParityError(
                f"field for {key} must have parity {len(key) % 2}"
            )
        clean[key] = field
    return clean


def _family_operator(
    m: int, n: int, p: int, fields: Mapping[IndexTuple, SuperDerivation]
) -> SuperDerivation:
    """The even rank-p derivation  sum_I t[I] * X_I."""
    total = SuperDerivation.zero(m, n, p)
    for key in sorted(fields, key=lambda k: (len(k), k)):
        prefix = Superfunction.monomial(m, n, p, Polynomial.const(1, m), (), key)
        total = total + fields[key].lift(p).premultiply(prefix)
    return total


def _exp_apply(op: SuperDerivation, h: Superfunction, negate: bool = False) -> Superfunction:
    """Evaluate exp(op) (or exp(-op)) on h; terminates by external nilpotency."""
    total = h
    term = h
    k = 1
    while True:
        term = op.apply(term)
        if term.is_zero():
            return total
        factor = Fraction((-1) ** k if negate else 1, math.factorial(k))
        total = total + term.scale(factor)
        k += 1


def expand_factored(
    body: UnderlyingMorphism,
    fields: Mapping[IndexTuple, SuperDerivation],
    p: int,
) -> SuperMorphism:
    """Rebuild the family exp(sum_I t[I] X_I) o body from its data."""
    m, n = body.m, body.n
    family = _validate_family(m, n, p, fields)
    op = _family_operator(m, n, p, family)
    images_x = [_exp_apply(op, g.lift(p)) for g in body.images_x]
    images_th = [_exp_apply(op, g.lift(p)) for g in body.images_th]
    return SuperMorphism(m, n, p, images_x, images_th)


def _twisted_eval(
    values_x: Sequence[Superfunction],
    values_th: Sequence[Superfunction],
    base: UnderlyingMorphism,
    f: Superfunction,
    p: int,
) -> Superfunction:
    """Evaluate the even base-twisted derivation V on a t-free element.

    V is determined by its coordinate values through the twisted rule
    V(gh) = V(g) base(h) + base(g) V(h); evenness of V means no signs
    appear when it walks past odd factors.
    """
    m, n = base.m, base.n
    result = Superfunction.zero(m, n, p)
    base_x = [g.lift(p) for g in base.images_x]
    base_th = [g.lift(p) for g in base.images_th]
    one = Superfunction.scalar(1, m, n, p)
    for (theta_key, tau_key), poly in f.terms.items():
        if tau_key:
            raise DimensionError("twisted evaluation expects a t-free element")
        # image of the odd block under base, as running prefixes
        for exps, coeff in poly.terms.items():
            # derivative of the x block: sum_i e_i base(x_i)^(e_i - 1) V(x_i) * rest
            x_full = one
            for i, e in enumerate(exps):
                if e:
                    x_full = x_full * base_x[i] ** e
            theta_full = one
            for j in theta_key:
                theta_full = theta_full * base_th[j - 1]
            # x-part contributions
            for i, e in enumerate(exps):
                if not e:
                    continue
                partial = one.scale(e)
                for i2, e2 in enumerate(exps):
                    power = e2 - 1 if i2 == i else e2
                    if power:
                        partial = partial * base_x[i2] ** power
                contribution = partial * values_x[i] * theta_full
                result = result + contribution.scale(coeff)
            # th-part contributions, keeping the original factor order
            for pos in range(len(theta_key)):
                prefix = one
                for j in theta_key[:pos]:
                    prefix = prefix * base_th[j - 1]
                suffix = one
                for j in theta_key[pos + 1 :]:
                    suffix = suffix * base_th[j - 1]
                contribution = x_full * prefix * values_th[theta_key[pos] - 1] * suffix
                result = result + contribution.scale(coeff)
    return result


def factorize(
    phi: SuperMorphism, body: Optional[UnderlyingMorphism] = None
) -> tuple[UnderlyingMorphism, FieldFamily]:
    """Recover the unique factored form of a family of morphisms.

    Works one external index set at a time, smallest first: the part of
    each coordinate image sitting over t[I], minus the contributions of
    already known fields through symmetrized compositions, determines
    (t[I] X_I) o body on coordinates; transporting back along the
    certified inverse of the body isolates X_I itself.

    A certified body may be passed in (it must equal the underlying
    part); otherwise certification runs here and an InvertibilityError
    signals an underlying part that no route can invert.
    """
    m, n, p = phi.m, phi.n, phi.p
    raw = phi.underlying()
    if body is None:
        body = certify_inverse(raw, phi.inverse_hint)
        if body is None:
            raise InvertibilityError(
                "the underlying substitution has no certified inverse"
            )
    else:
        if body != raw:
            raise DomainError("supplied body does not match the underlying part")
        if body.inverse is None:
            raise InvertibilityError("supplied body carries no certified inverse")
    inv = body.inverse
    assert inv is not None

    coords = [Superfunction.coordinate(i, m, n) for i in range(1, m + 1)] + [
        Superfunction.theta(j, m, n) for j in range(1, n + 1)
    ]
    images = list(phi.images_x) + list(phi.images_th)
    body_images = [g.lift(p) for g in list(body.images_x) + list(body.images_th)]

    fields: FieldFamily = {}
    for index_set in subsets_of_rank(p):
        values: list[Superfunction] = []
        for g_pos in range(len(coords)):
            target = Superfunction(
                m,
                n,
                p,
                {
                    key: poly
                    for key, poly in images[g_pos].terms.items()
                    if key[1] == index_set
                },
            )
            for partition in unordered_partitions(index_set):
                if len(partition.blocks) < 2:
                    continue
                if any(block not in fields for block in partition.blocks):
                    continue  # a zero component kills the whole product
                ops = []
                for block in partition.blocks:
                    prefix = Superfunction.monomial(
                        m, n, p, Polynomial.const(1, m), (), block
                    )
                    ops.append((prefix, fields[block]))
                target = target - symmetrize_apply(ops, body_images[g_pos])
            values.append(target)
        values_x = values[:m]
        values_th = values[m:]
        coeffs = []
        for coord in coords:
            pulled = _twisted_eval(
                values_x, values_th, body, inv.apply(coord), p
            )
            coeffs.append(pulled.external_coefficient(index_set))
        candidate = SuperDerivation(m, n, 0, coeffs[:m], coeffs[m:])
        if candidate.is_zero():
            continue
        if candidate.parity() != len(index_set) % 2:
            raise ParityError(
                f"component over t{list(index_set)} has inconsistent parity"
            )
        fields[index_set] = candidate
    return body, fields
