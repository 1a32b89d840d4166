"""Polynomial superfunctions on a superdomain, with external odd constants.

The coordinate ring handled here is generated by

* even coordinates  x1, ..., xm   (ordinary polynomial variables),
* odd coordinates   th[1], ..., th[n],
* external odd constants t[1], ..., t[p] coming from a Grassmann
  algebra the ring is tensored with.

A `Superfunction` is stored sparsely as a dict mapping a pair of index
tuples (K, J) -- K for the th factors, J for the t factors, both
strictly increasing -- to a `Polynomial` in the even coordinates::

    2*x1^2*x2*th[1,3] + 1/3*th[2]*t[2]
        <->  {((1, 3), ()): 2*x1^2*x2, ((2,), (2,)): 1/3}

The canonical monomial order puts all th factors before all t factors;
reordering an input expression into this form is where the sign flips
happen.  The parity of a term is (len(K) + len(J)) mod 2.  Coefficients
are exact rationals throughout.

The nilpotent filtration used by the higher layers counts th factors
only: `j_degree` is the minimum len(K) over the stored terms, and
products of more than n odd coordinates vanish identically.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import DimensionError, ParityError
from .grassmann import GrassmannElement, GrassmannMorphism, merge_indices

Scalar = Union[int, Fraction]
Exponents = tuple[int, ...]
IndexTuple = tuple[int, ...]
TermKey = tuple[IndexTuple, IndexTuple]


def _as_fraction(c: Scalar) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected an integer or Fraction, got {type(c).__name__}")


class Polynomial:
    """A polynomial in m commuting variables with rational coefficients.

    Sparse dict from exponent tuples (length m) to nonzero Fractions.
    """

    __slots__ = ("m", "terms")

    def __init__(self, m: int, terms: Mapping[Exponents, Scalar]):
        if m < 0:
            raise DimensionError("number of variables must be nonnegative")
        clean: dict[Exponents, Fraction] = {}
        for exps, coeff in terms.items():
            exps = tuple(exps)
            if len(exps) != m or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {m} variables")
            c = _as_fraction(coeff)
            if c:
                clean[exps] = c
        self.m = m
        self.terms = clean

    @classmethod
    def zero(cls, m: int) -> "Polynomial":
        return cls(m, {})

    @classmethod
    def const(cls, value: Scalar, m: int) -> "Polynomial":
        return cls(m, {(0,) * m: value})

    @classmethod
    def variable(cls, i: int, m: int) -> "Polynomial":
        if not 1 <= i <= m:
            raise DimensionError(f"variable index {i} out of range 1..{m}")
        exps = tuple(1 if k == i - 1 else 0 for k in range(m))
        return cls(m, {exps: 1})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def _check(self, other: "Polynomial") -> None:
        if self.m != other.m:
            raise DimensionError(f"variable counts differ ({self.m} vs {other.m})")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        total = dict(self.terms)
        for exps, coeff in other.terms.items():
            total[exps] = total.get(exps, Fraction(0)) + coeff
        return Polynomial(self.m, total)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.m, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: Union["Polynomial", Scalar]) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        product: dict[Exponents, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(a + b for a, b in zip(ea, eb))
                product[key] = product.get(key, Fraction(0)) + ca * cb
        return Polynomial(self.m, product)

    def __rmul__(self, other: Scalar) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: Scalar) -> "Polynomial":
        c = _as_fraction(c)
        return Polynomial(self.m, {e: c * v for e, v in self.terms.items()})

    def __pow__(self, exponent: int) -> "Polynomial":
        if exponent < 0:
            raise ValueError("negative powers are not defined")
        result = Polynomial.const(1, self.m)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to the i-th variable (1-based)."""
        if not 1 <= i <= self.m:
            raise DimensionError(f"variable index {i} out of range 1..{self.m}")
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self.terms.items():
            e = exps[i - 1]
            if e:
                key = exps[: i - 1] + (e - 1,) + exps[i:]
                out[key] = out.get(key, Fraction(0)) + coeff * e
        return Polynomial(self.m, out)

    def extend(self, m_new: int) -> "Polynomial":
        """Reinterpret in a ring with extra trailing variables."""
        if m_new < self.m:
            raise DimensionError("cannot shrink the variable count")
        pad = (0,) * (m_new - self.m)
        return Polynomial(m_new, {e + pad: c for e, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.m == other.m
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Polynomial({self.m}, {self.terms!r})"


class Superfunction:
    """An element of the coordinate ring described in the module docstring."""

    __slots__ = ("m", "n", "p", "terms")

    def __init__(self, m: int, n: int, p: int, terms: Mapping[TermKey, Polynomial]):
        if n < 0 or p < 0:
            raise DimensionError("coordinate counts must be nonnegative")
        clean: dict[TermKey, Polynomial] = {}
        for (theta_key, tau_key), poly in terms.items():
            theta_key, tau_key = tuple(theta_key), tuple(tau_key)
            for key, bound, label in ((theta_key, n, "th"), (tau_key, p, "t")):
                if any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                    raise ValueError(f"{label} index tuple {key} not strictly increasing")
                if key and (key[0] < 1 or key[-1] > bound):
                    raise DimensionError(f"{label} index out of range in {key}")
            if poly.m != m:
                raise DimensionError(
                    f"coefficient polynomial has {poly.m} variables, expected {m}"
                )
            if not poly.is_zero():
                clean[(theta_key, tau_key)] = poly
        self.m = m
        self.n = n
        self.p = p
        self.terms = clean

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, m: int, n: int, p: int = 0) -> "Superfunction":
        return cls(m, n, p, {})

    @classmethod
    def scalar(cls, value: Scalar, m: int, n: int, p: int = 0) -> "Superfunction":
        return cls(m, n, p, {((), ()): Polynomial.const(value, m)})

    @classmethod
    def coordinate(cls, i: int, m: int, n: int, p: int = 0) -> "Superfunction":
        return cls(m, n, p, {((), ()): Polynomial.variable(i, m)})

    @classmethod
    def theta(cls, j: int, m: int, n: int, p: int = 0) -> "Superfunction":
        if not 1 <= j <= n:
            raise DimensionError(f"odd coordinate index {j} out of range 1..{n}")
        return cls(m, n, p, {((j,), ()): Polynomial.const(1, m)})

    @classmethod
    def tau(cls, k: int, m: int, n: int, p: int) -> "Superfunction":
        if not 1 <= k <= p:
            raise DimensionError(f"external index {k} out of range 1..{p}")
        return cls(m, n, p, {((), (k,)): Polynomial.const(1, m)})

    @classmethod
    def from_polynomial(cls, poly: Polynomial, n: int, p: int = 0) -> "Superfunction":
        return cls(poly.m, n, p, {((), ()): poly})

    @classmethod
    def monomial(
        cls,
        m: int,
        n: int,
        p: int,
        poly: Polynomial,
        theta_key: Iterable[int] = (),
        tau_key: Iterable[int] = (),
    ) -> "Superfunction":
        return cls(m, n, p, {(tuple(theta_key), tuple(tau_key)): poly})

    # -- structure ---------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def body_polynomial(self) -> Polynomial:
        """Coefficient of the unit monomial (no th, no t factors)."""
        return self.terms.get(((), ()), Polynomial.zero(self.m))

    def parity(self) -> Optional[int]:
        """0 or 1 for homogeneous elements, None for mixed, 0 for zero."""
        if not self.terms:
            return 0
        parities = {(len(k) + len(j)) % 2 for k, j in self.terms}
        return parities.pop() if len(parities) == 1 else None

    def homogeneous_part(self, parity: int) -> "Superfunction":
        return Superfunction(
            self.m,
            self.n,
            self.p,
            {
                key: poly
                for key, poly in self.terms.items()
                if (len(key[0]) + len(key[1])) % 2 == parity
            },
        )

    def j_degree(self) -> Union[int, float]:
        """Minimal number of th factors in any term; +inf for zero."""
        return min((len(k) for k, _ in self.terms), default=math.inf)

    def reduce_mod_j(self, k: int) -> "Superfunction":
        """Drop every term with at least k odd-coordinate factors."""
        return Superfunction(
            self.m,
            self.n,
            self.p,
            {key: poly for key, poly in self.terms.items() if len(key[0]) < k},
        )

    def max_degree(self) -> int:
        """Largest total polynomial degree among coefficients; -1 if zero."""
        return max((poly.degree() for poly in self.terms.values()), default=-1)

    # -- arithmetic --------------------------------------------------

    def _check(self, other: "Superfunction") -> None:
        if (self.m, self.n, self.p) != (other.m, other.n, other.p):
            raise DimensionError(
                f"superfunctions live on different domains "
                f"({self.m}|{self.n};{self.p} vs {other.m}|{other.n};{other.p})"
            )

    def __add__(self, other: "Superfunction") -> "Superfunction":
        if not isinstance(other, Superfunction):
            return NotImplemented
        self._check(other)
        total = dict(self.terms)
        for key, poly in other.terms.items():
            total[key] = total[key] + poly if key in total else poly
        return Superfunction(self.m, self.n, self.p, total)

    def __neg__(self) -> "Superfunction":
        return Superfunction(
            self.m, self.n, self.p, {k: -poly for k, poly in self.terms.items()}
        )

    def __sub__(self, other: "Superfunction") -> "Superfunction":
        return self + (-other)

    def __mul__(self, other: Union["Superfunction", Scalar]) -> "Superfunction":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Superfunction):
            return NotImplemented
        self._check(other)
        product: dict[TermKey, dict[Exponents, Fraction]] = {}
        for (ka, ja), pa in self.terms.items():
            for (kb, jb), pb in other.terms.items():
                merged_theta = merge_indices(ka, kb)
                if merged_theta is None:
                    continue
                merged_tau = merge_indices(ja, jb)
                if merged_tau is None:
                    continue
                sign_theta, theta_key = merged_theta
                sign_tau, tau_key = merged_tau
                # moving the second factor's th block past the first's t block
                sign = sign_theta * sign_tau
                if (len(kb) * len(ja)) % 2:
                    sign = -sign
                bucket = product.setdefault((theta_key, tau_key), {})
                for ea, ca in pa.terms.items():
                    for eb, cb in pb.terms.items():
                        exps = tuple(a + b for a, b in zip(ea, eb))
                        value = ca * cb if sign > 0 else -ca * cb
                        bucket[exps] = bucket[exps] + value if exps in bucket else value
        return Superfunction(
            self.m,
            self.n,
            self.p,
            {key: Polynomial(self.m, bucket) for key, bucket in product.items()},
        )

    def __rmul__(self, other: Scalar) -> "Superfunction":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: Scalar) -> "Superfunction":
        c = _as_fraction(c)
        if not c:
            return Superfunction.zero(self.m, self.n, self.p)
        return Superfunction(
            self.m, self.n, self.p, {k: poly.scale(c) for k, poly in self.terms.items()}
        )

    def __pow__(self, exponent: int) -> "Superfunction":
        if exponent < 0:
            raise ValueError("negative powers are not defined")
        result = Superfunction.scalar(1, self.m, self.n, self.p)
        for _ in range(exponent):
            result = result * self
        return result

    # -- derivatives -------------------------------------------------

    def diff_x(self, i: int) -> "Superfunction":
        """Derivative along the i-th even coordinate, term by term."""
        out: dict[TermKey, Polynomial] = {}
        for key, poly in self.terms.items():
            d = poly.diff(i)
            if not d.is_zero():
                out[key] = d
        return Superfunction(self.m, self.n, self.p, out)

    def diff_theta(self, j: int) -> "Superfunction":
        """Left derivative along the j-th odd coordinate.

        Deleting th[j] from th[K] costs one sign per factor standing to
        its left, e.g. the derivative of th[1]*th[2] along th[2] is
        -th[1].  External t factors sit to the right of every th factor
        in canonical order, so they contribute no sign.
        """
        if not 1 <= j <= self.n:
            raise DimensionError(f"odd coordinate index {j} out of range 1..{self.n}")
        out: dict[TermKey, Polynomial] = {}
        for (theta_key, tau_key), poly in self.terms.items():
            if j not in theta_key:
                continue
            pos = theta_key.index(j)
            sign = -1 if pos % 2 else 1
            key = (theta_key[:pos] + theta_key[pos + 1 :], tau_key)
            signed = poly.scale(sign)
            out[key] = out[key] + signed if key in out else signed
        return Superfunction(self.m, self.n, self.p, out)

    # -- reshaping ---------------------------------------------------

    def lift(self, p_new: int) -> "Superfunction":
        """View the element in a ring with more external generators."""
        if p_new < self.p:
            raise DimensionError("cannot shrink the external rank")
        if p_new == self.p:
            return self
        return Superfunction(self.m, self.n, p_new, self.terms)

    def embed(self, m_new: int, n_new: int, p_new: int) -> "Superfunction":
        """View the element on a larger superdomain (coordinates appended)."""
        if m_new < self.m or n_new < self.n or p_new < self.p:
            raise DimensionError("cannot shrink coordinate counts")
        return Superfunction(
            m_new,
            n_new,
            p_new,
            {key: poly.extend(m_new) for key, poly in self.terms.items()},
        )

    def restrict_rank(self, p_new: int) -> "Superfunction":
        """Adjust the external rank, shrinking only past unused generators."""
        if p_new >= self.p:
            return self.lift(p_new)
        for _, tau_key in self.terms:
            if tau_key and tau_key[-1] > p_new:
                raise DimensionError(
                    f"term uses t[{tau_key[-1]}], cannot restrict to rank {p_new}"
                )
        return Superfunction(self.m, self.n, p_new, self.terms)

    def external_coefficient(self, tau_key: Iterable[int]) -> "Superfunction":
        """Coefficient of t[J] when the element is written with every
        t factor pulled to the front.

        Pulling t[J] leftward past th[K] contributes (-1)^(len J * len K),
        so the stored coefficient is reweighted accordingly.  The result
        has external rank 0 and satisfies::

            sum_J  t[J] * external_coefficient(J).lift(p)  ==  self
        """
        tau_key = tuple(tau_key)
        sign_flip = len(tau_key) % 2
        out: dict[TermKey, Polynomial] = {}
        for (theta_key, jkey), poly in self.terms.items():
            if jkey != tau_key:
                continue
            if sign_flip and len(theta_key) % 2:
                poly = -poly
            out[(theta_key, ())] = poly
        return Superfunction(self.m, self.n, 0, out)

    def external_support(self) -> list[IndexTuple]:
        """Sorted list of t index tuples appearing in the element."""
        support = {j for _, j in self.terms}
        return sorted(support, key=lambda j: (len(j), j))

    def times_tau(self, tau_key: Iterable[int]) -> "Superfunction":
        """Left multiplication by the monomial t[J]."""
        tau_key = tuple(tau_key)
        if not tau_key:
            return self
        factor = Superfunction.monomial(
            self.m, self.n, self.p, Polynomial.const(1, self.m), (), tau_key
        )
        return factor * self

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Superfunction)
            and (self.m, self.n, self.p) == (other.m, other.n, other.p)
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.m, self.n, self.p, frozenset(self.terms.items())))

    def __str__(self) -> str:
        from .parser import format_superfunction

        return format_superfunction(self)

    def __repr__(self) -> str:
        return f"Superfunction({self.m}|{self.n};{self.p}, {self.terms!r})"


def substitute_generators(
    f: Superfunction,
    x_images: Sequence[Superfunction],
    th_images: Sequence[Superfunction],
) -> Superfunction:
    """Evaluate f with each coordinate replaced by the given element.

    The replacements must all live on one common domain and have the
    parity of the coordinate they replace (even for x, odd for th); the
    external t generators of f are carried along unchanged, so f's
    external rank must match the images' rank.  This is the unique
    algebra-map extension of the assignment.
    """
    if len(x_images) != f.m or len(th_images) != f.n:
        raise DimensionError(
            f"need {f.m} even and {f.n} odd replacements, "
            f"got {len(x_images)} and {len(th_images)}"
        )
    images = list(x_images) + list(th_images)
    if not images:
        return f
    m2, n2, p2 = images[0].m, images[0].n, images[0].p
    if p2 != f.p:
        raise DimensionError(
            f"external rank mismatch: element has {f.p}, images have {p2}"
        )
    for g in images:
        if (g.m, g.n, g.p) != (m2, n2, p2):
            raise DimensionError("replacement elements live on different domains")
    for g in x_images:
        if g.parity() not in (0,):
            raise ParityError("replacement for an even coordinate must be even")
    for g in th_images:
        if not g.is_zero() and g.parity() != 1:
            raise ParityError("replacement for an odd coordinate must be odd")

    one = Superfunction.scalar(1, m2, n2, p2)
    power_cache: dict[tuple[int, int], Superfunction] = {}

    def x_power(i: int, e: int) -> Superfunction:
        key = (i, e)
        if key not in power_cache:
            if e == 0:
                power_cache[key] = one
            else:
                power_cache[key] = x_power(i, e - 1) * x_images[i]
        return power_cache[key]

    mono_cache: dict[Exponents, Superfunction] = {}

    def x_monomial(exps: Exponents) -> Superfunction:
        if exps not in mono_cache:
            term = one
            for i, e in enumerate(exps):
                if e:
                    term = term * x_power(i, e)
                    if term.is_zero():
                        break
            mono_cache[exps] = term
        return mono_cache[exps]

    odd_cache: dict[IndexTuple, Superfunction] = {}

    def odd_monomial(theta_key: IndexTuple) -> Superfunction:
        if theta_key not in odd_cache:
            block = one
            for j in theta_key:
                block = block * th_images[j - 1]
                if block.is_zero():
                    break
            odd_cache[theta_key] = block
        return odd_cache[theta_key]

    acc: dict[TermKey, dict[Exponents, Fraction]] = {}
    for (theta_key, tau_key), poly in f.terms.items():
        odd_block = odd_monomial(theta_key)
        if odd_block.is_zero():
            continue
        for exps, coeff in poly.terms.items():
            block = x_monomial(exps)
            if block.is_zero():
                continue
            if odd_block is not one:
                block = block * odd_block
            # append the carried t factors with the sign of reordering
            for (k2, j2), inner in block.terms.items():
                if tau_key:
                    merged = merge_indices(j2, tau_key)
                    if merged is None:
                        continue
                    sign, j_out = merged
                    scale = coeff if sign > 0 else -coeff
                else:
                    j_out, scale = j2, coeff
                bucket = acc.setdefault((k2, j_out), {})
                for e2, c2 in inner.terms.items():
                    value = scale * c2
                    bucket[e2] = bucket[e2] + value if e2 in bucket else value
    return Superfunction(
        m2, n2, p2, {key: Polynomial(m2, bucket) for key, bucket in acc.items()}
    )


def map_external(f: Superfunction, morphism: GrassmannMorphism) -> Superfunction:
    """Apply a Grassmann-algebra morphism to the external generators of f.

    Every t monomial is sent through the morphism and the resulting
    combination is folded back into canonical form; th factors and
    polynomial coefficients are untouched.  Requires f.p equal to the
    morphism's source rank; the result has the morphism's target rank.
    """
    if f.p != morphism.source_n:
        raise DimensionError(
            f"element has external rank {f.p}, morphism expects {morphism.source_n}"
        )
    p2 = morphism.target_n
    out: dict[TermKey, Polynomial] = {}
    for (theta_key, tau_key), poly in f.terms.items():
        image = morphism.apply(GrassmannElement.monomial(tau_key, f.p))
        for new_tau, coeff in image.terms.items():
            key = (theta_key, new_tau)
            scaled = poly.scale(coeff)
            out[key] = out[key] + scaled if key in out else scaled
    return Superfunction(f.m, f.n, p2, out)
