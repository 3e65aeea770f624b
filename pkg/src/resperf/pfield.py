"""Exact arithmetic in perfect closures of rational function fields over F_p.

A coefficient field here is k = F_p(v_1, ..., v_r)^(p^-oo): the perfect
closure of a purely transcendental extension of F_p.  An element is stored
as a normalized fraction num/den of multivariate polynomials over F_p in
auxiliary variables X_i standing for v_i^(1/p^m), where the "scale" m is a
single global exponent denominator shared by all variables.

Normal form: gcd(num, den) = 1, den monic under graded lex order, and the
scale is minimal (num and den are not both polynomials in the p-th powers
of the X_i).  Two elements over the same variable registry are equal iff
their normal forms are identical, which makes equality, hashing and
serialization canonical.

Polynomial arithmetic and gcd are delegated to sympy's sparse polynomial
rings over GF(p); everything above that layer (scales, Frobenius, fraction
normalization, embeddings between registries) lives here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy.polys.domains import GF
from sympy.polys.rings import ring as _sympy_ring

from .errors import DivisionByZero

_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _check_name(name):
    if not name or name[0].isdigit() or not set(name) <= _NAME_OK:
        raise ValueError(f"bad variable name {name!r}")


@lru_cache(maxsize=None)
def _poly_ring(p, varnames):
    built = _sympy_ring(list(varnames), GF(p), order="grlex")
    # sympy returns (ring, *generators); with no generators still a 1-tuple
    return built[0]


class PerfectField:
    """The perfect closure F_p(varnames)^(p^-oo) with an ordered registry.

    The registry is append-only: adjoining fresh transcendentals produces a
    new field whose registry extends this one, and `embed` re-normalizes
    elements into the larger registry.
    """

    __slots__ = ("p", "varnames", "ring", "_index")

    def __init__(self, p, varnames=()):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        varnames = tuple(varnames)
        for name in varnames:
            _check_name(name)
        if len(set(varnames)) != len(varnames):
            raise ValueError("duplicate variable names")
        self.p = p
        self.varnames = varnames
        self.ring = _poly_ring(p, varnames)
        self._index = {name: i for i, name in enumerate(varnames)}

    def __eq__(self, other):
        return (
            isinstance(other, PerfectField)
            and self.p == other.p
            and self.varnames == other.varnames
        )

    def __hash__(self):
        return hash((self.p, self.varnames))

    def __repr__(self):
        vars_ = ",".join(self.varnames)
        return f"PerfectField(p={self.p}, vars=[{vars_}])"

    def extend(self, extra):
        """New field with `extra` names appended to the registry."""
        extra = tuple(extra)
        for name in extra:
            if name in self._index:
                raise ValueError(f"variable {name!r} already registered")
        return PerfectField(self.p, self.varnames + extra)

    # -- element constructors ------------------------------------------------

    def zero(self):
        return PElem(self, 0, self.ring.zero, self.ring.one, _normalized=True)

    def one(self):
        return PElem(self, 0, self.ring.one, self.ring.one, _normalized=True)

    def const(self, c):
        num = self.ring.ground_new(c % self.p)
        return PElem(self, 0, num, self.ring.one, _normalized=True)

    def var(self, name):
        if name not in self._index:
            raise ValueError(f"unknown variable {name!r} in {self!r}")
        num = self.ring.from_dict({self._unit_mono(name): 1})
        return PElem(self, 0, num, self.ring.one, _normalized=True)

    def _unit_mono(self, name):
        mono = [0] * len(self.varnames)
        mono[self._index[name]] = 1
        return tuple(mono)

    def embed(self, x):
        """Re-express an element of a sub-registry field in this field."""
        if x.field == self:
            return x
        if x.field.p != self.p or not set(x.field.varnames) <= set(self.varnames):
            raise ValueError(f"cannot embed element of {x.field!r} into {self!r}")
        positions = [self._index[name] for name in x.field.varnames]

        def move(poly):
            out = {}
            for mono, c in poly.to_dict().items():
                new = [0] * len(self.varnames)
                for pos, e in zip(positions, mono):
                    new[pos] = e
                out[tuple(new)] = int(c)
            return self.ring.from_dict(out)

        # coprimality and minimal scale survive renaming; leading monomials
        # under the new order may differ, so only re-monic the denominator
        return PElem(self, x.scale, move(x.num), move(x.den), _coprime=True)


def _scale_poly(poly, factor):
    if factor == 1:
        return poly
    ring = poly.ring
    return ring.from_dict(
        {tuple(e * factor for e in mono): int(c) for mono, c in poly.to_dict().items()}
    )


def _all_exponents_divisible(poly, p):
    return all(e % p == 0 for mono in poly.to_dict() for e in mono)


def _unscale_poly(poly, p):
    ring = poly.ring
    return ring.from_dict(
        {tuple(e // p for e in mono): int(c) for mono, c in poly.to_dict().items()}
    )


class PElem:
    """Element of a `PerfectField` in canonical normal form. Immutable."""

    __slots__ = ("field", "scale", "num", "den")

    def __init__(self, field, scale, num, den, _normalized=False, _coprime=False):
        self.field = field
        if _normalized:
            self.scale = scale
            self.num = num
            self.den = den
            return
        p = field.p
        if not den:
            raise DivisionByZero("zero denominator")
        if not num:
            self.scale, self.num, self.den = 0, field.ring.zero, field.ring.one
            return
        if not _coprime and den != field.ring.one:
            g = num.gcd(den)
            if g != field.ring.one:
                num = num.quo(g)
                den = den.quo(g)
        lc = int(den.LC) % p
        if lc != 1:
            inv = pow(lc, -1, p)
            num = num * inv
            den = den * inv
        while scale > 0 and _all_exponents_divisible(num, p) and _all_exponents_divisible(den, p):
            num = _unscale_poly(num, p)
            den = _unscale_poly(den, p)
            scale -= 1
        self.scale = scale
        self.num = num
        self.den = den

    # -- predicates ------------------------------------------------------

    def is_zero(self):
        return not self.num

    def is_one(self):
        return self.num == self.field.ring.one and self.den == self.field.ring.one

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, PElem):
            return NotImplemented
        return (
            self.field == other.field
            and self.scale == other.scale
            and self.num == other.num
            and self.den == other.den
        )

    def __hash__(self):
        return hash((self.field, self.scale, self.num, self.den))

    # -- arithmetic --------------------------------------------------------

    def _common_scale(self, other):
        if self.field != other.field:
            raise ValueError("operands live in different fields")
        m = max(self.scale, other.scale)
        p = self.field.p
        fa = p ** (m - self.scale)
        fb = p ** (m - other.scale)
        return (
            m,
            _scale_poly(self.num, fa),
            _scale_poly(self.den, fa),
            _scale_poly(other.num, fb),
            _scale_poly(other.den, fb),
        )

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        m, na, da, nb, db = self._common_scale(other)
        one = self.field.ring.one
        if da == one and db == one:
            return PElem(self.field, m, na + nb, one, _coprime=True)
        return PElem(self.field, m, na * db + nb * da, da * db)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return PElem(self.field, self.scale, -self.num, self.den, _coprime=True)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        m, na, da, nb, db = self._common_scale(other)
        one = self.field.ring.one
        # na/da and nb/db are reduced, so only cross gcds can cancel
        g1 = na.gcd(db) if db != one else one
        g2 = nb.gcd(da) if da != one else one
        if g1 != one:
            na, db = na.quo(g1), db.quo(g1)
        if g2 != one:
            nb, da = nb.quo(g2), da.quo(g2)
        return PElem(self.field, m, na * nb, da * db, _coprime=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivisionByZero("division by zero field element")
        return self * other.inverse()

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("zero has no inverse")
        return PElem(self.field, self.scale, self.den, self.num, _coprime=True)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return self.field.one()
        base = self if k > 0 else self.inverse()
        k = abs(k)
        out = base
        for bit in bin(k)[3:]:
            out = out * out
            if bit == "1":
                out = out * base
        return out

    def _coerce(self, other):
        if isinstance(other, PElem):
            return other
        if isinstance(other, int):
            return self.field.const(other)
        return NotImplemented

    __radd__ = __add__
    __rmul__ = __mul__

    def frobenius(self, k=1):
        """x -> x^(p^k); negative k takes exact p^(-k)-th roots."""
        if k == 0:
            return self
        p = self.field.p
        if k > 0:
            q = p**k
            return PElem(
                self.field, self.scale, _scale_poly(self.num, q), _scale_poly(self.den, q),
                _coprime=True,
            )
        return PElem(self.field, self.scale - k, self.num, self.den, _coprime=True)

    # -- serialization -------------------------------------------------------

    def _sorted_terms(self, poly):
        order = self.field.ring.order
        return sorted(poly.to_dict().items(), key=lambda mc: order(mc[0]), reverse=True)

    def _format_poly(self, poly):
        p = self.field.p
        names = self.field.varnames
        parts = []
        for mono, c in self._sorted_terms(poly):
            c = int(c) % p
            factors = []
            for name, e in zip(names, mono):
                if e == 0:
                    continue
                exp = Fraction(e, p**self.scale)
                if exp == 1:
                    factors.append(name)
                elif exp.denominator == 1:
                    factors.append(f"{name}^{exp.numerator}")
                else:
                    factors.append(f"{name}^({exp.numerator}/{exp.denominator})")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts) if parts else "0"

    def __str__(self):
        if self.den == self.field.ring.one:
            return self._format_poly(self.num)
        return f"({self._format_poly(self.num)})/({self._format_poly(self.den)})"

    def __repr__(self):
        return f"PElem({self})"


def frobenius(a, k=1):
    """Functional form of `PElem.frobenius`."""
    return a.frobenius(k)
