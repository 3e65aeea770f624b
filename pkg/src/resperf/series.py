"""Truncated Laurent series over a perfect coefficient field.

Series are sparse maps {exponent: coefficient} in one uniformizer, together
with an exclusive precision bound `prec`.  `prec` may be the float infinity
for exactly-known Laurent polynomials.  A series whose visible window holds
no nonzero coefficient but whose `prec` is finite is "zero to precision":
a distinct state from exact zero, and never silently conflated with it
(truncation must not fabricate zero divisors).

Precision propagation is sharp:
    add/sub : min(prec_f, prec_g)
    mul     : min(prec_f + low_g, prec_g + low_f)
    div f/g : via mul with 1/g, where prec(1/g) = prec_g - 2*val_g
with low_* the valuation when known, else the precision bound.
"""

from __future__ import annotations

import math

from .errors import DenominatorVanishes, DivisionByZero, UnknownValuation
from .pfield import PElem, PerfectField

INF = math.inf


class LSeries:
    """Truncated Laurent series over a `PerfectField`. Immutable."""

    __slots__ = ("field", "uniformizer", "coeffs", "prec")

    def __init__(self, field, uniformizer, coeffs, prec=INF):
        self.field = field
        self.uniformizer = uniformizer
        clean = {}
        for j, c in coeffs.items():
            if j < prec and not c.is_zero():
                clean[j] = c
        self.coeffs = clean
        self.prec = prec

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field, uniformizer, prec=INF):
        return cls(field, uniformizer, {}, prec)

    @classmethod
    def constant(cls, c, uniformizer, prec=INF):
        return cls(c.field, uniformizer, {0: c}, prec)

    @classmethod
    def monomial(cls, c, j, uniformizer, prec=INF):
        return cls(c.field, uniformizer, {j: c}, prec)

    @classmethod
    def uniformizer_series(cls, field, uniformizer, prec=INF):
        return cls(field, uniformizer, {1: field.one()}, prec)

    # -- structure -----------------------------------------------------------

    @property
    def is_zero_to_prec(self):
        return not self.coeffs and self.prec != INF

    @property
    def is_exact_zero(self):
        return not self.coeffs and self.prec == INF

    def valuation(self):
        """Order in the uniformizer; raises if zero to precision."""
        if self.coeffs:
            return min(self.coeffs)
        if self.prec == INF:
            return INF
        raise UnknownValuation(f"series is zero to precision O({self.uniformizer}^{self.prec})")

    def _low(self):
        # lower bound for the valuation, usable even when unknown
        if self.coeffs:
            return min(self.coeffs)
        return self.prec

    def coefficient(self, j):
        if j >= self.prec:
            raise ValueError(f"coefficient {j} is beyond precision {self.prec}")
        z = self.coeffs.get(j)
        return z if z is not None else self.field.zero()

    def coefficients(self):
        """Ordered coefficient list from the valuation up to the precision.

        Exact Laurent polynomials list up to their top term; a series that is
        zero to precision has no known coefficients and yields [].
        """
        if not self.coeffs:
            return []
        lo = min(self.coeffs)
        hi = self.prec if self.prec != INF else max(self.coeffs) + 1
        return [self.coefficient(j) for j in range(lo, int(hi))]

    def support_top(self):
        return max(self.coeffs) if self.coeffs else None

    def _check_compatible(self, other):
        if self.field != other.field or self.uniformizer != other.uniformizer:
            raise ValueError("series operands are over different rings")

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_compatible(other)
        prec = min(self.prec, other.prec)
        out = dict(self.coeffs)
        for j, c in other.coeffs.items():
            cur = out.get(j)
            out[j] = c if cur is None else cur + c
        return LSeries(self.field, self.uniformizer, out, prec)

    def __neg__(self):
        return LSeries(
            self.field, self.uniformizer, {j: -c for j, c in self.coeffs.items()}, self.prec
        )

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_compatible(other)
        prec = min(self.prec + other._low(), other.prec + self._low())
        out = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if k >= prec:
                    continue
                c = a * b
                cur = out.get(k)
                out[k] = c if cur is None else cur + c
        return LSeries(self.field, self.uniformizer, out, prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_compatible(other)
        if other.is_exact_zero:
            raise DivisionByZero("division by exact zero series")
        if other.is_zero_to_prec:
            raise UnknownValuation("divisor is zero to precision; its valuation is unknown")
        if (
            len(other.coeffs) > 1
            and other.prec == INF
            and self.prec == INF
            and self.coeffs
        ):
            return _exact_divide(self, other)
        return self * other.inverse()

    def _coerce(self, other):
        if isinstance(other, LSeries):
            return other
        if isinstance(other, PElem):
            return LSeries.constant(other, self.uniformizer)
        if isinstance(other, int):
            return LSeries.constant(self.field.const(other), self.uniformizer)
        return NotImplemented

    __radd__ = __add__
    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse computed to the justified precision.

        A multi-term divisor known to infinite precision has an infinite
        inverse; it is returned only when exact division terminates, and
        otherwise the caller must truncate an operand first.
        """
        if self.is_exact_zero:
            raise DivisionByZero("exact zero series has no inverse")
        if self.is_zero_to_prec:
            raise UnknownValuation("cannot invert a series that is zero to precision")
        v = min(self.coeffs)
        lead = self.coeffs[v]
        if len(self.coeffs) == 1:
            out_prec = self.prec - 2 * v if self.prec != INF else INF
            return LSeries(self.field, self.uniformizer, {-v: lead.inverse()}, out_prec)
        if self.prec == INF:
            return _exact_divide(
                LSeries.constant(self.field.one(), self.uniformizer), self
            )
        rel = int(self.prec - v)  # number of justified relative terms
        inv_lead = lead.inverse()
        # self = lead*y^v * (1 - u) with val(u) > 0; invert by geometric sum
        u = {}
        for j, c in self.coeffs.items():
            if j == v:
                continue
            u[j - v] = -(c * inv_lead)
        acc = {0: self.field.one()}
        power = dict(u)
        k = 1
        while power and k < rel:
            for j, c in power.items():
                cur = acc.get(j)
                acc[j] = c if cur is None else cur + c
            nxt = {}
            for i, a in power.items():
                for j, b in u.items():
                    t = i + j
                    if t >= rel:
                        continue
                    c = a * b
                    cur = nxt.get(t)
                    nxt[t] = c if cur is None else cur + c
            power = {j: c for j, c in nxt.items() if not c.is_zero()}
            k += 1
        out = {j - v: c * inv_lead for j, c in acc.items()}
        return LSeries(self.field, self.uniformizer, out, self.prec - 2 * v)

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return LSeries.constant(self.field.one(), self.uniformizer)
        base = self if k > 0 else self.inverse()
        k = abs(k)
        out = base
        for bit in bin(k)[3:]:
            out = out * out
            if bit == "1":
                out = out * base
        return out

    def shift(self, k):
        """Multiply by uniformizer^k (exact reindexing)."""
        prec = self.prec + k if self.prec != INF else INF
        return LSeries(
            self.field, self.uniformizer, {j + k: c for j, c in self.coeffs.items()}, prec
        )

    def truncate(self, prec):
        return LSeries(self.field, self.uniformizer, self.coeffs, min(self.prec, prec))

    def map_coefficients(self, fn, field=None):
        """Apply a coefficient-field map coefficient-wise (same uniformizer)."""
        field = field if field is not None else self.field
        return LSeries(
            field, self.uniformizer, {j: fn(c) for j, c in self.coeffs.items()}, self.prec
        )

    # -- comparison / rendering ----------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LSeries):
            return NotImplemented
        return (
            self.field == other.field
            and self.uniformizer == other.uniformizer
            and self.prec == other.prec
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash(
            (self.field, self.uniformizer, self.prec, frozenset(self.coeffs.items()))
        )

    def agrees_with(self, other, prec=None):
        """Equality of visible coefficients on the common window."""
        bound = min(self.prec, other.prec)
        if prec is not None:
            bound = min(bound, prec)
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            self.coeffs.get(j) == other.coeffs.get(j) for j in keys if j < bound
        )

    def __str__(self):
        prec = "inf" if self.prec == INF else str(int(self.prec))
        if not self.coeffs:
            return f"0 ;; prec={prec}"
        parts = []
        for j in sorted(self.coeffs):
            c = self.coeffs[j]
            cs = str(c)
            if j == 0:
                parts.append(cs)
            else:
                mono = self.uniformizer if j == 1 else f"{self.uniformizer}^{j}"
                if c.is_one():
                    parts.append(mono)
                else:
                    if c.den != c.field.ring.one or len(c.num.to_dict()) > 1:
                        cs = f"({cs})" if not cs.startswith("(") else cs
                    parts.append(f"{cs}*{mono}")
        return " + ".join(parts) + f" ;; prec={prec}"

    def __repr__(self):
        return f"LSeries({self})"


def _exact_divide(num, den):
    """Laurent long division of exactly-known series.

    Returns q with q*den == num when the quotient terminates; otherwise the
    quotient is an honest infinite series and a ValueError asks the caller
    to truncate an operand (never silently rounding).
    """
    if not num.coeffs:
        return LSeries.zero(num.field, num.uniformizer)
    dv = min(den.coeffs)
    lead = den.coeffs[dv]
    top_q = max(num.coeffs) - max(den.coeffs)
    rem = dict(num.coeffs)
    q = {}
    while rem:
        j = min(rem)
        e = j - dv
        if e > top_q:
            raise ValueError(
                "quotient of exact series is an infinite series; truncate an operand"
            )
        c = rem[j] / lead
        q[e] = c
        for i, a in den.coeffs.items():
            k = i + e
            cur = rem.get(k)
            val = cur - c * a if cur is not None else -(c * a)
            if val.is_zero():
                rem.pop(k, None)
            else:
                rem[k] = val
    return LSeries(num.field, num.uniformizer, q, INF)


def compose_rational(c, images, uniformizer=None, prec=None):
    """Evaluate a rational function at series arguments.

    `c` is a scale-0 element of some `PerfectField` (a plain rational
    function in its registry variables); `images` maps each variable name to
    a series of nonnegative valuation, all over one target field.  The
    result is the exact expansion of c at the images, to the precision the
    inputs justify, optionally capped by `prec`.

    Raises DenominatorVanishes when the denominator of c evaluates to zero
    at the constant terms of the images.
    """
    if c.scale != 0:
        raise ValueError("compose_rational needs an integer-exponent rational function")
    if not images:
        raise ValueError("no images supplied")
    some = next(iter(images.values()))
    target, uni = some.field, some.uniformizer
    if uniformizer is not None:
        uni = uniformizer
    for name, img in images.items():
        if img.field != target or img.uniformizer != uni:
            raise ValueError("images live over different series rings")
        if img.coeffs and min(img.coeffs) < 0:
            raise ValueError(f"image of {name} has negative valuation")
    names = c.field.varnames
    missing = sorted(_used_vars(c) - set(images))
    if missing:
        raise ValueError(f"no image given for variable(s) {missing}")

    cap = prec if prec is not None else INF
    pow_cache = {}

    def img_pow(name, e):
        key = (name, e)
        got = pow_cache.get(key)
        if got is None:
            got = images[name] ** e
            pow_cache[key] = got
        return got

    def eval_poly(poly):
        acc = LSeries.zero(target, uni, INF)
        for mono, coeff in poly.to_dict().items():
            term = LSeries.constant(target.const(int(coeff)), uni)
            for name, e in zip(names, mono):
                if e:
                    term = term * img_pow(name, e)
            acc = acc + term
        return acc

    num = eval_poly(c.num)
    if c.den == c.field.ring.one:
        return num.truncate(cap) if cap != INF else num
    den = eval_poly(c.den)
    if den.is_zero_to_prec or den.is_exact_zero or min(den.coeffs) > 0:
        raise DenominatorVanishes(
            "denominator vanishes at the constant terms of the images"
        )
    if cap != INF:
        num = num.truncate(cap)
        den = den.truncate(cap)
    elif num.prec == INF and den.prec == INF and len(den.coeffs) > 1:
        raise ValueError(
            "composition of an honest fraction needs a finite precision: "
            "pass prec= or use truncated images"
        )
    return num / den


def _used_vars(c):
    used = set()
    for poly in (c.num, c.den):
        for mono in poly.to_dict():
            for name, e in zip(c.field.varnames, mono):
                if e:
                    used.add(name)
    return used


def coefficients(f):
    """Spec-level alias for `LSeries.coefficients`."""
    return f.coefficients()
