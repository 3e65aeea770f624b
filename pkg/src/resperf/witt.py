"""Finite-length Witt vectors over perfect coefficient fields.

The addition and multiplication structure polynomials S_i, P_i are generated
over the integers from the ghost-component recursion

    w_i(Z) = sum_{j<=i} p^j * Z_j^(p^(i-j)),

solving w_i(S) = w_i(X) + w_i(Y) and w_i(P) = w_i(X) * w_i(Y) with exact
division by p^i at every level (asserted, never rounded).  The ghost map is
only trusted over the integers; at runtime the polynomials are reduced mod p
once and evaluated in the coefficient field.

The per-(p, n) cache is initialize-once/read-many behind a lock; tests may
swap in a corrupted entry through `inject_cache_entry` to prove the
verification suite notices.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from sympy.polys.domains import ZZ
from sympy.polys.rings import ring as _sympy_ring

from .errors import LengthBound
from .pfield import PElem

LENGTH_BOUND = 5

_cache = {}
_cache_lock = threading.Lock()


@dataclass(frozen=True)
class WittPolys:
    """Structure polynomials for W_n over Z, plus their mod-p reductions.

    `sum_polys[i]` and `prod_polys[i]` are integer polynomials in
    X_0..X_i, Y_0..Y_i (represented in 2n variables).  `sum_mod_p` and
    `prod_mod_p` are dictionaries {exponent tuple: int coefficient} with
    coefficients already reduced into 0..p-1 and zero terms dropped.
    """

    p: int
    n: int
    ring: object
    sum_polys: tuple
    prod_polys: tuple
    sum_mod_p: tuple
    prod_mod_p: tuple


def _ghost(p, i, vars_):
    acc = vars_[0] ** (p**i)
    for j in range(1, i + 1):
        acc = acc + p**j * vars_[j] ** (p ** (i - j))
    return acc


def _mod_p_dict(poly, p):
    out = {}
    for mono, c in poly.to_dict().items():
        c = int(c) % p
        if c:
            out[mono] = c
    return out


def _generate(p, n):
    names = [f"X{i}" for i in range(n)] + [f"Y{i}" for i in range(n)]
    built = _sympy_ring(names, ZZ)
    R = built[0]
    xs = built[1 : n + 1]
    ys = built[n + 1 :]
    sums, prods = [], []
    for i in range(n):
        target_s = _ghost(p, i, xs) + _ghost(p, i, ys)
        target_p = _ghost(p, i, xs) * _ghost(p, i, ys)
        for j in range(i):
            target_s = target_s - p**j * sums[j] ** (p ** (i - j))
            target_p = target_p - p**j * prods[j] ** (p ** (i - j))
        q = p**i
        s_i = target_s.quo_ground(q)
        p_i = target_p.quo_ground(q)
        # quo_ground floor-divides silently; the recursion is only correct
        # if the division was exact
        if s_i * q != target_s or p_i * q != target_p:
            raise ArithmeticError(f"ghost recursion division by {q} was not exact")
        sums.append(s_i)
        prods.append(p_i)
    return WittPolys(
        p=p,
        n=n,
        ring=R,
        sum_polys=tuple(sums),
        prod_polys=tuple(prods),
        sum_mod_p=tuple(_mod_p_dict(f, p) for f in sums),
        prod_mod_p=tuple(_mod_p_dict(f, p) for f in prods),
    )


def witt_structure_polys(p, n, bound=LENGTH_BOUND):
    """Structure polynomials for length-n Witt vectors, cached per (p, n)."""
    if n < 1:
        raise ValueError("length must be at least 1")
    if n > bound:
        raise LengthBound(f"length {n} exceeds bound {bound}")
    key = (p, n)
    with _cache_lock:
        got = _cache.get(key)
        if got is None:
            got = _generate(p, n)
            _cache[key] = got
    return got


def verify_ghost_identities(wp):
    """Symbolic check that cached polynomials satisfy the ghost identities."""
    n = wp.n
    built = wp.ring.gens
    xs, ys = built[:n], built[n:]
    for i in range(n):
        want_s = _ghost(wp.p, i, xs) + _ghost(wp.p, i, ys)
        want_p = _ghost(wp.p, i, xs) * _ghost(wp.p, i, ys)
        have_s = _ghost(wp.p, i, wp.sum_polys)
        have_p = _ghost(wp.p, i, wp.prod_polys)
        if have_s != want_s or have_p != want_p:
            return False
    return True


def inject_cache_entry(p, n, wp):
    """Testing hook: replace a cache entry, returning the previous one."""
    key = (p, n)
    with _cache_lock:
        old = _cache.get(key)
        _cache[key] = wp
    return old


def format_structure_poly(wp, which, i):
    """Canonical integer-polynomial rendering of S_i or P_i."""
    poly = (wp.sum_polys if which == "S" else wp.prod_polys)[i]
    names = [str(g) for g in wp.ring.gens]
    terms = sorted(poly.to_dict().items(), key=lambda mc: wp.ring.order(mc[0]), reverse=True)
    parts = []
    for mono, c in terms:
        c = int(c)
        factors = []
        for name, e in zip(names, mono):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        body = "*".join(factors)
        if not body:
            body = str(abs(c))
        elif abs(c) != 1:
            body = f"{abs(c)}*{body}"
        parts.append((" - " if c < 0 else " + ", body))
    if not parts:
        return "0"
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == " - " else "") + first_body
    for sign, body in parts[1:]:
        text += sign + body
    return text


class WittVec:
    """Length-n Witt vector with entries in one `PerfectField`. Immutable."""

    __slots__ = ("field", "entries")

    def __init__(self, field, entries):
        entries = tuple(entries)
        if not entries:
            raise ValueError("Witt vectors have length at least 1")
        for e in entries:
            if not isinstance(e, PElem) or e.field != field:
                raise ValueError("entries must all lie in the given field")
        self.field = field
        self.entries = entries

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        if not isinstance(other, WittVec):
            return NotImplemented
        return self.field == other.field and self.entries == other.entries

    def __hash__(self):
        return hash((self.field, self.entries))

    def __repr__(self):
        return "(" + ", ".join(str(e) for e in self.entries) + ")"

    def _eval_struct(self, polys, other):
        args = self.entries + other.entries
        out = []
        zero = self.field.zero()
        for d in polys:
            acc = zero
            for mono, c in d.items():
                term = self.field.const(c)
                for arg, e in zip(args, mono):
                    if e:
                        term = term * arg**e
                acc = acc + term
            out.append(acc)
        return WittVec(self.field, out)

    def __add__(self, other):
        self._check(other)
        wp = witt_structure_polys(self.field.p, len(self))
        return self._eval_struct(wp.sum_mod_p[: len(self)], other)

    def __mul__(self, other):
        self._check(other)
        wp = witt_structure_polys(self.field.p, len(self))
        return self._eval_struct(wp.prod_mod_p[: len(self)], other)

    def _check(self, other):
        if not isinstance(other, WittVec):
            raise TypeError("expected a Witt vector")
        if other.field != self.field or len(other) != len(self):
            raise ValueError("Witt operands need equal field and length")


def witt_zero(field, n):
    return WittVec(field, [field.zero()] * n)


def teichmuller(a, n):
    """Multiplicative lift (a, 0, ..., 0) of length n."""
    return WittVec(a.field, [a] + [a.field.zero()] * (n - 1))


def verschiebung(v, length=None):
    """Shift entries right; by default the length is preserved (last drops)."""
    length = len(v) if length is None else length
    entries = (v.field.zero(),) + v.entries
    entries = entries[:length] + (v.field.zero(),) * (length - len(entries))
    return WittVec(v.field, entries[:length])


def frobenius_lift(v):
    """Entrywise p-th power; over perfect coefficients this is the Witt
    Frobenius, and p*x = verschiebung(frobenius_lift(x)) holds."""
    return WittVec(v.field, [e.frobenius(1) for e in v.entries])


def scalar_multiple(k, v):
    """k-fold repeated Witt addition (k >= 0)."""
    acc = witt_zero(v.field, len(v))
    for _ in range(k):
        acc = acc + v
    return acc
