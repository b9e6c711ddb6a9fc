"""Exact bivariate Laurent polynomials with coefficients in Q[lambda].

A :class:`LaurentPoly2` is a finitely supported map from exponent pairs
``(e1, e2)`` to univariate polynomials in ``lambda`` with rational
coefficients.  Internally the terms are flattened to ``(e1, e2, i) -> c``
so products and exact quotients run as plain dictionary convolutions.

Rationals are :class:`fractions.Fraction`; integral values may be stored as
``int`` internally and are promoted on the way out.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction]
Key = tuple[int, int, int]

__all__ = [
    "UniPolyLambda",
    "LaurentPoly2",
    "as_rational",
    "laurent_add",
    "laurent_mul",
    "laurent_partial",
    "shift_monomial",
    "substitute_powers",
    "specialize_lambda",
    "specialize_lambda_float",
    "eval_complex",
    "total_degree",
    "is_poly2",
    "gcd_constant_check",
]


def as_rational(value) -> Fraction:
    """Convert ints, Fractions, Decimals and numeric strings to an exact Fraction.

    Binary floats are converted exactly (``Fraction(0.1)`` is not 1/10); pass
    decimal strings when the decimal value is intended.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def _norm(c: Number) -> Number:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class UniPolyLambda:
    """Polynomial in lambda; ``coeffs[i]`` multiplies ``lambda**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def lam(cls) -> "UniPolyLambda":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree in lambda; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __call__(self, x) -> Fraction:
        x = as_rational(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def _coerce(self, other) -> "UniPolyLambda":
        if isinstance(other, UniPolyLambda):
            return other
        if isinstance(other, (int, _RationalABC, str)):
            return UniPolyLambda((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return UniPolyLambda(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return UniPolyLambda(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return UniPolyLambda()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UniPolyLambda(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*lam")
            else:
                parts.append(f"{c}*lam^{i}")
        return " + ".join(parts)


class LaurentPoly2:
    """Bivariate Laurent polynomial in (z1, z2) over Q[lambda].

    Instances are treated as immutable.  The zero polynomial has empty support.
    """

    __slots__ = ("_c",)

    def __init__(self, terms: Mapping | None = None):
        flat: dict[Key, Number] = {}
        for (e1, e2), coeff in (terms or {}).items():
            if isinstance(coeff, UniPolyLambda):
                cs = coeff.coeffs
            elif isinstance(coeff, (list, tuple)):
                cs = [as_rational(c) for c in coeff]
            else:
                cs = [as_rational(coeff)]
            for i, c in enumerate(cs):
                if c:
                    k = (int(e1), int(e2), i)
                    v = flat.get(k, 0) + c
                    if v:
                        flat[k] = _norm(v)
                    else:
                        flat.pop(k, None)
        self._c = flat

    @classmethod
    def _from_flat(cls, flat: dict[Key, Number]) -> "LaurentPoly2":
        obj = cls.__new__(cls)
        obj._c = flat
        return obj

    @classmethod
    def monomial(cls, e1: int, e2: int, coeff=1) -> "LaurentPoly2":
        return cls({(e1, e2): coeff})

    @classmethod
    def constant(cls, coeff) -> "LaurentPoly2":
        return cls({(0, 0): coeff})

    @classmethod
    def lam(cls) -> "LaurentPoly2":
        """The polynomial ``lambda``."""
        return cls({(0, 0): UniPolyLambda.lam()})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[tuple[int, int], UniPolyLambda]:
        """Exponent pair -> lambda coefficient, in lexicographic exponent order."""
        grouped: dict[tuple[int, int], dict[int, Number]] = {}
        for (e1, e2, i), c in self._c.items():
            grouped.setdefault((e1, e2), {})[i] = c
        out = {}
        for key in sorted(grouped):
            cs = grouped[key]
            out[key] = UniPolyLambda(cs.get(i, 0) for i in range(max(cs) + 1))
        return out

    def support(self) -> list[tuple[int, int]]:
        return sorted({(e1, e2) for e1, e2, _ in self._c})

    def coefficient(self, e1: int, e2: int) -> UniPolyLambda:
        cs = {i: c for (a, b, i), c in self._c.items() if a == e1 and b == e2}
        if not cs:
            return UniPolyLambda()
        return UniPolyLambda(cs.get(i, 0) for i in range(max(cs) + 1))

    @property
    def lambda_degree(self) -> int:
        return max((i for _, _, i in self._c), default=-1)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self) -> bool:
        return bool(self._c)

    def __len__(self) -> int:
        return len(self.support())

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentPoly2):
            return other
        if isinstance(other, UniPolyLambda):
            return LaurentPoly2({(0, 0): other})
        if isinstance(other, (int, _RationalABC)) and not isinstance(other, bool):
            return LaurentPoly2.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._c)
        for k, c in other._c.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = _norm(v)
            else:
                del out[k]
        return LaurentPoly2._from_flat(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly2._from_flat({k: -c for k, c in self._c.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Key, Number] = {}
        get = out.get
        for (a1, a2, ai), ca in self._c.items():
            for (b1, b2, bi), cb in other._c.items():
                k = (a1 + b1, a2 + b2, ai + bi)
                v = get(k, 0) + ca * cb
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return LaurentPoly2._from_flat({k: _norm(v) for k, v in out.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are only defined for monomials")
        result = LaurentPoly2.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_quotient(self, divisor: "LaurentPoly2") -> "LaurentPoly2":
        """Quotient of an exact division in the Laurent ring.

        Leading terms are taken in lexicographic order on (e1, e2, i); since
        Laurent monomials form a group every leading term is divisible, and the
        loop ends when the remainder vanishes.  Raises ArithmeticError if the
        division is not exact.
        """
        if not divisor._c:
            raise ZeroDivisionError("division by the zero polynomial")
        lk = max(divisor._c)
        lc = divisor._c[lk]
        dterms = list(divisor._c.items())
        rem = dict(self._c)
        quot: dict[Key, Number] = {}
        # quotient support is bounded by |support(self)| * |support(divisor)| steps
        limit = 4 * (len(rem) + 1) * (len(dterms) + 1) + 64
        while rem:
            limit -= 1
            if limit < 0:
                raise ArithmeticError("division is not exact")
            k = max(rem)
            qk = (k[0] - lk[0], k[1] - lk[1], k[2] - lk[2])
            if qk[2] < 0:
                raise ArithmeticError("division is not exact")
            qc = _norm(Fraction(rem[k]) / lc)
            quot[qk] = qc
            for (d1, d2, di), dc in dterms:
                kk = (qk[0] + d1, qk[1] + d2, qk[2] + di)
                v = rem.get(kk, 0) - qc * dc
                if v:
                    rem[kk] = _norm(v)
                else:
                    rem.pop(kk, None)
        return LaurentPoly2._from_flat(quot)

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self._c == other._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        if not self._c:
            return "LaurentPoly2(0)"
        parts = [f"({c})*z1^{e1}*z2^{e2}" for (e1, e2), c in self.terms.items()]
        return "LaurentPoly2(" + " + ".join(parts) + ")"


# -- operations -----------------------------------------------------------


def laurent_add(a: LaurentPoly2, b: LaurentPoly2) -> LaurentPoly2:
    return a + b


def laurent_mul(a: LaurentPoly2, b: LaurentPoly2) -> LaurentPoly2:
    return a * b


def _var_index(var) -> int:
    if var in (1, "z1"):
        return 0
    if var in (2, "z2"):
        return 1
    raise ValueError(f"unknown variable {var!r}; expected 'z1' or 'z2'")


def laurent_partial(f: LaurentPoly2, var) -> LaurentPoly2:
    """Partial derivative with respect to ``z1`` or ``z2`` (also accepts 1 or 2)."""
    j = _var_index(var)
    out: dict[Key, Number] = {}
    for (e1, e2, i), c in f._c.items():
        e = (e1, e2)[j]
        if e == 0:
            continue
        k = (e1 - 1, e2, i) if j == 0 else (e1, e2 - 1, i)
        out[k] = _norm(c * e)
    return LaurentPoly2._from_flat(out)


def shift_monomial(f: LaurentPoly2, a: int, b: int) -> LaurentPoly2:
    """Multiply by ``z1**a * z2**b``."""
    return LaurentPoly2._from_flat({(e1 + a, e2 + b, i): c for (e1, e2, i), c in f._c.items()})


def is_poly2(f: LaurentPoly2) -> bool:
    """True when every exponent pair is componentwise nonnegative."""
    return all(e1 >= 0 and e2 >= 0 for e1, e2, _ in f._c)


def substitute_powers(f: LaurentPoly2, q1: int, q2: int) -> LaurentPoly2:
    """Substitute ``z = (x1**q1, x2**q2)``; exponents scale componentwise."""
    if not is_poly2(f):
        raise ValueError("substitute_powers requires nonnegative exponents")
    if q1 < 1 or q2 < 1:
        raise ValueError("substitution powers must be positive")
    return LaurentPoly2._from_flat({(e1 * q1, e2 * q2, i): c for (e1, e2, i), c in f._c.items()})


def total_degree(f: LaurentPoly2) -> int:
    """Max of e1 + e2 over the support; -1 for the zero polynomial."""
    return max((e1 + e2 for e1, e2, _ in f._c), default=-1)


def specialize_lambda(f: LaurentPoly2, lam) -> LaurentPoly2:
    """Evaluate every lambda coefficient exactly at a rational ``lam``."""
    lam = as_rational(lam)
    return LaurentPoly2({k: c(lam) for k, c in f.terms.items()})


def specialize_lambda_float(f: LaurentPoly2, lam: float) -> dict[tuple[int, int], float]:
    """Coefficients at a floating ``lam``, in lexicographic exponent order.

    Each coefficient is evaluated exactly at the binary value of ``lam`` and
    rounded once, so cancellation inside the lambda polynomial costs nothing.
    """
    x = Fraction(lam)
    out = {}
    for k, c in f.terms.items():
        v = float(c(x))
        if v != 0.0:
            out[k] = v
    return out


def eval_complex(f: LaurentPoly2, z1: complex, z2: complex, lam: float = 0.0) -> complex:
    """Floating evaluation at a point of the complex torus.

    Lambda coefficients are evaluated by Horner's rule in floating point and
    terms are summed in lexicographic exponent order.
    """
    if z1 == 0 or z2 == 0:
        raise ValueError("Laurent polynomials are undefined when a variable is zero")
    z1 = complex(z1)
    z2 = complex(z2)
    lam = float(lam)
    total = 0j
    for (e1, e2), c in f.terms.items():
        total += c.eval_float(lam) * (z1**e1) * (z2**e2)
    return total


# -- gcd via subresultant PRS over Z[z2] ------------------------------------
#
# Bivariate polynomials are held as lists indexed by the z1 exponent whose
# entries are integer polynomials in z2 (tuples, low degree first, () = 0).

ZPoly = tuple  # tuple[int, ...]


def _z_trim(a) -> ZPoly:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _z_add(a: ZPoly, b: ZPoly) -> ZPoly:
    n = max(len(a), len(b))
    return _z_trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _z_neg(a: ZPoly) -> ZPoly:
    return tuple(-x for x in a)


def _z_mul(a: ZPoly, b: ZPoly) -> ZPoly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _z_trim(out)


def _z_pow(a: ZPoly, n: int) -> ZPoly:
    out: ZPoly = (1,)
    for _ in range(n):
        out = _z_mul(out, a)
    return out


def _z_exact_div(a: ZPoly, b: ZPoly) -> ZPoly:
    if not b:
        raise ZeroDivisionError
    a = list(a)
    if not a:
        return ()
    db = len(b) - 1
    lb = b[-1]
    if len(a) - 1 < db:
        raise ArithmeticError("inexact division in Z[z2]")
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c == 0:
            continue
        t, r = divmod(c, lb)
        if r:
            raise ArithmeticError("inexact division in Z[z2]")
        q[i - db] = t
        for j, y in enumerate(b):
            a[i - db + j] -= t * y
    if any(a):
        raise ArithmeticError("inexact division in Z[z2]")
    return _z_trim(q)


def _z_content(a: ZPoly) -> int:
    g = 0
    for x in a:
        g = math.gcd(g, x)
    return g


def _z_primitive(a: ZPoly) -> ZPoly:
    if not a:
        return ()
    g = _z_content(a)
    if a[-1] < 0:
        g = -g
    return tuple(x // g for x in a)


def _z_gcd(a: ZPoly, b: ZPoly) -> ZPoly:
    """Primitive gcd in Z[z2] by the primitive Euclidean algorithm."""
    a, b = _z_primitive(a), _z_primitive(b)
    while b:
        a, b = b, _z_primitive(_z_prem(a, b))
    return a


def _z_prem(a: ZPoly, b: ZPoly) -> ZPoly:
    """Pseudo-remainder of integer univariate polynomials."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(a) - 1 >= db and a:
        c = a[-1]
        shift = len(a) - 1 - db
        a = [x * lb for x in a]
        for j, y in enumerate(b):
            a[shift + j] -= c * y
        a = list(_z_trim(a))
    return tuple(a)


def _b_content(f: list[ZPoly]) -> ZPoly:
    g: ZPoly = ()
    for c in f:
        if c:
            g = _z_gcd(g, c) if g else _z_primitive(c)
            if len(g) == 1:
                return (1,)
    return g


def _b_prem(a: list[ZPoly], b: list[ZPoly]) -> list[ZPoly]:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b, in z1."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    e = len(a) - 1 - db + 1
    while a and len(a) - 1 >= db:
        c = a[-1]
        shift = len(a) - 1 - db
        a = [_z_mul(x, lb) for x in a]
        for j, y in enumerate(b):
            a[shift + j] = _z_add(a[shift + j], _z_neg(_z_mul(c, y)))
        while a and not a[-1]:
            a.pop()
        e -= 1
    if e > 0 and a:
        m = _z_pow(lb, e)
        a = [_z_mul(x, m) for x in a]
    return a


def _to_bivariate(f: LaurentPoly2) -> list[ZPoly]:
    den = 1
    for c in f._c.values():
        if type(c) is Fraction:
            den = den * c.denominator // math.gcd(den, c.denominator)
    deg1 = max(e1 for e1, _, _ in f._c)
    deg2 = max(e2 for _, e2, _ in f._c)
    rows = [[0] * (deg2 + 1) for _ in range(deg1 + 1)]
    for (e1, e2, _), c in f._c.items():
        rows[e1][e2] = int(c * den)
    return [_z_trim(r) for r in rows]


def gcd_constant_check(f: LaurentPoly2, g: LaurentPoly2) -> bool:
    """True iff ``gcd(f, g)`` is a nonzero constant.

    Both inputs must be nonzero polynomials (nonnegative exponents) with
    lambda already specialized.  Runs the subresultant PRS in z1 over Z[z2]
    after splitting off the Z[z2]-contents, so common factors depending on
    z2 only are detected by the content gcd and all others by the PRS.
    """
    for h in (f, g):
        if h.is_zero():
            raise ValueError("gcd_constant_check rejects the zero polynomial")
        if not is_poly2(h):
            raise ValueError("gcd_constant_check requires nonnegative exponents")
        if h.lambda_degree > 0:
            raise ValueError("specialize lambda before testing for common factors")
    a, b = _to_bivariate(f), _to_bivariate(g)
    if len(a) < len(b):
        a, b = b, a
    ca, cb = _b_content(a), _b_content(b)
    if len(_z_gcd(ca, cb)) > 1:
        return False
    a = [_z_exact_div(c, ca) for c in a]
    b = [_z_exact_div(c, cb) for c in b]
    # Collins/Brown subresultant PRS
    g_, h_ = (1,), (1,)
    while True:
        if len(b) == 1:
            # b is a nonzero element of Z[z2] and primitive, hence a unit
            return True
        delta = len(a) - len(b)
        r = _b_prem(a, b)
        if not r:
            return False
        if len(r) == 1:
            return True
        den = _z_mul(g_, _z_pow(h_, delta))
        a, b = b, [_z_exact_div(c, den) for c in r]
        g_ = a[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h_ = g_
        else:
            h_ = _z_exact_div(_z_pow(g_, delta), _z_pow(h_, delta - 1))
