"""Rational polynomials, characteristic polynomials and real root isolation.

Root isolation works on the square-free part with Sturm sequences; all sign
evaluations happen at dyadic points using integer-only Horner steps, so the
returned enclosures are exact consequences of rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, Sequence

from ..errors import ShapeMismatch, ZeroMatrix, ZeroPolynomial
from .interval import DyadicInterval
from .matrix import RatMatrix, as_rational

ZERO = Fraction(0)
ONE = Fraction(1)


class RatPolynomial:
    """Polynomial with Fraction coefficients in ascending degree order."""

    __slots__ = ("coeffs", "__dict__")

    def __init__(self, coeffs: Iterable):
        c = [as_rational(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def from_roots(cls, roots: Sequence) -> RatPolynomial:
        p = cls([1])
        for r in roots:
            p = p * cls([-as_rational(r), 1])
        return p

    @classmethod
    def x_power(cls, k: int) -> RatPolynomial:
        return cls([0] * k + [1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "RatPolynomial(0)"
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if c:
                terms.append(f"{c}" + ("" if i == 0 else ("x" if i == 1 else f"x^{i}")))
        return "RatPolynomial(" + " + ".join(terms) + ")"

    def __call__(self, x) -> Fraction:
        x = as_rational(x)
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: RatPolynomial) -> RatPolynomial:
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RatPolynomial((a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
                             for i in range(n))

    def __neg__(self) -> RatPolynomial:
        return RatPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: RatPolynomial) -> RatPolynomial:
        return self + (-other)

    def __mul__(self, other) -> RatPolynomial:
        if not isinstance(other, RatPolynomial):
            c = as_rational(other)
            return RatPolynomial(c * a for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return RatPolynomial(())
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RatPolynomial(out)

    __rmul__ = __mul__

    def derivative(self) -> RatPolynomial:
        return RatPolynomial(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def divmod(self, other: RatPolynomial) -> tuple[RatPolynomial, RatPolynomial]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.lead
        if len(rem) <= d:
            return RatPolynomial(()), self
        quot = [ZERO] * (len(rem) - d)
        for k in range(len(rem) - d - 1, -1, -1):
            q = rem[k + d] / lead
            quot[k] = q
            if q:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= q * b
        return RatPolynomial(quot), RatPolynomial(rem[:d])

    def __floordiv__(self, other: RatPolynomial) -> RatPolynomial:
        return self.divmod(other)[0]

    def __mod__(self, other: RatPolynomial) -> RatPolynomial:
        return self.divmod(other)[1]

    def monic(self) -> RatPolynomial:
        if self.is_zero():
            return self
        return self * (ONE / self.lead)

    def gcd(self, other: RatPolynomial) -> RatPolynomial:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree_part(self) -> RatPolynomial:
        if self.degree <= 0:
            return self
        g = self.gcd(self.derivative())
        return (self // g).monic()

    @cached_property
    def int_coeffs(self) -> tuple[int, ...]:
        """Coefficients scaled by a positive integer to become integers."""
        if not self.coeffs:
            return ()
        m = lcm(*(c.denominator for c in self.coeffs))
        return tuple(int(c * m) for c in self.coeffs)

    def sign_at(self, num: int, e: int) -> int:
        """Sign of the polynomial at the dyadic point num / 2**e (e >= 0)."""
        c = self.int_coeffs
        if not c:
            return 0
        d = len(c) - 1
        acc = 0
        # homogenised Horner: sum c_i num^i 2^{e(d-i)}
        for i in range(d, -1, -1):
            acc = acc * num + (c[i] << (e * (d - i)))
        return (acc > 0) - (acc < 0)

    def sign_at_rational(self, x: Fraction) -> int:
        v = self(x)
        return (v > 0) - (v < 0)


def char_poly(a: RatMatrix) -> RatPolynomial:
    """det(xI - a) by the Faddeev-LeVerrier recurrence (exact over Q)."""
    if not a.is_square:
        raise ShapeMismatch(f"char_poly of non-square {a.shape}")
    n = a.rows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    ident = RatMatrix.identity(n)
    m = RatMatrix.zeros(n)
    for k in range(1, n + 1):
        m = a @ m + ident.scale(coeffs[n - k + 1])
        coeffs[n - k] = -(a @ m).trace() / k
    return RatPolynomial(coeffs)


def rational_root_multiplicity(p: RatPolynomial, q) -> int:
    """Exact multiplicity of the rational q as a root of p."""
    if p.is_zero():
        raise ZeroPolynomial("multiplicity in the zero polynomial")
    q = as_rational(q)
    lin = RatPolynomial([-q, 1])
    mult = 0
    while p.degree > 0:
        quo, rem = p.divmod(lin)
        if not rem.is_zero():
            break
        p = quo
        mult += 1
    return mult


def strip_root(p: RatPolynomial, q, mult: int) -> RatPolynomial:
    lin = RatPolynomial([-as_rational(q), 1])
    for _ in range(mult):
        p, rem = p.divmod(lin)
        assert rem.is_zero()
    return p


# --- Sturm machinery --------------------------------------------------------


class _Sturm:
    """Sturm sequence of a square-free polynomial with dyadic evaluation."""

    def __init__(self, p: RatPolynomial):
        seq = [p, p.derivative()]
        while not seq[-1].is_zero():
            seq.append(-(seq[-2] % seq[-1]))
        self.seq = seq[:-1]
        self.p = p
        self.dp = seq[1]

    def variations(self, num: int, e: int) -> int:
        v = 0
        last = 0
        for f in self.seq:
            s = f.sign_at(num, e)
            if s:
                if last and s != last:
                    v += 1
                last = s
        return v


def root_bound_exponent(p: RatPolynomial) -> int:
    """K with every real root strictly inside (-2^K, 2^K) (Cauchy bound)."""
    lead = abs(p.lead)
    m = max((abs(c) / lead for c in p.coeffs[:-1]), default=ZERO)
    b = 1 + m
    k = 0
    while Fraction(1 << k) <= b:
        k += 1
    return k


def _isolate(p: RatPolynomial) -> tuple[_Sturm, list[tuple[int, int, int]]]:
    """Isolating half-open intervals (a, b] = (an/2^e, bn/2^e] for roots of p.

    p must be square-free and nonconstant.  Returns the Sturm helper and a
    sorted list of (an, bn, e) triples, each containing exactly one root.
    """
    st = _Sturm(p)
    k = root_bound_exponent(p)
    out = []
    # (an, bn, e, va, vb) with a = an / 2^e
    stack = [(-(1 << k), 1 << k, 0, st.variations(-(1 << k), 0), st.variations(1 << k, 0))]
    while stack:
        an, bn, e, va, vb = stack.pop()
        cnt = va - vb
        if cnt == 0:
            continue
        if cnt == 1:
            out.append((an, bn, e))
            continue
        an2, bn2, e2 = an * 2, bn * 2, e + 1
        mn = an2 + (bn2 - an2) // 2
        vm = st.variations(mn, e2)
        stack.append((mn, bn2, e2, vm, vb))
        stack.append((an2, mn, e2, va, vm))
    out.sort(key=lambda t: Fraction(t[0], 1 << t[2]))
    return st, out


def _refine(st: _Sturm, an: int, bn: int, e: int, precision: int) -> tuple[int, int, int]:
    """Shrink an isolating (a, b] to width <= 2^-precision by sign bisection.

    Returns (lo_num, hi_num, e); lo == hi signals an exact dyadic root.
    """
    p = st.p
    if p.sign_at(bn, e) == 0:
        return bn, bn, e
    # sign of p just to the right of a
    sa = p.sign_at(an, e)
    if sa == 0:
        sa = st.dp.sign_at(an, e)
    while _wider_than(bn - an, e, precision):
        an, bn, e = an * 2, bn * 2, e + 1
        mn = an + (bn - an) // 2
        sm = p.sign_at(mn, e)
        if sm == 0:
            return mn, mn, e
        if sm == sa:
            an = mn
        else:
            bn = mn
    return an, bn, e


def _wider_than(w: int, e: int, precision: int) -> bool:
    """Is w / 2^e > 2^-precision?"""
    if precision >= 0:
        return (w << precision) > (1 << e)
    return w > (1 << (e - precision))


def _to_interval(lo: int, hi: int, e: int, precision: int) -> DyadicInterval:
    return DyadicInterval(Fraction(lo, 1 << e), Fraction(hi, 1 << e), precision)


def isolate_real_roots(p: RatPolynomial, precision: int) -> list[DyadicInterval]:
    """Disjoint enclosures, one per distinct real root, each of width <= 2^-precision."""
    if p.is_zero():
        raise ZeroPolynomial("root isolation of the zero polynomial")
    if p.degree == 0:
        return []
    sf = p.squarefree_part()
    if sf.degree == 0:
        return []
    st, cells = _isolate(sf)
    refined = [_refine(st, an, bn, e, precision) for an, bn, e in cells]
    # closed enclosures of neighbouring roots may touch at a shared non-root
    # endpoint; bisect further until they are strictly separated
    changed = True
    while changed:
        changed = False
        for i in range(len(refined) - 1):
            lo1, hi1, e1 = refined[i]
            lo2, hi2, e2 = refined[i + 1]
            if Fraction(hi1, 1 << e1) >= Fraction(lo2, 1 << e2):
                refined[i] = _refine(st, lo1, hi1, e1, max(precision, e1) + 1)
                refined[i + 1] = _refine(st, lo2, hi2, e2, max(precision, e2) + 1)
                changed = True
    return [_to_interval(lo, hi, e, precision) for lo, hi, e in refined]


class RootIsolator:
    """Isolates the roots of p once, then refines individual roots on demand."""

    def __init__(self, p: RatPolynomial):
        if p.is_zero():
            raise ZeroPolynomial("root isolation of the zero polynomial")
        self.p = p
        self.sf = p.squarefree_part()
        if self.sf.degree <= 0:
            self.st, self.cells = None, []
        else:
            self.st, self.cells = _isolate(self.sf)

    def __len__(self) -> int:
        return len(self.cells)

    def refine(self, index: int, precision: int) -> DyadicInterval:
        an, bn, e = self.cells[index]
        lo, hi, e = _refine(self.st, an, bn, e, precision)
        self.cells[index] = (lo, hi, e) if lo != hi else (lo - 1, hi, e)
        return _to_interval(lo, hi, e, precision)

    def count_above(self, q) -> int:
        """Number of distinct roots strictly greater than the rational q."""
        if self.st is None:
            return 0
        q = as_rational(q)
        return sum(1 for _ in _roots_gt(self, q))


def _roots_gt(iso: RootIsolator, q: Fraction):
    p = iso.sf
    for i, (an, bn, e) in enumerate(iso.cells):
        a, b = Fraction(an, 1 << e), Fraction(bn, 1 << e)
        if a >= q:
            yield i
        elif b <= q:
            continue
        else:
            # q inside (a, b]: compare root with q by sign at q
            if p(q) == 0:
                continue
            sa = p.sign_at(an, e)
            if sa == 0:
                sa = iso.st.dp.sign_at(an, e)
            if p.sign_at_rational(q) == sa:
                yield i


# --- singular values ---------------------------------------------------------


def _sqrt_enclosure(iso: RootIsolator, index: int, precision: int) -> DyadicInterval:
    """sqrt of root `index` of iso.p (a nonnegative root) to width <= 2^-precision."""
    q = precision + 2
    while True:
        lam = iso.refine(index, q)
        lo = max(lam.lo, ZERO)
        enc = DyadicInterval(lo, lam.hi, q).sqrt(precision + 1)
        if enc.width <= Fraction(1, 1 << precision):
            return enc.with_precision(precision)
        q = 2 * q


def gram(a: RatMatrix) -> RatMatrix:
    return a.T @ a


def sigma_min_nonzero(a: RatMatrix, precision: int) -> DyadicInterval:
    """Enclosure of the smallest nonzero singular value of a."""
    if a.is_zero():
        raise ZeroMatrix("zero matrix has no nonzero singular value")
    cp = char_poly(gram(a))
    z = rational_root_multiplicity(cp, 0)
    reduced = strip_root(cp, 0, z)
    iso = RootIsolator(reduced)
    return _sqrt_enclosure(iso, 0, precision)


def sigma_max(a: RatMatrix, precision: int) -> DyadicInterval:
    """Enclosure of the largest singular value (operator 2-norm) of a."""
    if a.is_zero():
        return DyadicInterval.point(0, precision)
    g = gram(a) if a.rows >= a.cols else a @ a.T
    iso = RootIsolator(char_poly(g))
    return _sqrt_enclosure(iso, len(iso) - 1, precision)


def has_eigenvalue_above(a: RatMatrix, q) -> bool:
    """Exact test: does the symmetric matrix a have an eigenvalue > q?"""
    iso = RootIsolator(char_poly(a))
    return iso.count_above(q) > 0
