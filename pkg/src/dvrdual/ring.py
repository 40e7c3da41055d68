"""Exact arithmetic for a compact discrete valuation ring.

Two flavours of base ring are supported, selected by `RingCtx.mode`:

* ``"mixed"``  -- the p-adic integers, uniformizer p, residue field F_p;
* ``"equal"``  -- the power-series ring F_q[[x]], uniformizer x, with
  q = p^e and F_q presented as F_p[t] modulo a user-supplied irreducible
  polynomial.

Ring elements (`RElem`) are truncated: they carry an explicit digit vector
and are well defined exactly modulo pi^precision.  Elements of the divisible
quotient T = Frac(R)/R (`TElem`) are exact: each one has finite canonical
data (a level n and a numerator of valuation zero).

Digits are stored least-significant first.  In equal characteristic a digit
is a residue-field element packed into an integer in [0, q) by writing its
coefficient vector in base p; for e = 1 this coincides with the plain value
in [0, p).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import (
    InsufficientPrecisionError,
    NonUnitError,
    SpecParseError,
)

EQUAL_CHAR = "equal"
MIXED_CHAR = "mixed"

_MAX_Q = 512  # lookup tables are q*q; anything larger is out of desk scale


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# ---------------------------------------------------------------------------
# residue-field polynomials over F_p, coefficient tuples low-degree first


def _poly_trim(c: tuple[int, ...]) -> tuple[int, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return c[:i]


def _poly_mul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(tuple(out))


def _poly_mod(a: tuple[int, ...], m: tuple[int, ...], p: int) -> tuple[int, ...]:
    # m must be monic
    a = list(a)
    dm = len(m) - 1
    while len(a) > dm:
        lead = a[-1] % p
        if lead:
            for k in range(dm + 1):
                a[len(a) - 1 - dm + k] = (a[len(a) - 1 - dm + k] - lead * m[k]) % p
        a.pop()
    return _poly_trim(tuple(x % p for x in a))


def _poly_is_irreducible(m: tuple[int, ...], p: int) -> bool:
    """Trial division by every lower-degree monic polynomial over F_p."""
    deg = len(m) - 1
    if deg < 1:
        return False
    for d in range(1, deg):
        for tail in itertools.product(range(p), repeat=d):
            divisor = tuple(tail) + (1,)
            if not _poly_mod(m, divisor, p):
                return False
    return True


@dataclass(frozen=True)
class FqElem:
    """Residue-field element: coefficients of 1, t, ..., t^(e-1) over F_p."""

    coeffs: tuple[int, ...]


@dataclass(frozen=True)
class RingCtx:
    """Context for one compact DVR: mode, residue field data and precision."""

    mode: str
    p: int
    e: int = 1
    modulus: tuple[int, ...] = ()
    default_precision: int = 8
    q: int = field(init=False, compare=False, repr=False, default=0)
    _add: tuple = field(init=False, compare=False, repr=False, default=())
    _mul: tuple = field(init=False, compare=False, repr=False, default=())
    _neg: tuple = field(init=False, compare=False, repr=False, default=())
    _inv: tuple = field(init=False, compare=False, repr=False, default=())

    def __post_init__(self) -> None:
        if self.mode not in (EQUAL_CHAR, MIXED_CHAR):
            raise SpecParseError(f"unknown ring mode {self.mode!r}")
        if not _is_prime(self.p):
            raise SpecParseError(f"p = {self.p} is not prime")
        if self.e < 1:
            raise SpecParseError("extension degree must be >= 1")
        if self.mode == MIXED_CHAR and self.e != 1:
            raise SpecParseError("mixed characteristic supports e = 1 only")
        if self.default_precision < 1:
            raise SpecParseError("default precision must be >= 1")
        q = self.p**self.e
        if q > _MAX_Q:
            raise SpecParseError(f"residue field of order {q} exceeds desk scale")
        modulus = self.modulus
        if self.mode == EQUAL_CHAR:
            if self.e == 1 and not modulus:
                modulus = (0, 1)  # F_p[t]/(t)
            if len(modulus) != self.e + 1 or modulus[-1] != 1:
                raise SpecParseError("modulus must be monic of degree e")
            if any(not 0 <= c < self.p for c in modulus):
                raise SpecParseError("modulus coefficients must lie in [0, p)")
            if self.e > 1 and not _poly_is_irreducible(modulus, self.p):
                raise SpecParseError("modulus is reducible over F_p")
            object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "q", q)
        if self.mode == EQUAL_CHAR:
            self._build_tables()

    def _build_tables(self) -> None:
        p, e, q = self.p, self.e, self.q

        def unpack(v: int) -> tuple[int, ...]:
            out = []
            for _ in range(e):
                out.append(v % p)
                v //= p
            return tuple(out)

        def pack(c: Sequence[int]) -> int:
            v = 0
            for x in reversed(c):
                v = v * p + x
            return v

        coeffs = [unpack(v) for v in range(q)]
        add = tuple(
            tuple(pack([(a + b) % p for a, b in zip(coeffs[i], coeffs[j])]) for j in range(q))
            for i in range(q)
        )
        neg = tuple(pack([(-a) % p for a in coeffs[i]]) for i in range(q))
        mul_rows = []
        for i in range(q):
            row = []
            for j in range(q):
                prod = _poly_mul(coeffs[i], coeffs[j], p)
                red = _poly_mod(prod, self.modulus, p)
                row.append(pack(red + (0,) * (e - len(red))))
            mul_rows.append(tuple(row))
        mul = tuple(mul_rows)
        inv = [0] * q
        for i in range(1, q):
            for j in range(1, q):
                if mul[i][j] == 1:
                    inv[i] = j
                    break
        object.__setattr__(self, "_add", add)
        object.__setattr__(self, "_mul", mul)
        object.__setattr__(self, "_neg", neg)
        object.__setattr__(self, "_inv", tuple(inv))

    # digit-level arithmetic used by RElem/TElem operations

    def digit_add(self, a: int, b: int) -> int:
        if self.mode == MIXED_CHAR:
            return (a + b) % self.p
        return self._add[a][b]

    def digit_mul(self, a: int, b: int) -> int:
        if self.mode == MIXED_CHAR:
            return (a * b) % self.p
        return self._mul[a][b]

    def digit_neg(self, a: int) -> int:
        if self.mode == MIXED_CHAR:
            return (-a) % self.p
        return self._neg[a]

    def digit_inv(self, a: int) -> int:
        if a == 0:
            raise NonUnitError("zero digit has no inverse")
        if self.mode == MIXED_CHAR:
            return pow(a, -1, self.p)
        return self._inv[a]

    def pack_fq(self, elem: FqElem) -> int:
        if len(elem.coeffs) != self.e:
            raise ValueError(f"expected {self.e} coefficients, got {len(elem.coeffs)}")
        if any(not 0 <= c < self.p for c in elem.coeffs):
            raise ValueError("coefficients must lie in [0, p)")
        v = 0
        for x in reversed(elem.coeffs):
            v = v * self.p + x
        return v

    def unpack_fq(self, v: int) -> FqElem:
        out = []
        for _ in range(self.e):
            out.append(v % self.p)
            v //= self.p
        return FqElem(tuple(out))


def fq_add(ctx: RingCtx, a: FqElem, b: FqElem) -> FqElem:
    return ctx.unpack_fq(ctx.digit_add(ctx.pack_fq(a), ctx.pack_fq(b)))


def fq_mul(ctx: RingCtx, a: FqElem, b: FqElem) -> FqElem:
    """Product in F_q = F_p[t]/(modulus)."""
    return ctx.unpack_fq(ctx.digit_mul(ctx.pack_fq(a), ctx.pack_fq(b)))


def fq_neg(ctx: RingCtx, a: FqElem) -> FqElem:
    return ctx.unpack_fq(ctx.digit_neg(ctx.pack_fq(a)))


def fq_inv(ctx: RingCtx, a: FqElem) -> FqElem:
    return ctx.unpack_fq(ctx.digit_inv(ctx.pack_fq(a)))


def ring_spec(ctx: RingCtx) -> str:
    """Render the canonical spec string for a context."""
    parts = [f"mode={ctx.mode}", f"p={ctx.p}", f"e={ctx.e}"]
    if ctx.mode == EQUAL_CHAR and ctx.e > 1:
        parts.append("poly=" + ",".join(str(c) for c in ctx.modulus))
    parts.append(f"prec={ctx.default_precision}")
    return ",".join(parts)


def parse_ring_spec(spec: str) -> RingCtx:
    """Parse ``mode=equal|mixed,p=...,e=...,poly=c0,...,ce,prec=N``."""
    tokens = [t.strip() for t in spec.split(",") if t.strip()]
    fields: dict[str, str] = {}
    key = None
    for tok in tokens:
        if "=" in tok:
            key, _, val = tok.partition("=")
            fields[key] = val
        elif key == "poly":
            fields["poly"] += "," + tok
        else:
            raise SpecParseError(f"stray token {tok!r} in ring spec")
    try:
        mode = fields["mode"]
        p = int(fields["p"])
    except KeyError as exc:
        raise SpecParseError(f"ring spec missing field {exc}") from exc
    e = int(fields.get("e", "1"))
    poly = tuple(int(c) for c in fields["poly"].split(",")) if "poly" in fields else ()
    prec = int(fields.get("prec", "8"))
    return RingCtx(mode=mode, p=p, e=e, modulus=poly, default_precision=prec)


# ---------------------------------------------------------------------------
# R


@dataclass(frozen=True)
class RElem:
    """Truncated ring element: digit i is the coefficient of pi^i."""

    digits: tuple[int, ...]

    @property
    def precision(self) -> int:
        return len(self.digits)


def r_from_digits(ctx: RingCtx, digits: Sequence[int]) -> RElem:
    if len(digits) < 1:
        raise ValueError("an element needs at least one digit")
    if any(not 0 <= d < ctx.q for d in digits):
        raise ValueError("digit out of range for this ring")
    return RElem(tuple(digits))


def r_from_int(ctx: RingCtx, n: int, precision: int | None = None) -> RElem:
    """Image of an integer: p-adic digits (mixed) or a constant digit (equal)."""
    prec = ctx.default_precision if precision is None else precision
    if prec < 1:
        raise ValueError("precision must be >= 1")
    if ctx.mode == MIXED_CHAR:
        return RElem(_int_to_digits(ctx, n, prec))
    return RElem((n % ctx.p,) + (0,) * (prec - 1))


def _int_to_digits(ctx: RingCtx, n: int, prec: int) -> tuple[int, ...]:
    n %= ctx.p**prec
    out = []
    for _ in range(prec):
        out.append(n % ctx.p)
        n //= ctx.p
    return tuple(out)


def _digits_to_int(digits: Sequence[int], p: int) -> int:
    v = 0
    for d in reversed(digits):
        v = v * p + d
    return v


def r_to_int(ctx: RingCtx, a: RElem) -> int:
    """Value of a mixed-characteristic element as an integer mod p^precision."""
    if ctx.mode != MIXED_CHAR:
        raise ValueError("integer value is only defined in mixed characteristic")
    return _digits_to_int(a.digits, ctx.p)


def r_zero(ctx: RingCtx, precision: int | None = None) -> RElem:
    prec = ctx.default_precision if precision is None else precision
    return RElem((0,) * prec)


def r_one(ctx: RingCtx, precision: int | None = None) -> RElem:
    prec = ctx.default_precision if precision is None else precision
    return RElem((1,) + (0,) * (prec - 1))


def r_pi_power(ctx: RingCtx, k: int, precision: int | None = None) -> RElem:
    """pi^k as an element; requires precision > k."""
    prec = ctx.default_precision if precision is None else precision
    if k >= prec:
        raise InsufficientPrecisionError(f"pi^{k} needs precision > {k}")
    return RElem((0,) * k + (1,) + (0,) * (prec - k - 1))


def r_truncate(a: RElem, precision: int) -> RElem:
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if precision > a.precision:
        raise InsufficientPrecisionError(
            f"cannot extend precision {a.precision} to {precision}"
        )
    return RElem(a.digits[:precision])


def r_zero_extend(a: RElem, precision: int) -> RElem:
    """Pick the canonical lift with zero high digits (a choice, not a law)."""
    if precision <= a.precision:
        return r_truncate(a, precision)
    return RElem(a.digits + (0,) * (precision - a.precision))


def r_shift_up(a: RElem, k: int) -> RElem:
    """Multiply by pi^k, gaining k digits of absolute precision."""
    if k == 0:
        return a
    return RElem((0,) * k + a.digits)


def r_shift_down(a: RElem, k: int) -> RElem:
    """Divide by pi^k, dropping the low k digits (caller must know val >= k)."""
    if k == 0:
        return a
    if k >= a.precision:
        raise InsufficientPrecisionError("shift exceeds precision")
    return RElem(a.digits[k:])


def r_add(ctx: RingCtx, a: RElem, b: RElem) -> RElem:
    prec = min(a.precision, b.precision)
    if ctx.mode == MIXED_CHAR:
        v = _digits_to_int(a.digits[:prec], ctx.p) + _digits_to_int(b.digits[:prec], ctx.p)
        return RElem(_int_to_digits(ctx, v, prec))
    add = ctx._add
    return RElem(tuple(add[a.digits[i]][b.digits[i]] for i in range(prec)))


def r_neg(ctx: RingCtx, a: RElem) -> RElem:
    if ctx.mode == MIXED_CHAR:
        v = -_digits_to_int(a.digits, ctx.p)
        return RElem(_int_to_digits(ctx, v, a.precision))
    neg = ctx._neg
    return RElem(tuple(neg[d] for d in a.digits))


def r_sub(ctx: RingCtx, a: RElem, b: RElem) -> RElem:
    return r_add(ctx, a, r_neg(ctx, b))


def r_mul(ctx: RingCtx, a: RElem, b: RElem) -> RElem:
    prec = min(a.precision, b.precision)
    if ctx.mode == MIXED_CHAR:
        v = _digits_to_int(a.digits[:prec], ctx.p) * _digits_to_int(b.digits[:prec], ctx.p)
        return RElem(_int_to_digits(ctx, v, prec))
    add, mul = ctx._add, ctx._mul
    out = [0] * prec
    for i in range(prec):
        ai = a.digits[i]
        if not ai:
            continue
        row = mul[ai]
        for j in range(prec - i):
            bj = b.digits[j]
            if bj:
                out[i + j] = add[out[i + j]][row[bj]]
    return RElem(tuple(out))


def r_valuation(ctx: RingCtx, a: RElem) -> tuple[int, bool]:
    """First nonzero digit index; (precision, False) when all digits vanish."""
    for i, d in enumerate(a.digits):
        if d:
            return i, True
    return a.precision, False


def r_is_zero(a: RElem) -> bool:
    """True when every stored digit vanishes (zero at this precision only)."""
    return all(d == 0 for d in a.digits)


def r_unit_inverse(ctx: RingCtx, a: RElem) -> RElem:
    """Inverse of a unit (valuation zero), exact at a's precision."""
    if not a.digits or a.digits[0] == 0:
        raise NonUnitError("element has positive valuation")
    prec = a.precision
    if ctx.mode == MIXED_CHAR:
        v = pow(_digits_to_int(a.digits, ctx.p), -1, ctx.p**prec)
        return RElem(_int_to_digits(ctx, v, prec))
    add, mul, neg = ctx._add, ctx._mul, ctx._neg
    inv0 = ctx.digit_inv(a.digits[0])
    out = [inv0] + [0] * (prec - 1)
    for k in range(1, prec):
        s = 0
        for i in range(1, k + 1):
            ai = a.digits[i]
            if ai:
                s = add[s][mul[ai][out[k - i]]]
        out[k] = mul[inv0][neg[s]]
    return RElem(tuple(out))


def r_eq(a: RElem, b: RElem, precision: int | None = None) -> bool:
    """Congruence at a precision (default: the operands' shared precision)."""
    prec = min(a.precision, b.precision) if precision is None else precision
    if prec > a.precision or prec > b.precision:
        raise InsufficientPrecisionError("comparison precision exceeds operands")
    return a.digits[:prec] == b.digits[:prec]


def r_elements(ctx: RingCtx, precision: int) -> Iterator[RElem]:
    """All residues mod pi^precision in lexicographic digit order."""
    for digits in itertools.product(range(ctx.q), repeat=precision):
        yield RElem(digits)


# ---------------------------------------------------------------------------
# K


@dataclass(frozen=True)
class KElem:
    """Fraction-field element: unit * pi^val_shift, or the exact zero."""

    is_zero: bool
    val_shift: int = 0
    unit_part: RElem | None = None


def k_zero() -> KElem:
    return KElem(is_zero=True)


def k_from_r(ctx: RingCtx, a: RElem) -> KElem:
    v, exact = r_valuation(ctx, a)
    if not exact:
        raise InsufficientPrecisionError(
            "all digits vanish; valuation is only known to be >= precision"
        )
    return KElem(is_zero=False, val_shift=v, unit_part=r_shift_down(a, v))


def k_mul(ctx: RingCtx, a: KElem, b: KElem) -> KElem:
    if a.is_zero or b.is_zero:
        return k_zero()
    return KElem(False, a.val_shift + b.val_shift, r_mul(ctx, a.unit_part, b.unit_part))


def k_inverse(ctx: RingCtx, a: KElem) -> KElem:
    if a.is_zero:
        raise ZeroDivisionError("zero has no inverse in K")
    return KElem(False, -a.val_shift, r_unit_inverse(ctx, a.unit_part))


def k_add(ctx: RingCtx, a: KElem, b: KElem) -> KElem:
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    shift = min(a.val_shift, b.val_shift)
    ra = r_shift_up(a.unit_part, a.val_shift - shift)
    rb = r_shift_up(b.unit_part, b.val_shift - shift)
    s = r_add(ctx, ra, rb)
    v, exact = r_valuation(ctx, s)
    if not exact:
        # cancellation beyond the carried digits: cannot certify exact zero
        raise InsufficientPrecisionError("sum cancels below the carried precision")
    return KElem(False, shift + v, r_shift_down(s, v))


def k_valuation(a: KElem) -> int | None:
    return None if a.is_zero else a.val_shift


def k_to_t(ctx: RingCtx, a: KElem) -> "TElem":
    """Class of a fraction-field element in the quotient T = K/R."""
    if a.is_zero or a.val_shift >= 0:
        return T_ZERO
    n = -a.val_shift
    if a.unit_part.precision < n:
        raise InsufficientPrecisionError("unit part too short for the pole order")
    return TElem(n, a.unit_part.digits[:n])


# ---------------------------------------------------------------------------
# T = K/R


@dataclass(frozen=True)
class TElem:
    """Element numerator/pi^n + R of the divisible quotient, in lowest terms."""

    n: int
    numerator: tuple[int, ...]

    def is_zero(self) -> bool:
        return self.n == 0


T_ZERO = TElem(0, ())


def t_from_fraction(ctx: RingCtx, a: RElem, n: int) -> TElem:
    """Canonical form of a/pi^n + R; strips common pi factors."""
    if n < 0:
        raise ValueError("level must be non-negative")
    if a.precision < n:
        raise InsufficientPrecisionError(
            f"numerator precision {a.precision} below level {n}"
        )
    digits = a.digits[:n]
    v = 0
    while v < n and digits[v] == 0:
        v += 1
    if v == n:
        return T_ZERO
    return TElem(n - v, digits[v:])


def t_add(ctx: RingCtx, s: TElem, t: TElem) -> TElem:
    if s.is_zero():
        return t
    if t.is_zero():
        return s
    n = max(s.n, t.n)
    a = r_shift_up(RElem(s.numerator), n - s.n)
    b = r_shift_up(RElem(t.numerator), n - t.n)
    return t_from_fraction(ctx, r_add(ctx, a, b), n)


def t_neg(ctx: RingCtx, t: TElem) -> TElem:
    if t.is_zero():
        return t
    return TElem(t.n, r_neg(ctx, RElem(t.numerator)).digits)


def t_scalar_mul(ctx: RingCtx, r: RElem, t: TElem) -> TElem:
    """r * t; the action only depends on r mod pi^(t.n)."""
    if t.is_zero():
        return t
    if r.precision < t.n:
        raise InsufficientPrecisionError(
            f"scalar precision {r.precision} below level {t.n}"
        )
    prod = r_mul(ctx, r_truncate(r, t.n), RElem(t.numerator[: t.n]))
    return t_from_fraction(ctx, prod, t.n)


def t_from_residue(ctx: RingCtx, digits: Sequence[int], n: int) -> TElem:
    """Canonical form of (digit vector)/pi^n + R."""
    if n == 0:
        return T_ZERO
    if len(digits) < n:
        digits = tuple(digits) + (0,) * (n - len(digits))
    return t_from_fraction(ctx, RElem(tuple(digits[:n])), n)


def t_elements(ctx: RingCtx, max_level: int) -> Iterator[TElem]:
    """All canonical elements of level <= max_level (q^max_level of them)."""
    yield T_ZERO
    for n in range(1, max_level + 1):
        for first in range(1, ctx.q):
            for rest in itertools.product(range(ctx.q), repeat=n - 1):
                yield TElem(n, (first,) + rest)
