"""Circle-valued functionals and the equal-characteristic bridge.

Continuous additive maps from F_q[[x]] into R/Z are finitely supported
coefficient sequences once each graded piece F_q * x^n is identified with
F_q.  That identification is pinned down here by one fixed base functional
(read off the t^(e-1) coefficient and divide by p); every functional on F_q
is a unique F_q-multiple of it, recovered by solving an e x e linear system
over F_p.  The resulting sequence-to-quotient-field map and its inverse,
the transport of module functionals to plain additive circle maps, the
p-power torsion count in mixed characteristic, and the discrete complex
quadratic rings round out the module.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .duality import DualElem, dual_structure, eval_pairing
from .errors import InsufficientPrecisionError
from .modules import InvariantFactors, ModElem, module_elements
from .ring import (
    EQUAL_CHAR,
    MIXED_CHAR,
    FqElem,
    RElem,
    RingCtx,
    T_ZERO,
    TElem,
    t_elements,
)


# ---------------------------------------------------------------------------
# p-power torsion values in R/Z


@dataclass(frozen=True)
class CircleElem:
    """numerator / p^k + Z in lowest terms (k = 0 encodes zero)."""

    k: int
    numerator: int


CIRCLE_ZERO = CircleElem(0, 0)


def circle_make(ctx: RingCtx, numerator: int, k: int) -> CircleElem:
    p = ctx.p
    num = numerator % p**k if k > 0 else 0
    while k > 0 and num % p == 0:
        num //= p
        k -= 1
    if k == 0:
        return CIRCLE_ZERO
    return CircleElem(k, num)


def circle_add(ctx: RingCtx, u: CircleElem, v: CircleElem) -> CircleElem:
    p = ctx.p
    k = max(u.k, v.k)
    num = u.numerator * p ** (k - u.k) + v.numerator * p ** (k - v.k)
    return circle_make(ctx, num, k)


def circle_scalar(ctx: RingCtx, n: int, u: CircleElem) -> CircleElem:
    return circle_make(ctx, n * u.numerator, u.k)


# ---------------------------------------------------------------------------
# the residue-field identification


def _fq_power_coeffs(ctx: RingCtx, upto: int) -> list[int]:
    """Packed values of t^0, ..., t^upto in F_q."""
    powers = [1]
    if upto >= 1:
        t_packed = ctx.pack_fq(FqElem((0, 1) + (0,) * (ctx.e - 2))) if ctx.e > 1 else 0
        for _ in range(upto):
            powers.append(ctx.digit_mul(powers[-1], t_packed))
    return powers


def _top_coeff(ctx: RingCtx, packed: int) -> int:
    return ctx.unpack_fq(packed).coeffs[ctx.e - 1]


def _solve_mod_p(rows: list[list[int]], rhs: list[int], p: int) -> list[int]:
    """Gaussian elimination over F_p; the pairing matrix is invertible."""
    n = len(rows)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] % p)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = pow(aug[col][col], -1, p)
        aug[col] = [x * inv % p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] % p:
                f = aug[r][col]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def base_functional_values(ctx: RingCtx) -> tuple[CircleElem, ...]:
    """Values of the chosen base functional on the basis 1, t, ..., t^(e-1)."""
    powers = _fq_power_coeffs(ctx, ctx.e - 1)
    return tuple(
        circle_make(ctx, _top_coeff(ctx, pw), 1) for pw in powers
    )


def i_iso(ctx: RingCtx, psi_values: tuple[CircleElem, ...] | list[CircleElem]) -> FqElem:
    """The field element c with psi = c * (base functional).

    psi_values are the values of psi on the F_p-basis of F_q; each must lie
    in (1/p)Z/Z.  F_q-linearity holds by construction: scaling psi by c'
    multiplies the recovered element by c'.
    """
    if len(psi_values) != ctx.e:
        raise ValueError(f"expected {ctx.e} basis values")
    rhs = []
    for v in psi_values:
        if v.k > 1:
            raise ValueError("value outside (1/p)Z/Z")
        rhs.append(v.numerator if v.k == 1 else 0)
    powers = _fq_power_coeffs(ctx, 2 * ctx.e - 2)
    # row j, unknown i: top coefficient of t^(i+j)
    rows = [
        [_top_coeff(ctx, powers[i + j]) for i in range(ctx.e)] for j in range(ctx.e)
    ]
    coeffs = _solve_mod_p(rows, rhs, ctx.p)
    return FqElem(tuple(coeffs))


def i_inv(ctx: RingCtx, c: FqElem) -> tuple[CircleElem, ...]:
    """Basis values of c * (base functional); inverse of i_iso."""
    packed = ctx.pack_fq(c)
    powers = _fq_power_coeffs(ctx, ctx.e - 1)
    return tuple(
        circle_make(ctx, _top_coeff(ctx, ctx.digit_mul(packed, pw)), 1)
        for pw in powers
    )


# ---------------------------------------------------------------------------
# finitely supported functionals on F_q[[x]] and their quotient-field image


@dataclass(frozen=True)
class ZDualFunctional:
    """Coefficient sequence c_0, c_1, ... (packed residue-field values,
    trailing zeros trimmed); c_n identifies the restriction to F_q * x^n."""

    coeffs: tuple[int, ...]

    @property
    def support_bound(self) -> int:
        return len(self.coeffs)


ZDF_ZERO = ZDualFunctional(())


def zdf_make(ctx: RingCtx, coeffs) -> ZDualFunctional:
    vals = list(coeffs)
    if any(not 0 <= c < ctx.q for c in vals):
        raise ValueError("coefficient out of range for this residue field")
    while vals and vals[-1] == 0:
        vals.pop()
    return ZDualFunctional(tuple(vals))


def zdf_add(ctx: RingCtx, a: ZDualFunctional, b: ZDualFunctional) -> ZDualFunctional:
    n = max(len(a.coeffs), len(b.coeffs))
    out = []
    for i in range(n):
        x = a.coeffs[i] if i < len(a.coeffs) else 0
        y = b.coeffs[i] if i < len(b.coeffs) else 0
        out.append(ctx.digit_add(x, y))
    return zdf_make(ctx, out)


def zdf_scalar(ctx: RingCtx, r: RElem, phi: ZDualFunctional) -> ZDualFunctional:
    """(r . phi)(a) = phi(r a): coefficient n becomes sum_k r_k c_(n+k)."""
    _require_equal_char(ctx, "scalar action on power-series functionals")
    if r.precision < len(phi.coeffs):
        raise InsufficientPrecisionError(
            "scalar must be known through the functional's support"
        )
    out = []
    for n in range(len(phi.coeffs)):
        acc = 0
        for k in range(len(phi.coeffs) - n):
            h = r.digits[k] if k < r.precision else 0
            if h:
                acc = ctx.digit_add(acc, ctx.digit_mul(h, phi.coeffs[n + k]))
        out.append(acc)
    return zdf_make(ctx, out)


def _require_equal_char(ctx: RingCtx, what: str) -> None:
    if ctx.mode != EQUAL_CHAR:
        raise ValueError(f"{what} is only defined in equal characteristic")


def ell(ctx: RingCtx, phi: ZDualFunctional) -> TElem:
    """sum_n c_n x^(-(n+1)) as a canonical element of the quotient field mod
    the power-series ring."""
    _require_equal_char(ctx, "the functional-to-quotient map")
    if not phi.coeffs:
        return T_ZERO
    return TElem(len(phi.coeffs), tuple(reversed(phi.coeffs)))


def ell_inv(ctx: RingCtx, t: TElem) -> ZDualFunctional:
    _require_equal_char(ctx, "the functional-to-quotient map")
    if t.is_zero():
        return ZDF_ZERO
    return ZDualFunctional(tuple(reversed(t.numerator)))


def zdf_elements(ctx: RingCtx, max_support: int):
    """All functionals with support below the bound."""
    for coeffs in itertools.product(range(ctx.q), repeat=max_support):
        yield zdf_make(ctx, coeffs)


# ---------------------------------------------------------------------------
# adjoint transport for finite modules


def circle_value_of(ctx: RingCtx, t: TElem) -> CircleElem:
    """Value at 1 of the additive circle map corresponding to t."""
    phi = ell_inv(ctx, t)
    c0 = phi.coeffs[0] if phi.coeffs else 0
    return i_inv(ctx, ctx.unpack_fq(c0))[0]


def adjoint_transport(
    ctx: RingCtx, m: InvariantFactors, psi: DualElem
) -> dict[ModElem, CircleElem]:
    """Turn a module functional into an additive map to the circle, tabulated
    on every element; transporting all functionals is a bijection onto the
    full additive dual."""
    _require_equal_char(ctx, "adjoint transport")
    if not m.is_finite():
        raise ValueError("transport tables require a finite module")
    d = dual_structure(m)
    table = {}
    for elem in module_elements(ctx, m):
        table[elem] = circle_value_of(ctx, eval_pairing(ctx, d, psi, elem))
    return table


# ---------------------------------------------------------------------------
# p-power torsion count (mixed characteristic)


def torsion_count(ctx: RingCtx, n: int) -> tuple[int, int]:
    """Enumerated number of quotient elements of level <= n versus p^n."""
    if ctx.mode != MIXED_CHAR:
        raise ValueError("the torsion-count identity is stated for Z_p")
    if n < 0:
        raise ValueError("level must be non-negative")
    count = sum(1 for _ in t_elements(ctx, n))
    expected = ctx.p**n
    assert count == expected, f"torsion count {count} != {expected}"
    return count, expected


# ---------------------------------------------------------------------------
# discrete complex quadratic rings


@dataclass(frozen=True)
class ZDeltaRing:
    """Z[delta] with delta^2 = b*delta + a; discrete in C iff a < 0 and
    b^2 + 4a < 0."""

    a: int
    b: int


def zdelta_validate(a: int, b: int) -> ZDeltaRing:
    if a >= 0:
        raise ValueError(f"rejected: a = {a} must be a negative integer")
    disc = b * b + 4 * a
    if disc >= 0:
        raise ValueError(
            f"rejected: discriminant b^2+4a = {disc} must be strictly negative"
        )
    return ZDeltaRing(a, b)


def zd_add(ring: ZDeltaRing, z: tuple[int, int], w: tuple[int, int]) -> tuple[int, int]:
    return (z[0] + w[0], z[1] + w[1])


def zd_mul(ring: ZDeltaRing, z: tuple[int, int], w: tuple[int, int]) -> tuple[int, int]:
    """(x + y*delta)(u + v*delta) = (xu + yva) + (xv + yu + yvb)*delta."""
    x, y = z
    u, v = w
    return (x * u + y * v * ring.a, x * v + y * u + y * v * ring.b)


def zd_norm(ring: ZDeltaRing, z: tuple[int, int]) -> int:
    """Squared complex absolute value: x^2 + b*x*y - a*y^2."""
    x, y = z
    return x * x + ring.b * x * y - ring.a * y * y


def zd_delta_complex(ring: ZDeltaRing) -> complex:
    return complex(ring.b / 2, (-(ring.b * ring.b + 4 * ring.a)) ** 0.5 / 2)
