"""Independent brute-force enumerators used as ground truth.

Everything here recomputes structure from first principles with its own
digit arithmetic -- deliberately sharing no code path with the structural
modules it cross-checks.  Residues mod pi^k are plain integers in mixed
characteristic and digit tuples (packed residue-field values) in equal
characteristic; residue-field products are reduced by schoolbook long
division by the modulus on every call.  Elements of the divisible quotient
are held at a fixed level L as residues a mod pi^L standing for a/pi^L,
never in the structural canonical form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, InfiniteCokernelError
from .modules import InvariantFactors, ModElem, PresMatrix
from .ring import MIXED_CHAR, RElem, RingCtx


@dataclass(frozen=True)
class EnumBudget:
    max_elements: int = 65536
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_elements < 1:
            raise ValueError("budget must allow at least one element")


DEFAULT_BUDGET = EnumBudget()


# ---------------------------------------------------------------------------
# oracle-side residue arithmetic


def _fq_mul_raw(ctx: RingCtx, a: int, b: int) -> int:
    """Residue-field product recomputed from the modulus by long division."""
    p, e = ctx.p, ctx.e
    if e == 1:
        return a * b % p
    ca = [(a // p**i) % p for i in range(e)]
    cb = [(b // p**i) % p for i in range(e)]
    prod = [0] * (2 * e - 1)
    for i in range(e):
        for j in range(e):
            prod[i + j] = (prod[i + j] + ca[i] * cb[j]) % p
    mod = ctx.modulus
    for top in range(2 * e - 2, e - 1, -1):
        lead = prod[top]
        if lead:
            prod[top] = 0
            for k in range(e):
                prod[top - e + k] = (prod[top - e + k] - lead * mod[k]) % p
    return sum(prod[i] * p**i for i in range(e))


def _fq_add_raw(ctx: RingCtx, a: int, b: int) -> int:
    p, e = ctx.p, ctx.e
    if e == 1:
        return (a + b) % p
    return sum((((a // p**i) + (b // p**i)) % p) * p**i for i in range(e))


def _res_zero(ctx: RingCtx, k: int):
    return 0 if ctx.mode == MIXED_CHAR else (0,) * k


def _res_add(ctx: RingCtx, k: int, a, b):
    if ctx.mode == MIXED_CHAR:
        return (a + b) % ctx.p**k
    return tuple(_fq_add_raw(ctx, x, y) for x, y in zip(a, b))


def _res_scalar(ctx: RingCtx, k: int, c, a):
    """Multiply a residue by a scalar residue (same truncation level)."""
    if ctx.mode == MIXED_CHAR:
        return c * a % ctx.p**k
    out = [0] * k
    for i, ci in enumerate(c):
        if ci:
            for j in range(k - i):
                if a[j]:
                    out[i + j] = _fq_add_raw(ctx, out[i + j], _fq_mul_raw(ctx, ci, a[j]))
    return tuple(out)


def _res_valuation(ctx: RingCtx, k: int, a) -> int:
    if ctx.mode == MIXED_CHAR:
        if a == 0:
            return k
        v = 0
        while a % ctx.p == 0:
            a //= ctx.p
            v += 1
        return v
    for i, d in enumerate(a):
        if d:
            return i
    return k


def _all_residues(ctx: RingCtx, k: int):
    if ctx.mode == MIXED_CHAR:
        return range(ctx.p**k)
    return itertools.product(range(ctx.q), repeat=k)


def relem_of_residue(ctx: RingCtx, k: int, a) -> RElem:
    """Structural view of an oracle-side residue (boundary conversion only)."""
    if ctx.mode == MIXED_CHAR:
        return RElem(tuple((a // ctx.p**i) % ctx.p for i in range(k)))
    return RElem(tuple(a))


def residue_of_relem(ctx: RingCtx, r: RElem):
    if ctx.mode == MIXED_CHAR:
        return sum(d * ctx.p**i for i, d in enumerate(r.digits))
    return tuple(r.digits)


# ---------------------------------------------------------------------------
# element and hom enumeration


def enum_elements(
    ctx: RingCtx, m: InvariantFactors, budget: EnumBudget = DEFAULT_BUDGET
) -> list[ModElem]:
    """Every element of a finite module, lexicographic in the concatenated
    digit vector (leftmost digit most significant)."""
    if not m.is_finite():
        raise ValueError("enumeration requires a finite module")
    size = ctx.q ** sum(m.torsion_exps)
    if size > budget.max_elements:
        raise BudgetExceededError(f"{size} elements exceed the budget")
    total = sum(m.torsion_exps)
    out = []
    for digits in itertools.product(range(ctx.q), repeat=total):
        coords = []
        pos = 0
        for e in m.torsion_exps:
            coords.append(RElem(digits[pos : pos + e]))
            pos += e
        out.append(ModElem(tuple(coords), ()))
    return out


@dataclass(frozen=True)
class OracleHom:
    """R-linear map recorded by generator images a_i/pi^level."""

    level: int
    images: tuple


def enum_r_homs(
    ctx: RingCtx,
    m: InvariantFactors,
    level: int,
    budget: EnumBudget = DEFAULT_BUDGET,
) -> list[OracleHom]:
    """Every linear map into the level-L torsion of the divisible quotient,
    as image tuples constrained by the generator orders."""
    if not m.is_finite():
        raise ValueError("enumeration requires a finite module")
    if m.torsion_exps and level < max(m.torsion_exps):
        raise ValueError("level must dominate every exponent")
    size = ctx.q ** sum(m.torsion_exps)
    if size > budget.max_elements:
        raise BudgetExceededError(f"{size} maps exceed the budget")
    pools = []
    for e in m.torsion_exps:
        # images of a generator of order pi^e: residues with val >= level - e
        pool = [
            a for a in _all_residues(ctx, level)
            if _res_valuation(ctx, level, a) >= level - e
        ]
        pools.append(pool)
    return [OracleHom(level, combo) for combo in itertools.product(*pools)]


def oracle_hom_apply(ctx: RingCtx, m: InvariantFactors, h: OracleHom, elem: ModElem):
    """h(elem) as a residue mod pi^level (meaning residue/pi^level)."""
    acc = _res_zero(ctx, h.level)
    for coord, img in zip(elem.torsion_coords, h.images):
        c = _pad(ctx, residue_of_relem(ctx, coord), h.level)
        acc = _res_add(ctx, h.level, acc, _res_scalar(ctx, h.level, c, img))
    return acc


def _pad(ctx: RingCtx, c, k: int):
    if ctx.mode == MIXED_CHAR:
        return c
    return tuple(c)[:k] + (0,) * max(0, k - len(c))


def oracle_hom_is_linear(
    ctx: RingCtx, m: InvariantFactors, h: OracleHom, samples: list[ModElem]
) -> bool:
    """Pointwise additivity and scalar compatibility on the given elements."""
    from .modules import elem_add, elem_scalar_mul
    from .ring import r_zero_extend

    top = max(m.torsion_exps, default=1)
    for a in samples:
        for b in samples:
            lhs = oracle_hom_apply(ctx, m, h, elem_add(ctx, m, a, b))
            rhs = _res_add(
                ctx,
                h.level,
                oracle_hom_apply(ctx, m, h, a),
                oracle_hom_apply(ctx, m, h, b),
            )
            if lhs != rhs:
                return False
    for digits in itertools.islice(itertools.product(range(ctx.q), repeat=top), 8):
        r = RElem(digits)
        scaled = _pad(ctx, residue_of_relem(ctx, r_zero_extend(r, h.level)), h.level)
        for a in samples:
            lhs = oracle_hom_apply(
                ctx, m, h, elem_scalar_mul(ctx, m, r_zero_extend(r, top), a)
            )
            rhs = _res_scalar(ctx, h.level, scaled, oracle_hom_apply(ctx, m, h, a))
            if lhs != rhs:
                return False
    return True


def enum_z_homs(
    ctx: RingCtx, m: InvariantFactors, budget: EnumBudget = DEFAULT_BUDGET
):
    """All additive maps into the circle with values in (1/p)Z/Z, tabulated
    as value vectors over enum_elements order.  Count equals the module
    size."""
    if ctx.mode == MIXED_CHAR:
        raise ValueError("additive duals are enumerated in equal characteristic")
    if not m.is_finite():
        raise ValueError("enumeration requires a finite module")
    size = ctx.q ** sum(m.torsion_exps)
    if size > budget.max_elements:
        raise BudgetExceededError(f"{size} maps exceed the budget")
    p, e = ctx.p, ctx.e
    elems = enum_elements(ctx, m, budget)
    # F_p-coordinates of an element: one slot per (component, digit, field coeff)
    def fp_coords(elem: ModElem) -> tuple[int, ...]:
        out = []
        for coord in elem.torsion_coords:
            for packed in coord.digits:
                for i in range(e):
                    out.append((packed // p**i) % p)
        return tuple(out)

    dim = sum(m.torsion_exps) * e
    tables = []
    for choices in itertools.product(range(p), repeat=dim):
        values = []
        for elem in elems:
            total = sum(c * x for c, x in zip(fp_coords(elem), choices)) % p
            values.append((1, total) if total else (0, 0))
        tables.append(tuple(values))
    return tables


# ---------------------------------------------------------------------------
# brute-force cokernels


def _lift_entry_int(ctx: RingCtx, r: RElem) -> int:
    return sum(d * ctx.p**i for i, d in enumerate(r.digits))


def _lift_entry_poly(ctx: RingCtx, r: RElem) -> tuple[int, ...]:
    digits = list(r.digits)
    while digits and digits[-1] == 0:
        digits.pop()
    return tuple(digits)


def _poly_rank(ctx: RingCtx, rows: list[list[tuple[int, ...]]], ncols: int) -> int:
    """Rank over the fraction field F_q(x) by division-free elimination."""

    def pmul(a, b):
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] = _res_add(ctx, 1, (out[i + j],), (_fq_mul_raw(ctx, ai, bj),))[0]
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def psub(a, b):
        n = max(len(a), len(b))
        p, e = ctx.p, ctx.e
        out = []
        for i in range(n):
            x = a[i] if i < len(a) else 0
            y = b[i] if i < len(b) else 0
            acc = 0
            for d in range(e):
                acc += (((x // p**d) - (y // p**d)) % p) * p**d
            out.append(acc)
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    work = [row[:] for row in rows]
    rank = 0
    for col in range(ncols):
        pivot_row = next(
            (r for r in range(rank, len(work)) if work[r][col]), None
        )
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        piv = work[rank][col]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                fac = work[r][col]
                work[r] = [
                    psub(pmul(piv, work[r][j]), pmul(fac, work[rank][j]))
                    for j in range(ncols)
                ]
        rank += 1
    return rank


def _int_rank(rows: list[list[int]], ncols: int) -> int:
    work = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    for col in range(ncols):
        pivot_row = next((r for r in range(rank, len(work)) if work[r][col]), None)
        if pivot_row is None:
            continue
        work[rank], work[pivot_row] = work[pivot_row], work[rank]
        piv = work[rank][col]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                fac = work[r][col] / piv
                work[r] = [x - fac * y for x, y in zip(work[r], work[rank])]
        rank += 1
    return rank


def _span_closure(ctx: RingCtx, gens: list, k: int, ncols: int, cap: int) -> set:
    """Additive closure of the generators inside (R/pi^k)^ncols."""
    zero = tuple(_res_zero(ctx, k) for _ in range(ncols))
    span = {zero}
    frontier = [zero]
    while frontier:
        base = frontier.pop()
        for g in gens:
            nxt = tuple(_res_add(ctx, k, x, y) for x, y in zip(base, g))
            if nxt not in span:
                if len(span) >= cap:
                    raise BudgetExceededError("row span exceeds the budget")
                span.add(nxt)
                frontier.append(nxt)
    return span


def cokernel_bruteforce(
    ctx: RingCtx, mat: PresMatrix, budget: EnumBudget = DEFAULT_BUDGET
) -> tuple[int, tuple[int, ...]]:
    """Cokernel size and the multiset of element-order exponents, computed by
    enumerating the row span at increasing truncation levels until the
    torsion profile stabilizes below the level.

    The count of pi^j-torsion cosets falls out of the span alone:
    it is #(span with all coordinates divisible by pi^j) * q^(j*ncols)
    divided by the span size.
    """
    nc = mat.ncols
    if ctx.mode == MIXED_CHAR:
        lifted = [[_lift_entry_int(ctx, ent) for ent in row] for row in mat.entries]
        rank = _int_rank(lifted, nc)
    else:
        lifted = [[_lift_entry_poly(ctx, ent) for ent in row] for row in mat.entries]
        rank = _poly_rank(ctx, lifted, nc)
    if rank < nc:
        raise InfiniteCokernelError("column rank below the generator count")
    level = 2
    while True:
        if level > 64:
            raise BudgetExceededError("torsion profile fails to stabilize")
        gens = _matrix_row_generators(ctx, lifted, level, nc)
        span = _span_closure(ctx, gens, level, nc, budget.max_elements)
        ambient = ctx.q ** (level * nc)
        count = ambient // len(span)
        tau = []
        for j in range(level + 1):
            divisible = sum(
                1
                for s in span
                if all(_res_valuation(ctx, level, x) >= j for x in s)
            )
            tau.append(divisible * ctx.q ** (j * nc) // len(span))
        if tau[level - 1] == tau[level]:
            profile = [0]
            for j in range(1, level + 1):
                profile.extend([j] * (tau[j] - tau[j - 1]))
            return count, tuple(profile)
        level += 1


def _matrix_row_generators(ctx: RingCtx, lifted, level: int, nc: int) -> list:
    """Additive generators of the row span mod pi^level: the rows themselves
    in mixed characteristic, all basis-scalar multiples in equal
    characteristic."""
    if ctx.mode == MIXED_CHAR:
        mod = ctx.p**level
        return [tuple(x % mod for x in row) for row in lifted]
    gens = []
    for row in lifted:
        base = [tuple(ent[:level]) + (0,) * max(0, level - len(ent)) for ent in row]
        for coeff_pow in range(ctx.e):
            scalar_digit = ctx.p**coeff_pow  # packed value of t^coeff_pow
            for shift in range(level):
                scalar = (0,) * shift + (scalar_digit,) + (0,) * (level - shift - 1)
                gens.append(
                    tuple(_res_scalar(ctx, level, scalar, ent) for ent in base)
                )
    return gens


def order_profile_from_exponents(q: int, exps: tuple[int, ...]) -> tuple[int, ...]:
    """Element-order multiset implied by invariant factors (for comparisons)."""
    top = max(exps, default=0)
    tau = []
    for j in range(top + 1):
        t = 1
        for e in exps:
            t *= q ** min(e, j)
        tau.append(t)
    profile = [0]
    for j in range(1, top + 1):
        profile.extend([j] * (tau[j] - tau[j - 1]))
    return tuple(profile)
