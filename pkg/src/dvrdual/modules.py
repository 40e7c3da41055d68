"""Finitely generated modules in invariant-factor form.

A module is recorded as Prod_i R/(pi^e_i) x R^f via `InvariantFactors`.
Relation matrices (`PresMatrix`, rows are relations, columns generators)
are reduced by a Smith-normal-form pass that repeatedly selects a pivot of
minimal valuation, normalizes it to a power of the uniformizer, and clears
its row and column.  Because the pivot valuation is minimal, every
multiplier stays integral and the elimination arithmetic can be carried out
without losing digits: products are computed on the shifted-down factors
and shifted back up.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass

from .errors import InsufficientPrecisionError, SpecParseError
from .ring import (
    MIXED_CHAR,
    RElem,
    RingCtx,
    parse_ring_spec,
    r_add,
    r_eq,
    r_from_digits,
    r_from_int,
    r_is_zero,
    r_mul,
    r_neg,
    r_one,
    r_shift_down,
    r_shift_up,
    r_truncate,
    r_unit_inverse,
    r_valuation,
    r_zero,
    r_zero_extend,
)


@dataclass(frozen=True)
class InvariantFactors:
    """Sorted torsion exponents e_1 <= ... <= e_k plus a free rank."""

    torsion_exps: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self) -> None:
        if any(e < 1 for e in self.torsion_exps):
            raise ValueError("torsion exponents must be positive")
        if tuple(sorted(self.torsion_exps)) != self.torsion_exps:
            raise ValueError("torsion exponents must be non-decreasing")
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")

    @property
    def n_torsion(self) -> int:
        return len(self.torsion_exps)

    @property
    def n_components(self) -> int:
        return len(self.torsion_exps) + self.free_rank

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def size(self, q: int) -> int:
        """Number of elements (finite modules only)."""
        if not self.is_finite():
            raise ValueError("module has positive free rank")
        return q ** sum(self.torsion_exps)


def module_spec(m: InvariantFactors) -> str:
    return "[" + ",".join(str(e) for e in m.torsion_exps) + f"];f={m.free_rank}"


def parse_module_spec(spec: str) -> InvariantFactors:
    """Parse ``[e1,e2,...];f=<rank>`` (the ``;f=`` part may be omitted)."""
    text = spec.strip()
    if not text.startswith("["):
        raise SpecParseError(f"module spec must start with '[': {spec!r}")
    close = text.find("]")
    if close < 0:
        raise SpecParseError(f"unterminated exponent list in {spec!r}")
    body = text[1:close].strip()
    exps = tuple(int(tok) for tok in body.split(",") if tok.strip()) if body else ()
    rest = text[close + 1 :].strip()
    rank = 0
    if rest:
        if not rest.startswith(";f="):
            raise SpecParseError(f"expected ';f=<rank>' suffix in {spec!r}")
        rank = int(rest[3:])
    return InvariantFactors(tuple(sorted(exps)), rank)


@dataclass(frozen=True)
class ModElem:
    """Coordinates in the chosen decomposition: exact torsion residues plus
    precision-tracked free coordinates."""

    torsion_coords: tuple[RElem, ...] = ()
    free_coords: tuple[RElem, ...] = ()


def make_mod_elem(
    ctx: RingCtx,
    m: InvariantFactors,
    torsion_coords: tuple[RElem, ...],
    free_coords: tuple[RElem, ...] = (),
) -> ModElem:
    if len(torsion_coords) != m.n_torsion or len(free_coords) != m.free_rank:
        raise ValueError("coordinate count does not match the module shape")
    for coord, e in zip(torsion_coords, m.torsion_exps):
        if coord.precision != e:
            raise ValueError(f"torsion residue must carry exactly {e} digits")
    if free_coords:
        prec = free_coords[0].precision
        if any(c.precision != prec for c in free_coords):
            raise ValueError("free coordinates must share one precision")
    return ModElem(tuple(torsion_coords), tuple(free_coords))


def elem_from_ints(
    ctx: RingCtx,
    m: InvariantFactors,
    torsion: list[int] | tuple[int, ...] = (),
    free: list[int] | tuple[int, ...] = (),
    free_precision: int | None = None,
) -> ModElem:
    """Convenience constructor from integer values (reduced per component)."""
    prec = ctx.default_precision if free_precision is None else free_precision
    tc = tuple(r_from_int(ctx, v, e) for v, e in zip(torsion, m.torsion_exps))
    fc = tuple(r_from_int(ctx, v, prec) for v in free)
    return make_mod_elem(ctx, m, tc, fc)


def elem_zero(ctx: RingCtx, m: InvariantFactors, free_precision: int | None = None) -> ModElem:
    prec = ctx.default_precision if free_precision is None else free_precision
    return ModElem(
        tuple(r_zero(ctx, e) for e in m.torsion_exps),
        tuple(r_zero(ctx, prec) for _ in range(m.free_rank)),
    )


def elem_add(ctx: RingCtx, m: InvariantFactors, a: ModElem, b: ModElem) -> ModElem:
    if len(a.torsion_coords) != len(b.torsion_coords) or len(a.free_coords) != len(
        b.free_coords
    ):
        raise ValueError("shape mismatch")
    tc = tuple(r_add(ctx, x, y) for x, y in zip(a.torsion_coords, b.torsion_coords))
    fc = tuple(r_add(ctx, x, y) for x, y in zip(a.free_coords, b.free_coords))
    return ModElem(tc, fc)


def elem_neg(ctx: RingCtx, m: InvariantFactors, a: ModElem) -> ModElem:
    return ModElem(
        tuple(r_neg(ctx, x) for x in a.torsion_coords),
        tuple(r_neg(ctx, x) for x in a.free_coords),
    )


def elem_scalar_mul(ctx: RingCtx, m: InvariantFactors, r: RElem, a: ModElem) -> ModElem:
    if m.torsion_exps and r.precision < max(m.torsion_exps):
        raise InsufficientPrecisionError(
            "scalar precision below the largest torsion exponent"
        )
    tc = tuple(
        r_mul(ctx, r_truncate(r, e), x)
        for x, e in zip(a.torsion_coords, m.torsion_exps)
    )
    fc = tuple(r_mul(ctx, r, x) for x in a.free_coords)
    return ModElem(tc, fc)


def module_elements(ctx: RingCtx, m: InvariantFactors):
    """All elements of a finite module, lexicographic in concatenated digits."""
    return iter(module_element_list(ctx, m))


@functools.lru_cache(maxsize=64)
def module_element_list(ctx: RingCtx, m: InvariantFactors) -> tuple[ModElem, ...]:
    if not m.is_finite():
        raise ValueError("only finite modules can be enumerated")
    total = sum(m.torsion_exps)
    out = []
    for digits in itertools.product(range(ctx.q), repeat=total):
        coords = []
        pos = 0
        for e in m.torsion_exps:
            coords.append(RElem(digits[pos : pos + e]))
            pos += e
        out.append(ModElem(tuple(coords), ()))
    return tuple(out)


def elem_eq(a: ModElem, b: ModElem, free_precision: int | None = None) -> bool:
    """Exact on torsion residues, congruence on free coordinates."""
    if a.torsion_coords != b.torsion_coords:
        return False
    if len(a.free_coords) != len(b.free_coords):
        return False
    return all(
        r_eq(x, y, free_precision) for x, y in zip(a.free_coords, b.free_coords)
    )


# ---------------------------------------------------------------------------
# presentation matrices and Smith normal form


@dataclass(frozen=True)
class PresMatrix:
    """Relation matrix over R: rows are relations, columns are generators."""

    entries: tuple[tuple[RElem, ...], ...]
    ncols: int

    @property
    def nrows(self) -> int:
        return len(self.entries)

    @property
    def precision(self) -> int:
        return self.entries[0][0].precision if self.entries else 0


def pres_matrix(ctx: RingCtx, rows: list[list[RElem]], ncols: int | None = None) -> PresMatrix:
    if not rows:
        if ncols is None or ncols < 1:
            raise ValueError("a matrix without rows needs an explicit column count")
        return PresMatrix((), ncols)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("matrix must be rectangular")
    if width < 1:
        raise ValueError("matrix needs at least one column")
    prec = rows[0][0].precision
    for row in rows:
        for ent in row:
            if ent.precision != prec:
                raise ValueError("matrix entries must share one precision")
    if ncols is not None and ncols != width:
        raise ValueError("explicit column count disagrees with the rows")
    return PresMatrix(tuple(tuple(row) for row in rows), width)


def matrix_from_ints(
    ctx: RingCtx, rows: list[list[int]], precision: int | None = None, ncols: int | None = None
) -> PresMatrix:
    prec = ctx.default_precision if precision is None else precision
    return pres_matrix(
        ctx, [[r_from_int(ctx, v, prec) for v in row] for row in rows], ncols
    )


RowOp = tuple  # ("swap", i, j) | ("scale", i, unit) | ("addmul", i, j, coeff)


@dataclass(frozen=True)
class SnfResult:
    factors: InvariantFactors
    row_ops: tuple[RowOp, ...]
    col_ops: tuple[RowOp, ...]
    pivot_valuations: tuple[int, ...]


def _pivot_choice(candidates: list[tuple[int, int, int]]) -> tuple[int, int, int]:
    """Among exact-valuation entries pick minimal valuation, then lowest
    (row, col).  Kept as a hook so the verification suite can be shown to
    catch a corrupted rule."""
    return min(candidates)


def _sharp_mul(ctx: RingCtx, coeff: RElem, entry: RElem, v: int) -> RElem:
    """coeff * entry for val(entry) >= v, keeping entry's absolute precision.

    coeff is only known modulo pi^(P-v); multiplying the shifted-down entry
    and shifting back up regains the v digits that a plain product would
    drop.
    """
    return r_shift_up(r_mul(ctx, coeff, r_shift_down(entry, v)), v)


def snf(ctx: RingCtx, mat: PresMatrix) -> SnfResult:
    """Diagonalize the relation matrix; the cokernel of the result is read
    off as torsion exponents (nonzero pivot valuations) plus a free rank."""
    rows = [list(r) for r in mat.entries]
    nr, nc = mat.nrows, mat.ncols
    row_ops: list[RowOp] = []
    col_ops: list[RowOp] = []
    pivot_vals: list[int] = []
    k = 0
    while k < nr and k < nc:
        candidates = []
        for i in range(k, nr):
            for j in range(k, nc):
                v, exact = r_valuation(ctx, rows[i][j])
                if exact:
                    candidates.append((v, i, j))
        if not candidates:
            break  # remaining relations vanish at the carried precision
        v, pi, pj = _pivot_choice(candidates)
        if pi != k:
            rows[pi], rows[k] = rows[k], rows[pi]
            row_ops.append(("swap", k, pi))
        if pj != k:
            for row in rows:
                row[pj], row[k] = row[k], row[pj]
            col_ops.append(("swap", k, pj))
        unit = r_shift_down(rows[k][k], v)
        u_inv = r_unit_inverse(ctx, unit)
        rows[k] = [_sharp_mul(ctx, u_inv, ent, v) for ent in rows[k]]
        row_ops.append(("scale", k, u_inv))
        for i in range(nr):
            if i == k or r_is_zero(rows[i][k]):
                continue
            coeff = r_neg(ctx, r_shift_down(rows[i][k], v))
            rows[i] = [
                r_add(ctx, rows[i][j2], _sharp_mul(ctx, coeff, rows[k][j2], v))
                for j2 in range(nc)
            ]
            row_ops.append(("addmul", i, k, coeff))
        for j in range(nc):
            if j == k or r_is_zero(rows[k][j]):
                continue
            coeff = r_neg(ctx, r_shift_down(rows[k][j], v))
            for i2 in range(nr):
                rows[i2][j] = r_add(
                    ctx, rows[i2][j], _sharp_mul(ctx, coeff, rows[i2][k], v)
                )
            col_ops.append(("addmul", j, k, coeff))
        pivot_vals.append(v)
        k += 1
    factors = InvariantFactors(
        tuple(sorted(v for v in pivot_vals if v > 0)), nc - len(pivot_vals)
    )
    return SnfResult(factors, tuple(row_ops), tuple(col_ops), tuple(pivot_vals))


def apply_row_ops(ctx: RingCtx, ops: tuple[RowOp, ...], rows: list[list[RElem]]) -> None:
    for op in ops:
        if op[0] == "swap":
            _, i, j = op
            rows[i], rows[j] = rows[j], rows[i]
        elif op[0] == "scale":
            _, i, u = op
            rows[i] = [r_mul(ctx, u, x) for x in rows[i]]
        else:
            _, i, j, c = op
            rows[i] = [r_add(ctx, x, r_mul(ctx, c, y)) for x, y in zip(rows[i], rows[j])]


def apply_col_ops(ctx: RingCtx, ops: tuple[RowOp, ...], rows: list[list[RElem]]) -> None:
    for op in ops:
        if op[0] == "swap":
            _, i, j = op
            for row in rows:
                row[i], row[j] = row[j], row[i]
        elif op[0] == "scale":
            _, i, u = op
            for row in rows:
                row[i] = r_mul(ctx, u, row[i])
        else:
            _, i, j, c = op
            for row in rows:
                row[i] = r_add(ctx, row[i], r_mul(ctx, c, row[j]))


# ---------------------------------------------------------------------------
# inflation / restriction between principal quotients


def inf_map(ctx: RingCtx, a: int, b: int, r: RElem) -> RElem:
    """Injection R/(pi^a) -> R/(pi^b), r -> r * pi^(b-a)."""
    if a > b:
        raise ValueError("inflation requires a <= b")
    if r.precision != a:
        raise ValueError("residue must carry exactly a digits")
    return r_shift_up(r, b - a)


def res_map(ctx: RingCtx, b: int, a: int, r: RElem) -> RElem:
    """Surjection R/(pi^b) -> R/(pi^a) by reduction."""
    if not 1 <= a <= b:
        raise ValueError("restriction requires 1 <= a <= b")
    if r.precision != b:
        raise ValueError("residue must carry exactly b digits")
    return r_truncate(r, a)


# ---------------------------------------------------------------------------
# homomorphisms between modules in invariant-factor form


@dataclass(frozen=True)
class HomMatrix:
    """Entry (i, j) is the image of domain generator i in codomain component
    j, stored as the residue/element the generator maps to.  Torsion-to-free
    entries are None (necessarily zero)."""

    domain: InvariantFactors
    codomain: InvariantFactors
    entries: tuple[tuple[RElem | None, ...], ...]


def make_hom(
    ctx: RingCtx,
    domain: InvariantFactors,
    codomain: InvariantFactors,
    entries: list[list[RElem | None]],
) -> HomMatrix:
    if len(entries) != domain.n_components:
        raise ValueError("one entry row per domain component required")
    kd, kc = domain.n_torsion, codomain.n_torsion
    for i, row in enumerate(entries):
        if len(row) != codomain.n_components:
            raise ValueError("one entry column per codomain component required")
        dom_torsion = i < kd
        a = domain.torsion_exps[i] if dom_torsion else None
        for j, ent in enumerate(row):
            cod_torsion = j < kc
            if cod_torsion:
                b = codomain.torsion_exps[j]
                if ent is None:
                    continue
                if ent.precision != b:
                    raise ValueError(f"entry ({i},{j}) must be a residue mod pi^{b}")
                if dom_torsion and b > a:
                    v, exact = r_valuation(ctx, ent)
                    if exact and v < b - a:
                        raise ValueError(
                            f"entry ({i},{j}) violates the divisibility constraint"
                        )
            else:
                if dom_torsion:
                    if ent is not None and not r_is_zero(ent):
                        raise ValueError("torsion cannot map to a free component")
                elif ent is None:
                    raise ValueError("free-to-free entries must be explicit")
    return HomMatrix(domain, codomain, tuple(tuple(row) for row in entries))


def hom_zero(ctx: RingCtx, domain: InvariantFactors, codomain: InvariantFactors) -> HomMatrix:
    kc = codomain.n_torsion
    entries = [
        [
            r_zero(ctx, codomain.torsion_exps[j])
            if j < kc
            else (None if i < domain.n_torsion else r_zero(ctx, ctx.default_precision))
            for j in range(codomain.n_components)
        ]
        for i in range(domain.n_components)
    ]
    return make_hom(ctx, domain, codomain, entries)


def hom_identity(ctx: RingCtx, m: InvariantFactors) -> HomMatrix:
    h = hom_zero(ctx, m, m)
    entries = [list(row) for row in h.entries]
    for i in range(m.n_components):
        if i < m.n_torsion:
            entries[i][i] = r_one(ctx, m.torsion_exps[i])
        else:
            entries[i][i] = r_one(ctx, ctx.default_precision)
    return make_hom(ctx, m, m, entries)


def hom_space(
    ctx: RingCtx, domain: InvariantFactors, codomain: InvariantFactors
) -> tuple[InvariantFactors, tuple[HomMatrix, ...]]:
    """Invariant-factor shape of Hom(domain, codomain) plus a generator per
    cyclic/free summand.

    Component rules: Hom(R/pi^a, R/pi^b) is cyclic of exponent min(a, b)
    generated by 1 -> pi^max(0, b-a); Hom(R, R/pi^b) is cyclic of exponent b
    generated by 1 -> 1; Hom(R/pi^a, R) = 0; Hom(R, R) = R generated by the
    identity.
    """
    kd, kc = domain.n_torsion, codomain.n_torsion
    torsion_gens: list[tuple[int, HomMatrix]] = []
    free_gens: list[HomMatrix] = []
    for i in range(domain.n_components):
        for j in range(codomain.n_components):
            dom_torsion, cod_torsion = i < kd, j < kc
            if dom_torsion and not cod_torsion:
                continue
            base = hom_zero(ctx, domain, codomain)
            entries = [list(row) for row in base.entries]
            if cod_torsion:
                b = codomain.torsion_exps[j]
                if dom_torsion:
                    a = domain.torsion_exps[i]
                    exp = min(a, b)
                    gen_digits = (0,) * max(0, b - a) + (1,) + (0,) * (b - max(0, b - a) - 1)
                    entries[i][j] = r_from_digits(ctx, gen_digits)
                else:
                    exp = b
                    entries[i][j] = r_one(ctx, b)
                torsion_gens.append((exp, make_hom(ctx, domain, codomain, entries)))
            else:
                entries[i][j] = r_one(ctx, ctx.default_precision)
                free_gens.append(make_hom(ctx, domain, codomain, entries))
    torsion_gens.sort(key=lambda pair: pair[0])
    structure = InvariantFactors(
        tuple(exp for exp, _ in torsion_gens), len(free_gens)
    )
    return structure, tuple(g for _, g in torsion_gens) + tuple(free_gens)


def apply_hom(ctx: RingCtx, h: HomMatrix, m: ModElem) -> ModElem:
    """Evaluate the homomorphism; linear in m."""
    dom, cod = h.domain, h.codomain
    if len(m.torsion_coords) != dom.n_torsion or len(m.free_coords) != dom.free_rank:
        raise ValueError("element does not match the domain shape")
    kd, kc = dom.n_torsion, cod.n_torsion
    coords = list(m.torsion_coords) + list(m.free_coords)
    out_torsion = []
    for j in range(kc):
        b = cod.torsion_exps[j]
        acc = r_zero(ctx, b)
        for i in range(dom.n_components):
            ent = h.entries[i][j]
            if ent is None or r_is_zero(ent):
                continue
            x = coords[i]
            if i >= kd and x.precision < b:
                raise InsufficientPrecisionError(
                    "free coordinate precision below a torsion target"
                )
            lift = r_zero_extend(x, b)
            acc = r_add(ctx, acc, r_mul(ctx, ent, lift))
        out_torsion.append(acc)
    out_free = []
    for j in range(kc, cod.n_components):
        terms = []
        for i in range(kd, dom.n_components):
            ent = h.entries[i][j]
            terms.append(r_mul(ctx, ent, coords[i]))
        if terms:
            acc = terms[0]
            for t in terms[1:]:
                acc = r_add(ctx, acc, t)
        else:
            acc = r_zero(ctx, ctx.default_precision)
        out_free.append(acc)
    if out_free:
        prec = min(c.precision for c in out_free)
        out_free = [r_truncate(c, prec) for c in out_free]
    return ModElem(tuple(out_torsion), tuple(out_free))


# ---------------------------------------------------------------------------
# matrix files


def entry_to_relem(ctx: RingCtx, entry, precision: int) -> RElem:
    """Accepted entry forms: plain int (reduced; base-q digit expansion in
    equal characteristic), a 'd0.d1...' digit string, or a digit list."""
    if isinstance(entry, bool):
        raise SpecParseError("booleans are not matrix entries")
    if isinstance(entry, int):
        if ctx.mode == MIXED_CHAR:
            return r_from_int(ctx, entry, precision)
        n = entry % ctx.q**precision
        digits = []
        for _ in range(precision):
            digits.append(n % ctx.q)
            n //= ctx.q
        return r_from_digits(ctx, digits)
    if isinstance(entry, str):
        parts = [int(tok) for tok in entry.split(".")]
        return entry_to_relem(ctx, parts, precision)
    if isinstance(entry, (list, tuple)):
        digits = list(entry)
        if len(digits) > precision:
            digits = digits[:precision]
        digits += [0] * (precision - len(digits))
        return r_from_digits(ctx, digits)
    raise SpecParseError(f"unsupported matrix entry {entry!r}")


def load_matrix_json(
    text: str, ring_override: RingCtx | None = None
) -> tuple[RingCtx, PresMatrix]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"matrix file is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "rows" not in obj:
        raise SpecParseError("matrix file must be an object with a 'rows' field")
    ctx = ring_override
    if ctx is None:
        if "ring" not in obj:
            raise SpecParseError("matrix file needs a 'ring' field or an override")
        ctx = parse_ring_spec(obj["ring"])
    prec = ctx.default_precision
    rows = [
        [entry_to_relem(ctx, ent, prec) for ent in row] for row in obj["rows"]
    ]
    ncols = obj.get("cols")
    if not rows and ncols is None:
        raise SpecParseError("a matrix without rows needs a 'cols' field")
    return ctx, pres_matrix(ctx, rows, ncols)
