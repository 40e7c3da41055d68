"""The dual functor Hom(-, T) in explicit coordinates.

A dual element of M = Prod_i R/(pi^e_i) x R^f is stored as the tuple of its
values on the standard generators: a residue b_i mod pi^e_i for each torsion
factor (the functional sends the generator to b_i/pi^e_i) and an exact
element of T for each free factor.  Evaluation, dual homs, the double-dual
map and constructive extension of functionals along submodule inclusions
are all computed in these coordinates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import (
    InconsistentLiftError,
    InsufficientPrecisionError,
    NotTorsionError,
)
from .modules import (
    HomMatrix,
    InvariantFactors,
    ModElem,
    elem_add,
    elem_scalar_mul,
    elem_zero,
    make_hom,
)
from .ring import (
    RElem,
    RingCtx,
    T_ZERO,
    TElem,
    r_add,
    r_is_zero,
    r_mul,
    r_one,
    r_shift_up,
    r_truncate,
    r_valuation,
    r_zero,
    r_zero_extend,
    t_add,
    t_from_fraction,
    t_scalar_mul,
)


@dataclass(frozen=True)
class DualModule:
    """Shape of Hom(M, T): same torsion exponents, one copy of T per free
    factor of the source."""

    source: InvariantFactors
    torsion_exps: tuple[int, ...]
    t_copies: int


@dataclass(frozen=True)
class DualElem:
    torsion_coords: tuple[RElem, ...] = ()
    t_coords: tuple[TElem, ...] = ()


@dataclass(frozen=True)
class TEndo:
    """Endomorphism of T: multiplication by a ring element."""

    scale: RElem


def dual_structure(m: InvariantFactors) -> DualModule:
    return DualModule(source=m, torsion_exps=m.torsion_exps, t_copies=m.free_rank)


def make_dual_elem(
    ctx: RingCtx,
    d: DualModule,
    torsion_coords: tuple[RElem, ...],
    t_coords: tuple[TElem, ...] = (),
) -> DualElem:
    if len(torsion_coords) != len(d.torsion_exps) or len(t_coords) != d.t_copies:
        raise ValueError("coordinate count does not match the dual shape")
    for coord, e in zip(torsion_coords, d.torsion_exps):
        if coord.precision != e:
            raise ValueError(f"torsion coordinate must be a residue mod pi^{e}")
    return DualElem(tuple(torsion_coords), tuple(t_coords))


def dual_zero(ctx: RingCtx, d: DualModule) -> DualElem:
    return DualElem(
        tuple(r_zero(ctx, e) for e in d.torsion_exps), (T_ZERO,) * d.t_copies
    )


def dual_add(ctx: RingCtx, d: DualModule, a: DualElem, b: DualElem) -> DualElem:
    tc = tuple(r_add(ctx, x, y) for x, y in zip(a.torsion_coords, b.torsion_coords))
    ts = tuple(t_add(ctx, x, y) for x, y in zip(a.t_coords, b.t_coords))
    return DualElem(tc, ts)


def dual_elements(ctx: RingCtx, m: InvariantFactors) -> Iterator[DualElem]:
    """All functionals on a finite module, coordinate order lexicographic."""
    if not m.is_finite():
        raise ValueError("only finite modules can be enumerated")
    pools = [
        [RElem(digits) for digits in itertools.product(range(ctx.q), repeat=e)]
        for e in m.torsion_exps
    ]
    for combo in itertools.product(*pools):
        yield DualElem(tuple(combo), ())


def eval_pairing(ctx: RingCtx, d: DualModule, phi: DualElem, m: ModElem) -> TElem:
    """phi(m) = sum_i (b_i m_i)/pi^e_i + sum_j m_j t_j, canonical in T."""
    if len(phi.torsion_coords) != len(m.torsion_coords) or len(phi.t_coords) != len(
        m.free_coords
    ):
        raise ValueError("functional and element have different shapes")
    acc = T_ZERO
    for b, x, e in zip(phi.torsion_coords, m.torsion_coords, d.torsion_exps):
        if not (any(b.digits) and any(x.digits)):
            continue
        acc = t_add(ctx, acc, t_from_fraction(ctx, r_mul(ctx, b, x), e))
    for t, x in zip(phi.t_coords, m.free_coords):
        if x.precision < t.n:
            raise InsufficientPrecisionError(
                "free coordinate precision below the functional's level"
            )
        acc = t_add(ctx, acc, t_scalar_mul(ctx, x, t))
    return acc


def i_x_forward(ctx: RingCtx, e: int, value: TElem) -> RElem:
    """The residue b mod pi^e with value = b/pi^e, for pi^e-torsion values."""
    if value.n > e:
        raise NotTorsionError(f"level {value.n} exceeds torsion exponent {e}")
    if value.is_zero():
        return r_zero(ctx, e)
    return r_shift_up(RElem(value.numerator), e - value.n)


def i_x_inverse(ctx: RingCtx, e: int, b: RElem) -> TElem:
    if b.precision != e:
        raise ValueError(f"residue must carry exactly {e} digits")
    return t_from_fraction(ctx, b, e)


def dual_hom(ctx: RingCtx, h: HomMatrix) -> HomMatrix:
    """Precomposition dual of a hom between finite modules, in residue
    coordinates: for all phi, m one has
    eval(dual_hom(h)(phi), m) = eval(phi, apply_hom(h, m))."""
    if h.domain.free_rank or h.codomain.free_rank:
        raise ValueError("dual homs are only materialized for finite modules")
    dom, cod = h.domain, h.codomain
    entries: list[list[RElem]] = []
    for j, b in enumerate(cod.torsion_exps):
        row = []
        for i, a in enumerate(dom.torsion_exps):
            ent = h.entries[i][j]
            if ent is None or r_is_zero(ent):
                row.append(r_zero(ctx, a))
            else:
                row.append(i_x_forward(ctx, a, t_from_fraction(ctx, ent, b)))
        entries.append(row)
    return make_hom(ctx, cod, dom, entries)


def check_inf_res_square(ctx: RingCtx, a: int, b: int, phi: DualElem) -> bool:
    """Both ways around the inflation/restriction square agree.

    phi is a functional on R/(pi^b); the paths compared are pulling back
    along inflation then taking the level-a residue, versus taking the
    level-b residue and reducing.
    """
    if a > b:
        raise ValueError("requires a <= b")
    if len(phi.torsion_coords) != 1 or phi.torsion_coords[0].precision != b:
        raise ValueError("phi must be a functional on a single factor R/(pi^b)")
    r = phi.torsion_coords[0]
    pulled = t_from_fraction(ctx, RElem(((0,) * (b - a) + r.digits)[:b]), b)
    path_pullback = i_x_forward(ctx, a, pulled)
    path_residue = r_truncate(i_x_forward(ctx, b, t_from_fraction(ctx, r, b)), a)
    return path_pullback == path_residue


def basis_functional(
    ctx: RingCtx, m: InvariantFactors, index: int, level: int | None = None
) -> DualElem:
    """Dual-basis functional: coordinate 1 on one torsion factor, or the
    value 1/pi^level on one free factor."""
    d = dual_structure(m)
    torsion = [r_zero(ctx, e) for e in m.torsion_exps]
    ts = [T_ZERO] * m.free_rank
    if index < m.n_torsion:
        torsion[index] = r_one(ctx, m.torsion_exps[index])
    else:
        if level is None or level < 1:
            raise ValueError("free-factor functionals need a positive level")
        ts[index - m.n_torsion] = TElem(level, (1,) + (0,) * (level - 1))
    return make_dual_elem(ctx, d, tuple(torsion), tuple(ts))


def double_dual_map(ctx: RingCtx, m: InvariantFactors, elem: ModElem) -> ModElem:
    """Coordinates of the evaluation functional phi -> phi(elem), read back
    through the standard identifications; equals elem on the nose."""
    d = dual_structure(m)
    out_torsion = []
    for i, e in enumerate(m.torsion_exps):
        value = eval_pairing(ctx, d, basis_functional(ctx, m, i), elem)
        out_torsion.append(i_x_forward(ctx, e, value))
    out_free = []
    for j in range(m.free_rank):
        level = elem.free_coords[j].precision
        probe = basis_functional(ctx, m, m.n_torsion + j, level=level)
        value = eval_pairing(ctx, d, probe, elem)
        out_free.append(i_x_forward(ctx, level, value))
    return ModElem(tuple(out_torsion), tuple(out_free))


def double_dual_raw(
    ctx: RingCtx, m: InvariantFactors, elem: ModElem
) -> Callable[[DualElem], TElem]:
    """The underlying functional on the dual, for oracle cross-checks."""
    d = dual_structure(m)
    return lambda phi: eval_pairing(ctx, d, phi, elem)


def t_endo_apply(ctx: RingCtx, phi: TEndo, t: TElem) -> TElem:
    if phi.scale.precision < t.n:
        raise InsufficientPrecisionError(
            f"endomorphism known mod pi^{phi.scale.precision}, needs level {t.n}"
        )
    return t_scalar_mul(ctx, phi.scale, t)


# ---------------------------------------------------------------------------
# constructive extension of functionals (divisibility of T)


def _coord_order_exp(ctx: RingCtx, coord: RElem, e: int) -> int:
    v, exact = r_valuation(ctx, coord)
    return e - v if exact else 0


def element_order_exp(ctx: RingCtx, m: InvariantFactors, g: ModElem) -> int:
    """Smallest k with pi^k g = 0 (finite modules)."""
    if g.free_coords:
        raise ValueError("order exponents only exist in finite modules")
    return max(
        (
            _coord_order_exp(ctx, c, e)
            for c, e in zip(g.torsion_coords, m.torsion_exps)
        ),
        default=0,
    )


def _scaled_pairs(
    ctx: RingCtx, m: InvariantFactors, g: ModElem, value: TElem, span: int
) -> list[tuple[ModElem, TElem]]:
    """(r*g, r*value) for every residue r mod pi^span."""
    top = max(m.torsion_exps, default=1)
    pairs = []
    for digits in itertools.product(range(ctx.q), repeat=span):
        r = r_zero_extend(RElem(digits), max(top, span, value.n, 1))
        pairs.append((elem_scalar_mul(ctx, m, r, g), t_scalar_mul(ctx, r, value)))
    return pairs


def _absorb_generator(
    ctx: RingCtx,
    m: InvariantFactors,
    table: dict[ModElem, TElem],
    g: ModElem,
    value: TElem,
) -> dict[ModElem, TElem]:
    """Extend a value table to the submodule generated by its domain and g,
    checking consistency on every representation."""
    o = element_order_exp(ctx, m, g)
    if value.n > o:
        raise InconsistentLiftError(
            f"value of level {value.n} on a generator killed by pi^{o}"
        )
    out = dict(table)
    for mg, vg in _scaled_pairs(ctx, m, g, value, o):
        for x, vx in table.items():
            key = elem_add(ctx, m, x, mg)
            val = t_add(ctx, vx, vg)
            seen = out.get(key)
            if seen is None:
                out[key] = val
            elif seen != val:
                raise InconsistentLiftError(
                    "prescribed values violate a relation among the generators"
                )
    return out


def span_with_values(
    ctx: RingCtx,
    m: InvariantFactors,
    gens: list[ModElem] | tuple[ModElem, ...],
    values: list[TElem] | tuple[TElem, ...],
) -> dict[ModElem, TElem]:
    """Value table of the functional determined by the generator values on
    the submodule they generate; raises when no such functional exists."""
    table: dict[ModElem, TElem] = {elem_zero(ctx, m): T_ZERO}
    for g, v in zip(gens, values):
        table = _absorb_generator(ctx, m, table, g, v)
    return table


def _basis_generator(ctx: RingCtx, m: InvariantFactors, index: int) -> ModElem:
    coords = [r_zero(ctx, e) for e in m.torsion_exps]
    coords[index] = r_one(ctx, m.torsion_exps[index])
    return ModElem(tuple(coords), ())


def extend_hom(
    ctx: RingCtx,
    m: InvariantFactors,
    n_gens: list[ModElem] | tuple[ModElem, ...],
    phi_values: list[TElem] | tuple[TElem, ...],
) -> DualElem:
    """Extend a functional from the submodule generated by n_gens to all of
    the finite module m.

    Each new standard generator g of order pi^k over the current domain gets
    the value num/pi^(n+k) when pi^k g already has the value num/pi^n: the
    preimage under multiplication by pi^k with the smallest digit vector at
    the lowest possible level (the zero value lifts to zero).
    """
    if not m.is_finite():
        raise ValueError("extension target must be a finite module")
    if len(n_gens) != len(phi_values):
        raise ValueError("one value per generator required")
    table = span_with_values(ctx, m, n_gens, phi_values)
    n_table = dict(table)
    for i in range(m.n_torsion):
        g = _basis_generator(ctx, m, i)
        if g in table:
            continue
        power = g
        k = 0
        top = max(m.torsion_exps)
        while power not in table:
            k += 1
            pi_k = RElem((0,) * k + (1,) + (0,) * max(0, top - k))
            power = elem_scalar_mul(ctx, m, r_truncate(pi_k, max(top, 1)), g)
            assert k <= m.torsion_exps[i], "generator order exhausted"
        w = table[power]
        if w.is_zero():
            lift = T_ZERO
        else:
            lift = TElem(w.n + k, w.numerator + (0,) * k)
        table = _absorb_generator(ctx, m, table, g, lift)
    coords = tuple(
        i_x_forward(ctx, e, table[_basis_generator(ctx, m, i)])
        for i, e in enumerate(m.torsion_exps)
    )
    psi = make_dual_elem(ctx, dual_structure(m), coords)
    for g, v in n_table.items():
        assert eval_pairing(ctx, dual_structure(m), psi, g) == v
    return psi
