"""The verification suite: structural computations against brute force.

`run_suite` executes a fixed list of named property checks over a
configurable set of base rings and emits a deterministic report.  Every
source of randomness is a `random.Random` seeded from the configured seed
and the entry name, so identical configurations produce identical reports;
wall-clock data is confined to the report's single `timestamp` field.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .circle import (
    CircleElem,
    adjoint_transport,
    circle_add,
    circle_scalar,
    ell,
    ell_inv,
    i_inv,
    i_iso,
    torsion_count,
    zd_add,
    zd_delta_complex,
    zd_mul,
    zd_norm,
    zdelta_validate,
    zdf_elements,
    zdf_make,
    zdf_scalar,
)
from .duality import (
    DualElem,
    basis_functional,
    check_inf_res_square,
    dual_elements,
    dual_hom,
    dual_structure,
    double_dual_map,
    element_order_exp,
    eval_pairing,
    extend_hom,
    i_x_forward,
    span_with_values,
)
from .errors import (
    BudgetExceededError,
    InconsistentLiftError,
    InfiniteCokernelError,
)
from .modules import (
    InvariantFactors,
    ModElem,
    apply_col_ops,
    apply_hom,
    apply_row_ops,
    elem_add,
    elem_eq,
    elem_scalar_mul,
    hom_space,
    inf_map,
    make_hom,
    module_elements,
    module_spec,
    pres_matrix,
    res_map,
    snf,
)
from .oracle import (
    EnumBudget,
    cokernel_bruteforce,
    enum_elements,
    enum_r_homs,
    enum_z_homs,
    order_profile_from_exponents,
    relem_of_residue,
)
from .ring import (
    EQUAL_CHAR,
    MIXED_CHAR,
    RElem,
    RingCtx,
    T_ZERO,
    fq_mul,
    parse_ring_spec,
    r_add,
    r_from_digits,
    r_mul,
    r_one,
    r_unit_inverse,
    ring_spec,
    t_add,
    t_elements,
    t_from_fraction,
    t_scalar_mul,
)

DEFAULT_RING_SPECS = (
    "mode=mixed,p=2,e=1,prec=16",
    "mode=mixed,p=3,e=1,prec=16",
    "mode=equal,p=2,e=1,prec=16",
    "mode=equal,p=2,e=2,poly=1,1,1,prec=16",
)


@dataclass(frozen=True)
class VerifyConfig:
    ring_specs: tuple[str, ...] = DEFAULT_RING_SPECS
    seed: int = 0
    max_elements: int = 65536
    only: tuple[str, ...] | None = None

    def budget(self) -> EnumBudget:
        return EnumBudget(self.max_elements, self.seed)


@dataclass
class VerifyReport:
    seed: int
    ring_specs: tuple[str, ...]
    max_elements: int
    entries: list[dict]
    started_utc: str = ""
    elapsed_s: float = 0.0
    per_entry_s: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e["status"] == "pass" for e in self.entries)

    def to_dict(self, include_timing: bool = True) -> dict:
        n_pass = sum(1 for e in self.entries if e["status"] == "pass")
        out = {
            "schema": "dvrdual-verify/1",
            "seed": self.seed,
            "rings": list(self.ring_specs),
            "budget": {"max_elements": self.max_elements},
            "entries": self.entries,
            "totals": {
                "pass": n_pass,
                "fail": len(self.entries) - n_pass,
                "total": len(self.entries),
            },
            "status": "pass" if self.passed else "fail",
        }
        if include_timing:
            out["timestamp"] = {
                "started_utc": self.started_utc,
                "elapsed_s": self.elapsed_s,
                "per_entry_s": self.per_entry_s,
            }
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2) + "\n"


def exponent_multisets(max_sum: int) -> list[tuple[int, ...]]:
    """Non-decreasing tuples of positive integers with sum <= max_sum."""
    out = [()]

    def rec(prefix: tuple[int, ...], lo: int, remaining: int) -> None:
        for v in range(lo, remaining + 1):
            cur = prefix + (v,)
            out.append(cur)
            rec(cur, v, remaining - v)

    rec((), 1, max_sum)
    return out


def _rings(cfg: VerifyConfig) -> list[RingCtx]:
    return [parse_ring_spec(s) for s in cfg.ring_specs]


def _find(rings: list[RingCtx], mode: str, p: int, e: int = 1) -> RingCtx | None:
    for ctx in rings:
        if ctx.mode == mode and ctx.p == p and ctx.e == e:
            return ctx
    return None


def _rng(cfg: VerifyConfig, name: str, salt: str = "") -> random.Random:
    return random.Random(f"{cfg.seed}:{name}:{salt}")


def _digits_payload(r: RElem) -> list[int]:
    return list(r.digits)


def _random_relem(rng: random.Random, ctx: RingCtx, precision: int) -> RElem:
    return RElem(tuple(rng.randrange(ctx.q) for _ in range(precision)))


def _random_unit(rng: random.Random, ctx: RingCtx, precision: int) -> RElem:
    return RElem(
        (rng.randrange(1, ctx.q),)
        + tuple(rng.randrange(ctx.q) for _ in range(precision - 1))
    )


# ---------------------------------------------------------------------------
# suite entries: each returns a counterexample payload or None


def _check_dual_counting(cfg: VerifyConfig) -> dict | None:
    budget = cfg.budget()
    for ctx in _rings(cfg):
        limit = 12 if (ctx.mode == MIXED_CHAR and ctx.p == 2) else 7
        for exps in exponent_multisets(limit):
            m = InvariantFactors(exps)
            size = m.size(ctx.q)
            if size > 2**12:
                continue
            level = max(exps, default=1)
            homs = enum_r_homs(ctx, m, level, budget)
            if len(homs) != size:
                return {
                    "ring": ring_spec(ctx),
                    "module": module_spec(m),
                    "oracle_hom_count": len(homs),
                    "module_size": size,
                }
            structural = ctx.q ** sum(dual_structure(m).torsion_exps)
            if structural != size:
                return {
                    "ring": ring_spec(ctx),
                    "module": module_spec(m),
                    "structural_dual_size": structural,
                    "module_size": size,
                }
            if size <= 256 and exps:
                coord_sets = set()
                for h in homs:
                    coords = tuple(
                        i_x_forward(
                            ctx,
                            e,
                            t_from_fraction(
                                ctx, relem_of_residue(ctx, level, img), level
                            ),
                        )
                        for img, e in zip(h.images, exps)
                    )
                    coord_sets.add(coords)
                expected = {
                    phi.torsion_coords for phi in dual_elements(ctx, m)
                }
                if coord_sets != expected:
                    return {
                        "ring": ring_spec(ctx),
                        "module": module_spec(m),
                        "reason": "oracle homs are not in bijection with dual coordinates",
                    }
    return None


def _check_double_dual_identity(cfg: VerifyConfig) -> dict | None:
    rng = _rng(cfg, "double_dual")
    for ctx in _rings(cfg):
        limit = 12 if (ctx.mode == MIXED_CHAR and ctx.p == 2) else 7
        for exps in exponent_multisets(limit):
            m = InvariantFactors(exps)
            if m.size(ctx.q) > 2**10:
                continue
            for elem in module_elements(ctx, m):
                if double_dual_map(ctx, m, elem) != elem:
                    return {
                        "ring": ring_spec(ctx),
                        "module": module_spec(m),
                        "element": [_digits_payload(c) for c in elem.torsion_coords],
                    }
        for t_exps, f in (((), 1), ((), 2), ((1,), 1), ((1, 2), 2)):
            m = InvariantFactors(t_exps, f)
            for _ in range(25):
                elem = ModElem(
                    tuple(_random_relem(rng, ctx, e) for e in t_exps),
                    tuple(_random_relem(rng, ctx, 8) for _ in range(f)),
                )
                out = double_dual_map(ctx, m, elem)
                if not elem_eq(out, elem, 8):
                    return {
                        "ring": ring_spec(ctx),
                        "module": module_spec(m),
                        "element": [
                            _digits_payload(c)
                            for c in elem.torsion_coords + elem.free_coords
                        ],
                    }
    return None


def _check_commuting_square(cfg: VerifyConfig) -> dict | None:
    rings = [
        ctx
        for ctx in _rings(cfg)
        if ctx.p == 2 and ctx.e == 1
    ]
    for ctx in rings:
        for b in range(1, 6):
            for a in range(1, b + 1):
                for phi in dual_elements(ctx, InvariantFactors((b,))):
                    if not check_inf_res_square(ctx, a, b, phi):
                        return {
                            "ring": ring_spec(ctx),
                            "a": a,
                            "b": b,
                            "phi": _digits_payload(phi.torsion_coords[0]),
                        }
    return None


def _random_matrix(rng: random.Random, ctx: RingCtx, nr: int, nc: int, prec: int, maxval: int):
    rows = []
    for _ in range(nr):
        row = []
        for _ in range(nc):
            if rng.random() < 0.15:
                row.append(RElem((0,) * prec))
            else:
                v = rng.randint(0, maxval)
                digits = (0,) * v + (rng.randrange(1, ctx.q),) + tuple(
                    rng.randrange(ctx.q) for _ in range(prec - v - 1)
                )
                row.append(RElem(digits))
        rows.append(row)
    return rows


def _scramble(rng: random.Random, ctx: RingCtx, rows, prec: int):
    work = [list(r) for r in rows]
    nr, nc = len(work), len(work[0])
    for _ in range(6):
        axis = rng.randrange(2)
        n = nr if axis == 0 else nc
        apply_ops = apply_row_ops if axis == 0 else apply_col_ops
        kind = rng.randrange(3)
        if kind == 0 and n > 1:
            i, j = rng.sample(range(n), 2)
            apply_ops(ctx, (("swap", i, j),), work)
        elif kind == 1:
            i = rng.randrange(n)
            apply_ops(ctx, (("scale", i, _random_unit(rng, ctx, prec)),), work)
        elif n > 1:
            i, j = rng.sample(range(n), 2)
            apply_ops(ctx, (("addmul", i, j, _random_relem(rng, ctx, prec)),), work)
    return work


def _check_snf_soundness(cfg: VerifyConfig) -> dict | None:
    budget = cfg.budget()
    rings = [
        ctx
        for ctx in _rings(cfg)
        if (ctx.mode, ctx.p, ctx.e) in ((MIXED_CHAR, 2, 1), (MIXED_CHAR, 3, 1), (EQUAL_CHAR, 2, 1))
    ]
    for ctx in rings:
        rng = _rng(cfg, "snf", ring_spec(ctx))
        prec = ctx.default_precision
        oracle_checks = 0
        for idx in range(500):
            nr, nc = rng.randint(1, 4), rng.randint(1, 4)
            rows = _random_matrix(rng, ctx, nr, nc, prec, maxval=3)
            mat = pres_matrix(ctx, rows)
            base = snf(ctx, mat).factors
            for _ in range(20):
                scrambled = _scramble(rng, ctx, rows, prec)
                got = snf(ctx, pres_matrix(ctx, scrambled)).factors
                if got != base:
                    return {
                        "ring": ring_spec(ctx),
                        "matrix_index": idx,
                        "matrix": [[_digits_payload(e) for e in r] for r in rows],
                        "expected": module_spec(base),
                        "got": module_spec(got),
                        "property": "snf scramble invariance",
                    }
            maxval_seen = max(
                (
                    next((k for k, d in enumerate(e.digits) if d), prec)
                    for r in rows
                    for e in r
                    if any(e.digits)
                ),
                default=0,
            )
            if nc <= 3 and maxval_seen <= 2 and oracle_checks < 120:
                try:
                    count, profile = cokernel_bruteforce(ctx, mat, budget)
                except InfiniteCokernelError:
                    if base.free_rank == 0:
                        return {
                            "ring": ring_spec(ctx),
                            "matrix_index": idx,
                            "property": "oracle says infinite, snf says finite",
                        }
                    continue
                except BudgetExceededError:
                    continue
                oracle_checks += 1
                if base.free_rank:
                    return {
                        "ring": ring_spec(ctx),
                        "matrix_index": idx,
                        "property": "oracle says finite, snf says infinite",
                    }
                if count != ctx.q ** sum(base.torsion_exps) or profile != (
                    order_profile_from_exponents(ctx.q, base.torsion_exps)
                ):
                    return {
                        "ring": ring_spec(ctx),
                        "matrix_index": idx,
                        "matrix": [[_digits_payload(e) for e in r] for r in rows],
                        "snf": module_spec(base),
                        "oracle_count": count,
                        "property": "oracle cokernel mismatch",
                    }
    return None


def _check_ell_isomorphism(cfg: VerifyConfig) -> dict | None:
    rings = _rings(cfg)
    f2x = _find(rings, EQUAL_CHAR, 2, 1)
    if f2x is not None:
        for phi in zdf_elements(f2x, 3):
            t = ell(f2x, phi)
            if ell_inv(f2x, t) != phi:
                return {"ring": ring_spec(f2x), "coeffs": list(phi.coeffs)}
            for k in range(4):
                for h in range(1, f2x.q):
                    scalar = r_from_digits(f2x, (0,) * k + (h,) + (0,) * 3)
                    if ell(f2x, zdf_scalar(f2x, scalar, phi)) != t_scalar_mul(
                        f2x, scalar, t
                    ):
                        return {
                            "ring": ring_spec(f2x),
                            "coeffs": list(phi.coeffs),
                            "scalar": _digits_payload(scalar),
                        }
    f4x = _find(rings, EQUAL_CHAR, 2, 2)
    if f4x is not None:
        rng = _rng(cfg, "ell", "q4")
        for _ in range(500):
            phi = zdf_make(
                f4x, [rng.randrange(4) for _ in range(rng.randint(0, 3))]
            )
            k, h = rng.randrange(4), rng.randrange(1, 4)
            scalar = r_from_digits(f4x, (0,) * k + (h,) + (0,) * 3)
            ok_linear = ell(f4x, zdf_scalar(f4x, scalar, phi)) == t_scalar_mul(
                f4x, scalar, ell(f4x, phi)
            )
            ok_round = ell_inv(f4x, ell(f4x, phi)) == phi
            if not (ok_linear and ok_round):
                return {"ring": ring_spec(f4x), "coeffs": list(phi.coeffs)}
    return None


def _check_adjoint_transport(cfg: VerifyConfig) -> dict | None:
    budget = cfg.budget()
    f2x = _find(_rings(cfg), EQUAL_CHAR, 2, 1)
    if f2x is None:
        return None
    for exps in exponent_multisets(8):
        if not exps:
            continue
        m = InvariantFactors(exps)
        size = m.size(2)
        if size > 256:
            continue
        tables = set()
        for psi in dual_elements(f2x, m):
            table = adjoint_transport(f2x, m, psi)
            tables.add(tuple((v.k, v.numerator) for v in table.values()))
        if len(tables) != size:
            return {
                "ring": ring_spec(f2x),
                "module": module_spec(m),
                "distinct_tables": len(tables),
                "expected": size,
            }
        additive = set(enum_z_homs(f2x, m, budget))
        if tables != additive:
            return {
                "ring": ring_spec(f2x),
                "module": module_spec(m),
                "reason": "transported set differs from the enumerated additive dual",
            }
    return None


def _check_hom_lifting(cfg: VerifyConfig) -> dict | None:
    rings = [
        ctx
        for ctx in _rings(cfg)
        if (ctx.mode, ctx.p, ctx.e) in ((MIXED_CHAR, 2, 1), (EQUAL_CHAR, 2, 1))
    ]
    for ctx in rings:
        rng = _rng(cfg, "lift", ring_spec(ctx))
        chains = 0
        attempts = 0
        while chains < 100 and attempts < 2000:
            attempts += 1
            exps = tuple(
                sorted(rng.randint(1, 5) for _ in range(rng.randint(1, 3)))
            )
            if sum(exps) > 10:
                continue
            m = InvariantFactors(exps)
            size = m.size(ctx.q)
            gens = []
            for _ in range(rng.randint(1, 2)):
                gens.append(
                    ModElem(
                        tuple(_random_relem(rng, ctx, e) for e in exps), ()
                    )
                )
            orders = [element_order_exp(ctx, m, g) for g in gens]
            candidates = ctx.q ** sum(orders)
            sub_size = len(span_with_values(ctx, m, gens, [T_ZERO] * len(gens)))
            if (
                size > 2**10
                or candidates * sub_size > 2**14
                or sub_size * size > 2**12
            ):
                continue
            chains += 1
            pools = [list(t_elements(ctx, o)) for o in orders]
            consistent = 0
            for values in itertools.product(*pools):
                try:
                    span_with_values(ctx, m, gens, values)
                except InconsistentLiftError:
                    continue
                consistent += 1
                psi = extend_hom(ctx, m, gens, list(values))
                d = dual_structure(m)
                for g, v in zip(gens, values):
                    if eval_pairing(ctx, d, psi, g) != v:
                        return {
                            "ring": ring_spec(ctx),
                            "module": module_spec(m),
                            "reason": "lift does not restrict to the functional",
                        }
            if consistent != sub_size:
                return {
                    "ring": ring_spec(ctx),
                    "module": module_spec(m),
                    "consistent_functionals": consistent,
                    "submodule_size": sub_size,
                }
    return None


def _check_torsion_counts(cfg: VerifyConfig) -> dict | None:
    for p in (2, 3, 5):
        ctx = RingCtx(MIXED_CHAR, p, default_precision=8)
        for n in range(0, 7):
            count, expected = torsion_count(ctx, n)
            if count != expected:
                return {"p": p, "n": n, "count": count, "expected": expected}
    return None


def _check_zdelta_predicate(cfg: VerifyConfig) -> dict | None:
    for a in range(-10, 0):
        for b in range(-7, 8):
            disc = b * b + 4 * a
            accepted = True
            try:
                zdelta_validate(a, b)
            except ValueError:
                accepted = False
            if accepted != (disc < 0):
                return {"a": a, "b": b, "discriminant": disc, "accepted": accepted}
    rng = _rng(cfg, "zdelta")
    ring = zdelta_validate(-3, 1)
    delta = zd_delta_complex(ring)
    for _ in range(1000):
        z = (rng.randint(-20, 20), rng.randint(-20, 20))
        w = (rng.randint(-20, 20), rng.randint(-20, 20))
        u = (rng.randint(-20, 20), rng.randint(-20, 20))
        assoc = zd_mul(ring, z, zd_mul(ring, w, u)) == zd_mul(ring, zd_mul(ring, z, w), u)
        distrib = zd_mul(ring, z, zd_add(ring, w, u)) == zd_add(
            ring, zd_mul(ring, z, w), zd_mul(ring, z, u)
        )
        norm_mult = zd_norm(ring, zd_mul(ring, z, w)) == zd_norm(ring, z) * zd_norm(ring, w)
        approx = abs(z[0] + z[1] * delta) ** 2
        norm_close = abs(approx - zd_norm(ring, z)) <= 1e-6 * max(1.0, abs(approx))
        if not (assoc and distrib and norm_mult and norm_close):
            return {"z": z, "w": w, "u": u}
    return None


def _check_ring_laws(cfg: VerifyConfig) -> dict | None:
    for ctx in _rings(cfg):
        rng = _rng(cfg, "ring_laws", ring_spec(ctx))
        for _ in range(200):
            a = _random_relem(rng, ctx, 6)
            b = _random_relem(rng, ctx, 6)
            c = _random_relem(rng, ctx, 6)
            ok = (
                r_add(ctx, r_add(ctx, a, b), c) == r_add(ctx, a, r_add(ctx, b, c))
                and r_mul(ctx, r_mul(ctx, a, b), c) == r_mul(ctx, a, r_mul(ctx, b, c))
                and r_mul(ctx, a, r_add(ctx, b, c))
                == r_add(ctx, r_mul(ctx, a, b), r_mul(ctx, a, c))
            )
            if not ok:
                return {"ring": ring_spec(ctx), "law": "ring laws", "a": _digits_payload(a)}
            unit = _random_unit(rng, ctx, 6)
            if r_mul(ctx, unit, r_unit_inverse(ctx, unit)) != r_one(ctx, 6):
                return {"ring": ring_spec(ctx), "law": "unit inverse", "a": _digits_payload(unit)}
            t = t_from_fraction(ctx, _random_relem(rng, ctx, 6), rng.randint(0, 5))
            r, s = _random_relem(rng, ctx, 6), _random_relem(rng, ctx, 6)
            if t_scalar_mul(ctx, r_mul(ctx, r, s), t) != t_scalar_mul(
                ctx, r, t_scalar_mul(ctx, s, t)
            ):
                return {"ring": ring_spec(ctx), "law": "action compatibility"}
            if t.n and t.numerator[0] == 0:
                return {"ring": ring_spec(ctx), "law": "canonical form"}
        for n in range(0, 7):
            if ctx.q**n > 2**13:
                break
            count = sum(1 for _ in t_elements(ctx, n))
            if count != ctx.q**n:
                return {"ring": ring_spec(ctx), "law": "torsion cardinality", "n": n}
    return None


def _check_inf_res_composition(cfg: VerifyConfig) -> dict | None:
    for ctx in _rings(cfg):
        for b in range(1, 6):
            if ctx.q**b > 2**12:
                continue
            for a in range(1, b + 1):
                for digits in itertools.product(range(ctx.q), repeat=a):
                    r = RElem(digits)
                    got = res_map(ctx, b, a, inf_map(ctx, a, b, r))
                    want = ((0,) * (b - a) + digits)[:a]
                    if got.digits != want:
                        return {"ring": ring_spec(ctx), "a": a, "b": b, "case": "res o inf"}
                for digits in itertools.product(range(ctx.q), repeat=b):
                    r = RElem(digits)
                    got = inf_map(ctx, a, b, res_map(ctx, b, a, r))
                    want = ((0,) * (b - a) + digits)[:b]
                    if got.digits != want:
                        return {"ring": ring_spec(ctx), "a": a, "b": b, "case": "inf o res"}
    return None


def _admissible_image_counts(ctx: RingCtx, cod: InvariantFactors, top: int) -> list[int]:
    """counts[a] = number of codomain elements killed by pi^a, by scan."""
    counts = [0] * (top + 1)
    for n in module_elements(ctx, cod):
        o = element_order_exp(ctx, cod, n)
        for a in range(o, top + 1):
            counts[a] += 1
    return counts


def _oracle_hom_count(ctx: RingCtx, dom: InvariantFactors, counts: list[int]) -> int:
    count = 1
    for a in dom.torsion_exps:
        count *= counts[a]
    return count


def _check_hom_space_cardinality(cfg: VerifyConfig) -> dict | None:
    top = 8
    for ctx in _rings(cfg):
        shapes = [exps for exps in exponent_multisets(top) if ctx.q ** sum(exps) <= 256]
        by_cod = {
            exps: _admissible_image_counts(ctx, InvariantFactors(exps), top)
            for exps in shapes
        }
        for dom_exps in shapes:
            dom = InvariantFactors(dom_exps)
            for cod_exps in shapes:
                structure, _ = hom_space(ctx, dom, InvariantFactors(cod_exps))
                structural = ctx.q ** sum(structure.torsion_exps)
                oracle = _oracle_hom_count(ctx, dom, by_cod[cod_exps])
                if structural != oracle:
                    return {
                        "ring": ring_spec(ctx),
                        "domain": module_spec(dom),
                        "codomain": module_spec(InvariantFactors(cod_exps)),
                        "structural": structural,
                        "oracle": oracle,
                    }
    return None


def _check_pairing_naturality(cfg: VerifyConfig) -> dict | None:
    for ctx in _rings(cfg):
        shapes = [e for e in exponent_multisets(3) if e]
        for dom_exps in shapes:
            for cod_exps in shapes:
                dom, cod = InvariantFactors(dom_exps), InvariantFactors(cod_exps)
                n_m = dom.size(ctx.q)
                n_n = cod.size(ctx.q)
                cod_elems = list(module_elements(ctx, cod))
                images_pool = [
                    [n for n in cod_elems if element_order_exp(ctx, cod, n) <= a]
                    for a in dom_exps
                ]
                hom_count = 1
                for pool in images_pool:
                    hom_count *= len(pool)
                if hom_count * n_n * n_m > 2**14:
                    continue
                dd, dc = dual_structure(dom), dual_structure(cod)
                for images in itertools.product(*images_pool):
                    entries = [list(img.torsion_coords) for img in images]
                    h = make_hom(ctx, dom, cod, entries)
                    dh = dual_hom(ctx, h)
                    for phi in dual_elements(ctx, cod):
                        pulled = apply_hom(ctx, dh, ModElem(phi.torsion_coords, ()))
                        pulled_phi = DualElem(pulled.torsion_coords, ())
                        for m in module_elements(ctx, dom):
                            lhs = eval_pairing(ctx, dd, pulled_phi, m)
                            rhs = eval_pairing(ctx, dc, phi, apply_hom(ctx, h, m))
                            if lhs != rhs:
                                return {
                                    "ring": ring_spec(ctx),
                                    "domain": module_spec(dom),
                                    "codomain": module_spec(cod),
                                    "hom": [
                                        [_digits_payload(e) for e in row]
                                        for row in entries
                                    ],
                                }
    return None


def _check_kernel_triviality(cfg: VerifyConfig) -> dict | None:
    for ctx in _rings(cfg):
        for exps in exponent_multisets(6):
            if not exps:
                continue
            m = InvariantFactors(exps)
            if m.size(ctx.q) > 64:
                continue
            d = dual_structure(m)
            duals = list(dual_elements(ctx, m))
            for elem in module_elements(ctx, m):
                killed = all(
                    eval_pairing(ctx, d, phi, elem) == T_ZERO for phi in duals
                )
                is_zero = all(
                    all(dd == 0 for dd in c.digits) for c in elem.torsion_coords
                )
                if killed != is_zero:
                    return {
                        "ring": ring_spec(ctx),
                        "module": module_spec(m),
                        "element": [_digits_payload(c) for c in elem.torsion_coords],
                    }
    return None


def _check_i_iso_linearity(cfg: VerifyConfig) -> dict | None:
    rings = [ctx for ctx in _rings(cfg) if ctx.mode == EQUAL_CHAR and ctx.q in (2, 4)]
    for ctx in rings:
        powers = [ctx.unpack_fq(1)]
        if ctx.e > 1:
            t = ctx.unpack_fq(ctx.p)
            for _ in range(ctx.e - 1):
                powers.append(fq_mul(ctx, powers[-1], t))
        for c_packed in range(ctx.q):
            c = ctx.unpack_fq(c_packed)
            values = i_inv(ctx, c)
            if i_iso(ctx, values) != c:
                return {"ring": ring_spec(ctx), "c": c_packed, "case": "roundtrip"}
            for s_packed in range(ctx.q):
                s = ctx.unpack_fq(s_packed)
                scaled = []
                for j in range(ctx.e):
                    prod = fq_mul(ctx, s, powers[j])
                    acc = CircleElem(0, 0)
                    for l, coeff in enumerate(prod.coeffs):
                        acc = circle_add(ctx, acc, circle_scalar(ctx, coeff, values[l]))
                    scaled.append(acc)
                if i_iso(ctx, tuple(scaled)) != fq_mul(ctx, s, c):
                    return {
                        "ring": ring_spec(ctx),
                        "c": c_packed,
                        "scalar": s_packed,
                        "case": "linearity",
                    }
    return None


SUITE_ENTRIES: tuple[tuple[str, object], ...] = (
    ("dual_counting", _check_dual_counting),
    ("double_dual_identity", _check_double_dual_identity),
    ("commuting_square", _check_commuting_square),
    ("snf_soundness", _check_snf_soundness),
    ("ell_isomorphism", _check_ell_isomorphism),
    ("adjoint_transport", _check_adjoint_transport),
    ("hom_lifting", _check_hom_lifting),
    ("torsion_counts", _check_torsion_counts),
    ("zdelta_predicate", _check_zdelta_predicate),
    ("ring_laws", _check_ring_laws),
    ("inf_res_composition", _check_inf_res_composition),
    ("hom_space_cardinality", _check_hom_space_cardinality),
    ("pairing_naturality", _check_pairing_naturality),
    ("kernel_triviality", _check_kernel_triviality),
    ("i_iso_linearity", _check_i_iso_linearity),
)


def suite_entry_names() -> tuple[str, ...]:
    return tuple(name for name, _ in SUITE_ENTRIES)


def run_suite(cfg: VerifyConfig) -> VerifyReport:
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    selected = SUITE_ENTRIES
    if cfg.only is not None:
        wanted = set(cfg.only)
        unknown = wanted - set(suite_entry_names())
        if unknown:
            raise ValueError(f"unknown suite entries: {sorted(unknown)}")
        selected = tuple(e for e in SUITE_ENTRIES if e[0] in wanted)
    entries = []
    per_entry = {}
    for name, fn in selected:
        t_entry = time.perf_counter()
        counterexample = fn(cfg)
        per_entry[name] = round(time.perf_counter() - t_entry, 3)
        entries.append(
            {
                "name": name,
                "status": "pass" if counterexample is None else "fail",
                "counterexample": counterexample,
            }
        )
    report = VerifyReport(
        seed=cfg.seed,
        ring_specs=cfg.ring_specs,
        max_elements=cfg.max_elements,
        entries=entries,
        started_utc=started,
        elapsed_s=round(time.perf_counter() - t0, 3),
        per_entry_s=per_entry,
    )
    return report
