"""Invariant factors, SNF, hom spaces: checked against direct enumeration."""

import json
import random

import pytest

from dvrdual.errors import SpecParseError
from dvrdual.modules import (
    InvariantFactors,
    apply_col_ops,
    apply_row_ops,
    elem_add,
    elem_from_ints,
    elem_scalar_mul,
    hom_identity,
    hom_space,
    hom_zero,
    apply_hom,
    inf_map,
    load_matrix_json,
    make_hom,
    matrix_from_ints,
    module_spec,
    parse_module_spec,
    pres_matrix,
    res_map,
    snf,
)
from dvrdual.ring import (
    EQUAL_CHAR,
    MIXED_CHAR,
    RingCtx,
    r_eq,
    r_from_digits,
    r_from_int,
    r_is_zero,
    r_one,
    r_pi_power,
    r_to_int,
)

Z2 = RingCtx(MIXED_CHAR, 2, default_precision=14)
Z3 = RingCtx(MIXED_CHAR, 3, default_precision=14)
F2X = RingCtx(EQUAL_CHAR, 2, default_precision=14)


def coker_count_and_profile(p, int_rows, ncols, level):
    """Oracle: enumerate the row span inside (Z/p^level)^ncols directly."""
    mod = p**level
    gens = [tuple(x % mod for x in row) for row in int_rows]
    zero = (0,) * ncols
    span = {zero}
    frontier = [zero]
    while frontier:
        base = frontier.pop()
        for g in gens:
            nxt = tuple((a + b) % mod for a, b in zip(base, g))
            if nxt not in span:
                span.add(nxt)
                frontier.append(nxt)
    total = mod**ncols
    count = total // len(span)
    tau = []
    for j in range(level + 1):
        divisible = sum(1 for s in span if all(x % p**j == 0 for x in s))
        tau.append(divisible * p ** (j * ncols) // len(span))
    assert tau[level - 1] == tau[level], "oracle level too small"
    profile = [0]
    for j in range(1, level + 1):
        profile.extend([j] * (tau[j] - tau[j - 1]))
    return count, tuple(profile)


def profile_from_exponents(q, exps):
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


class TestSnf:
    def test_diagonal_example(self):
        res = snf(Z2, matrix_from_ints(Z2, [[2, 0], [0, 4]]))
        assert res.factors == InvariantFactors((1, 2), 0)
        count, profile = coker_count_and_profile(2, [[2, 0], [0, 4]], 2, 4)
        assert count == 8
        assert profile == profile_from_exponents(2, res.factors.torsion_exps)

    def test_non_diagonal_example(self):
        res = snf(Z2, matrix_from_ints(Z2, [[2, 2], [2, 4]]))
        assert res.factors == InvariantFactors((1, 1), 0)
        count, profile = coker_count_and_profile(2, [[2, 2], [2, 4]], 2, 4)
        assert count == 4
        assert profile == (0, 1, 1, 1)
        assert profile == profile_from_exponents(2, res.factors.torsion_exps)

    def test_free_rank_example(self):
        res = snf(Z2, matrix_from_ints(Z2, [[2, 0]]))
        assert res.factors == InvariantFactors((1,), 1)

    def test_zero_matrix(self):
        res = snf(Z2, matrix_from_ints(Z2, [[0, 0]]))
        assert res.factors == InvariantFactors((), 2)

    def test_unit_pivot_dropped(self):
        res = snf(Z3, matrix_from_ints(Z3, [[1, 3], [0, 9]]))
        # det = 9, one unit pivot, remaining factor exponent 2
        assert res.factors == InvariantFactors((2,), 0)

    def test_equal_char(self):
        x = r_pi_power(F2X, 1, 6)
        x2 = r_pi_power(F2X, 2, 6)
        zero = r_from_int(F2X, 0, 6)
        res = snf(F2X, pres_matrix(F2X, [[x, zero], [zero, x2]]))
        assert res.factors == InvariantFactors((1, 2), 0)

    def test_replay_reproduces_diagonal(self):
        mat = matrix_from_ints(Z2, [[6, 4, 2], [4, 4, 0], [2, 0, 8]])
        res = snf(Z2, mat)
        rows = [list(r) for r in mat.entries]
        apply_row_ops(Z2, res.row_ops, rows)
        apply_col_ops(Z2, res.col_ops, rows)
        compare_prec = mat.precision - sum(res.pivot_valuations)
        for i, row in enumerate(rows):
            for j, ent in enumerate(row):
                if i == j and i < len(res.pivot_valuations):
                    want = r_pi_power(Z2, res.pivot_valuations[i], compare_prec)
                    assert r_eq(ent, want, compare_prec)
                else:
                    assert all(d == 0 for d in ent.digits[:compare_prec])

    def test_random_against_oracle(self):
        rng = random.Random(7)
        for ctx, p in ((Z2, 2), (Z3, 3)):
            for _ in range(25):
                nr = rng.randint(1, 3)
                nc = rng.randint(1, 3)
                rows = [
                    [rng.choice([0, 1, 2, 3]) * p ** rng.randint(0, 2) for _ in range(nc)]
                    for _ in range(nr)
                ]
                res = snf(ctx, matrix_from_ints(ctx, rows))
                if res.factors.free_rank:
                    continue
                level = max(res.factors.torsion_exps, default=0) + 1
                if p**(level * nc) > 3**9:
                    continue
                count, profile = coker_count_and_profile(p, rows, nc, level)
                assert count == p ** sum(res.factors.torsion_exps)
                assert profile == profile_from_exponents(p, res.factors.torsion_exps)

    def test_scramble_invariance_sample(self):
        rng = random.Random(11)
        mat = matrix_from_ints(Z2, [[2, 6], [4, 8]])
        base = snf(Z2, mat).factors
        for _ in range(10):
            rows = [list(r) for r in mat.entries]
            for _ in range(6):
                kind = rng.randrange(3)
                i, j = rng.randrange(2), rng.randrange(2)
                if kind == 0 and i != j:
                    apply_row_ops(Z2, (("swap", i, j),), rows)
                elif kind == 1:
                    u = r_from_int(Z2, rng.choice([1, 3, 5, 7]), mat.precision)
                    apply_col_ops(Z2, (("scale", i, u),), rows)
                elif i != j:
                    c = r_from_int(Z2, rng.randrange(8), mat.precision)
                    apply_row_ops(Z2, (("addmul", i, j, c),), rows)
            assert snf(Z2, pres_matrix(Z2, rows)).factors == base


class TestElements:
    def test_modular_addition(self):
        m = InvariantFactors((2,))
        a = elem_from_ints(Z2, m, [3])
        b = elem_from_ints(Z2, m, [1])
        assert elem_add(Z2, m, a, b) == elem_from_ints(Z2, m, [0])

    def test_unital_scalar(self):
        m = InvariantFactors((1, 2), 1)
        a = elem_from_ints(Z3, m, [1, 4], [5])
        assert elem_scalar_mul(Z3, m, r_one(Z3, 14), a) == a

    def test_componentwise_scalar(self):
        m = InvariantFactors((1, 2))
        a = elem_from_ints(Z3, m, [1, 4])
        out = elem_scalar_mul(Z3, m, r_from_int(Z3, 2, 8), a)
        assert r_to_int(Z3, out.torsion_coords[0]) == 2 % 3
        assert r_to_int(Z3, out.torsion_coords[1]) == 8 % 9

    def test_shape_mismatch(self):
        m = InvariantFactors((2,))
        a = elem_from_ints(Z2, m, [1])
        b = elem_from_ints(Z2, InvariantFactors((2, 2)), [1, 0])
        with pytest.raises(ValueError):
            elem_add(Z2, m, a, b)


class TestInfRes:
    def test_examples(self):
        assert r_to_int(Z2, inf_map(Z2, 1, 3, r_from_int(Z2, 1, 1))) == 4
        r = r_from_int(Z2, 3, 2)
        assert inf_map(Z2, 2, 2, r) == r
        out = inf_map(F2X, 1, 2, r_from_int(F2X, 1, 1))
        assert out.digits == (0, 1)
        assert r_to_int(Z2, res_map(Z2, 3, 1, r_from_int(Z2, 5, 3))) == 1
        assert res_map(Z2, 2, 2, r) == r
        assert r_to_int(Z3, res_map(Z3, 2, 1, r_from_int(Z3, 7, 2))) == 1

    def test_order_checks(self):
        with pytest.raises(ValueError):
            inf_map(Z2, 3, 1, r_from_int(Z2, 1, 3))
        with pytest.raises(ValueError):
            res_map(Z2, 1, 3, r_from_int(Z2, 1, 1))

    def test_compositions_exhaustive(self):
        for ctx in (Z2, F2X):
            for b in range(1, 6):
                for a in range(1, b + 1):
                    pib = r_pi_power(ctx, b - a, b) if b - a < b else None
                    for v in range(ctx.q**a):
                        r = (
                            r_from_int(ctx, v, a)
                            if ctx.mode == MIXED_CHAR
                            else r_from_digits(
                                ctx, [(v // ctx.q**i) % ctx.q for i in range(a)]
                            )
                        )
                        # res(inf(r)) = pi^(b-a) * r in R/(pi^a)
                        got = res_map(ctx, b, a, inf_map(ctx, a, b, r))
                        want_digits = ((0,) * (b - a) + r.digits)[:a]
                        assert got.digits == want_digits
                    for v in range(ctx.q**b):
                        r = (
                            r_from_int(ctx, v, b)
                            if ctx.mode == MIXED_CHAR
                            else r_from_digits(
                                ctx, [(v // ctx.q**i) % ctx.q for i in range(b)]
                            )
                        )
                        # inf(res(r)) = pi^(b-a) * r in R/(pi^b)
                        got = inf_map(ctx, a, b, res_map(ctx, b, a, r))
                        want_digits = ((0,) * (b - a) + r.digits)[:b]
                        assert got.digits == want_digits


class TestHomSpace:
    def test_structure_example(self):
        structure, gens = hom_space(Z2, InvariantFactors((1, 2)), InvariantFactors((2,)))
        assert structure == InvariantFactors((1, 2), 0)
        assert len(gens) == 2
        assert 2 ** sum(structure.torsion_exps) == 8

    def test_torsion_to_free_trivial(self):
        structure, gens = hom_space(Z2, InvariantFactors((1,)), InvariantFactors((), 1))
        assert structure == InvariantFactors((), 0)
        assert gens == ()

    def test_free_to_torsion(self):
        structure, _ = hom_space(Z2, InvariantFactors((), 1), InvariantFactors((3,)))
        assert structure == InvariantFactors((3,), 0)

    def test_cardinality_against_enumeration(self):
        # count R-linear maps directly: choices of generator images with the
        # right annihilator, enumerated per component over Z/p^b
        for dom, cod in [((1, 2), (2,)), ((2,), (1, 2)), ((1, 1), (1, 1))]:
            m, n = InvariantFactors(dom), InvariantFactors(cod)
            structure, _ = hom_space(Z2, m, n)
            count = 1
            for a in dom:
                per_gen = 0
                for images in _all_images(2, cod, a):
                    per_gen += 1
                count *= per_gen
            assert count == 2 ** sum(structure.torsion_exps)

    def test_divisibility_rejected(self):
        with pytest.raises(ValueError):
            make_hom(
                Z2,
                InvariantFactors((1,)),
                InvariantFactors((2,)),
                [[r_from_int(Z2, 1, 2)]],
            )


def _all_images(p, cod_exps, a):
    """All images of a generator of order p^a: tuples killed by p^a."""
    import itertools

    pools = []
    for b in cod_exps:
        pools.append([v for v in range(p**b) if v * p**a % p**b == 0])
    return itertools.product(*pools)


class TestApplyHom:
    def test_identity_and_zero(self):
        m = InvariantFactors((1, 2), 1)
        a = elem_from_ints(Z2, m, [1, 3], [5])
        assert apply_hom(Z2, hom_identity(Z2, m), a) == a
        out = apply_hom(Z2, hom_zero(Z2, m, m), a)
        assert all(r_is_zero(c) for c in out.torsion_coords + out.free_coords)

    def test_inf_as_hom(self):
        dom, cod = InvariantFactors((1,)), InvariantFactors((2,))
        h = make_hom(Z2, dom, cod, [[r_from_int(Z2, 2, 2)]])
        out = apply_hom(Z2, h, elem_from_ints(Z2, dom, [1]))
        assert r_to_int(Z2, out.torsion_coords[0]) == 2

    def test_linearity(self):
        dom = InvariantFactors((2, 3))
        cod = InvariantFactors((1, 2))
        _, gens = hom_space(Z2, dom, cod)
        h = gens[-1]
        a = elem_from_ints(Z2, dom, [3, 5])
        b = elem_from_ints(Z2, dom, [1, 6])
        lhs = apply_hom(Z2, h, elem_add(Z2, dom, a, b))
        rhs = elem_add(Z2, cod, apply_hom(Z2, h, a), apply_hom(Z2, h, b))
        assert lhs == rhs


class TestSpecsAndFiles:
    def test_module_spec_roundtrip(self):
        for m in (InvariantFactors((1, 2), 1), InvariantFactors(), InvariantFactors((3,))):
            assert parse_module_spec(module_spec(m)) == m
        assert parse_module_spec("[3]") == InvariantFactors((3,))

    def test_bad_module_spec(self):
        with pytest.raises(SpecParseError):
            parse_module_spec("1,2;f=1")

    def test_matrix_json(self):
        text = json.dumps(
            {"ring": "mode=mixed,p=2,e=1,prec=8", "rows": [[2, 0], [0, 4]]}
        )
        ctx, mat = load_matrix_json(text)
        assert ctx.p == 2 and mat.nrows == 2
        assert snf(ctx, mat).factors == InvariantFactors((1, 2), 0)

    def test_matrix_json_digit_strings(self):
        text = json.dumps(
            {"ring": "mode=equal,p=2,e=1,prec=6", "rows": [["0.1", [1, 1]]]}
        )
        ctx, mat = load_matrix_json(text)
        assert mat.entries[0][0].digits == (0, 1, 0, 0, 0, 0)
        assert mat.entries[0][1].digits == (1, 1, 0, 0, 0, 0)
