"""Circle functionals, the quotient-field bridge, torsion counts, Z[delta]."""

import random

import pytest

from dvrdual.circle import (
    CIRCLE_ZERO,
    CircleElem,
    ZDualFunctional,
    ZDF_ZERO,
    adjoint_transport,
    base_functional_values,
    circle_add,
    circle_make,
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
from dvrdual.duality import dual_elements, dual_structure, make_dual_elem
from dvrdual.modules import InvariantFactors, module_elements
from dvrdual.ring import (
    EQUAL_CHAR,
    MIXED_CHAR,
    FqElem,
    RingCtx,
    T_ZERO,
    TElem,
    fq_mul,
    r_from_digits,
    r_one,
    t_scalar_mul,
)

Z2 = RingCtx(MIXED_CHAR, 2, default_precision=8)
Z3 = RingCtx(MIXED_CHAR, 3, default_precision=8)
Z5 = RingCtx(MIXED_CHAR, 5, default_precision=8)
F2X = RingCtx(EQUAL_CHAR, 2, default_precision=8)
F4X = RingCtx(EQUAL_CHAR, 2, e=2, modulus=(1, 1, 1), default_precision=8)


def premultiply_values(ctx, scale: FqElem, values):
    """Oracle for the module action: (c.psi)(t^j) = psi(c * t^j), expanded
    F_p-linearly through the basis."""
    powers = [FqElem((1,) + (0,) * (ctx.e - 1))]
    t = FqElem(((0, 1) + (0,) * (ctx.e - 2))[: ctx.e])
    for _ in range(ctx.e - 1):
        powers.append(fq_mul(ctx, powers[-1], t))
    out = []
    for j in range(ctx.e):
        prod = fq_mul(ctx, scale, powers[j])
        acc = CIRCLE_ZERO
        for l, coeff in enumerate(prod.coeffs):
            acc = circle_add(ctx, acc, circle_scalar(ctx, coeff, values[l]))
        out.append(acc)
    return tuple(out)


class TestResidueFieldIdentification:
    def test_q2_both_maps(self):
        assert i_iso(Z2, (CircleElem(1, 1),)) == FqElem((1,))
        assert i_iso(Z2, (CIRCLE_ZERO,)) == FqElem((0,))

    def test_q4_base_functional(self):
        vals = base_functional_values(F4X)
        assert vals == (CIRCLE_ZERO, CircleElem(1, 1))
        assert i_iso(F4X, vals) == FqElem((1, 0))

    def test_q4_t_multiple(self):
        # psi = t . psi_0 takes the value 1/2 on both basis elements
        vals = (CircleElem(1, 1), CircleElem(1, 1))
        assert i_iso(F4X, vals) == FqElem((0, 1))

    def test_roundtrips(self):
        for ctx in (F2X, F4X, Z2, Z3):
            for packed in range(ctx.q):
                c = ctx.unpack_fq(packed)
                assert i_iso(ctx, i_inv(ctx, c)) == c

    def test_linearity_exhaustive(self):
        for ctx in (F2X, F4X):
            for c_packed in range(ctx.q):
                c = ctx.unpack_fq(c_packed)
                values = i_inv(ctx, c)
                for s_packed in range(ctx.q):
                    s = ctx.unpack_fq(s_packed)
                    scaled = premultiply_values(ctx, s, values)
                    assert i_iso(ctx, scaled) == fq_mul(ctx, s, c)

    def test_rejects_deep_values(self):
        with pytest.raises(ValueError):
            i_iso(Z2, (CircleElem(2, 1),))


class TestEll:
    def test_single_coefficients(self):
        assert ell(F2X, zdf_make(F2X, [1])) == TElem(1, (1,))
        assert ell(F2X, zdf_make(F2X, [0, 1])) == TElem(2, (1, 0))
        assert ell(F2X, ZDF_ZERO) == T_ZERO

    def test_inverse_examples(self):
        assert ell_inv(F2X, TElem(1, (1,))) == zdf_make(F2X, [1])
        assert ell_inv(F2X, T_ZERO) == ZDF_ZERO
        assert ell_inv(F2X, TElem(2, (1, 1))) == zdf_make(F2X, [1, 1])

    def test_mixed_char_rejected(self):
        with pytest.raises(ValueError):
            ell(Z2, ZDF_ZERO)
        with pytest.raises(ValueError):
            ell_inv(Z2, T_ZERO)

    def test_bijective_support_three(self):
        seen = set()
        for phi in zdf_elements(F2X, 3):
            t = ell(F2X, phi)
            assert ell_inv(F2X, t) == phi
            seen.add(t)
        assert len(seen) == 8
        for t in seen:
            assert ell(F2X, ell_inv(F2X, t)) == t

    def test_linear_over_monomials(self):
        for phi in zdf_elements(F2X, 3):
            for k in range(4):
                for h in range(1, F2X.q):
                    scalar = r_from_digits(F2X, (0,) * k + (h,) + (0,) * 3)
                    lhs = ell(F2X, zdf_scalar(F2X, scalar, phi))
                    rhs = t_scalar_mul(F2X, scalar, ell(F2X, phi))
                    assert lhs == rhs

    def test_linear_random_q4(self):
        rng = random.Random(3)
        for _ in range(200):
            phi = zdf_make(F4X, [rng.randrange(4) for _ in range(rng.randint(0, 3))])
            k = rng.randrange(4)
            h = rng.randrange(1, 4)
            scalar = r_from_digits(F4X, (0,) * k + (h,) + (0,) * 3)
            assert ell(F4X, zdf_scalar(F4X, scalar, phi)) == t_scalar_mul(
                F4X, scalar, ell(F4X, phi)
            )
            psi = zdf_make(F4X, [rng.randrange(4) for _ in range(rng.randint(0, 3))])
            assert ell_inv(F4X, ell(F4X, psi)) == psi


class TestAdjointTransport:
    def test_table_example(self):
        m = InvariantFactors((1,))
        d = dual_structure(m)
        psi = make_dual_elem(F2X, d, (r_one(F2X, 1),))
        table = adjoint_transport(F2X, m, psi)
        elems = list(module_elements(F2X, m))
        assert table[elems[0]] == CIRCLE_ZERO
        assert table[elems[1]] == CircleElem(1, 1)

    def test_zero_table(self):
        m = InvariantFactors((1, 1))
        d = dual_structure(m)
        zero = make_dual_elem(F2X, d, tuple(r_from_digits(F2X, (0,)) for _ in "xx"))
        assert all(v == CIRCLE_ZERO for v in adjoint_transport(F2X, m, zero).values())

    def test_bijection_counts(self):
        m = InvariantFactors((1,))
        tables = set()
        for psi in dual_elements(F2X, m):
            table = adjoint_transport(F2X, m, psi)
            tables.add(tuple(table.values()))
        assert len(tables) == 2

    def test_mixed_rejected(self):
        m = InvariantFactors((1,))
        d = dual_structure(m)
        with pytest.raises(ValueError):
            adjoint_transport(Z2, m, make_dual_elem(Z2, d, (r_one(Z2, 1),)))


class TestTorsionCount:
    def test_examples(self):
        assert torsion_count(Z3, 2) == (9, 9)
        assert torsion_count(Z3, 0) == (1, 1)
        assert torsion_count(Z2, 3) == (8, 8)

    def test_range(self):
        for ctx in (Z2, Z3, Z5):
            for n in range(0, 5):
                count, expected = torsion_count(ctx, n)
                assert count == expected == ctx.p**n

    def test_equal_char_rejected(self):
        with pytest.raises(ValueError):
            torsion_count(F2X, 2)


class TestZDelta:
    def test_gaussian(self):
        ring = zdelta_validate(-1, 0)
        assert zd_mul(ring, (0, 1), (0, 1)) == (-1, 0)  # delta^2 = -1

    def test_eisenstein_like(self):
        ring = zdelta_validate(-1, 1)
        assert zd_norm(ring, (0, 1)) == 1

    def test_boundary_rejected(self):
        with pytest.raises(ValueError):
            zdelta_validate(-1, 2)
        with pytest.raises(ValueError):
            zdelta_validate(0, 1)
        with pytest.raises(ValueError):
            zdelta_validate(1, 0)

    def test_predicate_sweep(self):
        for a in range(-10, 0):
            for b in range(-7, 8):
                disc = b * b + 4 * a
                if disc < 0:
                    ring = zdelta_validate(a, b)
                    assert (ring.a, ring.b) == (a, b)
                else:
                    with pytest.raises(ValueError):
                        zdelta_validate(a, b)

    def test_ring_laws_and_norm(self):
        rng = random.Random(5)
        ring = zdelta_validate(-3, 1)
        delta = zd_delta_complex(ring)
        for _ in range(300):
            z = (rng.randint(-9, 9), rng.randint(-9, 9))
            w = (rng.randint(-9, 9), rng.randint(-9, 9))
            u = (rng.randint(-9, 9), rng.randint(-9, 9))
            assert zd_mul(ring, z, zd_mul(ring, w, u)) == zd_mul(
                ring, zd_mul(ring, z, w), u
            )
            lhs = zd_mul(ring, z, zd_add(ring, w, u))
            rhs = zd_add(ring, zd_mul(ring, z, w), zd_mul(ring, z, u))
            assert lhs == rhs
            assert zd_norm(ring, zd_mul(ring, z, w)) == zd_norm(ring, z) * zd_norm(
                ring, w
            )
            approx = abs(z[0] + z[1] * delta) ** 2
            assert abs(approx - zd_norm(ring, z)) < 1e-6


class TestCircleArithmetic:
    def test_canonical(self):
        assert circle_make(Z2, 2, 2) == CircleElem(1, 1)
        assert circle_make(Z3, 9, 2) == CIRCLE_ZERO
        assert circle_add(Z2, CircleElem(1, 1), CircleElem(1, 1)) == CIRCLE_ZERO

    def test_group_laws(self):
        rng = random.Random(9)
        for _ in range(100):
            u = circle_make(Z3, rng.randrange(27), 3)
            v = circle_make(Z3, rng.randrange(27), 3)
            w = circle_make(Z3, rng.randrange(27), 3)
            assert circle_add(Z3, u, v) == circle_add(Z3, v, u)
            assert circle_add(Z3, circle_add(Z3, u, v), w) == circle_add(
                Z3, u, circle_add(Z3, v, w)
            )
