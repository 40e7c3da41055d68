"""Dual-functor coordinates, pairing, double dual and functional extension."""

from fractions import Fraction

import pytest

from dvrdual.duality import (
    DualElem,
    TEndo,
    basis_functional,
    check_inf_res_square,
    dual_add,
    dual_elements,
    dual_hom,
    dual_structure,
    dual_zero,
    double_dual_map,
    double_dual_raw,
    element_order_exp,
    eval_pairing,
    extend_hom,
    i_x_forward,
    i_x_inverse,
    make_dual_elem,
    t_endo_apply,
)
from dvrdual.errors import InconsistentLiftError, NotTorsionError
from dvrdual.modules import (
    InvariantFactors,
    ModElem,
    apply_hom,
    elem_from_ints,
    hom_identity,
    hom_zero,
    make_hom,
)
from dvrdual.ring import (
    EQUAL_CHAR,
    MIXED_CHAR,
    RingCtx,
    T_ZERO,
    TElem,
    r_from_digits,
    r_from_int,
    r_to_int,
    t_from_fraction,
)

Z2 = RingCtx(MIXED_CHAR, 2, default_precision=8)
Z3 = RingCtx(MIXED_CHAR, 3, default_precision=8)
Z5 = RingCtx(MIXED_CHAR, 5, default_precision=8)
F2X = RingCtx(EQUAL_CHAR, 2, default_precision=8)


def telem_from_fraction(ctx, fr: Fraction) -> TElem:
    """Oracle route: reduce a rational with p-power denominator directly."""
    p = ctx.p
    n = 0
    while fr.denominator != 1:
        fr *= p
        n += 1
    return t_from_fraction(ctx, r_from_int(ctx, int(fr), max(n, 1)), n)


class TestDualStructure:
    def test_mixed_shape(self):
        d = dual_structure(InvariantFactors((1, 2), 1))
        assert d.torsion_exps == (1, 2) and d.t_copies == 1

    def test_zero(self):
        d = dual_structure(InvariantFactors())
        assert d.torsion_exps == () and d.t_copies == 0

    def test_pure_torsion(self):
        d = dual_structure(InvariantFactors((3,)))
        assert d.torsion_exps == (3,) and d.t_copies == 0

    def test_counting(self):
        for ctx in (Z2, Z3, F2X):
            for m in (InvariantFactors((1,)), InvariantFactors((1, 2)), InvariantFactors((2, 2))):
                duals = list(dual_elements(ctx, m))
                assert len(duals) == len(set(duals)) == m.size(ctx.q)


class TestEvalPairing:
    def test_torsion_example(self):
        m = InvariantFactors((2,))
        d = dual_structure(m)
        phi = make_dual_elem(Z3, d, (r_from_int(Z3, 2, 2),))
        got = eval_pairing(Z3, d, phi, elem_from_ints(Z3, m, [6]))
        assert got == telem_from_fraction(Z3, Fraction(2 * 6, 9)) == TElem(1, (1,))

    def test_zero_functional(self):
        m = InvariantFactors((1, 2))
        d = dual_structure(m)
        for vals in ([0, 0], [1, 3], [2, 2]):
            assert eval_pairing(Z3, d, dual_zero(Z3, d), elem_from_ints(Z3, m, vals)) == T_ZERO

    def test_free_example(self):
        m = InvariantFactors((), 1)
        d = dual_structure(m)
        phi = make_dual_elem(Z3, d, (), (TElem(1, (1,)),))
        got = eval_pairing(Z3, d, phi, elem_from_ints(Z3, m, [], [2]))
        assert got == telem_from_fraction(Z3, Fraction(2, 3)) == TElem(1, (2,))

    def test_biadditive(self):
        m = InvariantFactors((2, 3))
        d = dual_structure(m)
        duals = list(dual_elements(Z2, m))
        phi, psi = duals[5], duals[11]
        a = elem_from_ints(Z2, m, [1, 3])
        b = elem_from_ints(Z2, m, [2, 7])
        from dvrdual.modules import elem_add
        from dvrdual.ring import t_add

        lhs = eval_pairing(Z2, d, phi, elem_add(Z2, m, a, b))
        rhs = t_add(Z2, eval_pairing(Z2, d, phi, a), eval_pairing(Z2, d, phi, b))
        assert lhs == rhs
        lhs2 = eval_pairing(Z2, d, dual_add(Z2, d, phi, psi), a)
        rhs2 = t_add(Z2, eval_pairing(Z2, d, phi, a), eval_pairing(Z2, d, psi, a))
        assert lhs2 == rhs2


class TestTorsionIdentification:
    def test_forward_example(self):
        t = telem_from_fraction(Z5, Fraction(7, 25))
        assert r_to_int(Z5, i_x_forward(Z5, 2, t)) == 7

    def test_zero(self):
        assert i_x_inverse(Z5, 2, r_from_int(Z5, 0, 2)) == T_ZERO

    def test_half_in_level_three(self):
        t = telem_from_fraction(Z2, Fraction(1, 2))
        assert r_to_int(Z2, i_x_forward(Z2, 3, t)) == 4

    def test_not_torsion(self):
        with pytest.raises(NotTorsionError):
            i_x_forward(Z2, 1, TElem(2, (1, 1)))

    def test_roundtrips(self):
        for ctx in (Z2, Z3, F2X):
            for e in range(1, 4):
                for t in [T_ZERO] + [
                    TElem(n, digits)
                    for n in range(1, e + 1)
                    for digits in _canonical_numerators(ctx.q, n)
                ]:
                    b = i_x_forward(ctx, e, t)
                    assert i_x_inverse(ctx, e, b) == t
                import itertools

                for digits in itertools.product(range(ctx.q), repeat=e):
                    b = r_from_digits(ctx, digits)
                    assert i_x_forward(ctx, e, i_x_inverse(ctx, e, b)) == b


def _canonical_numerators(q, n):
    import itertools

    for first in range(1, q):
        for rest in itertools.product(range(q), repeat=n - 1):
            yield (first,) + rest


class TestDualHom:
    def test_inflation_dualizes_to_restriction(self):
        dom, cod = InvariantFactors((1,)), InvariantFactors((2,))
        h = make_hom(Z2, dom, cod, [[r_from_int(Z2, 2, 2)]])
        dh = dual_hom(Z2, h)
        assert dh.domain == cod and dh.codomain == dom
        out = apply_hom(Z2, dh, ModElem((r_from_int(Z2, 3, 2),), ()))
        assert r_to_int(Z2, out.torsion_coords[0]) == 1

    def test_identity_and_zero(self):
        m = InvariantFactors((1, 2))
        assert dual_hom(Z2, hom_identity(Z2, m)).entries == hom_identity(Z2, m).entries
        assert dual_hom(Z2, hom_zero(Z2, m, m)).entries == hom_zero(Z2, m, m).entries

    def test_naturality_all_pairs(self):
        dom, cod = InvariantFactors((1,)), InvariantFactors((2,))
        h = make_hom(Z2, dom, cod, [[r_from_int(Z2, 2, 2)]])
        dh = dual_hom(Z2, h)
        dd, dc = dual_structure(dom), dual_structure(cod)
        checked = 0
        for phi in dual_elements(Z2, cod):
            pulled = apply_hom(Z2, dh, ModElem(phi.torsion_coords, ()))
            pulled_phi = DualElem(pulled.torsion_coords, ())
            for m_int in range(2):
                m = elem_from_ints(Z2, dom, [m_int])
                lhs = eval_pairing(Z2, dd, pulled_phi, m)
                rhs = eval_pairing(Z2, dc, phi, apply_hom(Z2, h, m))
                assert lhs == rhs
                checked += 1
        assert checked == 8


class TestCommutingSquare:
    def test_equal_char_example(self):
        phi = DualElem((r_from_digits(F2X, (1, 1)),), ())
        assert check_inf_res_square(F2X, 1, 2, phi)

    def test_degenerate(self):
        phi = DualElem((r_from_int(Z2, 3, 2),), ())
        assert check_inf_res_square(Z2, 2, 2, phi)

    def test_mixed_example(self):
        phi = DualElem((r_from_int(Z2, 5, 3),), ())
        assert check_inf_res_square(Z2, 1, 3, phi)

    def test_exhaustive_small(self):
        for ctx in (Z2, F2X):
            for b in range(1, 5):
                for a in range(1, b + 1):
                    for phi in dual_elements(ctx, InvariantFactors((b,))):
                        assert check_inf_res_square(ctx, a, b, phi)


class TestDoubleDual:
    def test_torsion_identity(self):
        m = InvariantFactors((2,))
        for v in range(4):
            elem = elem_from_ints(Z2, m, [v])
            assert double_dual_map(Z2, m, elem) == elem

    def test_raw_functional_matches(self):
        m = InvariantFactors((2,))
        elem = elem_from_ints(Z2, m, [3])
        raw = double_dual_raw(Z2, m, elem)
        d = dual_structure(m)
        for phi in dual_elements(Z2, m):
            assert raw(phi) == eval_pairing(Z2, d, phi, elem)

    def test_zero(self):
        m = InvariantFactors((1, 2))
        z = elem_from_ints(Z2, m, [0, 0])
        assert double_dual_map(Z2, m, z) == z

    def test_free_identity(self):
        m = InvariantFactors((), 1)
        elem = elem_from_ints(Z3, m, [], [2], free_precision=4)
        out = double_dual_map(Z3, m, elem)
        assert out == elem and out.free_coords[0].precision == 4

    def test_mixed_module(self):
        m = InvariantFactors((1, 3), 2)
        elem = elem_from_ints(Z2, m, [1, 5], [9, 6], free_precision=6)
        assert double_dual_map(Z2, m, elem) == elem


class TestTEndo:
    def test_examples(self):
        ninth = TElem(2, (1, 0))
        assert t_endo_apply(Z3, TEndo(r_from_int(Z3, 2, 4)), ninth) == TElem(2, (2, 0))
        assert t_endo_apply(Z3, TEndo(r_from_int(Z3, 1, 4)), ninth) == ninth
        assert t_endo_apply(Z3, TEndo(r_from_int(Z3, 3, 4)), ninth) == TElem(1, (1,))

    def test_additive(self):
        from dvrdual.ring import t_add

        endo = TEndo(r_from_int(Z5, 7, 4))
        s, t = TElem(2, (3, 1)), TElem(1, (2,))
        lhs = t_endo_apply(Z5, endo, t_add(Z5, s, t))
        rhs = t_add(Z5, t_endo_apply(Z5, endo, s), t_endo_apply(Z5, endo, t))
        assert lhs == rhs


class TestExtendHom:
    def test_divisibility_example(self):
        m = InvariantFactors((2,))
        g = elem_from_ints(Z2, m, [2])
        psi = extend_hom(Z2, m, [g], [TElem(1, (1,))])
        # psi(1) = 1/4, the smaller of the two preimages {1/4, 3/4}
        assert r_to_int(Z2, psi.torsion_coords[0]) == 1

    def test_zero_lift(self):
        m = InvariantFactors((2,))
        g = elem_from_ints(Z2, m, [2])
        psi = extend_hom(Z2, m, [g], [T_ZERO])
        assert r_to_int(Z2, psi.torsion_coords[0]) == 0

    def test_nothing_to_extend(self):
        m = InvariantFactors((1, 2))
        d = dual_structure(m)
        phi = make_dual_elem(Z2, d, (r_from_int(Z2, 1, 1), r_from_int(Z2, 3, 2)))
        gens = [elem_from_ints(Z2, m, [1, 0]), elem_from_ints(Z2, m, [0, 1])]
        vals = [eval_pairing(Z2, d, phi, g) for g in gens]
        assert extend_hom(Z2, m, gens, vals) == phi

    def test_level_violation(self):
        m = InvariantFactors((1,))
        with pytest.raises(InconsistentLiftError):
            extend_hom(Z2, m, [elem_from_ints(Z2, m, [1])], [TElem(2, (1, 0))])

    def test_relation_violation(self):
        m = InvariantFactors((2,))
        g = elem_from_ints(Z2, m, [1])
        g2 = elem_from_ints(Z2, m, [2])
        with pytest.raises(InconsistentLiftError):
            extend_hom(Z2, m, [g, g2], [TElem(2, (1, 0)), TElem(2, (1, 0))])

    def test_every_functional_on_submodule_lifts(self):
        m = InvariantFactors((1, 2))
        d = dual_structure(m)
        g = elem_from_ints(Z2, m, [1, 2])
        o = element_order_exp(Z2, m, g)
        assert o == 1
        lifted = set()
        for t in (T_ZERO, TElem(1, (1,))):
            psi = extend_hom(Z2, m, [g], [t])
            assert eval_pairing(Z2, d, psi, g) == t
            lifted.add(psi)
        assert len(lifted) == 2


class TestKernelTriviality:
    def test_pairing_separates(self):
        for ctx in (Z2, Z3, F2X):
            m = InvariantFactors((1, 2))
            d = dual_structure(m)
            duals = list(dual_elements(ctx, m))
            import itertools

            for digits0 in itertools.product(range(ctx.q), repeat=1):
                for digits1 in itertools.product(range(ctx.q), repeat=2):
                    elem = ModElem(
                        (r_from_digits(ctx, digits0), r_from_digits(ctx, digits1)), ()
                    )
                    killed = all(
                        eval_pairing(ctx, d, phi, elem) == T_ZERO for phi in duals
                    )
                    is_zero = all(d2 == 0 for d2 in digits0 + digits1)
                    assert killed == is_zero
