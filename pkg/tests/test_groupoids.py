import random

import pytest

from groupoidal.groupoids import (DegreeTooLarge, FiniteGroupoid, GModule,
                                  bar_boundary_matrix_b, boundary_matrix_d,
                                  coinvariants_collapse, nerve,
                                  validate_groupoid, validate_module)
from groupoidal.models import (action_groupoid, constant_module, cyclic_table,
                               disjoint_union, full_pair_groupoid,
                               group_groupoid, random_groupoid, random_module,
                               sign_module, space_groupoid)
from groupoidal.zlinalg import (IntMatrix, homology_at, invariant_factors,
                                rank)


def zoo():
    rng = random.Random(7)
    base = [
        group_groupoid(cyclic_table(2)),
        group_groupoid(cyclic_table(3)),
        full_pair_groupoid(3),
        space_groupoid(4),
        action_groupoid(cyclic_table(2), [[0, 1], [1, 0]]),
        disjoint_union(group_groupoid(cyclic_table(2)), full_pair_groupoid(2)),
    ]
    return base + [random_groupoid(rng) for _ in range(4)]


def test_validate_group():
    assert validate_groupoid(group_groupoid(cyclic_table(2))).ok


def test_validate_pair_groupoid():
    assert validate_groupoid(full_pair_groupoid(3)).ok


def test_validate_broken_associativity():
    # corrupt one composition entry of Z/3
    g = group_groupoid(cyclic_table(3))
    comp = dict(g.comp)
    comp[(1, 1)] = 1  # should be 2
    broken = FiniteGroupoid(g.src, g.rng, comp, g.inv, g.units)
    rep = validate_groupoid(broken)
    assert not rep.ok
    assert rep.axiom in ("associativity", "inverse-law", "left-identity",
                         "right-identity", "composition-endpoints")
    assert rep.witness is not None


def test_nerve_counts_group():
    z2 = group_groupoid(cyclic_table(2))
    assert len(nerve(z2, 0)) == 1
    assert len(nerve(z2, 2)) == 4
    for n in range(5):
        assert len(nerve(z2, n)) == 2 ** n


def test_nerve_counts_pair():
    p3 = full_pair_groupoid(3)
    assert len(nerve(p3, 2)) == 27
    for n in range(4):
        assert len(nerve(p3, n)) == 3 ** (n + 1)


def test_nerve_degree_zero_is_units():
    g = space_groupoid(3)
    assert nerve(g, 0).tuples == ((0,), (1,), (2,))


def test_nerve_cap():
    p3 = full_pair_groupoid(3)
    with pytest.raises(DegreeTooLarge):
        nerve(FiniteGroupoid(p3.src, p3.rng, p3.comp, p3.inv, p3.units), 4, cap=10)


def test_boundary_d1_group_is_zero():
    z2 = group_groupoid(cyclic_table(2))
    assert boundary_matrix_d(z2, 1) == IntMatrix.zeros(1, 2)


def test_boundary_d2_z2_columns():
    z2 = group_groupoid(cyclic_table(2))
    d2 = boundary_matrix_d(z2, 2)
    cols = {t: d2.col(i) for i, t in enumerate(nerve(z2, 2).tuples)}
    assert cols[(0, 0)] == [1, 0]
    assert cols[(0, 1)] == [1, 0]
    assert cols[(1, 0)] == [1, 0]
    assert cols[(1, 1)] == [-1, 2]


def test_space_groupoid_alternating_differentials():
    sp = space_groupoid(4)
    for n in (1, 2, 3, 4):
        d = boundary_matrix_d(sp, n)
        if n >= 2 and n % 2 == 0:
            assert d == IntMatrix.identity(4)
        else:
            assert d == IntMatrix.zeros(4, 4)


def test_bar_b0_z2():
    z2 = group_groupoid(cyclic_table(2))
    assert bar_boundary_matrix_b(z2, 0) == IntMatrix.from_rows([[1, 1]])


def test_bar_b1_image_z2():
    z2 = group_groupoid(cyclic_table(2))
    b1 = bar_boundary_matrix_b(z2, 1)
    cols = {tuple(b1.col(j)) for j in range(b1.cols)}
    # every column is 0 or +-([g] - [e])
    assert cols <= {(0, 0), (-1, 1), (1, -1)}
    assert (-1, 1) in cols or (1, -1) in cols


def test_bar_b0_surjective_everywhere():
    for G in zoo():
        b0 = bar_boundary_matrix_b(G, 0)
        assert rank(b0) == G.n_units
        assert all(f == 1 for f in invariant_factors(b0))


def test_boundary_squares_to_zero():
    for G in zoo():
        for n in (1, 2, 3):
            assert (boundary_matrix_d(G, n) * boundary_matrix_d(G, n + 1)).is_zero()


def test_bar_squares_to_zero():
    for G in zoo():
        for n in (0, 1, 2, 3):
            assert (bar_boundary_matrix_b(G, n) * bar_boundary_matrix_b(G, n + 1)).is_zero()


def test_bar_exactness_by_rank():
    for G in zoo():
        for n in (0, 1, 2):
            b_out = bar_boundary_matrix_b(G, n)
            b_in = bar_boundary_matrix_b(G, n + 1)
            assert rank(b_out) + rank(b_in) == b_in.rows
            assert homology_at(b_out, b_in).is_trivial


def test_bridging_identity():
    for G in zoo():
        for n in (1, 2, 3):
            lhs = coinvariants_collapse(G, n - 1) * bar_boundary_matrix_b(G, n)
            rhs = boundary_matrix_d(G, n) * coinvariants_collapse(G, n)
            assert lhs == rhs


def test_bridging_z2_both_zero():
    z2 = group_groupoid(cyclic_table(2))
    prod = coinvariants_collapse(z2, 0) * bar_boundary_matrix_b(z2, 1)
    assert prod.is_zero()
    assert (boundary_matrix_d(z2, 1) * coinvariants_collapse(z2, 1)).is_zero()


def test_coinvariants_q0():
    z2 = group_groupoid(cyclic_table(2))
    assert coinvariants_collapse(z2, 0) == IntMatrix.from_rows([[1, 1]])


def test_coinvariants_selects_tail():
    p3 = full_pair_groupoid(3)
    q1 = coinvariants_collapse(p3, 1)
    nv2 = nerve(p3, 2)
    nv1 = nerve(p3, 1)
    for j, t in enumerate(nv2.tuples):
        col = q1.col(j)
        assert col[nv1.index[t[1:]]] == 1
        assert sum(map(abs, col)) == 1


def test_validate_module_constant_and_sign():
    z2 = group_groupoid(cyclic_table(2))
    assert validate_module(z2, constant_module(z2, 1)).ok
    assert validate_module(z2, sign_module(z2)).ok
    # (-1)^2 = 1 is what makes the sign module close up
    sm = sign_module(z2)
    assert sm.act(1) * sm.act(1) == IntMatrix.identity(1)


def test_validate_module_rejects_non_unimodular():
    z2 = group_groupoid(cyclic_table(2))
    bad = GModule(z2, {0: 1}, {0: IntMatrix.identity(1),
                               1: IntMatrix.from_rows([[2]])})
    rep = validate_module(z2, bad)
    assert not rep.ok
    assert rep.axiom in ("unimodular", "action-functorial")


def test_validate_random_modules():
    rng = random.Random(13)
    for _ in range(8):
        G = random_groupoid(rng)
        M = random_module(G, rng)
        assert validate_module(G, M).ok
