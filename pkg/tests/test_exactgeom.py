import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropicns.exactgeom import (
    DDConfig,
    FeasibleSystemError,
    HCone,
    IndexSpace,
    LinearForm,
    ResourceLimitExceeded,
    VCone,
    dd_enumerate,
    facets_from_rays,
    fm_eliminate,
    iis_rows,
    is_feasible,
    lp_check,
    remove_redundant,
    verify_certificate,
    verify_outcome,
)
from entropicns.exactgeom.rational import canonical_ray, rank

from oracles import brute_force_rays, in_cone_of


def cone(rows, eqs=(), d=None):
    d = d or len((list(rows) + list(eqs))[0])
    return HCone(IndexSpace(d), [LinearForm.ge(r) for r in rows], [LinearForm.eq(e) for e in eqs])


def random_pointed(rng, d, m, lo=-3, hi=3):
    while True:
        rows = [[rng.randint(lo, hi) for _ in range(d)] for _ in range(m)]
        if rank([list(map(F, r)) for r in rows]) == d:
            return rows


def ray_set(v):
    return {canonical_ray(r) for r in v.rays}


class TestDoubleDescription:
    def test_quadrant(self):
        v = dd_enumerate(cone([[1, 0], [0, 1]]))
        assert ray_set(v) == {(1, 0), (0, 1)}
        assert v.lineality == []

    def test_halfplane_has_lineality(self):
        v = dd_enumerate(cone([[1, 0]]))
        assert ray_set(v) == {(1, 0)}
        assert [tuple(l) for l in v.lineality] == [(0, 1)]

    def test_square_pyramid(self):
        # cone over a square has four rays
        rows = [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]]
        v = dd_enumerate(cone(rows))
        assert ray_set(v) == {(1, 1, 1), (1, -1, 1), (-1, 1, 1), (-1, -1, 1)}

    def test_equalities_are_respected(self):
        v = dd_enumerate(cone([[1, 0, 0], [0, 1, 0], [0, 0, 1]], eqs=[[1, -1, 0]]))
        assert ray_set(v) == {(1, 1, 0), (0, 0, 1)}

    def test_trivial_cone(self):
        v = dd_enumerate(cone([[1, 0], [-1, 0], [0, 1], [0, -1]]))
        assert v.rays == [] and v.lineality == []

    def test_max_rays(self):
        rows = [[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]]
        with pytest.raises(ResourceLimitExceeded):
            dd_enumerate(cone(rows), DDConfig(max_rays=2))

    def test_against_brute_force_random(self):
        rng = random.Random(11)
        for trial in range(220):
            d = rng.choice([3, 4, 5])
            m = rng.randint(d, 12 if d == 5 else 9)
            rows = random_pointed(rng, d, m)
            expected = brute_force_rays(rows, d)
            got = dd_enumerate(cone(rows))
            assert ray_set(got) == expected, (trial, rows)
            assert got.lineality == []

    def test_orders_and_adjacency_modes_agree(self):
        rng = random.Random(5)
        for _ in range(40):
            rows = random_pointed(rng, 5, 10)
            ref = ray_set(dd_enumerate(cone(rows)))
            for cfg in (DDConfig(order="given"), DDConfig(adjacency="algebraic")):
                assert ray_set(dd_enumerate(cone(rows), cfg)) == ref

    def test_redundant_rows_do_not_change_rays(self):
        rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        extra = rows + [[1, 1, 0], [2, 0, 1]]
        assert ray_set(dd_enumerate(cone(rows))) == ray_set(dd_enumerate(cone(extra)))

    def test_facets_roundtrip(self):
        rng = random.Random(3)
        for _ in range(30):
            rows = random_pointed(rng, 4, 8)
            h = facets_from_rays(dd_enumerate(cone(rows)))
            # same cone: every original row is implied, every facet is a row up to scaling
            prim = {canonical_ray(r) for r in rows}
            for f in h.inequalities:
                assert canonical_ray(f.coeffs) in prim
            assert ray_set(dd_enumerate(h)) == ray_set(dd_enumerate(cone(rows)))

    def test_large_coefficients_use_exact_fallback(self):
        big = 2**45
        rows = [[1, 0, 0], [0, 1, 0], [big, -1, big + 1], [0, 0, 1]]
        got = dd_enumerate(cone(rows))
        assert ray_set(got) == brute_force_rays(rows, 3)


class TestLP:
    def test_optimal_and_certificate(self):
        c = cone([[1, 0], [0, 1], [1, -1]])
        out = lp_check(c, LinearForm.ge([1, 1]))
        assert out.status == "optimal" and out.value == 0
        assert verify_outcome(out, c, LinearForm.ge([1, 1]))

    def test_unbounded(self):
        c = cone([[1, 0]])
        out = lp_check(c, LinearForm.ge([0, 1]))
        assert out.status == "unbounded"
        assert verify_outcome(out, c, LinearForm.ge([0, 1]))

    def test_pins_infeasible(self):
        c = cone([[1, 0, 0], [0, 1, 0], [1, 1, -1]])
        pins = {0: F(0), 1: F(0), 2: F(1)}
        for method in ("auto", "exact"):
            out = lp_check(c, None, pins, method)
            assert out.status == "infeasible"
            assert out.violation < 0
            assert verify_certificate(out.certificate, c)
            assert verify_outcome(out, c, None, pins)

    def test_equalities_with_pins(self):
        c = cone([[1, 0, 0]], eqs=[[1, 1, -1]])
        assert is_feasible(c, {0: F(1), 1: F(2), 2: F(3)})
        assert not is_feasible(c, {0: F(1), 1: F(2), 2: F(4)})

    def test_routes_agree_random(self):
        rng = random.Random(7)
        for _ in range(120):
            d = rng.randint(2, 5)
            rows = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(rng.randint(1, 8))]
            c = cone(rows, d=d)
            obj = LinearForm.ge([rng.randint(-2, 3) for _ in range(d)])
            pins = {j: F(rng.randint(-2, 4), rng.randint(1, 3)) for j in rng.sample(range(d), rng.randint(0, d - 1))}
            a = lp_check(c, obj, pins, "auto")
            b = lp_check(c, obj, pins, "exact")
            assert a.status == b.status
            if a.bounded:
                assert a.value == b.value
            assert verify_outcome(a, c, obj, pins) and verify_outcome(b, c, obj, pins)


class TestFourierMotzkin:
    def test_project_simplex_cone(self):
        # x, y, z >= 0 and z <= x + y projected onto (x, y) is the quadrant
        c = cone([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, -1]])
        p = fm_eliminate(c, [2])
        assert {canonical_ray(f.coeffs) for f in p.inequalities} == {(1, 0), (0, 1)}

    def test_equality_substitution(self):
        c = cone([[1, 0, 0], [0, 1, 0]], eqs=[[1, 1, -1]])
        p = fm_eliminate(c, [0])
        # y >= 0, z - y >= 0
        assert {canonical_ray(f.coeffs) for f in p.inequalities} == {(1, 0), (-1, 1)}

    def test_against_projected_rays(self):
        rng = random.Random(19)
        for _ in range(25):
            rows = random_pointed(rng, 4, 7)
            c = cone(rows)
            rays = [tuple(r) for r in dd_enumerate(c).rays]
            proj = [r[:3] for r in rays]
            p = fm_eliminate(c, [3])
            for r in proj:
                assert all(f.dot(r) >= 0 for f in p.inequalities)
            # completeness: every point of the projection is generated by projected rays
            pr = dd_enumerate(p)
            gens = list(pr.rays) + list(pr.lineality) + [[-x for x in l] for l in pr.lineality]
            for r in gens:
                assert in_cone_of(r, proj)

    def test_row_cap(self):
        rows = [[1, 1, 0, 0, 1], [1, -1, 0, 0, 1], [-1, 1, 0, 0, 1], [-1, -1, 0, 0, 1],
                [0, 0, 1, 1, -1], [0, 0, 1, -1, -1], [0, 0, -1, 1, -1], [0, 0, -1, -1, -1]]
        with pytest.raises(ResourceLimitExceeded):
            fm_eliminate(cone(rows), [4], max_rows=3)

    def test_remove_redundant(self):
        c = cone([[1, 0], [0, 1], [1, 1], [2, 2], [3, 1]], eqs=[[0, 0], [1, -1], [2, -2]])
        r = remove_redundant(c)
        assert len(r.equalities) == 1
        # on the line x = y only one inequality is needed
        assert len(r.inequalities) == 1


class TestIIS:
    def test_minimal(self):
        c = cone([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, -1], [1, 0, -1]])
        pins = {0: F(0), 1: F(0), 2: F(1)}
        rows = iis_rows(c, pins)
        sub = HCone(c.space, [c.inequalities[i] for i in rows], [])
        assert not is_feasible(sub, pins)
        for k in range(len(rows)):
            smaller = HCone(c.space, [c.inequalities[i] for j, i in enumerate(rows) if j != k], [])
            assert is_feasible(smaller, pins)

    def test_feasible_input_raises(self):
        with pytest.raises(FeasibleSystemError):
            iis_rows(cone([[1, 0]]), {0: F(1)})

    def test_custom_oracle(self):
        c = cone([[1, 0], [0, 1], [-1, 0]])
        pins = {0: F(1)}
        rows = iis_rows(c, pins, feasible=lambda h: is_feasible(h, pins))
        assert [c.inequalities[i].coeffs for i in rows] == [(-1, 0)]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=4, max_size=9))
def test_every_ray_satisfies_rows_and_is_extreme(rows):
    c = cone(rows)
    v = dd_enumerate(c)
    lin = [list(l) for l in v.lineality]
    for r in v.rays:
        assert all(f.dot(r) >= 0 for f in c.inequalities)
        tight = [list(f.coeffs) for f in c.inequalities if f.dot(r) == 0]
        # extreme modulo lineality: tight rows pin the ray down to one direction
        assert rank(tight + lin) == 3 if tight else 4 - len(lin) == 1
    for l in lin:
        assert all(f.dot(l) == 0 for f in c.inequalities)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=1, max_size=6),
    st.fractions(min_value=F(1, 9), max_value=9, max_denominator=9),
)
def test_canonical_ray_is_idempotent_and_scale_invariant(vec, lam):
    c = canonical_ray(vec)
    assert canonical_ray(c) == c
    assert canonical_ray([lam * x for x in vec]) == c
