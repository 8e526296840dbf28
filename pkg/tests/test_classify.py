import dataclasses
import itertools
import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropicns.boxes import Box, mix, named_box, white_noise
from entropicns.classify import (
    PROOFS,
    REGISTRY,
    S_LNS_SHORT,
    SymmetryGroup,
    canonical_form,
    check_hybrid_validity,
    check_validity,
    classify,
    derive_inequality,
    derive_with_noise,
    get,
    gtnl_membership_general,
    hybrid_membership,
    is_bilocal,
    is_gtnl_extremal,
    is_local,
    orbit_classes,
    ray_labels,
    scenario_group,
    verify_all,
    verify_proof,
)
from entropicns.entropy import EntropyVector, entropy_vector
from entropicns.exactgeom import dd_enumerate, primitive
from entropicns.scenarios import (
    bell_scenario,
    bilocal_scenario,
    ic_cone,
    ic_scenario,
    local_system,
    ns_cone,
)

from reference_data import TABLE_2x2, TABLE_3x3


def table_vector(sc, row):
    return EntropyVector(sc.space, tuple(F(x) for x in (0,) + tuple(row)))


def echsh_orbit(group):
    return group.orbit(tuple(get("echsh").form.coeffs))


@pytest.fixture(scope="module")
def enumerated():
    """Rays of the three small cones together with their symmetry groups."""
    out = {}
    for name, sc in (("2x2", bell_scenario([2, 2])), ("3x3", bell_scenario([3, 3]))):
        out[name] = (sc, dd_enumerate(ns_cone(sc)).rays, scenario_group(sc))
    sc = ic_scenario()
    out["ic"] = (sc, dd_enumerate(ic_cone()).rays, scenario_group(sc))
    return out


class TestSymmetry:
    @pytest.mark.parametrize("settings_, order", [([2, 2], 8), ([3, 3], 72), ([2, 2, 2], 48)])
    def test_group_orders(self, settings_, order):
        assert scenario_group(bell_scenario(settings_)).order == order

    def test_ic_group_is_trivial(self):
        assert scenario_group(ic_scenario()).order == 1

    def test_bilocal_network_group_only_swaps_end_parties(self):
        sc = bilocal_scenario([2, 2, 2])
        assert scenario_group(sc).order == 16
        assert scenario_group(sc, network=False).order == 48

    def test_canonical_form_is_orbit_minimum(self):
        sc = bell_scenario([2, 2])
        g = scenario_group(sc)
        ray = table_vector(sc, TABLE_2x2[2]).values
        assert canonical_form(ray, g) == min(g.orbit(ray))
        for image in g.orbit(ray):
            assert canonical_form(image, g) == canonical_form(ray, g)

    def test_trivial_group_keeps_every_ray(self):
        sc = bell_scenario([2, 2])
        rays = dd_enumerate(ns_cone(sc)).rays
        assert len(orbit_classes(rays, SymmetryGroup.trivial(sc.space))) == len(rays)

    @pytest.mark.parametrize("name", ["2x2", "3x3", "ic"])
    def test_classes_invariant_under_scaling(self, enumerated, name):
        _, rays, group = enumerated[name]
        base = [c.representative for c in orbit_classes(rays, group)]
        scaled = [tuple(x * (k % 5 + 2) for x in r) for k, r in enumerate(rays)]
        assert [c.representative for c in orbit_classes(scaled, group)] == base

    @pytest.mark.parametrize("name", ["2x2", "3x3", "ic"])
    def test_classes_invariant_under_symmetry(self, enumerated, name):
        _, rays, group = enumerated[name]
        base = orbit_classes(rays, group)
        moved = [group.act(k % group.order, r) for k, r in enumerate(rays)]
        again = orbit_classes(moved, group)
        assert [c.representative for c in again] == [c.representative for c in base]
        assert [c.members for c in again] == [c.members for c in base]

    @pytest.mark.parametrize("name", ["2x2", "3x3"])
    def test_locality_is_constant_on_classes(self, enumerated, name):
        sc, rays, group = enumerated[name]
        for c in orbit_classes(rays, group):
            verdicts = {is_local(rays[i], sc) for i in c.members}
            assert len(verdicts) == 1


class TestRegistryValidity:
    @pytest.mark.parametrize("name", [k for k, v in REGISTRY.items() if v.system() is not None])
    def test_registered_inequalities_are_valid(self, name):
        ineq = get(name)
        assert check_validity(ineq.form, ineq.space, ineq.system()).valid

    def test_s_lns_valid_on_every_hybrid(self):
        ineq = get("s_lns")
        assert all(check_hybrid_validity(ineq.form, ineq.space, ineq.scenario).values())

    def test_short_variant_is_invalid_on_every_hybrid(self):
        res = check_hybrid_validity(S_LNS_SHORT.form, S_LNS_SHORT.space, S_LNS_SHORT.scenario)
        assert not any(res.values())

    def test_negated_echsh_has_witness(self):
        ineq = get("echsh")
        sc = ineq.scenario
        system = local_system(sc)
        v = check_validity(-ineq.form, ineq.space, system)
        assert not v.valid
        w = v.witness
        assert w is not None
        # the witness lies in the system and violates the negated form
        assert all(f.dot(w) >= 0 for f in system.inequalities)
        assert all(f.dot(w) == 0 for f in system.equalities)
        assert ineq.form.dot([w[system.space.index(m)] for m in sc.space.masks]) > 0

    def test_echsh_is_not_valid_for_nonsignaling(self):
        ineq = get("echsh")
        assert not check_validity(ineq.form, ineq.space, ns_cone(ineq.scenario)).valid

    def test_unknown_name(self):
        with pytest.raises(KeyError, match="echsh"):
            get("nope")


class TestMembership:
    def test_pr_ray_is_nonlocal(self):
        sc = bell_scenario([2, 2])
        assert not is_local(table_vector(sc, TABLE_2x2[4]), sc)
        assert all(is_local(table_vector(sc, r), sc) for r in TABLE_2x2[:4])

    def test_float_vectors_use_tolerance(self):
        sc = bell_scenario([2, 2])
        assert is_local(entropy_vector(named_box("pc2"), sc), sc)
        assert not is_local(entropy_vector(mix([named_box("pr"), named_box("pc2")], [F(1, 2)] * 2), sc), sc)

    @pytest.mark.parametrize("pair", [("xyz", "pc3"), ("nltri", "pc3")])
    def test_gtnl_tests_agree(self, pair):
        sc = bell_scenario([2, 2, 2])
        box = mix([named_box(n) for n in pair], [F(1, 2), F(1, 2)])
        vec = entropy_vector(box, sc, exact=True)
        assert is_gtnl_extremal(vec, sc) == (not gtnl_membership_general(vec, sc))

    def test_hybrid_membership_keys(self):
        sc = bell_scenario([2, 2, 2])
        vec = entropy_vector(named_box("pc3"), sc, exact=True)
        res = hybrid_membership(vec, sc)
        assert set(res) == {"A|BC", "B|AC", "C|AB"} and all(res.values())

    def test_activation_ray_is_local_not_bilocal(self):
        sc = bilocal_scenario([2, 1, 1])
        vec = entropy_vector(named_box("biloc_activation"), sc, exact=True)
        assert is_local(vec, sc) and not is_bilocal(vec, sc)
        assert ray_labels(vec.values, sc, ["local", "bilocal"]) == {"local", "nonbilocal", "genuinely_nonbilocal"}


@settings(max_examples=120, deadline=None)
@given(
    st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), min_size=1, max_size=4),
    st.lists(st.floats(0.05, 1.0), min_size=4, max_size=4),
)
def test_shared_randomness_boxes_are_local(strategies, weights):
    """Mixtures of deterministic strategies always admit a joint distribution."""
    t = np.zeros((2, 2, 2, 2))
    w = np.array(weights[: len(strategies)])
    w = w / w.sum()
    for (fa, fb), p in zip(strategies, w):
        for x, y in itertools.product(range(2), repeat=2):
            t[x, y, fa >> x & 1, fb >> y & 1] += p  # fa, fb encode the response tables
    sc = bell_scenario([2, 2])
    assert is_local(entropy_vector(Box((2, 2), (2, 2), t), sc), sc)


class TestCertificates:
    def test_all_builtin_certificates_verify(self):
        results = verify_all()
        assert len(results) == len(PROOFS) == 8
        assert all(r.ok for r in results), [r.message for r in results if not r.ok]

    def test_bilocal_rows_without_extra_row_fall_short_by_mutual_information(self):
        proof = PROOFS["s_bl"]
        trimmed = dataclasses.replace(proof, rows=[r for r in proof.rows if r[0] != "H(A1) + H(C1) >= H(A1C1)"])
        res = verify_proof(trimmed)
        assert not res.ok
        assert sorted(res.mismatch) == ["A1", "A1C1", "C1"]

    def test_wrong_multiplier_is_caught(self):
        proof = PROOFS["monogamy"]
        rows = list(proof.rows)
        rows[0] = (rows[0][0], F(2))
        assert not verify_proof(dataclasses.replace(proof, rows=rows)).ok

    def test_unknown_row_is_reported(self):
        proof = dataclasses.replace(PROOFS["monogamy"], rows=[("H(A0) >= H(A0B0C0)", F(1))])
        res = verify_proof(proof)
        assert not res.ok and res.message


class TestDerive:
    def test_pr_ray_yields_entropic_chsh(self):
        sc = bell_scenario([2, 2])
        vec = table_vector(sc, TABLE_2x2[4])
        d = derive_inequality(vec, local_system(sc))
        assert d.violation < 0
        assert tuple(primitive(d.form.coeffs)) in echsh_orbit(scenario_group(sc))

    def test_tripartite_ray_yields_valid_violated_inequality(self):
        sc = bell_scenario([2, 2, 2])
        vec = entropy_vector(mix([named_box("nltri"), named_box("pc3")], [F(1, 2)] * 2), sc, exact=True)
        system = local_system(sc)
        d = derive_inequality(vec, system)
        assert d.violation < 0
        assert check_validity(d.form, sc.space, system).valid

    def test_local_ray_has_nothing_to_derive(self):
        from entropicns.exactgeom import FeasibleSystemError

        sc = bell_scenario([2, 2])
        with pytest.raises(FeasibleSystemError):
            derive_inequality(table_vector(sc, TABLE_2x2[3]), local_system(sc))

    def test_noise_loop_stops_at_membership(self):
        sc = bell_scenario([2, 2])
        box = mix([named_box("pr"), named_box("pc2")], [F(1, 2)] * 2)
        run = derive_with_noise(box, sc, local_system(sc), [F(1), F(9, 10), F(1, 2), F(0)])
        assert run.results and run.member_at is not None
        assert all(r.violation < 0 for r in run.results)
        assert run.tightest.visibility == run.results[-1].visibility

    def test_white_noise_reaches_locality(self):
        sc = bell_scenario([2, 2])
        assert is_local(entropy_vector(white_noise(named_box("pr"), F(0)), sc), sc)


class TestReport:
    def test_bipartite_report(self):
        sc = bell_scenario([2, 2])
        res = classify(dd_enumerate(ns_cone(sc)), sc, ["local"], scenario_group(sc))
        assert res.counts() == {"total": 5, "local": 4, "nonlocal": 1}
        data = json.loads(res.to_json())
        assert data["group_order"] == 8 and data["rays"] == 17
        assert len(data["classes"]) == 5
        assert sum(c["orbit_size"] for c in data["classes"]) == 17
        assert data["notes"]  # four variables: Shannon relaxation is flagged

    def test_ic_labels(self, enumerated):
        sc, rays, _ = enumerated["ic"]
        res = classify(rays, sc, ["ic"])
        assert res.counts() == {"total": 8, "ic_violating": 1}

    def test_rejects_unknown_label(self):
        sc = bell_scenario([2, 2])
        with pytest.raises(ValueError, match="unknown label"):
            classify([], sc, ["banana"])

    def test_threads_give_same_labels(self, enumerated):
        sc, rays, group = enumerated["3x3"]
        a = classify(rays, sc, ["local"], group)
        b = classify(rays, sc, ["local"], group, threads=2)
        assert a.to_dict() == b.to_dict()
