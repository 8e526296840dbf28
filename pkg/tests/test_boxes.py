import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entropicns.boxes import (
    NAMED_BOXES,
    SCAN_COLUMNS,
    OptimizerConfig,
    evaluate,
    ghz_box,
    ghz_s_lns,
    mix,
    named_box,
    optimize_ghz_violation,
    read_scan_csv,
    scan_csv,
    uniform,
    white_noise,
)
from entropicns.classify.registry import get
from entropicns.entropy import entropy_vector
from entropicns.scenarios import bell_scenario

from reference_data import GHZ_D2_OPTIMUM


def csc_formula(d, a, b, c, alphas):
    """sin^2(g) / sin^2(g/d) / d^4 with the removable singularity filled in."""
    s = a + b + c + sum(alphas)
    g = math.pi * s
    if float(s / d).is_integer():
        return d**2 / d**4
    return math.sin(g) ** 2 / math.sin(g / d) ** 2 / d**4


class TestNamedBoxes:
    @pytest.mark.parametrize("name", NAMED_BOXES)
    def test_exact_normalised_and_nonsignaling(self, name):
        box = named_box(name)
        assert box.exact
        assert box.is_normalized()
        assert box.is_nonsignaling()

    def test_pr_entries(self):
        box = named_box("pr")
        for x, y, a, b in itertools.product(range(2), repeat=4):
            assert box((a, b), (x, y)) == (F(1, 2) if a ^ b == x * y else 0)

    def test_pc3_support(self):
        box = named_box("pc3")
        for a in itertools.product(range(2), repeat=3):
            expected = F(1, 4) if sum(a) % 2 == 0 else F(0)
            assert box(a, (1, 0, 1)) == expected

    def test_unknown(self):
        with pytest.raises(KeyError, match="known"):
            named_box("nope")

    def test_activation_box_marginals(self):
        from entropicns.scenarios import bilocal_scenario

        v = entropy_vector(named_box("biloc_activation"), bilocal_scenario([2, 1, 1]))
        assert v["A0C"] == pytest.approx(2)
        assert v["A0B"] == pytest.approx(1)
        assert v["A1BC"] - v["A1B"] == pytest.approx(0, abs=1e-12)


class TestMixing:
    def test_white_noise_endpoints(self):
        box = named_box("pr")
        assert np.array_equal(white_noise(box, 1).table, box.table)
        assert np.array_equal(white_noise(box, 0).table, uniform((2, 2), (2, 2)).table)

    def test_exact_mix_stays_rational(self):
        m = mix([named_box("pr"), named_box("pc2")], [F(1, 2), F(1, 2)])
        assert m.exact and m.is_normalized()

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            mix([named_box("pr"), named_box("pc3")], [F(1, 2), F(1, 2)])

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            mix([named_box("pr")], [F(2)])
        with pytest.raises(ValueError):
            white_noise(named_box("pr"), 1.5)

    def test_class5_mixture_gives_chsh_value_one(self):
        m = mix([named_box("pr"), named_box("pc2")], [F(1, 2), F(1, 2)])
        assert evaluate(get("echsh"), m) == pytest.approx(-1, abs=1e-12)

    def test_pr_does_not_violate_entropic_chsh(self):
        assert evaluate(get("echsh"), named_box("pr")) == pytest.approx(0, abs=1e-12)

    def test_white_noise_is_continuous(self):
        box = mix([named_box("pr"), named_box("pc2")], [F(1, 2), F(1, 2)])
        f = lambda v: evaluate(get("echsh"), white_noise(box, v))  # noqa: E731
        for v in np.linspace(0, 1, 21):
            v = float(v)
            w = v - 1e-8 if v > 0.5 else v + 1e-8
            assert abs(f(v) - f(w)) < 1e-5


def test_evaluate_sees_only_entropies():
    """Relabelling outcomes (anti-correlation instead of correlation) leaves
    entropies and hence every inequality value unchanged."""
    box = named_box("pc2")
    flipped = box.relabel_outcomes(1, [1, 0], setting=0)
    assert not np.array_equal(flipped.table, box.table)
    assert evaluate(get("echsh"), flipped) == pytest.approx(evaluate(get("echsh"), box), abs=1e-12)


def test_evaluate_settings_mismatch():
    with pytest.raises(ValueError):
        evaluate(get("m3"), named_box("pr"))


class TestGHZ:
    def test_d2_zero_phases(self):
        box = ghz_box(2, np.zeros(6))
        for a in itertools.product(range(2), repeat=3):
            expected = 0.25 if sum(a) % 2 == 0 else 0.0
            assert box.table[(0, 0, 0) + a] == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_matches_csc_formula(self, d):
        rng = np.random.default_rng(d)
        al = rng.random((3, 2))
        al[0, 0] = 0.0  # include integer sums for the singular branch
        al[1, 0] = 0.0
        al[2, 0] = 0.0
        box = ghz_box(d, al)
        for x, y, z in itertools.product(range(2), repeat=3):
            for a, b, c in itertools.product(range(d), repeat=3):
                ref = csc_formula(d, a, b, c, (al[0, x], al[1, y], al[2, z]))
                assert box.table[x, y, z, a, b, c] == pytest.approx(ref, abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from([2, 3, 5]), st.lists(st.floats(-3, 3), min_size=6, max_size=6))
    def test_normalised_with_uniform_marginals(self, d, phases):
        box = ghz_box(d, phases)
        assert box.is_normalized(1e-10)
        assert np.all(box.table >= -1e-15) and np.all(box.table <= 1 + 1e-12)
        v = entropy_vector(box, bell_scenario([2, 2, 2]), tol=1e-9)
        for name in ("A0", "B1", "C0"):
            assert v[name] == pytest.approx(math.log2(d), abs=1e-9)
        assert max(v.values) <= 3 * math.log2(d) + 1e-9

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_fast_objective_matches_full_box(self, d):
        rng = np.random.default_rng(10 + d)
        al = rng.random(6)
        full = evaluate(get("s_lns"), ghz_box(d, al))
        assert ghz_s_lns(d, al) == pytest.approx(full, abs=1e-9)

    def test_integer_shift_invariance(self):
        al = np.array([0.1, 0.7, 0.3, 0.2, 0.9, 0.4])
        shifted = al.copy()
        shifted[2:4] += 3
        assert ghz_s_lns(3, shifted) == pytest.approx(ghz_s_lns(3, al), abs=1e-12)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            ghz_box(0, np.zeros(6))


class TestOptimizer:
    def test_d2_matches_grid_oracle(self):
        r = optimize_ghz_violation(2)
        assert abs(r.value - GHZ_D2_OPTIMUM) < 1e-4
        assert r.value <= min(r.start_values) + 1e-15

    def test_deterministic(self):
        cfg = OptimizerConfig(starts=4, seed=3)
        a = optimize_ghz_violation(3, cfg)
        b = optimize_ghz_violation(3, cfg)
        assert a.value == b.value and np.array_equal(a.phases, b.phases)

    def test_phases_in_unit_interval(self):
        r = optimize_ghz_violation(2, OptimizerConfig(starts=3))
        assert np.all((r.phases >= 0) & (r.phases < 1))

    def test_scan_csv_roundtrip(self):
        rs = [optimize_ghz_violation(d, OptimizerConfig(starts=2)) for d in (2, 3)]
        text = scan_csv(rs)
        assert text.splitlines()[0].split(",") == SCAN_COLUMNS
        rows = read_scan_csv(text)
        assert [r["d"] for r in rows] == [2, 3]
        assert rows[0]["S_value"] == rs[0].value
