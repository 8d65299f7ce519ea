"""Tower shifting: pinned step examples, termination, monotonicity,
contraction, and family-level flattening."""

from fractions import Fraction

import pytest

from conftest import handmade_flow, random_chain, random_tree_space
from folnerflow import (
    Chain,
    FamilyParams,
    FlowEscaped,
    INFINITE_RATIO,
    IndexedFamily,
    base_and_towers,
    escape_warning,
    flatten,
    flatten_family,
    grid_window,
    l1_distance,
    shift_step,
    singleton_family,
    tent_family,
)
from folnerflow.rips import build_flow, build_rips


def forward_path_flow(n=8):
    # sigma(i) = i + 1 with the sink at the right end
    return handmade_flow({i: i + 1 for i in range(n - 1)}, sinks={n - 1}, n=n)


SPINE = 32  # empty drain path below every chain: 30 units can never pile up


def tree_flow(rng, n=120, spine=SPINE):
    space = random_tree_space(rng, n, spine)
    flow = build_flow(space, build_rips(space, 1))
    support = list(range(spine, space.n))  # keep chains off the drain
    return space, flow, support


class TestShiftStep:
    def test_path_example(self):
        flow = forward_path_flow()
        assert shift_step(Chain({0: 3}), flow) == Chain({0: 1, 1: 2})

    def test_flat_chains_are_fixed_points(self):
        flow = forward_path_flow()
        for pts in ({0}, {0, 1}, {2, 5}, {0, 3, 6}):
            a = Chain.from_set(pts)
            assert shift_step(a, flow) == a

    def test_star_redistribution(self):
        # two leaves feeding one centre: both towers land simultaneously
        flow = handmade_flow({0: 2, 1: 2}, sinks={2}, n=3)
        out = shift_step(Chain({0: 2, 1: 2}), flow)
        assert out == Chain({0: 1, 1: 1, 2: 2})
        assert out.l1() == 4

    def test_snapshot_semantics(self):
        # base/towers come from the input snapshot: mass arriving at a
        # point does not count toward that point's towers in the same step
        flow = forward_path_flow()
        a = Chain({0: 2, 1: 2})
        assert shift_step(a, flow) == Chain({0: 1, 1: 2, 2: 1})

    def test_tower_on_sink_escapes(self):
        flow = forward_path_flow(3)
        with pytest.raises(FlowEscaped):
            shift_step(Chain({2: 2}), flow)

    def test_point_outside_flow(self):
        flow = forward_path_flow(3)
        with pytest.raises(ValueError):
            shift_step(Chain({9: 1}), flow)


class TestFlatten:
    def test_path_example(self):
        flow = forward_path_flow()
        flat, trace = flatten(Chain({0: 3}), flow)
        assert flat == Chain.from_set({0, 1, 2})
        assert trace.steps == 2
        assert trace.bound == 6  # l1 norm 3 times tower mass 2
        assert not trace.escaped

    def test_already_flat(self):
        flow = forward_path_flow()
        a = Chain.from_set({1, 4})
        flat, trace = flatten(a, flow)
        assert flat == a
        assert trace.steps == 0 and trace.bound == 0

    def test_escape_on_short_path(self):
        # mass 4 at sigma-depth 2: three tower units cannot fit in two slots
        flow = forward_path_flow(3)
        with pytest.raises(FlowEscaped):
            flatten(Chain({0: 4}), flow)

    def test_empty_chain_rejected(self):
        with pytest.raises(ValueError):
            flatten(Chain(), forward_path_flow())

    def test_escape_warning_is_advisory(self):
        flow = forward_path_flow(200)
        a = Chain({0: 3})
        assert escape_warning(a, flow) is None  # depth 199 > budget 6
        b = Chain({190: 4})
        assert escape_warning(b, flow) is not None  # loose budget warns
        flat, _ = flatten(b, flow)  # and yet the run finishes fine
        assert flat.is_flat()


class TestClaims:
    def test_norm_preserved_randomized(self, rng):
        for _ in range(100):
            space, flow, support = tree_flow(rng)
            a = random_chain(rng, support, 30)
            assert shift_step(a, flow).l1() == a.l1()
            flat, _ = flatten(a, flow)
            assert flat.l1() == a.l1()

    def test_monotone_in_the_chain(self, rng):
        # a <= a' pointwise is preserved by every step
        for _ in range(60):
            space, flow, support = tree_flow(rng)
            big = random_chain(rng, support, 30)
            small = Chain({
                x: rng.randint(0, v) for x, v in big.items()
            })
            if not small:
                continue
            a, b = small, big
            for _step in range(40):
                assert a <= b
                if a.is_flat() and b.is_flat():
                    break
                a, b = shift_step(a, flow), shift_step(b, flow)

    def test_termination_with_epochal_tower_decrease(self, rng):
        # while towers remain, the support strictly grows and the tower
        # mass strictly drops within every window of l1-norm many steps
        for _ in range(40):
            space, flow, support = tree_flow(rng)
            a = random_chain(rng, support, 25)
            norm = a.l1()
            towers_norm = [base_and_towers(a)[1].l1()]
            supports = [a.support()]
            cur = a
            while not cur.is_flat():
                cur = shift_step(cur, flow)
                towers_norm.append(base_and_towers(cur)[1].l1())
                supports.append(cur.support())
            assert len(towers_norm) - 1 <= norm * towers_norm[0]
            for k in range(len(towers_norm)):
                if towers_norm[k] == 0:
                    continue
                window = towers_norm[k + 1: k + 1 + norm]
                assert min(window, default=0) < towers_norm[k]
                grown = supports[min(k + norm, len(supports) - 1)]
                assert supports[k] < grown or towers_norm[min(k + norm, len(towers_norm) - 1)] == 0
            for s, t in zip(supports, supports[1:]):
                assert s <= t

    def test_meet_inequality_and_contraction(self, rng):
        for _ in range(60):
            space, flow, support = tree_flow(rng)
            a = random_chain(rng, support, 30)
            b = random_chain(rng, support, 30)
            fa, _ = flatten(a, flow)
            fb, _ = flatten(b, flow)
            m = a.meet(b)
            if m:
                fm, _ = flatten(m, flow)
                assert fm <= fa.meet(fb)
            assert fa.setminus(fb).l1() <= a.setminus(b).l1()
            assert l1_distance(fa, fb) <= l1_distance(a, b)
            assert a.meet(b).l1() <= fa.meet(fb).l1()

    def test_support_locality(self, rng):
        for _ in range(40):
            space, flow, support = tree_flow(rng)
            a = random_chain(rng, support, 20)
            out = shift_step(a, flow)
            for z in out.support():
                assert min(space.dist(z, x) for x in a.support()) <= flow.r


class TestFlattenFamily:
    def build_line(self, lo=-60, hi=60):
        space = grid_window(1, lo, hi)
        flow = build_flow(space, build_rips(space, 1))
        return space, flow

    def test_tent_family_flattens_and_contracts(self):
        space, flow = self.build_line()
        core = range(75, 105)  # far enough from the sink end for mass 36
        fam = tent_family(space, 6, R=1, epsilon=Fraction(1, 4), core=core)
        out, report = flatten_family(fam, flow)
        assert out.is_flat()
        assert not report.escaped_indices
        assert report.pair_regressions == []
        assert report.worst_ratio_after <= report.worst_ratio_before
        assert report.new_S == fam.params.S + flow.r * report.max_steps
        for x in core:
            for z in out.chains[x].support():
                assert space.dist(x, z) <= report.new_S

    def test_already_flat_family_unchanged(self):
        space, flow = self.build_line()
        chains = {x: Chain.from_set({x, x + 1}) for x in range(40, 50)}
        fam = IndexedFamily(space=space, chains=chains,
                            params=FamilyParams(R=1, epsilon=1, S=1))
        out, report = flatten_family(fam, flow)
        assert out.chains == chains
        assert report.max_steps == 0
        assert report.new_S == fam.params.S

    def test_singleton_family_reports_infinity_faithfully(self):
        space, flow = self.build_line()
        fam = singleton_family(space, R=1, epsilon=Fraction(1, 4),
                               core=range(40, 50))
        out, report = flatten_family(fam, flow)
        assert out.chains == fam.chains
        assert report.worst_ratio_before == INFINITE_RATIO
        assert report.worst_ratio_after == INFINITE_RATIO

    def test_escape_names_index(self):
        space, flow = self.build_line(0, 30)
        fam = IndexedFamily(
            space=space,
            chains={3: Chain({3: 9})},  # depth 3, mass 9: must escape
            params=FamilyParams(R=1, epsilon=1, S=0),
        )
        with pytest.raises(FlowEscaped) as exc:
            flatten_family(fam, flow)
        assert exc.value.index == 3

    def test_escape_collect_mode(self):
        space, flow = self.build_line(0, 30)
        chains = {3: Chain({3: 9}), 20: Chain({20: 3})}
        fam = IndexedFamily(space=space, chains=chains,
                            params=FamilyParams(R=1, epsilon=1, S=0))
        out, report = flatten_family(fam, flow, on_escape="collect")
        assert report.escaped_indices == [3]
        assert set(out.chains) == {20}
        assert report.escaped_traces[3].escaped

    def test_jobs_parallel_matches_serial(self):
        space, flow = self.build_line()
        fam = tent_family(space, 5, R=1, epsilon=Fraction(1, 4),
                          core=range(70, 100))
        out1, rep1 = flatten_family(fam, flow, jobs=1)
        out4, rep4 = flatten_family(fam, flow, jobs=4)
        assert out1.chains == out4.chains
        assert rep1.to_json() == rep4.to_json()
