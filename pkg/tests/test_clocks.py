"""
Tests for clock expressions and their evaluation
"""

import itertools

import numpy as np
import pytest

from backend.clocks.evaluator import (
    eval_delay_for,
    eval_expr,
    eval_infimum,
    eval_periodic_on,
    eval_supremum,
)
from backend.clocks.expressions import DelayFor, Inf, Named, PeriodicOn, Sup, inf_of, referenced_clocks, sup_of
from backend.errors import BadParameter, CyclicDefinition, UnknownClock
from backend.trace.run import build_run, history_from_ticks


def kth_tick_oracle(left, right, combine, continue_longer):
    """Build the k-th-tick min/max construction with plain loops"""
    derived = []
    for k in range(max(len(left), len(right))):
        if k < len(left) and k < len(right):
            derived.append(combine(left[k], right[k]))
        elif continue_longer:
            derived.append(left[k] if k < len(left) else right[k])
    return sorted(set(derived))


class TestEvalExpr:
    """Test the recursive evaluator"""

    def test_named_identity(self):
        """A named clock evaluates to its own ticks"""
        run = build_run({"c": [0, 2]}, 4)
        assert list(eval_expr(run, Named("c"))) == [0, 2]

    def test_periodic_one_is_identity(self):
        """periodicOn with period 1 reproduces the base"""
        run = build_run({"ms": list(range(10))}, 9)
        assert list(eval_expr(run, PeriodicOn(Named("ms"), 1))) == list(range(10))

    def test_inf_idempotent(self):
        """inf(e, e) equals e"""
        run = build_run({"c": [1, 4, 6]}, 8)
        e = Named("c")
        assert list(eval_expr(run, Inf(e, e))) == [1, 4, 6]

    def test_unknown_clock(self):
        """Unresolvable names raise UnknownClock"""
        run = build_run({"c": [1]}, 3)
        with pytest.raises(UnknownClock):
            eval_expr(run, Named("nope"))

    def test_definitions_resolve(self):
        """Named nodes fall back to derived definitions"""
        run = build_run({"ms": list(range(10))}, 9)
        defs = {"slow": PeriodicOn(Named("ms"), 5)}
        assert list(eval_expr(run, Named("slow"), defs)) == [4, 9]

    def test_cyclic_definition(self):
        """A definition referring to itself is rejected"""
        run = build_run({"ms": list(range(10))}, 9)
        defs = {"a": DelayFor(Named("a"), Named("ms"), 3)}
        with pytest.raises(CyclicDefinition):
            eval_expr(run, Named("a"), defs)

    def test_mutual_cycle(self):
        """Cycles through several definitions are rejected"""
        run = build_run({"ms": [0]}, 1)
        defs = {"a": Inf(Named("b"), Named("ms")), "b": Sup(Named("a"), Named("ms"))}
        with pytest.raises(CyclicDefinition):
            eval_expr(run, Named("a"), defs)

    def test_deterministic(self):
        """Two evaluations give identical results"""
        run = build_run({"a": [0, 3, 5], "b": [1, 2, 7], "ms": list(range(9))}, 8)
        e = DelayFor(Sup(Named("a"), Named("b")), Named("ms"), 2)
        assert np.array_equal(eval_expr(run, e), eval_expr(run, e))


class TestPeriodicOn:
    """Test periodicOn"""

    def test_every_third(self):
        """Every third base tick"""
        assert list(eval_periodic_on(range(9), 3)) == [2, 5, 8]

    def test_period_fifty(self):
        """Period-50 trigger over 100 steps"""
        assert list(eval_periodic_on(range(100), 50)) == [49, 99]

    def test_sixty_ticks_in_three_seconds(self):
        """An every-step base of length 3000 yields 60 ticks"""
        assert len(eval_periodic_on(range(3000), 50)) == 60

    def test_length_is_floor(self):
        """Output length is floor(|base| / q)"""
        rng = np.random.default_rng(7)
        for _ in range(50):
            base = np.sort(rng.choice(200, size=rng.integers(0, 100), replace=False))
            q = int(rng.integers(1, 10))
            assert len(eval_periodic_on(base, q)) == len(base) // q

    def test_rejects_zero_period(self):
        """Periods below 1 are rejected"""
        with pytest.raises(BadParameter):
            eval_periodic_on([0, 1], 0)
        with pytest.raises(BadParameter):
            PeriodicOn(Named("ms"), 0)


class TestDelayFor:
    """Test delayFor spawn semantics"""

    def test_overlapping_instances_both_fire(self):
        """The second base tick spawns an instance that is not discarded"""
        ref = [1, 2, 3, 4, 5, 6, 7]
        assert list(eval_delay_for([0, 2], ref, 3)) == [3, 5]
        # third reference tick after step 0 at step 4
        assert list(eval_delay_for([0, 2], [0, 1, 3, 4, 5, 6, 8], 3)) == [4, 5]

    def test_reference_every_step(self):
        """Reference ticking at 1..9 with d=3"""
        assert list(eval_delay_for([0, 2], range(1, 10), 3)) == [3, 5]

    def test_zero_delay(self):
        """d=0 coincides with the base"""
        assert list(eval_delay_for([1, 4, 6], range(10), 0)) == [1, 4, 6]

    def test_coincident_reference_tick_does_not_count(self):
        """A reference tick at the spawn step is not counted"""
        assert list(eval_delay_for([2], [2, 3], 1)) == [3]

    def test_pending_instances_dropped(self):
        """Instances still waiting at the end of the run produce nothing"""
        assert list(eval_delay_for([0, 8], range(10), 3)) == [3]

    def test_coalescing(self):
        """Instances firing together produce one tick"""
        assert list(eval_delay_for([0, 1], [5, 6], 1)) == [5]


class TestInfSup:
    """Test infimum and supremum"""

    def test_inf_example(self):
        """Interleaved ticks take the earlier clock"""
        assert list(eval_infimum([0, 2, 4], [1, 3, 5])) == [0, 2, 4]

    def test_sup_example(self):
        """Interleaved ticks take the later clock"""
        assert list(eval_supremum([0, 2, 4], [1, 3, 5])) == [1, 3, 5]

    def test_idempotence(self):
        """inf(a, a) = sup(a, a) = a"""
        assert list(eval_infimum([1, 5], [1, 5])) == [1, 5]
        assert list(eval_supremum([1, 5], [1, 5])) == [1, 5]

    def test_inf_continues_with_longer(self):
        """inf keeps ticking with the longer operand"""
        assert list(eval_infimum([0], [])) == [0]

    def test_sup_waits_for_both(self):
        """sup stops with the shorter operand"""
        assert list(eval_supremum([0], [])) == []

    def test_nested_helpers_fold_left(self):
        """n-ary inf/sup nest to the left"""
        a, b, c = Named("a"), Named("b"), Named("c")
        assert inf_of([a, b, c]) == Inf(Inf(a, b), c)
        assert sup_of([a, b, c]) == Sup(Sup(a, b), c)
        with pytest.raises(BadParameter):
            inf_of([a])

    def test_referenced_clocks(self):
        """Names are collected in first-seen order"""
        e = DelayFor(Inf(Named("a"), Named("b")), Named("ms"), 40)
        assert referenced_clocks(e) == ["a", "b", "ms"]

    def test_random_oracle(self):
        """inf/sup match the k-th tick min/max construction on random runs"""
        rng = np.random.default_rng(2024)
        for _ in range(10000):
            n = int(rng.integers(1, 21))
            left = sorted(rng.choice(n, size=rng.integers(0, n + 1), replace=False).tolist())
            right = sorted(rng.choice(n, size=rng.integers(0, n + 1), replace=False).tolist())
            assert list(eval_infimum(left, right)) == kth_tick_oracle(left, right, min, True)
            assert list(eval_supremum(left, right)) == kth_tick_oracle(left, right, max, False)

    def test_history_lattice(self):
        """History of inf is the max of histories, sup the min, over all 2-clock runs of 6 steps"""
        n = 5
        for assignment in itertools.product(range(4), repeat=n + 1):
            a = [i for i, v in enumerate(assignment) if v & 1]
            b = [i for i, v in enumerate(assignment) if v & 2]
            ha, hb = history_from_ticks(np.array(a, dtype=np.int64), n), history_from_ticks(np.array(b, dtype=np.int64), n)
            h_inf = history_from_ticks(eval_infimum(a, b), n)
            h_sup = history_from_ticks(eval_supremum(a, b), n)
            assert np.array_equal(h_inf, np.maximum(ha, hb))
            assert np.array_equal(h_sup, np.minimum(ha, hb))

    def test_inf_before_sup(self):
        """Per index, the inf tick is never after the sup tick"""
        rng = np.random.default_rng(11)
        for _ in range(500):
            left = sorted(rng.choice(30, size=rng.integers(0, 30), replace=False).tolist())
            right = sorted(rng.choice(30, size=rng.integers(0, 30), replace=False).tolist())
            lo, hi = eval_infimum(left, right), eval_supremum(left, right)
            assert np.all(lo[: hi.size] <= hi)
