"""
Tests for the STA simulator: delay sampling, race semantics and batches
"""

import logging
import math

import numpy as np
import pytest

from backend.config import PROJECT_ROOT
from backend.errors import GeneratorFailure, InvalidModel, MissingRate, ModelDeadlock
from backend.simulator.batch import simulate_batch
from backend.simulator.engine import location_signal, make_rng, simulate_run
from backend.simulator.model import Automaton, load_model, parse_model
from backend.simulator.sampling import delay_sample
from backend.trace.trace_io import dumps_trace

AV_MODEL = PROJECT_ROOT / "data" / "av" / "av.model.json"


def single(name, locations, edges, clocks=("t",), initial=None):
    return {
        "name": name,
        "clocks": list(clocks),
        "initial": initial or locations[0]["name"],
        "locations": locations,
        "edges": edges,
    }


def stepper(first=0, period=1):
    """Automaton ticking once at `first`, then every `period`"""
    return single(
        "Clock",
        [{"name": "Start", "invariant": {"t": first}}, {"name": "Loop", "invariant": {"t": period}}],
        [
            {"id": "first", "source": "Start", "target": "Loop", "guard": {"t": first}, "reset": ["t"]},
            {"id": "loop", "source": "Loop", "target": "Loop", "guard": {"t": period}, "reset": ["t"]},
        ],
    )


def automaton(**kwargs):
    return Automaton.model_validate(single(**kwargs))


@pytest.fixture(scope="module")
def av_model():
    return load_model(AV_MODEL)


class TestDelaySample:
    """Test sojourn-time sampling of single locations"""

    def test_degenerate_interval(self):
        """Invariant t <= 1 with guard t >= 1 waits exactly 1"""
        a = automaton(
            name="A",
            locations=[{"name": "L", "invariant": {"t": 1}}],
            edges=[{"id": "e", "source": "L", "target": "L", "guard": {"t": 1}}],
        )
        assert delay_sample(a, "L", make_rng(1)) == 1.0

    def test_uniform_window(self):
        """Invariant 8 with guard 4 is uniform on [4, 8]"""
        a = automaton(
            name="A",
            locations=[{"name": "L", "invariant": {"t": 8}}],
            edges=[{"id": "e", "source": "L", "target": "L", "guard": {"t": 4}}],
        )
        rng = make_rng(7)
        samples = np.array([delay_sample(a, "L", rng) for _ in range(10000)])
        assert samples.min() >= 4 and samples.max() <= 8
        assert abs(samples.mean() - 6) < 0.1

    def test_exponential_rate(self):
        """Rate 0.5 without invariant has mean 2"""
        a = automaton(
            name="A",
            clocks=(),
            locations=[{"name": "L", "rate": 0.5}],
            edges=[{"id": "e", "source": "L", "target": "L"}],
        )
        rng = make_rng(11)
        samples = np.array([delay_sample(a, "L", rng) for _ in range(10000)])
        assert abs(samples.mean() - 2) < 0.1

    def test_missing_rate(self):
        """An unbounded location needs a rate"""
        a = automaton(
            name="A",
            clocks=(),
            locations=[{"name": "L"}],
            edges=[{"id": "e", "source": "L", "target": "L"}],
        )
        with pytest.raises(MissingRate):
            delay_sample(a, "L", make_rng(0))

    def test_receive_only_location_is_passive(self):
        """Locations left only by receiving wait forever"""
        a = automaton(
            name="A",
            locations=[{"name": "L"}],
            edges=[{"id": "e", "source": "L", "target": "L", "receive": "go"}],
        )
        assert math.isinf(delay_sample(a, "L", make_rng(0)))

    def test_clock_values_shift_window(self):
        """Elapsed clock time shrinks the window"""
        a = automaton(
            name="A",
            locations=[{"name": "L", "invariant": {"t": 8}}],
            edges=[{"id": "e", "source": "L", "target": "L", "guard": {"t": 8}}],
        )
        assert delay_sample(a, "L", make_rng(0), clock_values={"t": 3.0}) == 5.0


class TestSimulateRun:
    """Test single runs"""

    def test_universal_clock_automaton(self):
        """A unit loop starting at 0 ticks at every step"""
        model = parse_model({"automata": [stepper(0, 1)], "events": {"tick": ["Clock.first", "Clock.loop"]}})
        run = simulate_run(model, 20, seed=1)
        assert run.n == 20
        assert run.ticks("tick").tolist() == list(range(20))

    def test_synthesized_universal_clock(self):
        """The universal clock ticks at 0..bound-1"""
        model = parse_model({"universal": "ms", "automata": [stepper(3, 5)], "events": {"c": ["Clock.first", "Clock.loop"]}})
        run = simulate_run(model, 30, seed=1)
        assert run.clocks == ("ms", "c")
        assert run.ticks("ms").tolist() == list(range(30))
        assert run.ticks("c").tolist() == [3, 8, 13, 18, 23, 28]

    def test_fractional_times_floor_and_coalesce(self):
        """Events in [i, i+1) land on step i, once per step"""
        model = parse_model({"automata": [stepper(2.5, 0.7)], "events": {"c": ["Clock.first", "Clock.loop"]}})
        run = simulate_run(model, 5, seed=1)
        assert run.ticks("c").tolist() == [2, 3, 4]

    def test_camera_trigger_period(self, av_model):
        """The camera trigger ticks at 49, 99, 149, ..."""
        run = simulate_run(av_model, 400, seed=42)
        assert run.ticks("cmrTrig").tolist() == [49, 99, 149, 199, 249, 299, 349, 399]
        assert run.ticks("signTrig").tolist() == [49, 249]

    def test_deterministic(self, av_model):
        """Same model and seed give identical runs and traces"""
        first = simulate_run(av_model, 1000, seed=5, j=3)
        second = simulate_run(av_model, 1000, seed=5, j=3)
        assert first == second
        assert dumps_trace(first) == dumps_trace(second)

    def test_streams_differ(self, av_model):
        """Different stream indices give different runs"""
        a = simulate_run(av_model, 3000, seed=5, j=0)
        b = simulate_run(av_model, 3000, seed=5, j=1)
        assert not np.array_equal(a.ticks("signGen"), b.ticks("signGen"))

    def test_emitter_updates_before_receivers(self):
        """Receivers see the sender's assignments"""
        sender = single(
            "Sender",
            [{"name": "L", "invariant": {"t": 4}}, {"name": "Done"}],
            [{"id": "go", "source": "L", "target": "Done", "guard": {"t": 4}, "emit": "ch", "set": {"v": 1}}],
        )
        receiver = single(
            "Receiver",
            [{"name": "Wait"}, {"name": "Got"}],
            [{"id": "got", "source": "Wait", "target": "Got", "receive": "ch", "when": {"v": 1}}],
            clocks=(),
        )
        model = parse_model({
            "channels": ["ch"],
            "variables": {"v": 0},
            "automata": [sender, receiver],
            "events": {"sent": ["!ch"], "got": ["Receiver.got"]},
        })
        run = simulate_run(model, 10, seed=0)
        assert run.ticks("sent").tolist() == [4]
        assert run.ticks("got").tolist() == [4]
        assert run.signals["v"].tolist() == [0] * 4 + [1] * 7
        assert run.signals[location_signal("Receiver")].tolist() == [0] * 4 + [1] * 7
        assert run.meta["locations"]["Receiver"] == ["Wait", "Got"]

    def test_variable_guard_reopens(self):
        """An automaton blocked on a variable moves once it changes"""
        setter = single(
            "Setter",
            [{"name": "L", "invariant": {"t": 3}}, {"name": "Done"}],
            [{"id": "set", "source": "L", "target": "Done", "guard": {"t": 3}, "set": {"v": 1}}],
        )
        waiter = single(
            "Waiter",
            [{"name": "L", "invariant": {"t": 10}}, {"name": "Done"}],
            [{"id": "go", "source": "L", "target": "Done", "guard": {"t": 6}, "when": {"v": 1}}],
        )
        model = parse_model({"variables": {"v": 0}, "automata": [setter, waiter], "events": {"go": ["Waiter.go"]}})
        for seed in range(5):
            run = simulate_run(model, 20, seed=seed)
            assert len(run.ticks("go")) == 1
            assert 6 <= run.ticks("go")[0] <= 10
            assert "deadlock" not in run.meta

    def test_weighted_choice(self):
        """Edges are picked in proportion to their weights"""
        a = single(
            "A",
            [{"name": "L", "invariant": {"t": 1}}],
            [
                {"id": "heavy", "source": "L", "target": "L", "guard": {"t": 1}, "reset": ["t"], "weight": 3},
                {"id": "light", "source": "L", "target": "L", "guard": {"t": 1}, "reset": ["t"], "weight": 1},
            ],
        )
        model = parse_model({"automata": [a], "events": {"heavy": ["A.heavy"], "light": ["A.light"]}})
        run = simulate_run(model, 4001, seed=3)
        heavy, light = len(run.ticks("heavy")), len(run.ticks("light"))
        assert heavy + light == 4000
        assert 0.72 < heavy / 4000 < 0.78

    def test_time_lock_truncates(self, caplog):
        """A time-locked automaton truncates and flags the run"""
        a = single(
            "A",
            [{"name": "L", "invariant": {"t": 5}}],
            [{"id": "e", "source": "L", "target": "L", "guard": {"t": 1}, "when": {"v": 1}}],
        )
        model = parse_model({"universal": "ms", "variables": {"v": 0}, "automata": [a], "events": {}})
        with caplog.at_level(logging.WARNING):
            run = simulate_run(model, 100, seed=0)
        assert run.meta["deadlock"] == 5.0
        assert run.n == 5
        assert run.ticks("ms").tolist() == [0, 1, 2, 3, 4]
        assert "time-locked" in caplog.text

    def test_time_lock_strict(self):
        """Strict mode raises ModelDeadlock with the time"""
        a = single(
            "A",
            [{"name": "L", "invariant": {"t": 5}}],
            [{"id": "e", "source": "L", "target": "L", "guard": {"t": 7}}],
        )
        model = parse_model({"automata": [a], "events": {}})
        with pytest.raises(ModelDeadlock) as info:
            simulate_run(model, 100, seed=0, strict=True)
        assert info.value.time == 5.0


class TestModelValidation:
    """Test model cross-reference checks"""

    def test_unknown_location(self):
        """Edges must connect existing locations"""
        a = single("A", [{"name": "L"}], [{"id": "e", "source": "L", "target": "M", "receive": "c"}])
        with pytest.raises(InvalidModel):
            parse_model({"channels": ["c"], "automata": [a]})

    def test_undeclared_channel(self):
        """Channels must be declared"""
        a = single("A", [{"name": "L"}], [{"id": "e", "source": "L", "target": "L", "receive": "c"}])
        with pytest.raises(InvalidModel):
            parse_model({"automata": [a]})

    def test_bad_event_source(self):
        """Event map entries must name existing edges"""
        with pytest.raises(InvalidModel):
            parse_model({"automata": [stepper()], "events": {"c": ["Clock.nope"]}})

    def test_schema_error(self):
        """Schema violations become InvalidModel"""
        with pytest.raises(InvalidModel):
            parse_model({"automata": [{"name": "A", "initial": "L", "locations": []}]})
        with pytest.raises(InvalidModel):
            parse_model("{not json")

    def test_negative_weight(self):
        """Weights must be positive"""
        a = single("A", [{"name": "L", "invariant": {"t": 1}}],
                   [{"id": "e", "source": "L", "target": "L", "weight": 0}])
        with pytest.raises(InvalidModel):
            parse_model({"automata": [a]})

    def test_av_model_loads(self, av_model):
        """The bundled model passes validation"""
        assert av_model.universal == "ms"
        assert "cmrTrig" in av_model.clock_names()


class TestSimulateBatch:
    """Test ensembles and stream derivation"""

    def test_single_run_matches(self, av_model):
        """k = 1 equals stream 0"""
        assert simulate_batch(av_model, 500, seed=9, k=1) == [simulate_run(av_model, 500, seed=9, j=0)]

    def test_order_and_offset(self, av_model):
        """Runs are ordered by stream index"""
        runs = simulate_batch(av_model, 300, seed=9, k=3, start=4)
        assert [r.meta["stream"] for r in runs] == [4, 5, 6]
        assert runs[1] == simulate_run(av_model, 300, seed=9, j=5)

    def test_parallel_matches_serial(self, av_model):
        """Worker processes do not change the runs"""
        serial = simulate_batch(av_model, 600, seed=13, k=4, jobs=1)
        parallel = simulate_batch(av_model, 600, seed=13, k=4, jobs=2)
        assert [dumps_trace(r) for r in serial] == [dumps_trace(r) for r in parallel]

    def test_seeds_give_independent_ensembles(self):
        """Different master seeds give different, similarly distributed ensembles"""
        a = single("A", [{"name": "L", "rate": 0.1}], [{"id": "e", "source": "L", "target": "L"}], clocks=())
        model = parse_model({"automata": [a], "events": {"e": ["A.e"]}})
        first = simulate_batch(model, 1000, seed=1, k=20)
        second = simulate_batch(model, 1000, seed=2, k=20)
        counts_1 = [len(r.ticks("e")) for r in first]
        counts_2 = [len(r.ticks("e")) for r in second]
        assert counts_1 != counts_2
        assert abs(np.mean(counts_1) - np.mean(counts_2)) < 15

    def test_failure_tagged_with_index(self):
        """Per-run errors carry the stream index"""
        a = single("A", [{"name": "L"}], [{"id": "e", "source": "L", "target": "L"}], clocks=())
        model = parse_model({"automata": [a], "events": {}})
        with pytest.raises(GeneratorFailure) as info:
            simulate_batch(model, 10, seed=0, k=2, start=7)
        assert info.value.j == 7
