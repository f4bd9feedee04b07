"""
Tests for the bundled autonomous-vehicle case study
"""

import json
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from backend.avcase.bundle import build_av_bundle, load_wcet, r_spec_table
from backend.clocks.expressions import DelayFor, Named
from backend.errors import BadParameter
from backend.relations.checkers import RelationKind
from backend.simulator.batch import simulate_batch
from backend.smc.runner import CheckOptions, QueryRunner, simulation_sources
from backend.speclang.printer import format_relation_symbolic
from backend.speclang.templates import expand_template, wcet_total
from backend.speclang.validator import validate_spec

BOUND = 3000
SEED = 42


@pytest.fixture(scope="module")
def bundle():
    return build_av_bundle()


@pytest.fixture(scope="module")
def runs(bundle):
    return simulate_batch(bundle.model, BOUND, seed=SEED, k=10)


@pytest.fixture(scope="module")
def out_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("av")


@pytest.fixture(scope="module")
def runner(bundle, out_dir):
    return QueryRunner(bundle.spec, simulation_sources(bundle.model, seed=SEED), CheckOptions(seed=SEED, out_dir=out_dir), bundle.wcet)


class TestBundle:
    """Test the bundled model, spec and WCET table"""

    def test_requirement_table(self, bundle):
        """R1-R31 in order, all at p = 0.95"""
        table = r_spec_table(bundle)
        assert [name for name, _ in table] == [f"R{i}" for i in range(1, 32)]
        assert all(t.p == Fraction(95, 100) for _, t in table)

    def test_spec_validates(self, bundle):
        """The spec is clean against its WCET table"""
        assert validate_spec(bundle.spec, bundle.wcet) == []

    def test_events_produced_by_model(self, bundle):
        """Every requirement event is a clock of generated runs"""
        clocks = set(bundle.model.clock_names())
        for name, template in r_spec_table(bundle):
            assert set(template.events) <= clocks, name

    def test_expansions(self, bundle):
        """Representative requirements expand to the expected relations"""
        table = dict(r_spec_table(bundle))
        (r9,) = expand_template(table["R9"], bundle.wcet)
        assert r9.kind is RelationKind.PRECEDENCE
        assert r9.left == DelayFor(Named("obstc"), Named("ms"), 500)
        assert r9.right == Named("veRun")
        (r27,) = expand_template(table["R27"], bundle.wcet)
        assert format_relation_symbolic(r27) == "turnLeft #p rightOn"
        assert wcet_total(table["R24"], bundle.wcet) == 250
        assert wcet_total(table["R26"], bundle.wcet) == 430

    def test_wcet_table(self, bundle):
        """WCET names resolve to integer ms"""
        assert bundle.wcet == {"W_cmr": 30, "W_sr": 150, "W_ctrl": 150, "W_vd": 100}

    def test_bad_wcet_file(self, tmp_path):
        """Non-integer WCET entries are rejected"""
        path = tmp_path / "wcet.json"
        path.write_text(json.dumps({"W_x": 1.5}))
        with pytest.raises(BadParameter):
            load_wcet(path)
        path.write_text(json.dumps([1, 2]))
        with pytest.raises(BadParameter):
            load_wcet(path)

    def test_cached(self, bundle):
        """Repeated loads share one bundle"""
        assert build_av_bundle() is bundle
        assert bundle.spec_path.name == "av.prccsl"
        assert bundle.model_path.exists()


class TestAvRuns:
    """Test timing of simulated AV runs"""

    def test_camera_period(self, runs):
        """The camera trigger ticks every 50 ms from 49"""
        for run in runs:
            ticks = run.ticks("cmrTrig")
            assert ticks[0] == 49
            assert set(np.diff(ticks).tolist()) == {50}

    def test_camera_execution(self, runs):
        """Each capture finishes 20 to 30 ms after its trigger"""
        for run in runs:
            out = run.ticks("cmrOut")
            for s in run.ticks("cmrTrig"):
                if s + 30 < BOUND:
                    assert np.any((out >= s + 20) & (out <= s + 29))

    def test_traffic_sign_gaps(self, runs):
        """Signs are generated every 4 to 8 ms"""
        for run in runs:
            gaps = np.diff(run.ticks("signGen"))
            assert gaps.min() >= 4
            assert gaps.max() <= 8

    def test_all_events_reachable(self, bundle, runs):
        """Every mapped event occurs somewhere in the ensemble"""
        seen = {c for run in runs for c in run.clocks if run.ticks(c).size}
        assert set(bundle.model.events) <= seen

    def test_signals(self, runs):
        """Runs carry variables and automaton locations"""
        run = runs[0]
        assert "speed" in run.signals
        assert "Controller.loc" in run.signals
        assert "Idle" in run.meta["locations"]["ControllerInputs"]
        assert run.meta["stream"] == 0


class TestAvVerdicts:
    """Test query verdicts on the AV model"""

    @pytest.mark.parametrize("query", ["HT_R1", "HT_R2", "HT_R6", "HT_R9", "HT_R27"])
    def test_requirements_accepted(self, runner, query):
        """Deterministic and structurally guaranteed requirements are accepted"""
        report = runner.run(query)
        assert report.decision == "accept"
        assert report.runs <= 10000

    def test_camera_expected_gap(self, runner, out_dir):
        """The camera trigger's largest gap is 50 +- 0"""
        report = runner.run("EV_cmr")
        assert report.mean == 50
        assert report.half_width == 0
        histogram = pd.read_csv(out_dir / "EV_cmr_histogram.csv")
        assert histogram["count"].sum() == 100

    def test_periodic_estimate(self, runner):
        """R1's interval reaches 1"""
        report = runner.run("PE_R1")
        assert report.runs == 738
        assert report.point_estimate == 1.0
        assert report.interval[0] >= 0.90

    def test_sync_trajectories(self, runner, out_dir):
        """The supremum's history never falls behind the delayed infimum's"""
        report = runner.run("SIM_R13")
        assert report.runs == 5
        table = pd.read_csv(out_dir / "SIM_R13_trajectories.csv")
        sup_column, delayed_column = [c for c in table.columns if c not in ("run", "step")]
        assert (table[sup_column] >= table[delayed_column]).all()
        assert table[sup_column].max() > 0

    def test_ensemble(self, runner):
        """R1 holds on all 100 runs"""
        report = runner.run("ENS_R1")
        assert report.decision == "holds"
        assert report.satisfied == 100
