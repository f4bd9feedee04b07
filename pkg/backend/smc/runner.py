"""
Query Runner
Evaluates spec queries (or bare constraints) against a run source and builds verdict reports
"""

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional

from backend.config import get_settings
from backend.errors import BadParameter
from backend.models.schemas import VerdictReport
from backend.simulator.model import StaModel
from backend.smc.comparison import compare_probabilities
from backend.smc.estimation import estimate_probability
from backend.smc.expected_value import expected_value, write_histogram_csv
from backend.smc.hypothesis import ensemble_verdict, hypothesis_test
from backend.smc.monitors import Observable, build_monitor
from backend.smc.simulation import monitor_simulations, write_trajectories_csv
from backend.smc.sources import RunSource, SimulationSource
from backend.smc.sprt import SprtParams
from backend.speclang.printer import format_query, format_relation_symbolic
from backend.speclang.syntax import (
    Ensemble,
    ExpectedValue,
    HypothesisTest,
    ProbCompare,
    ProbEstimate,
    Query,
    Simulate,
    SpecFile,
)
from backend.speclang.templates import constraint_relations

logger = logging.getLogger(__name__)

SourceFactory = Callable[[int], RunSource]


@dataclass
class CheckOptions:
    """
    Command-line overrides; query text options take precedence, settings fill the rest

    Attributes:
        seed: Master seed (echoed in reports)
        runs: Run count for ensembles, expected values, simulations and fixed-size estimates
        bound: Horizon for bare constraint checks
        out_dir: Where CSV and PNG artifacts go
        plot: Also render PNGs
    """
    seed: int
    runs: Optional[int] = None
    bound: Optional[int] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    delta: Optional[float] = None
    epsilon: Optional[float] = None
    max_runs: Optional[int] = None
    out_dir: Optional[Path] = None
    plot: bool = False


def simulation_sources(model: StaModel, seed: int, jobs: int = 1) -> SourceFactory:
    """Factory of simulation sources, one per horizon"""
    cache: Dict[int, SimulationSource] = {}

    def factory(bound: int) -> RunSource:
        if bound not in cache:
            cache[bound] = SimulationSource(model, bound, seed, jobs=jobs)
        return cache[bound]

    return factory


def fixed_source(source: RunSource) -> SourceFactory:
    """Factory that ignores the horizon, for recorded traces"""
    return lambda bound: source


def _first(*values):
    return next((v for v in values if v is not None), None)


class QueryRunner:
    """Runs queries of one spec against one run source"""

    def __init__(
        self,
        spec: SpecFile,
        sources: SourceFactory,
        options: CheckOptions,
        wcet: Optional[Mapping[str, int]] = None,
    ):
        """
        Initialize runner

        Args:
            spec: Parsed spec
            sources: Run source per horizon
            options: Overrides and artifact settings
            wcet: Extra WCET entries for comparison templates
        """
        self.spec = spec
        self.sources = sources
        self.options = options
        self.wcet = dict(wcet or {})
        self.settings = get_settings()

    def run(self, name: str) -> VerdictReport:
        """
        Evaluate a query, or run the ensemble verdict of a constraint

        Args:
            name: Query id or constraint id

        Returns:
            VerdictReport
        """
        query = self.spec.query(name)
        if query is None and self.spec.constraint(name) is not None:
            bound = self.settings.bound if self.options.bound is None else self.options.bound
            if bound < 1:
                raise BadParameter(f"bound must be >= 1, got {bound}")
            query = Query(name=name, body=Ensemble(prop=name, bound=bound, runs=self.options.runs))
        if query is None:
            raise BadParameter(f"no query or constraint named '{name}'")

        handlers = {
            HypothesisTest: self._hypothesis,
            ProbEstimate: self._estimate,
            ProbCompare: self._compare,
            ExpectedValue: self._expect,
            Simulate: self._simulate,
            Ensemble: self._ensemble,
        }
        started = time.perf_counter()
        fields = handlers[type(query.body)](query)
        report = VerdictReport(
            query_id=query.name,
            query_text=format_query(query),
            seed=self.options.seed,
            wall_clock=time.perf_counter() - started,
            **fields,
        )
        logger.info("%s: %s (%d runs, %.2fs)", report.query_id, report.decision, report.runs, report.wall_clock)
        return report

    def run_all(self) -> List[VerdictReport]:
        return [self.run(q.name) for q in self.spec.queries]

    def _params(self, threshold, alpha, beta, delta, max_runs) -> SprtParams:
        opts = self.options
        return SprtParams.from_settings(
            threshold=threshold,
            alpha=_first(alpha, opts.alpha),
            beta=_first(beta, opts.beta),
            delta=_first(delta, opts.delta),
            max_runs=_first(max_runs, opts.max_runs),
        )

    def _monitor(self, prop, bound):
        return build_monitor(prop, bound, self.spec, self.wcet)

    def _artifact(self, query: Query, suffix: str) -> Optional[Path]:
        if self.options.out_dir is None:
            return None
        return Path(self.options.out_dir) / f"{query.name}{suffix}"

    def _hypothesis(self, query: Query) -> dict:
        body: HypothesisTest = query.body
        params = self._params(body.threshold, body.alpha, body.beta, body.delta, body.runs)
        source = self.sources(body.bound)
        verdict = hypothesis_test(source, self._monitor(body.prop, body.bound), params)
        return {
            "kind": "hypothesis",
            "parameters": {
                "bound": body.bound, "threshold": params.threshold, "alpha": params.alpha,
                "beta": params.beta, "delta": params.delta, "max_runs": params.max_runs,
            },
            "decision": verdict.decision.value,
            "satisfied": verdict.satisfied_count,
            "runs": verdict.runs_used,
            "source": source.description,
        }

    def _estimate(self, query: Query) -> dict:
        body: ProbEstimate = query.body
        confidence = _first(body.confidence, self.settings.confidence)
        epsilon = _first(body.epsilon, self.options.epsilon, self.settings.epsilon)
        method = body.method or "clopper-pearson"
        source = self.sources(body.bound)
        estimate = estimate_probability(
            source, self._monitor(body.prop, body.bound), confidence, epsilon, method, runs=self.options.runs
        )
        return {
            "kind": "estimate",
            "parameters": {"bound": body.bound, "confidence": confidence, "epsilon": epsilon, "method": method},
            "decision": "estimated",
            "satisfied": estimate.satisfied_count,
            "runs": estimate.runs,
            "interval": estimate.interval,
            "point_estimate": float(estimate.point),
            "source": source.description,
        }

    def _compare(self, query: Query) -> dict:
        body: ProbCompare = query.body
        params = self._params(0.5, None, None, None, None)
        source = self.sources(max(body.bound1, body.bound2))
        result = compare_probabilities(
            source,
            self._monitor(body.prop1, body.bound1),
            self._monitor(body.prop2, body.bound2),
            body.ratio,
            params,
        )
        return {
            "kind": "compare",
            "parameters": {
                "bound1": body.bound1, "bound2": body.bound2, "ratio": body.ratio,
                "alpha": params.alpha, "beta": params.beta, "delta": params.delta, "max_runs": params.max_runs,
                "log_likelihood_ratio": round(result.log_ratio, 4),
            },
            "decision": result.decision.value,
            "satisfied": result.first_count,
            "runs": result.runs_used,
            "ratio": result.ratio,
            "source": source.description,
        }

    def _expect(self, query: Query) -> dict:
        body: ExpectedValue = query.body
        runs = _first(body.runs, self.options.runs, self.settings.ev_runs)
        observable = Observable(body.kind, body.term, body.bound, self.spec.definition_map())
        source = self.sources(body.bound)
        result = expected_value(source, observable, runs)

        artifacts = []
        csv_path = self._artifact(query, "_histogram.csv")
        if csv_path is not None:
            artifacts.append(str(write_histogram_csv(result.histogram, csv_path)))
            if self.options.plot:
                from backend.smc.plotting import plot_histogram
                artifacts.append(str(plot_histogram(result.histogram, csv_path.with_suffix(".png"), observable.label)))
        return {
            "kind": "expect",
            "parameters": {"bound": body.bound, "observable": observable.label, "confidence": result.confidence},
            "decision": "estimated",
            "runs": result.runs,
            "mean": result.mean,
            "half_width": result.half_width,
            "artifacts": artifacts,
            "source": source.description,
        }

    def _simulate(self, query: Query) -> dict:
        body: Simulate = query.body
        source = self.sources(body.bound)
        frames = monitor_simulations(source, body.terms, body.runs, body.bound, self.spec.definition_map())

        artifacts = []
        csv_path = self._artifact(query, "_trajectories.csv")
        if csv_path is not None:
            artifacts.append(str(write_trajectories_csv(frames, csv_path)))
            if self.options.plot:
                from backend.smc.plotting import plot_trajectories
                artifacts.append(str(plot_trajectories(frames, csv_path.with_suffix(".png"), query.name)))
        return {
            "kind": "simulate",
            "parameters": {"bound": body.bound, "terms": [c for c in frames[0].columns if c != "step"]},
            "decision": "simulated",
            "runs": body.runs,
            "artifacts": artifacts,
            "source": source.description,
        }

    def _ensemble(self, query: Query) -> dict:
        body: Ensemble = query.body
        constraint = self.spec.constraint(body.prop)
        if constraint is None:
            raise BadParameter(f"unknown constraint '{body.prop}'")
        table = dict(self.wcet)
        table.update(self.spec.wcet_map())
        relations = constraint_relations(constraint, table)
        runs = _first(body.runs, self.options.runs, self.settings.ensemble_runs)
        source = self.sources(body.bound)
        result = ensemble_verdict(source, relations, runs, body.bound, self.spec.definition_map())
        return {
            "kind": "ensemble",
            "parameters": {"bound": body.bound, "runs": runs},
            "decision": "holds" if result.holds else "fails",
            "satisfied": min(v.satisfied_count for v in result.verdicts),
            "runs": runs,
            "relations": [
                f"{format_relation_symbolic(rel)}: {v.satisfied_count}/{v.total} {'holds' if v.holds else 'fails'}"
                for rel, v in zip(relations, result.verdicts)
            ],
            "source": source.description,
        }
