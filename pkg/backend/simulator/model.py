"""
STA Model
Pydantic schema of stochastic timed automata networks and their event map
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError

from backend.errors import InvalidModel

logger = logging.getLogger(__name__)


class Location(BaseModel):
    """Automaton location"""
    name: str = Field(..., min_length=1, description="Location name")
    invariant: Dict[str, float] = Field(default={}, description="Upper bounds on local clocks")
    rate: Optional[float] = Field(None, gt=0, description="Exponential exit rate when no invariant bounds the stay")


class Edge(BaseModel):
    """Automaton edge with optional channel action"""
    id: str = Field(..., min_length=1, description="Edge id, unique within its automaton")
    source: str = Field(..., description="Source location")
    target: str = Field(..., description="Target location")
    guard: Dict[str, float] = Field(default={}, description="Lower bounds on local clocks")
    when: Dict[str, int] = Field(default={}, description="Required variable values")
    emit: Optional[str] = Field(None, description="Broadcast channel sent on this edge")
    receive: Optional[str] = Field(None, description="Broadcast channel this edge waits for")
    weight: float = Field(default=1.0, gt=0, description="Branch weight among enabled edges")
    reset: List[str] = Field(default=[], description="Local clocks reset to 0")
    set: Dict[str, int] = Field(default={}, description="Variables assigned")
    add: Dict[str, int] = Field(default={}, description="Variables incremented")

    @property
    def is_receive(self) -> bool:
        return self.receive is not None


class Automaton(BaseModel):
    """One stochastic timed automaton"""
    name: str = Field(..., min_length=1, description="Automaton name")
    clocks: List[str] = Field(default=[], description="Local clocks")
    initial: str = Field(..., description="Initial location")
    locations: List[Location] = Field(..., min_length=1, description="Locations")
    edges: List[Edge] = Field(default=[], description="Edges")

    def location(self, name: str) -> Location:
        for loc in self.locations:
            if loc.name == name:
                return loc
        raise InvalidModel(f"{self.name}: unknown location '{name}'")

    def location_index(self, name: str) -> int:
        return [loc.name for loc in self.locations].index(name)

    def outgoing(self, location: str) -> List[Edge]:
        """Internal and emitting edges leaving a location"""
        return [e for e in self.edges if e.source == location and not e.is_receive]

    def receiving(self, location: str, channel: str) -> List[Edge]:
        return [e for e in self.edges if e.source == location and e.receive == channel]


class StaModel(BaseModel):
    """A network of automata plus the event map that turns transitions into clock ticks"""
    name: str = Field(default="model", description="Model name")
    universal: Optional[str] = Field(None, description="Clock synthesized to tick at every step")
    channels: List[str] = Field(default=[], description="Broadcast channels")
    variables: Dict[str, int] = Field(default={}, description="Global integer variables with initial values")
    automata: List[Automaton] = Field(..., min_length=1, description="Automata, in tie-breaking order")
    events: Dict[str, List[str]] = Field(
        default={}, description="Clock -> sources, each 'Automaton.edge' or '!channel'"
    )

    def clock_names(self) -> Tuple[str, ...]:
        """Declared clocks of generated runs: the universal clock, then the event map"""
        names = [self.universal] if self.universal else []
        names.extend(c for c in self.events if c != self.universal)
        return tuple(names)

    def automaton(self, name: str) -> Automaton:
        for a in self.automata:
            if a.name == name:
                return a
        raise InvalidModel(f"unknown automaton '{name}'")


def check_model(model: StaModel) -> None:
    """
    Check cross references of a parsed model

    Args:
        model: Model to check

    Raises:
        InvalidModel: On the first inconsistency found
    """
    names = [a.name for a in model.automata]
    if len(set(names)) != len(names):
        raise InvalidModel("automaton names must be unique")
    channels = set(model.channels)

    for a in model.automata:
        locations = [loc.name for loc in a.locations]
        if len(set(locations)) != len(locations):
            raise InvalidModel(f"{a.name}: location names must be unique")
        if a.initial not in locations:
            raise InvalidModel(f"{a.name}: initial location '{a.initial}' does not exist")
        for loc in a.locations:
            for clock, bound in loc.invariant.items():
                if clock not in a.clocks:
                    raise InvalidModel(f"{a.name}.{loc.name}: invariant on unknown clock '{clock}'")
                if bound < 0:
                    raise InvalidModel(f"{a.name}.{loc.name}: invariant bound must be non-negative")

        edge_ids = [e.id for e in a.edges]
        if len(set(edge_ids)) != len(edge_ids):
            raise InvalidModel(f"{a.name}: edge ids must be unique")
        for e in a.edges:
            where = f"{a.name}.{e.id}"
            if e.source not in locations or e.target not in locations:
                raise InvalidModel(f"{where}: unknown source or target location")
            if e.emit and e.receive:
                raise InvalidModel(f"{where}: an edge cannot both emit and receive")
            for channel in (e.emit, e.receive):
                if channel and channel not in channels:
                    raise InvalidModel(f"{where}: undeclared channel '{channel}'")
            for clock, bound in e.guard.items():
                if clock not in a.clocks:
                    raise InvalidModel(f"{where}: guard on unknown clock '{clock}'")
                if bound < 0:
                    raise InvalidModel(f"{where}: guard bound must be non-negative")
            for clock in e.reset:
                if clock not in a.clocks:
                    raise InvalidModel(f"{where}: reset of unknown clock '{clock}'")
            for var in list(e.when) + list(e.set) + list(e.add):
                if var not in model.variables:
                    raise InvalidModel(f"{where}: undeclared variable '{var}'")

    for clock, sources in model.events.items():
        if clock == model.universal:
            raise InvalidModel(f"universal clock '{clock}' cannot also be mapped to events")
        for source in sources:
            if source.startswith("!"):
                if source[1:] not in channels:
                    raise InvalidModel(f"event map for '{clock}': undeclared channel '{source[1:]}'")
                continue
            automaton, _, edge = source.partition(".")
            if automaton not in names:
                raise InvalidModel(f"event map for '{clock}': unknown automaton '{automaton}'")
            if edge not in [e.id for e in model.automaton(automaton).edges]:
                raise InvalidModel(f"event map for '{clock}': unknown edge '{source}'")


def parse_model(data: Union[str, dict]) -> StaModel:
    """
    Build and check a model from JSON text or a decoded dict

    Args:
        data: Model JSON

    Returns:
        Validated StaModel
    """
    try:
        if isinstance(data, str):
            model = StaModel.model_validate_json(data)
        else:
            model = StaModel.model_validate(data)
    except ValidationError as e:
        raise InvalidModel(f"model does not match the schema: {e}") from None
    check_model(model)
    logger.debug("Loaded model %s with %d automata", model.name, len(model.automata))
    return model


def load_model(path: Union[str, Path]) -> StaModel:
    """Read a model file"""
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidModel(f"{path}: not valid JSON ({e})") from None
    return parse_model(text)
