"""
AV Case Bundle
Loads the autonomous-vehicle model, its R1-R31 spec and the WCET table
"""

import json
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from backend.config import get_settings
from backend.errors import BadParameter
from backend.simulator.model import StaModel, load_model
from backend.speclang.parser import parse_spec_file
from backend.speclang.syntax import ConstraintTemplate, SpecFile

logger = logging.getLogger(__name__)

MODEL_FILE = "av.model.json"
SPEC_FILE = "av.prccsl"
WCET_FILE = "wcet.json"

_REQUIREMENT = re.compile(r"R\d+$")


@dataclass(frozen=True)
class AvModelBundle:
    """The case study's model, spec and WCET table"""
    model: StaModel
    spec: SpecFile
    wcet: Dict[str, int]
    data_dir: Path

    @property
    def spec_path(self) -> Path:
        return self.data_dir / SPEC_FILE

    @property
    def model_path(self) -> Path:
        return self.data_dir / MODEL_FILE


def load_wcet(path: Union[str, Path]) -> Dict[str, int]:
    """
    Read a WCET table

    Args:
        path: JSON object mapping names to non-negative integer ms

    Returns:
        Name -> WCET
    """
    with open(path, "r", encoding="utf-8") as f:
        table = json.load(f)
    if not isinstance(table, dict):
        raise BadParameter(f"{path}: WCET table must be a JSON object")
    for name, value in table.items():
        if not isinstance(value, int) or value < 0:
            raise BadParameter(f"{path}: WCET '{name}' must be a non-negative integer")
    return dict(table)


@lru_cache()
def _load(data_dir: str) -> AvModelBundle:
    root = Path(data_dir)
    bundle = AvModelBundle(
        model=load_model(root / MODEL_FILE),
        spec=parse_spec_file(root / SPEC_FILE),
        wcet=load_wcet(root / WCET_FILE),
        data_dir=root,
    )
    logger.info("Loaded AV bundle from %s (%d constraints)", root, len(bundle.spec.constraints))
    return bundle


def build_av_bundle(data_dir: Optional[Union[str, Path]] = None) -> AvModelBundle:
    """
    Load the bundled AV case

    Args:
        data_dir: Directory holding the bundle files (default from settings)

    Returns:
        AvModelBundle
    """
    return _load(str(Path(data_dir or get_settings().av_data_dir).resolve()))


def r_spec_table(bundle: Optional[AvModelBundle] = None) -> List[Tuple[str, ConstraintTemplate]]:
    """The R1-R31 requirement templates, in spec order"""
    bundle = bundle or build_av_bundle()
    return [
        (c.name, c.body)
        for c in bundle.spec.constraints
        if c.name and _REQUIREMENT.match(c.name) and isinstance(c.body, ConstraintTemplate)
    ]
