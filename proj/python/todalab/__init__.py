"""Python access to the toda numerical core.

Heavy computations return the same JSON summaries the command line tool
writes; the wrappers here decode them into dictionaries.
"""

import json

from ._core import (
    ArgumentError,
    Config,
    ConfigError,
    DomainError,
    RangeError,
    ResolutionError,
    SolverError,
    TodaError,
    bubble_mass,
    bubble_value,
    change_of_variables,
    compute_deltas,
    disk_meanfield,
    module_versions,
    weighted_identities,
)
from . import _core

__all__ = [
    "ArgumentError", "Config", "ConfigError", "DomainError", "RangeError", "ResolutionError",
    "SolverError", "TodaError", "bubble_mass", "bubble_value", "change_of_variables",
    "compute_deltas", "disk_meanfield", "module_versions", "weighted_identities",
    "meanfield", "ansatz", "solve", "criterion",
]


def meanfield(config):
    return json.loads(_core.meanfield_json(config))


def ansatz(config):
    return json.loads(_core.ansatz_json(config))


def solve(config):
    return json.loads(_core.solve_json(config))


def criterion(config, id):
    return json.loads(_core.criterion_json(config, id))
