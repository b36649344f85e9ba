"""Multi-objective evolutionary training for physics-informed networks.

Thin wrapper around the compiled extension. Configs are plain dicts (or JSON
strings) with the same schema the ``nsga-pinn`` command line tool accepts.
"""

from ._core import (
    __version__,
    crowding_distance,
    environmental_select,
    evaluate,
    initial_population,
    non_dominated_sort,
    resolve_config,
    run,
)

__all__ = [
    "__version__",
    "crowding_distance",
    "environmental_select",
    "evaluate",
    "initial_population",
    "non_dominated_sort",
    "resolve_config",
    "run",
]
