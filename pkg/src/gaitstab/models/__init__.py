"""Built-in planar models and their hybrid graphs."""

from .walker3 import Walker3Params, build_walker3, walker3_cycle, walker3_seed
from .biped7 import Biped7Params, build_biped7, biped7_cycle, biped7_seed

_BUILDERS = {
    "walker3": (Walker3Params, build_walker3, walker3_cycle, walker3_seed),
    "biped7": (Biped7Params, build_biped7, biped7_cycle, biped7_seed),
}


def model_names():
    return sorted(_BUILDERS)


def get_model(name, params=None):
    """Model + graph for a built-in robot; params is a dict of overrides."""
    try:
        cls, build, cycle, _ = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown built-in model {name!r}; "
                       f"choose from {model_names()}")
    p = cls(**(params or {}))
    model = build(p)
    graph = cycle(model)
    return model, graph


def get_seed(name, model, graph, targets=None):
    _, _, _, seed = _BUILDERS[name]
    return seed(model, graph, **(targets or {}))
