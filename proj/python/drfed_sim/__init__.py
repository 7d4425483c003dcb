"""Python surface for the simulation core: a thin re-export of the compiled
extension. Configs are plain dicts of the same keys the CLI accepts; runs are
deterministic in the seed."""

from ._drfed import (
    __version__,
    aggregate,
    build_means,
    burn_in_length_bound,
    connected_graph_count,
    edge_presence_fraction,
    pseudo_regret,
    resolve,
    run,
    run_baseline,
)

__all__ = [
    "__version__",
    "aggregate",
    "build_means",
    "burn_in_length_bound",
    "connected_graph_count",
    "edge_presence_fraction",
    "pseudo_regret",
    "resolve",
    "run",
    "run_baseline",
]
