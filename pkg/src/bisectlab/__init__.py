"""bisectlab: online bisection algorithms with exact partition oracles.

Maintain a balanced 2-partition of n elements while serving connection
requests online: requests crossing the cut cost 1, and elements may be
migrated between clusters at cost 1 each.  The package provides

- ``core``: balanced partitions, distances, and the component tracker;
- ``numbertheory``: the popularity estimator and Bezout certificates;
- ``partition_oracle``: exact DP oracles over component multisets
  (existence, closest partition, balanced variants, counting, sampling);
- ``algorithms``: the randomized two-stage algorithm and baselines;
- ``opt``: exact offline optimum for small instances;
- ``harness``: experiment runner with per-step invariant monitors;
- ``cli``: the ``bisectlab`` command-line workbench.

Hot DP kernels have a compiled backend with a pure-Python fallback; see
``bisectlab.kernels.get_backend``.
"""

__version__ = "0.1.0"

from .core import (
    ComponentSet,
    ComponentTracker,
    MergeEvent,
    Partition,
    dist,
    ingest_request,
)

__all__ = [
    "Partition",
    "dist",
    "ComponentSet",
    "ComponentTracker",
    "MergeEvent",
    "ingest_request",
    "__version__",
]
