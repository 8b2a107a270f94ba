"""Kernel backend selection.

Two interchangeable backends implement the inner-loop computations:

* ``python`` — pure-Python reference (`_pykernels`), always available.
* ``cython`` — compiled extension (`_ckernels`), built at install time.

Both expose the same functions with identical semantics, tie-breaks and
rng-draw protocol; the compiled sampler escalates numerically ambiguous
decisions by rewinding the rng and replaying the pure path, so results are
backend-independent for the same seed.

Selection: ``get_backend("auto"|"python"|"cython")``; the environment
variable ``BISECTLAB_BACKEND`` overrides the default ("auto" = compiled if
built, else pure).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import _pykernels as _pk

try:  # compiled backend is optional
    from . import _ckernels as _ck

    _HAVE_CYTHON = True
except ImportError:  # pragma: no cover - build-environment dependent
    _ck = None
    _HAVE_CYTHON = False


@dataclass(frozen=True)
class Backend:
    """Bundle of kernel entry points (see `_pykernels` for contracts)."""

    name: str
    feasible_mass: Callable = field(repr=False)
    min_move_assignment: Callable = field(repr=False)
    balanced_feasible: Callable = field(repr=False)
    balanced_min_move: Callable = field(repr=False)
    count_assignments: Callable = field(repr=False)
    sample_assignment: Callable = field(repr=False)


_PY_BACKEND = Backend(
    name="python",
    feasible_mass=_pk.feasible_mass,
    min_move_assignment=_pk.min_move_assignment,
    balanced_feasible=_pk.balanced_feasible,
    balanced_min_move=_pk.balanced_min_move,
    count_assignments=_pk.count_assignments,
    sample_assignment=_pk.sample_assignment,
)


def _escalating_sampler(fast: Callable, exact: Callable) -> Callable:
    """Wrap the compiled sampler so ambiguous float decisions replay the
    exact path with the rng rewound to the start of the sample."""

    def sample_assignment(comp_sizes, target, rng):
        state = rng.getstate()
        try:
            return fast(comp_sizes, target, rng)
        except _ck.DecisionAmbiguous:
            rng.setstate(state)
            return exact(comp_sizes, target, rng)

    return sample_assignment


if _HAVE_CYTHON:
    _CY_BACKEND: Optional[Backend] = Backend(
        name="cython",
        feasible_mass=_ck.feasible_mass,
        min_move_assignment=_ck.min_move_assignment,
        balanced_feasible=_ck.balanced_feasible,
        balanced_min_move=_ck.balanced_min_move,
        count_assignments=_pk.count_assignments,  # bigints: no compiled win
        sample_assignment=_escalating_sampler(
            _ck.sample_assignment_fast, _pk.sample_assignment
        ),
    )
else:  # pragma: no cover
    _CY_BACKEND = None


def available_backends() -> list[str]:
    return ["python", "cython"] if _HAVE_CYTHON else ["python"]


def get_backend(name: str | None = None) -> Backend:
    """Resolve a backend by name ("auto" picks compiled when built)."""
    if name is None:
        name = os.environ.get("BISECTLAB_BACKEND", "auto")
    name = name.lower()
    if name == "auto":
        return _CY_BACKEND if _CY_BACKEND is not None else _PY_BACKEND
    if name == "python":
        return _PY_BACKEND
    if name == "cython":
        if _CY_BACKEND is None:
            raise RuntimeError(
                "compiled kernels are not built; reinstall the package or "
                "set BISECTLAB_BACKEND=python"
            )
        return _CY_BACKEND
    raise ValueError(f"unknown backend {name!r} (auto|python|cython)")
