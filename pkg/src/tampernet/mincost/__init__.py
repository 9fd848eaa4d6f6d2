"""Min-cost flow kernels and the solver API built on them.

The compiled kernel is preferred when present; ``TAMPERNET_KERNEL=py``
forces the pure-Python twin (used by the benchmark and as the fallback
when the extension was not built or cost magnitudes exceed the int64
safety bound).
"""

from .solver import (
    HAVE_COMPILED_KERNEL,
    IntegralFlow,
    check_feasible,
    solve_min_cost,
    solve_lexicographic,
    verify_optimality,
)

__all__ = [
    "HAVE_COMPILED_KERNEL",
    "IntegralFlow",
    "check_feasible",
    "solve_min_cost",
    "solve_lexicographic",
    "verify_optimality",
]
