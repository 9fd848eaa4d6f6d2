"""Static figure rendering for exported frontier CSVs.

Reads the CSV artifacts written by the ``tampernet`` command (schema
``z2,z1,abs_z1,witness_id``) and draws piecewise-linear Pareto curves,
raw or normalized, overlaid by network, demand level, or attack
duration.  Strictly read-only: no z-value is ever recomputed.
"""

from .render import PlotSpec, SchemaError, read_frontier_csv, render

__all__ = ["PlotSpec", "SchemaError", "read_frontier_csv", "render"]
