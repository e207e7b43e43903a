"""Eigenvalue problems for graph p-Laplacians, from p = 1 to p = inf.

Submodules: ``graph_core`` (graphs and I/O), ``plap_core`` (smooth operators),
``solver`` (flows and root solves), ``degenerate`` (LP certificates for p in {1, inf}),
``geometry`` (exact combinatorial invariants), ``nodal``, ``duality`` and ``cli``.
"""

from .graph_core import Graph, load_graph, load_node_fn
from .plap_core import Eigenpair, Kind, eigen_residual, rayleigh_p

__version__ = "0.1.0"

__all__ = ["Graph", "load_graph", "load_node_fn", "Eigenpair", "Kind", "eigen_residual", "rayleigh_p",
           "__version__"]
