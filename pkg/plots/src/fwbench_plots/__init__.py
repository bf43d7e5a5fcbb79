"""Render convergence figures from benchmark trace CSVs.

Consumes only the stable trace interface: the fixed-header CSV plus its
``.meta.json`` sidecar. Nothing here imports the solver package.
"""

from .figures import FigureSpec, SchemaError, build_curves, render

__version__ = "0.1.0"
