"""Conditioning, double descent, and risk diagnostics for random feature regression.

Submodules are imported explicitly (``from rfcond import spectral``); this
init stays free of numpy imports so the CLI entry point can pin BLAS thread
counts before numpy is first loaded.
"""

__version__ = "0.1.0"
