"""Conformal sampling of answer-set programs for spatial multi-hop reasoning."""

__version__ = "0.1.0"

VERSION_TAG = f"clmasp-{__version__}"
