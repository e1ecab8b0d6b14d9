"""Exact chain-level engine for module lifting along square-zero ring extensions."""

__version__ = "0.1.0"
