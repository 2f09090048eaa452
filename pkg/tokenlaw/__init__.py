"""Tokenlaw - token-level structure of code and genes against a conservation model."""

__version__ = "0.1.0"
__author__ = "Tokenlaw Team"

from .types import ComponentRecord, CorpusSummary, LinearFit, Token, TokenClass

__all__ = [
    "__version__",
    "__author__",
    "ComponentRecord",
    "CorpusSummary",
    "LinearFit",
    "Token",
    "TokenClass",
]
