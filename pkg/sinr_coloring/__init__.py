"""
sinr_coloring package

Exact fractional and integer edge colouring of wireless links under the
physical (SINR) interference model, plus STDMA schedule construction and
instance sweeps.
"""

__version__ = "0.1.0"

__all__ = [
    "config",
    "logging_config",
    "errors",
    "models",
    "storage",
    "netmodel",
    "matchenum",
    "exactnum",
    "chromatic",
    "scheduler",
    "harness",
    "report",
]
