"""Figure rendering for hank2a CSV outputs."""

__version__ = "0.1.0"
