"""dilatekit: exact dilated sumsets, their lower bounds, and searches for extremal sets."""

__version__ = "0.1.0"
