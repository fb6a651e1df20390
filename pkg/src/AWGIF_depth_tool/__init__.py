"""Shape-from-focus depth enhancement with adaptive weighted guided filtering."""

__version__ = "0.1.0"
