"""Text, citation and prediction measures for manuscripts with peer-review outcomes."""

__version__ = "0.1.0"
