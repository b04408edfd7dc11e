"""SEB Channel Toolkit - analysis of strongly entanglement breaking quantum channels."""

__version__ = "1.0.0"
