"""Exact SOS and sos-convexity certification for ternary quartic forms."""

__version__ = "0.1.0"
