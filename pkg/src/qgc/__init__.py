"""Quasi group codes over prime-power rings: rate regions, simulations, checks."""

__version__ = "0.1.0"
