"""Explicit-state CTL model checking of an adaptive traffic signal controller,
plus a discrete-time simulator comparing it with fixed-period signals."""

__version__ = "0.1.0"
