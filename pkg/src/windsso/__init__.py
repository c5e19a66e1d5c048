"""Impedance-based small-signal stability toolkit for grid-connected
converter wind farms: dominant-pole analysis, parameter sensitivity,
automatic damping-controller tuning, and time-domain verification."""

__version__ = "0.1.0"
