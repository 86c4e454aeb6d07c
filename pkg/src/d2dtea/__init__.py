"""Techno-economic simulator for LEO satellite direct-to-device broadband."""

__version__ = "0.1.0"
