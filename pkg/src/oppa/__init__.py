"""Objectives-Principles-Practices assessment of agile methods."""

__version__ = "0.1.0"
