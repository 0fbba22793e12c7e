"""Workbench for the Concurrent Pattern Calculus."""

__version__ = "0.1.0"
