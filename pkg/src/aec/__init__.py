"""Exact decision procedures for arithmetic expression construction."""

__version__ = "0.1.0"
