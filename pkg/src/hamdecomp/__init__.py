"""Desk-scale Hamilton decompositions of regular tournaments, with exact oracles."""

__version__ = "0.1.0"
