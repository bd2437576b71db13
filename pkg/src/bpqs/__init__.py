"""Exact verification of Kochen-Specker sets and bipartite perfect quantum strategies."""

__version__ = "0.1.0"
