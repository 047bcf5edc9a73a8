"""Deterministic simulator and planning harness for heterogeneous robot teams."""

__version__ = "0.1.0"

ROBOT_ORDER = ("alice", "bob", "david")
