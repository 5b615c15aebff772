"""Belief objects, Blackwell comparisons, privacy frontiers and signal synthesis."""
