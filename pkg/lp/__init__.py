"""Exact rational linear programming used by every solver module."""
