"""Command-line verbs over problem files."""
