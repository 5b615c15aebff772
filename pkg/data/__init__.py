"""Problem files, result encoding and canonical instances."""
