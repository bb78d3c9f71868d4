"""Sewing formulas on Schottky-uniformised surfaces, checked against free-boson correlators."""
