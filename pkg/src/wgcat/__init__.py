"""Weakly globular n-fold categories, Segalic pseudo-functors and their strictification."""
