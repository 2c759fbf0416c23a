"""Exact modular representation theory for the groups SD16, Q8, G24 and the tower N_k at p = 3."""

__version__ = "0.1.0"
