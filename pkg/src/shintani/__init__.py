"""Shintani descent, almost characters and Drinfeld-double trace functions,
computed exactly for finite models of neutrally unipotent groups."""

__version__ = "0.1.0"
