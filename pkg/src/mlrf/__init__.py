"""Multiphase ranking functions and recurrent sets for single-path
linear-constraint loops."""

__version__ = "0.1.0"
