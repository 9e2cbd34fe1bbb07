"""Retarded/advanced solutions of the scalar wave and Maxwell equations and
quantitative checks of their behaviour at spatial infinity."""

__version__ = "0.1.0"
