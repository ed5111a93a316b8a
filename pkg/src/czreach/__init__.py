"""Constrained zonotopes: closed-form set algebra, least-squares Pontryagin
difference approximations and robust controllable set recursions."""

__version__ = "0.1.0"
