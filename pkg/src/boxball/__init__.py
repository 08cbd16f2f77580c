"""Stochastic box-ball system, PushTASEP, and SRBM gap-process toolkit."""

__version__ = "0.1.0"
