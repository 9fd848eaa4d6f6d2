"""Adversarial traffic-signal timing analysis on time-expanded flows."""

__version__ = "0.1.0"
