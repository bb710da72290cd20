"""Qubit phase-space geometry: SIC-POVM and Wootters charts, potato chips, channels and boundary dynamics."""

__version__ = "0.1.0"
