"""Simulation and stability analysis of the Turchin-Korotayev model."""

__version__ = "0.1.0"
