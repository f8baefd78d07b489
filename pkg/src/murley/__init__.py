"""Torsion-free abelian groups with prescribed characteristics: forging, auditing and ring probes."""

__version__ = "0.1.0"
