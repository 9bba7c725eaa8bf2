"""Entanglement workbench: measures, transformations, distillation bounds, quantum games and distributed gates."""

__version__ = "0.1.0"
