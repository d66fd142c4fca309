"""
This module contains the handler functions for the CLI commands.
"""
from .analyze import analyze_files
from .simulate import simulate_study

__all__ = [
    "analyze_files",
    "simulate_study",
]
