"""
Command-line tooling around the gcdeform library.
Loads JSON model files, runs the check/compute commands and renders reports.
"""

from .model_loader import Model, load_model, parse_model
from .report import render, to_jsonable
