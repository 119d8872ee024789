"""Traveling waves and critical speeds for doubly nonlinear reaction-diffusion."""

from __future__ import annotations

__version__ = "0.1.0"
