"""
Configuration package for the privacy-constrained signal toolkit
"""

from .config import AppConfig

__all__ = ['AppConfig']
