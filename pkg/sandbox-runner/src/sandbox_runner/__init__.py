"""Restricted child-interpreter runner for programs-of-thought."""

from .runner import ALLOWED_IMPORTS, execute, main, validate_imports

__all__ = ["ALLOWED_IMPORTS", "execute", "main", "validate_imports"]
