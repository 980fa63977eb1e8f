"""Validation and file helpers."""
from .validators import ValidationError, validate_instance

__all__ = ["ValidationError", "validate_instance"]
