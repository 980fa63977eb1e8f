"""Schemas and command handlers."""
