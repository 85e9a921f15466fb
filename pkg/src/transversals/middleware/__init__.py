"""Middleware package."""

from transversals.middleware.error_handler import CommandFailed, command_context

__all__ = ["CommandFailed", "command_context"]
