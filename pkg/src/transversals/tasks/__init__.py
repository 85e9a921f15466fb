"""Sharded work execution."""

from transversals.tasks.base import ShardedTask

__all__ = ["ShardedTask"]
