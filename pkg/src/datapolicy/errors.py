"""Shared exception base so callers can catch one family."""


class DataPolicyError(Exception):
    """Base class for policy-layer errors (model, engine, wire, proxy)."""
