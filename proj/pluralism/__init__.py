"""Exact persuasion-market engine: equilibria, alignment certificates, survey fits."""

try:
    from ._market import *  # noqa: F401,F403
    from ._market import schema_version  # noqa: F401
except ImportError:
    # dev checkout: the extension is staged on sys.path (build/python), not
    # inside this package directory
    from _market import *  # noqa: F401,F403
    from _market import schema_version  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
