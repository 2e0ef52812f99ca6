"""Read-only plotting for kanbench result files (JSON or CSV exports)."""

__version__ = "0.1.0"
