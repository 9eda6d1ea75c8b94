"""Proof mining over dependently typed term libraries."""

__version__ = "0.1.0"
