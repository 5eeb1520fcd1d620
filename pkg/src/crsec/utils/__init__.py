"""Utility functions and classes for crsec."""
