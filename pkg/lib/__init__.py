# Lambda-mu Workbench Library
"""Shared modules for the λμ-calculus workbench."""
