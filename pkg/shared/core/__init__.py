"""
Shared core definitions (exceptions).
"""
