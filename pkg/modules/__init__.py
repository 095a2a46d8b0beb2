"""
Modules package.

Contains the tensor, matrix kernel, solver, diagnostics and harness modules.
"""
