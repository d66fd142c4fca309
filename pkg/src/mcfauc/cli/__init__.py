"""
This file makes the cli directory a Python package.
"""
