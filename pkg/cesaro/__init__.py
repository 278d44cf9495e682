"""
Explicit constants for Cesaro means of nonexpansive maps in uniformly convex spaces
"""

__version__ = '0.1.0'
