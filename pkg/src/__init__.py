"""
condlab source package
"""

__version__ = "1.0.0"
__author__ = "condlab developers"
__description__ = "Structured-matrix conditioning laboratory"
