"""Utility modules"""