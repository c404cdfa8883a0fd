"""Data management modules"""