"""Core processing modules"""