"""Configuration module"""