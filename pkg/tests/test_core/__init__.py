"""
Test suite for core module.

This package contains unit tests for configuration, logging, and type definitions.
"""