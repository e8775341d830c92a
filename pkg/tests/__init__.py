"""
Tests for qdeform.
"""
