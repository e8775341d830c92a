"""
Test input parameters for the qdeform tools
"""
