"""
Test suite for flightplay.
"""
