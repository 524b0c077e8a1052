"""
Test suite for perisobolev.
"""
