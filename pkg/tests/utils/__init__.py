"""
Test `spectralservo.utils` package.
"""
