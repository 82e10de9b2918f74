"""
Test `spectralservo.geometry` package.
"""
