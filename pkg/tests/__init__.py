"""
Test `spectralservo` package.
"""
