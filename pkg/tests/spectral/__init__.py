"""
Test `spectralservo.spectral` package.
"""
