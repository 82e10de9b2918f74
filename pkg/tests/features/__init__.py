"""
Test `spectralservo.features` package.
"""
