"""
Test `spectralservo.servo` package.
"""
