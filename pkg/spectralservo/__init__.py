"""
Register point clouds and servo cameras with spectral-domain gradients.
"""
