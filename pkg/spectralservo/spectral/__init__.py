"""
Estimate translations and rotations in spectral domain.
"""


from .harmonics import (
    RealShBasis,
    ShCoefficients,
    complex_to_real_matrix,
    dump_coefficients,
    make_real_sh_basis,
    normalize_coefficients,
    quadrature_weights,
    real_spherical_harmonics,
    sh_analyze,
    sh_forward,
    sh_inverse,
)
from .rotation import (
    correlation_curvature,
    degree_gradients,
    degree_metrics,
    rotation_cost,
    smoothing_weights,
    so3_correlation,
    so3_correlation_gradient,
)
from .translation import (
    SpectralVolume,
    TranslationEstimate,
    decode_peak,
    dft3,
    phase_correlate,
    shift_grid,
    translation_cost,
)
from .wigner import (
    WignerBlocks,
    angular_momentum,
    wigner_d,
    wigner_small_d,
    wigner_u,
    wigner_u_derivative,
)


__all__ = [
    'RealShBasis',
    'ShCoefficients',
    'SpectralVolume',
    'TranslationEstimate',
    'WignerBlocks',
    'angular_momentum',
    'complex_to_real_matrix',
    'correlation_curvature',
    'decode_peak',
    'degree_gradients',
    'degree_metrics',
    'dft3',
    'dump_coefficients',
    'make_real_sh_basis',
    'normalize_coefficients',
    'phase_correlate',
    'quadrature_weights',
    'real_spherical_harmonics',
    'rotation_cost',
    'sh_analyze',
    'sh_forward',
    'sh_inverse',
    'shift_grid',
    'smoothing_weights',
    'so3_correlation',
    'so3_correlation_gradient',
    'translation_cost',
    'wigner_d',
    'wigner_small_d',
    'wigner_u',
    'wigner_u_derivative',
]
