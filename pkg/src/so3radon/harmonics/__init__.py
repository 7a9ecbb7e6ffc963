"""Special functions, quadrature and the spectral data model."""

from .quadrature import QuadratureRule, gauss_legendre, haar_quadrature, sphere_quadrature
from .special import (
    FOUR_PI,
    assoc_legendre,
    degree_slice,
    from_spherical,
    legendre,
    order_from_index,
    order_index,
    sph_harm,
    sph_harm_all,
    sph_harm_degree,
    to_spherical,
    wigner_matrices,
    wigner_matrix,
    wigner_small_d,
)
from .spectra import (
    BandwidthError,
    PairSpectrum,
    SO3Spectrum,
    analyze_pair,
    analyze_so3,
    basis_function,
    conjugate_symmetric,
    convolve,
    eval_pair,
    eval_pair_grid,
    fourier_matrices,
    from_fourier_matrices,
    l2_norm_so3,
    laplacian,
    left_translate,
    load_spectrum,
    pair_partial_laplacians,
    random_pair_spectrum,
    random_so3_spectrum,
    real_part,
    save_spectrum,
    spectrum_from_json_dict,
    synth_so3,
)
