"""Brownian (Gross) and Steiner symmetrization of planar domains."""
from .distributions import (
    Arcsine,
    Distribution,
    Empirical,
    KappaDisc,
    Rademacher,
    UniformSym,
    empirical_from_samples,
    parse_distribution,
)
from .eigen import curve_eigenvalue, dirichlet_eigen, principal_eigenvalue
from .geometry import (
    Disc,
    Domain,
    Polygon,
    hausdorff_distance,
    kappa_disc,
    parse_domain,
    rectangle,
    thm3_domain,
    unit_disc,
)
from .gross import (
    BoundaryCurve,
    BrownianSymmetrizer,
    FourierMap,
    GrossMap,
    area,
    brownian_symmetrize,
    check_simple_curve,
    curve_length,
    detect_vertical_segments,
    evaluate_boundary,
    fourier_coefficients,
)
from .sampler import (
    ExitSamples,
    SamplerConfig,
    sample_disc_exit_exact,
    sample_exit_em,
    sample_exit_wos,
)
from .steiner import (
    SteinerSymmetrizer,
    SymmetrizedRegion,
    region_area,
    region_perimeter,
    region_to_domain,
    steiner_symmetrize,
)

__version__ = "0.1.0"
