"""Interest-rate models whose pricing kernels are polynomials in one
Gaussian driver, with semi-analytic bond option and swaption pricing,
finite-dimensional path simulation, and independent verification oracles.
"""

from .coherent_model import (
    CoherentModel,
    KernelValue,
    bond_price,
    chaos_martingale,
    chaos_polynomial,
    chaos_value,
    initial_bond_price,
    kernel_coefficient,
    kernel_polynomial,
    pricing_kernel,
    risk_premium,
    short_rate,
)
from .finite_dim import (
    AtomGrid,
    DiscountCurve,
    SimplePath,
    calibrate_weights,
    initial_curve,
    read_market_curve,
    simulate_paths,
    write_paths_csv,
)
from .incoherent_model import (
    IncoherentModel,
    IncoherentTerm,
    MultiGaussianState,
    incoherent_bond_price,
    incoherent_kernel,
    mixed_order_kernel,
    multi_state_at,
)
from .polynomial_pricer import (
    BondSpec,
    OptionSpec,
    PositivePartResult,
    SwaptionSpec,
    call_delta,
    call_payoff_polynomial,
    expected_positive_part,
    price_bond_call,
    price_swaption,
    swaption_payoff_polynomial,
)
from .simulation_oracle import (
    adaptive_simpson,
    mc_conditional_variance,
    mc_price,
    quadrature_price,
    simulate_chaos_sde,
)
from .special_functions import (
    RealPolynomial,
    gaussian_partial_moment,
    gaussian_partial_moments,
    hermite,
    hermite_product_expansion,
    normal_cdf,
    normal_pdf,
)
from .structure_functions import (
    DiscreteAtoms,
    ExponentialDensity,
    GaussianState,
    PiecewiseConstantDensity,
    StructureFunction,
    cross_inner_product,
    residual_inner_product,
    state_at,
    window_inner_product,
)

__version__ = "0.1.0"

__all__ = [
    "AtomGrid",
    "BondSpec",
    "CoherentModel",
    "DiscountCurve",
    "DiscreteAtoms",
    "ExponentialDensity",
    "GaussianState",
    "IncoherentModel",
    "IncoherentTerm",
    "KernelValue",
    "MultiGaussianState",
    "OptionSpec",
    "PiecewiseConstantDensity",
    "PositivePartResult",
    "RealPolynomial",
    "SimplePath",
    "StructureFunction",
    "SwaptionSpec",
    "adaptive_simpson",
    "bond_price",
    "calibrate_weights",
    "call_delta",
    "call_payoff_polynomial",
    "chaos_martingale",
    "chaos_polynomial",
    "chaos_value",
    "cross_inner_product",
    "expected_positive_part",
    "gaussian_partial_moment",
    "gaussian_partial_moments",
    "hermite",
    "hermite_product_expansion",
    "incoherent_bond_price",
    "incoherent_kernel",
    "initial_bond_price",
    "initial_curve",
    "kernel_coefficient",
    "kernel_polynomial",
    "mc_conditional_variance",
    "mc_price",
    "mixed_order_kernel",
    "multi_state_at",
    "normal_cdf",
    "normal_pdf",
    "price_bond_call",
    "price_swaption",
    "pricing_kernel",
    "quadrature_price",
    "read_market_curve",
    "residual_inner_product",
    "risk_premium",
    "short_rate",
    "simulate_chaos_sde",
    "simulate_paths",
    "state_at",
    "swaption_payoff_polynomial",
    "window_inner_product",
    "write_paths_csv",
]
