"""Coherent single-factor rate model of a given chaos order.

The model is driven by one Gaussian martingale R_t with bracket Q_t taken
from a structure function.  Closed forms implemented here:

* squared-martingale components

      X_t^(m) = sum_{k=0..m//2} (-1)^k R^(m-2k) Q^k / (k! (m-2k)! 2^k)
              = Q^(m/2) He_m(R / sqrt(Q)) / m! ,

  with X^(0) = 1 and X^(m) = 0 for m < 0;

* the pricing kernel of order n,

      pi_t = sum_{k=1..n} w_k (1 - Q_t^k) X_t^(2n-2k),
      w_k  = (2(n-k))! / (k! ((n-k)!)^2),

  a polynomial of degree 2n - 2 in R_t with pi_0 = 1/n!;

* discount bonds P(t, T) = [same sum with Q_t^k -> Q_T^k inside the
  bracket] / pi_t, so P(0, T) = 1 - Q_T^n;

* the short rate and market price of risk implied by the kernel dynamics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .special_functions import RealPolynomial
from .structure_functions import GaussianState, StructureFunction

MAX_ORDER = 20


@dataclass(frozen=True)
class CoherentModel:
    """Chaos order n plus the structure function supplying Q_t and phi."""

    n: int
    sf: StructureFunction

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, int) or not 1 <= self.n <= MAX_ORDER:
            raise ValueError(f"chaos order must be an integer in [1, {MAX_ORDER}], got {self.n}")

    def state_at(self, t: float, r: float) -> GaussianState:
        return GaussianState(t=t, R=r, Q=self.sf.q_at(t))


@dataclass(frozen=True)
class KernelValue:
    """Kernel level at a state plus its polynomial-in-R representation."""

    pi: float
    as_polynomial: RealPolynomial


@lru_cache(maxsize=None)
def _chaos_terms(m: int) -> tuple:
    # (coefficient, power of R, power of Q) triples for X^(m)
    return tuple(
        (
            float(Fraction((-1) ** k, math.factorial(k) * math.factorial(m - 2 * k) * 2**k)),
            m - 2 * k,
            k,
        )
        for k in range(m // 2 + 1)
    )


def chaos_value(m: int, r, q):
    """Evaluate X^(m) at driver value r with bracket q; broadcasts over arrays."""
    zero = r * 0.0 + q * 0.0
    if m < 0:
        return zero
    acc = zero
    for coef, i, j in _chaos_terms(m):
        acc = acc + coef * r**i * q**j
    return acc


def chaos_polynomial(m: int, q: float) -> RealPolynomial:
    """X^(m) as a polynomial in the driver value, with bracket q frozen."""
    if m < 0:
        return RealPolynomial((0.0,))
    coeffs = [0.0] * (m + 1)
    for coef, i, j in _chaos_terms(m):
        coeffs[i] = coef * q**j
    return RealPolynomial(tuple(coeffs))


def chaos_martingale(m: int, state: GaussianState, method: str = "monomial") -> float:
    """X^(m) at a state, via the monomial sum or the scaled-Hermite form."""
    if method == "monomial":
        return chaos_value(m, state.R, state.Q)
    if method == "hermite":
        if m < 0:
            return 0.0
        q = state.Q
        if q == 0:
            return chaos_value(m, state.R, q)
        from .special_functions import hermite

        return q ** (m / 2) * hermite(m)(state.R / math.sqrt(q)) / math.factorial(m)
    raise ValueError(f"unknown method {method!r}; expected 'monomial' or 'hermite'")


@lru_cache(maxsize=None)
def kernel_coefficient(n: int, k: int) -> Fraction:
    """Exact weight w_k = (2(n-k))! / (k! ((n-k)!)^2) of the order-n kernel."""
    if not 0 <= k <= n:
        raise ValueError(f"kernel coefficient index must satisfy 0 <= k <= n, got k={k}, n={n}")
    return Fraction(
        math.factorial(2 * (n - k)),
        math.factorial(k) * math.factorial(n - k) ** 2,
    )


@lru_cache(maxsize=None)
def rate_coefficient(n: int, k: int) -> Fraction:
    """Exact weight (2(n-k))! / ((k-1)! ((n-k)!)^2) of the short-rate sum."""
    if not 1 <= k <= n:
        raise ValueError(f"rate coefficient index must satisfy 1 <= k <= n, got k={k}, n={n}")
    return kernel_coefficient(n, k) * k


def kernel_polynomial(n: int, q_state: float, q_maturity: float) -> RealPolynomial:
    """E_t[pi at the later bracket level] as a polynomial in R_t.

    With q_maturity = q_state this is the kernel itself; with q_maturity read
    at a bond maturity it is the bond-price numerator.  Degree is 2n - 2.
    """
    acc = RealPolynomial((0.0,))
    for k in range(1, n + 1):
        w = float(kernel_coefficient(n, k)) * (1.0 - q_maturity**k)
        if w != 0.0:
            acc = acc + w * chaos_polynomial(2 * n - 2 * k, q_state)
    return acc


def pricing_kernel(model: CoherentModel, state: GaussianState) -> KernelValue:
    """Kernel level pi_t at the state, plus its polynomial in R_t."""
    n = model.n
    pi = 0.0
    for k in range(1, n + 1):
        pi += float(kernel_coefficient(n, k)) * (1.0 - state.Q**k) * chaos_value(2 * n - 2 * k, state.R, state.Q)
    return KernelValue(pi=pi, as_polynomial=kernel_polynomial(n, state.Q, state.Q))


def bond_price(model: CoherentModel, state: GaussianState, maturity: float) -> float:
    """Discount bond P(t, T) seen from the state; requires T >= t."""
    if maturity < state.t:
        raise ValueError(f"maturity {maturity} precedes state time {state.t}")
    q_T = model.sf.q_at(maturity)
    numer = 0.0
    for k in range(1, model.n + 1):
        numer += (
            float(kernel_coefficient(model.n, k))
            * (1.0 - q_T**k)
            * chaos_value(2 * model.n - 2 * k, state.R, state.Q)
        )
    pi = pricing_kernel(model, state).pi
    if pi <= 0:
        raise ValueError("pricing kernel is not positive at this state; bond price undefined")
    return numer / pi


def initial_bond_price(model: CoherentModel, maturity: float) -> float:
    """P(0, T) = 1 - Q_T^n."""
    return 1.0 - model.sf.q_at(maturity) ** model.n


def short_rate(model: CoherentModel, state: GaussianState) -> float:
    """Instantaneous rate r_t implied by the kernel drift; needs Q_t < 1."""
    if state.Q >= 1:
        raise ValueError("short rate undefined once the bracket Q_t reaches 1")
    dens = model.sf.squared_density(state.t)
    if dens == 0.0:
        return 0.0
    pi = pricing_kernel(model, state).pi
    if pi <= 0:
        raise ValueError("pricing kernel is not positive at this state; short rate undefined")
    q = float(state.Q)
    acc = 0.0
    for k in range(1, model.n + 1):
        acc += (
            float(rate_coefficient(model.n, k))
            * q ** (k - 1)
            * chaos_value(2 * model.n - 2 * k, state.R, state.Q)
        )
    return dens * acc / pi


def risk_premium(model: CoherentModel, state: GaussianState) -> float:
    """Market price of risk lambda_t implied by the kernel volatility; Q_t < 1."""
    if state.Q >= 1:
        raise ValueError("risk premium undefined once the bracket Q_t reaches 1")
    dens = model.sf.squared_density(state.t)
    if dens == 0.0:
        return 0.0
    pi = pricing_kernel(model, state).pi
    if pi <= 0:
        raise ValueError("pricing kernel is not positive at this state; risk premium undefined")
    acc = 0.0
    for k in range(1, model.n + 1):
        acc += (
            float(kernel_coefficient(model.n, k))
            * (1.0 - state.Q**k)
            * chaos_value(2 * model.n - 2 * k - 1, state.R, state.Q)
        )
    return -math.sqrt(dens) * acc / pi


def from_descriptor(d: dict) -> CoherentModel:
    """Build a coherent model from {"n": ..., "sf": {...}}."""
    from . import structure_functions

    if not isinstance(d, dict) or "n" not in d or "sf" not in d:
        raise ValueError("coherent model descriptor must be an object with 'n' and 'sf' keys")
    n = d["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"chaos order must be an integer, got {n!r}")
    return CoherentModel(n=n, sf=structure_functions.from_descriptor(d["sf"]))


def to_descriptor(model: CoherentModel) -> dict:
    from . import structure_functions

    return {"n": model.n, "sf": structure_functions.to_descriptor(model.sf)}
