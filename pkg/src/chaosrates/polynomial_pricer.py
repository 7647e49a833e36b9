"""Semi-analytic option and swaption pricing for coherent models.

Every payoff considered here reduces to n! * E[(p(Z))+] with Z standard
normal and p a polynomial of degree 2n - 2.  The expectation is evaluated
exactly: isolate the real roots of p, certify the sign of p between
consecutive roots, then sum truncated Gaussian moments over the intervals
where p is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent_model import CoherentModel, chaos_polynomial, kernel_coefficient
from .special_functions import RealPolynomial, gaussian_partial_moments

MAX_DEGREE = 30


@dataclass(frozen=True)
class BondSpec:
    """A unit-notional discount bond identified by its maturity."""

    maturity: float

    def __post_init__(self) -> None:
        if not self.maturity > 0:
            raise ValueError(f"bond maturity must be positive, got {self.maturity}")


@dataclass(frozen=True)
class OptionSpec:
    """European call on a discount bond: exercise at t, bond matures at T."""

    option_maturity: float
    bond_maturity: float
    strike: float

    def __post_init__(self) -> None:
        if not 0 < self.option_maturity <= self.bond_maturity:
            raise ValueError(
                f"need 0 < option maturity <= bond maturity, got "
                f"{self.option_maturity} and {self.bond_maturity}"
            )
        if self.strike < 0:
            raise ValueError(f"strike must be nonnegative, got {self.strike}")


@dataclass(frozen=True)
class SwaptionSpec:
    """Payer swaption: exercise at t into fixed-rate payments at T_1..T_N.

    strike is the fixed rate paid per period; zero is allowed, collapsing
    the payoff to a forward bond spread.
    """

    option_maturity: float
    payment_dates: tuple
    strike: float

    def __post_init__(self) -> None:
        dates = tuple(float(T) for T in self.payment_dates)
        if not dates:
            raise ValueError("swaption needs at least one payment date")
        if self.option_maturity < 0:
            raise ValueError(f"option maturity must be nonnegative, got {self.option_maturity}")
        if not self.option_maturity < dates[0] or any(b <= a for a, b in zip(dates, dates[1:])):
            raise ValueError("payment dates must be strictly increasing and follow the option maturity")
        if self.strike < 0:
            raise ValueError(f"strike must be nonnegative, got {self.strike}")
        object.__setattr__(self, "payment_dates", dates)


@dataclass(frozen=True)
class PositivePartResult:
    """E[(p(Z))+] together with the certified sign decomposition of p."""

    value: float
    payoff_polynomial: RealPolynomial
    positive_intervals: tuple
    roots: tuple


def _stable_quadratic_roots(c0: float, c1: float, c2: float) -> list:
    disc = c1 * c1 - 4.0 * c2 * c0
    if disc < 0:
        return []
    if disc == 0:
        return [-c1 / (2.0 * c2)]
    s = math.sqrt(disc)
    q = -0.5 * (c1 + math.copysign(s, c1 if c1 != 0 else 1.0))
    return sorted([q / c2, c0 / q])


def _newton_polish(p: RealPolynomial, x: float) -> float:
    dp = p.derivative()
    for _ in range(40):
        fx = p(x)
        dfx = dp(x)
        if dfx == 0 or not math.isfinite(dfx):
            break
        nxt = x - fx / dfx
        if not math.isfinite(nxt):
            break
        if abs(nxt - x) <= 1e-15 * max(1.0, abs(nxt)):
            return nxt
        x = nxt
    return x


def _residual_scale(p: RealPolynomial, x: float) -> float:
    # condition-aware size of p near x: sum of term magnitudes
    return 1.0 + sum(abs(c) * abs(x) ** k for k, c in enumerate(p.coeffs))


def _real_roots(p: RealPolynomial) -> list:
    deg = p.degree
    if deg <= 0:
        return []
    c = p.coeffs
    if deg == 1:
        return [-c[0] / c[1]]
    if deg == 2:
        return _stable_quadratic_roots(c[0], c[1], c[2])
    if deg == 4 and c[1] == 0.0 and c[3] == 0.0:
        # biquadratic: solve for y = z^2, then take symmetric square roots
        roots = []
        for y in _stable_quadratic_roots(c[0], c[2], c[4]):
            if y > 0:
                z = math.sqrt(y)
                roots.extend([-z, z])
            elif y == 0:
                roots.append(0.0)
        return sorted(roots)
    candidates = np.polynomial.polynomial.polyroots(np.asarray(c))
    roots = []
    for z in candidates:
        if abs(z.imag) > 1e-7 * max(1.0, abs(z)):
            continue
        x = _newton_polish(p, float(z.real))
        if abs(p(x)) <= 1e-11 * _residual_scale(p, x):
            roots.append(x)
    roots.sort()
    deduped = []
    for x in roots:
        if deduped and abs(x - deduped[-1]) <= 1e-9 * max(1.0, abs(x), abs(deduped[-1])):
            continue
        deduped.append(x)
    return deduped


def _interior_point(lo: float, hi: float) -> float:
    if lo == -math.inf and hi == math.inf:
        return 0.0
    if lo == -math.inf:
        return hi - max(1.0, abs(hi))
    if hi == math.inf:
        return lo + max(1.0, abs(lo))
    return 0.5 * (lo + hi)


def expected_positive_part(p: RealPolynomial) -> PositivePartResult:
    """E[(p(Z))+] for standard normal Z, by root isolation plus moments."""
    if p.degree > MAX_DEGREE:
        raise ValueError(f"polynomial degree {p.degree} exceeds the supported maximum {MAX_DEGREE}")
    if p.is_zero:
        return PositivePartResult(0.0, p, (), ())
    roots = _real_roots(p)
    cuts = [-math.inf] + roots + [math.inf]
    intervals = tuple(
        (lo, hi) for lo, hi in zip(cuts, cuts[1:]) if p(_interior_point(lo, hi)) > 0
    )
    value = 0.0
    for lo, hi in intervals:
        moments = gaussian_partial_moments(p.degree, lo, hi)
        value += sum(c * m for c, m in zip(p.coeffs, moments))
    return PositivePartResult(
        value=max(value, 0.0),
        payoff_polynomial=p,
        positive_intervals=intervals,
        roots=tuple(roots),
    )


def call_payoff_polynomial(model: CoherentModel, spec: OptionSpec) -> RealPolynomial:
    """p(z) with call price n! * E[(p(Z))+], Z the normalised driver at expiry.

    Built from pi_t * (P(t, T) - K) with the driver written as R_t = sqrt(Q_t) Z.
    Requires Q_t > 0; with no accrued variance the payoff is deterministic and
    priced directly by price_bond_call.
    """
    q_t = model.sf.q_at(spec.option_maturity)
    q_T = model.sf.q_at(spec.bond_maturity)
    if q_t == 0:
        raise ValueError("no variance accrues by option expiry; the payoff is deterministic")
    n = model.n
    acc = RealPolynomial((0.0,))
    for k in range(1, n + 1):
        c = float(kernel_coefficient(n, k)) * ((1.0 - q_T**k) - spec.strike * (1.0 - q_t**k))
        if c != 0.0:
            acc = acc + c * chaos_polynomial(2 * n - 2 * k, q_t)
    return acc.scale_argument(math.sqrt(q_t))


def price_bond_call(model: CoherentModel, spec: OptionSpec) -> float:
    """Time-0 price of a call on a discount bond, normalised by pi_0."""
    q_t = model.sf.q_at(spec.option_maturity)
    if q_t == 0:
        q_T = model.sf.q_at(spec.bond_maturity)
        return max((1.0 - q_T**model.n) - spec.strike, 0.0)
    p = call_payoff_polynomial(model, spec)
    return math.factorial(model.n) * expected_positive_part(p).value


def call_delta(model: CoherentModel, spec: OptionSpec) -> float:
    """Hedge position in the T-bond: the price sensitivity to P(0, T).

    Differentiates the moment representation directly; boundary terms vanish
    because the payoff polynomial is zero at every interval endpoint, so only
    the coefficient sensitivities survive.
    """
    n = model.n
    q_t = model.sf.q_at(spec.option_maturity)
    q_T = model.sf.q_at(spec.bond_maturity)
    if q_t == 0:
        intrinsic = (1.0 - q_T**n) - spec.strike
        if intrinsic == 0:
            raise ValueError("degenerate hedge: deterministic payoff sits exactly at the strike")
        return 1.0 if intrinsic > 0 else 0.0
    res = expected_positive_part(call_payoff_polynomial(model, spec))
    for r in res.roots:
        if abs(r) <= 1e-9:
            raise ValueError("degenerate hedge: payoff polynomial has a root at the origin")
    # dQ_T/dP(0,T) = -1 / (n Q_T^(n-1)); chain rule through each coefficient
    denom = n * q_T ** (n - 1)
    sens = RealPolynomial((0.0,))
    for k in range(1, n + 1):
        s = float(kernel_coefficient(n, k)) * k * q_T ** (k - 1) / denom
        sens = sens + s * chaos_polynomial(2 * n - 2 * k, q_t)
    sens = sens.scale_argument(math.sqrt(q_t))
    val = 0.0
    for lo, hi in res.positive_intervals:
        moments = gaussian_partial_moments(sens.degree, lo, hi)
        val += sum(c * m for c, m in zip(sens.coeffs, moments))
    return math.factorial(n) * val


def swaption_payoff_polynomial(model: CoherentModel, spec: SwaptionSpec) -> RealPolynomial:
    """p(z) with payer-swaption price n! * E[(p(Z))+]; requires Q_t > 0."""
    q_t = model.sf.q_at(spec.option_maturity)
    if q_t == 0:
        raise ValueError("no variance accrues by swaption expiry; the payoff is deterministic")
    n = model.n
    q_pay = [model.sf.q_at(T) for T in spec.payment_dates]
    q_last = q_pay[-1]
    acc = RealPolynomial((0.0,))
    for k in range(1, n + 1):
        c = float(kernel_coefficient(n, k)) * (
            (q_last**k - q_t**k) - spec.strike * sum(1.0 - q**k for q in q_pay)
        )
        if c != 0.0:
            acc = acc + c * chaos_polynomial(2 * n - 2 * k, q_t)
    return acc.scale_argument(math.sqrt(q_t))


def price_swaption(model: CoherentModel, spec: SwaptionSpec) -> float:
    """Time-0 price of a payer swaption, normalised by pi_0."""
    n = model.n
    q_t = model.sf.q_at(spec.option_maturity)
    if q_t == 0:
        q_pay = [model.sf.q_at(T) for T in spec.payment_dates]
        fixed_leg = spec.strike * sum(1.0 - q**n for q in q_pay)
        return max((1.0 - q_t**n) - (1.0 - q_pay[-1] ** n) - fixed_leg, 0.0)
    p = swaption_payoff_polynomial(model, spec)
    return math.factorial(n) * expected_positive_part(p).value
