"""Brute-force verification engines, independent of the closed forms.

Nothing in this module trusts the semi-analytic pricing path: prices come
from plain Monte Carlo or deterministic quadrature, and the chaos recursion
is integrated step by step with Euler increments.  Test suites compare
these estimates against the library's closed-form results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coherent_model import CoherentModel, chaos_value, kernel_coefficient
from .incoherent_model import (
    IncoherentModel,
    MultiGaussianState,
    _split_mixed,
    accumulated_gram_matrix,
    multi_state_at,
)
from .polynomial_pricer import BondSpec, OptionSpec, SwaptionSpec
from .special_functions import RealPolynomial
from .structure_functions import GaussianState


@dataclass(frozen=True)
class ChaosPaths:
    """Discretised paths of X^(0..m) on a shared Brownian path per sample.

    values[j, k] is path j of X^(k); realized_brackets[j] is the running
    sum of phi^2 dW^2 along path j (the discrete bracket of R).
    """

    times: np.ndarray
    values: np.ndarray
    realized_brackets: np.ndarray


def simulate_chaos_sde(
    model: CoherentModel, m: int, horizon: float, dt: float, seed: int, count: int = 1
) -> ChaosPaths:
    """Euler integration of the nested recursion dX^(j) = X^(j-1) phi dW."""
    if not model.sf.is_density:
        raise ValueError("atom-family structure functions have no density to integrate; use finite_dim")
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    if not horizon > dt:
        raise ValueError(f"horizon must exceed the time step, got {horizon}")
    if m < 1:
        raise ValueError(f"target order must be at least 1, got {m}")
    if count < 1:
        raise ValueError(f"path count must be positive, got {count}")
    steps = int(round(horizon / dt))
    times = dt * np.arange(steps + 1)
    phi = np.sqrt(model.sf.squared_density(times[:-1]))
    rng = np.random.default_rng(seed)
    dw = math.sqrt(dt) * rng.standard_normal((count, steps))
    values = np.empty((count, m + 1, steps + 1))
    values[:, 0, :] = 1.0
    zeros = np.zeros((count, 1))
    for j in range(1, m + 1):
        incr = values[:, j - 1, :-1] * phi * dw
        values[:, j, :] = np.concatenate([zeros, np.cumsum(incr, axis=1)], axis=1)
    realized = np.concatenate([zeros, np.cumsum(phi**2 * dw**2, axis=1)], axis=1)
    return ChaosPaths(times=times, values=values, realized_brackets=realized)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Adaptive Simpson integral of a vectorised f on [a, b], absolute tol.

    Keeps a flat queue of active segments, splitting them in lockstep and
    banking Richardson-corrected values once the local error fits within the
    segment's width-proportional share of the tolerance.
    """
    span = float(b - a)
    if span == 0.0:
        return 0.0
    lo = np.array([float(a)])
    hi = np.array([float(b)])
    flo, fmid, fhi = f(lo), f(0.5 * (lo + hi)), f(hi)
    s = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    total = 0.0
    for depth in range(max_depth + 1):
        if lo.size == 0:
            break
        mid = 0.5 * (lo + hi)
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        flmid, frmid = f(lmid), f(rmid)
        s_left = (mid - lo) / 6.0 * (flo + 4.0 * flmid + fmid)
        s_right = (hi - mid) / 6.0 * (fmid + 4.0 * frmid + fhi)
        err = s_left + s_right - s
        done = (np.abs(err) <= 15.0 * tol * (hi - lo) / span) | (depth == max_depth)
        total += float(np.sum((s_left + s_right + err / 15.0)[done]))
        keep = ~done
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        flo = np.concatenate([flo[keep], fmid[keep]])
        fhi = np.concatenate([fmid[keep], fhi[keep]])
        fmid = np.concatenate([flmid[keep], frmid[keep]])
        s = np.concatenate([s_left[keep], s_right[keep]])
    return total


def quadrature_price(payoff_polynomial: RealPolynomial, order: int) -> float:
    """n! * integral of (p(z))+ against the standard normal density.

    Truncation at |z| = 12 discards Gaussian mass below 2e-32.  The domain
    is split at the payoff's real roots (companion-matrix eigenvalues) so
    the adaptive pass never has to discover a kink, or a sign bump narrower
    than its probe spacing, on its own.
    """
    if payoff_polynomial.degree > 30:
        raise ValueError(f"polynomial degree {payoff_polynomial.degree} exceeds the supported maximum 30")
    norm = 1.0 / math.sqrt(2.0 * math.pi)

    def integrand(z):
        return np.maximum(payoff_polynomial(z), 0.0) * norm * np.exp(-0.5 * z * z)

    cuts = [-12.0, 12.0]
    if payoff_polynomial.degree > 0:
        for root in np.roots(payoff_polynomial.coeffs[::-1]):
            if abs(root.imag) < 1e-9 and -12.0 < root.real < 12.0:
                cuts.append(float(root.real))
    cuts.sort()
    return math.factorial(order) * sum(
        adaptive_simpson(integrand, a, b, tol=1e-11)
        for a, b in zip(cuts, cuts[1:])
    )


def _coherent_sums(n: int, r, q: float, q_targets) -> list:
    """Bond-numerator sums at each target bracket level, for sampled r."""
    out = []
    for q_T in q_targets:
        acc = 0.0
        for k in range(1, n + 1):
            acc = acc + float(kernel_coefficient(n, k)) * (1.0 - q_T**k) * chaos_value(2 * n - 2 * k, r, q)
        out.append(acc)
    return out


def _incoherent_kernel_samples(model: IncoherentModel, t: float, r: np.ndarray) -> np.ndarray:
    gram = np.asarray(residual_gram(model, t))
    orders = set(model.orders)
    terms = model.terms
    if len(orders) == 1:
        n = orders.pop()
        qs = [term.sf.q_at(t) for term in terms]
        xs = [
            [chaos_value(n - k, r[:, i], qs[i]) for k in range(1, n + 1)]
            for i in range(len(terms))
        ]
        total = np.zeros(r.shape[0])
        for i, ti in enumerate(terms):
            for j, tj in enumerate(terms):
                g = gram[i, j]
                inner = sum(
                    g**k / math.factorial(k) * xs[i][k - 1] * xs[j][k - 1]
                    for k in range(1, n + 1)
                )
                total += ti.weight * tj.weight * inner
        return total
    lin, high, i1 = _split_mixed(model)
    i2 = 1 - i1
    n = high.order
    q1 = lin.sf.q_at(t)
    q2 = high.sf.q_at(t)
    r2 = r[:, i2]
    diag = sum(
        (1.0 - q2) ** k / math.factorial(k) * chaos_value(n - k, r2, q2) ** 2
        for k in range(1, n + 1)
    )
    cross = 2.0 * lin.weight * high.weight * gram[i1, i2] * chaos_value(n - 1, r2, q2)
    return lin.weight**2 * (1.0 - q1) + high.weight**2 * diag + cross


def _incoherent_numer_samples(model: IncoherentModel, t: float, T: float, r: np.ndarray) -> np.ndarray:
    """E_t[pi_T] per sampled state row, via the banded projection identity."""
    from .incoherent_model import _banded_projection
    from .structure_functions import residual_inner_product

    gram_t = np.asarray(residual_gram(model, t))
    orders = set(model.orders)
    terms = model.terms
    if len(orders) == 1:
        n = orders.pop()
        qs = [term.sf.q_at(t) for term in terms]
        total = np.zeros(r.shape[0])
        for i, ti in enumerate(terms):
            for j, tj in enumerate(terms):
                g_T = residual_inner_product(ti.sf, tj.sf, T)
                h = gram_t[i, j] - g_T
                inner = 0.0
                for k in range(1, n + 1):
                    inner = inner + (
                        g_T**k
                        / math.factorial(k)
                        * _banded_projection(h, n - k, n - k, r[:, i], qs[i], r[:, j], qs[j])
                    )
                total += ti.weight * tj.weight * inner
        return total
    lin, high, i1 = _split_mixed(model)
    i2 = 1 - i1
    n = high.order
    q1_T = lin.sf.q_at(T)
    q2_T = high.sf.q_at(T)
    q2 = high.sf.q_at(t)
    r2 = r[:, i2]
    h22 = gram_t[i2, i2] - residual_inner_product(high.sf, high.sf, T)
    diag = sum(
        (1.0 - q2_T) ** k
        / math.factorial(k)
        * _banded_projection(h22, n - k, n - k, r2, q2, r2, q2)
        for k in range(1, n + 1)
    )
    g12_T = residual_inner_product(lin.sf, high.sf, T)
    cross = 2.0 * lin.weight * high.weight * g12_T * chaos_value(n - 1, r2, q2)
    return lin.weight**2 * (1.0 - q1_T) + high.weight**2 * diag + cross


def residual_gram(model: IncoherentModel, t: float) -> np.ndarray:
    from .incoherent_model import residual_gram_matrix

    return residual_gram_matrix(model, t)


def _joint_driver_samples(model: IncoherentModel, t: float, samples: int, rng) -> np.ndarray:
    cov = accumulated_gram_matrix(model, t)
    vals, vecs = np.linalg.eigh(cov)
    factor = vecs * np.sqrt(np.clip(vals, 0.0, None))
    return rng.standard_normal((samples, cov.shape[0])) @ factor.T


def _mc_coherent(model: CoherentModel, payoff, samples: int, rng):
    n = model.n
    fact = math.factorial(n)
    if isinstance(payoff, BondSpec):
        q_T = model.sf.q_at(payoff.maturity)
        r = math.sqrt(q_T) * rng.standard_normal(samples)
        (pi_T,) = _coherent_sums(n, r, q_T, [q_T])
        vals = fact * pi_T
    elif isinstance(payoff, OptionSpec):
        t, T, strike = payoff.option_maturity, payoff.bond_maturity, payoff.strike
        q_t, q_T = model.sf.q_at(t), model.sf.q_at(T)
        if q_t == 0:
            return max((1.0 - q_T**n) - strike, 0.0), 0.0
        r = math.sqrt(q_t) * rng.standard_normal(samples)
        numer, pi = _coherent_sums(n, r, q_t, [q_T, q_t])
        vals = fact * np.maximum(numer - strike * pi, 0.0)
    elif isinstance(payoff, SwaptionSpec):
        t, strike = payoff.option_maturity, payoff.strike
        q_t = model.sf.q_at(t)
        q_pay = [model.sf.q_at(T) for T in payoff.payment_dates]
        if q_t == 0:
            fixed = strike * sum(1.0 - q**n for q in q_pay)
            return max((1.0 - q_t**n) - (1.0 - q_pay[-1] ** n) - fixed, 0.0), 0.0
        r = math.sqrt(q_t) * rng.standard_normal(samples)
        sums = _coherent_sums(n, r, q_t, q_pay + [q_t])
        pi = sums[-1]
        numer_last = sums[len(q_pay) - 1]
        fixed_leg = strike * sum(sums[i] for i in range(len(q_pay)))
        vals = fact * np.maximum(pi - numer_last - fixed_leg, 0.0)
    else:
        raise ValueError(f"unsupported payoff type {type(payoff).__name__}")
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(samples))


def _mc_incoherent(model: IncoherentModel, payoff, samples: int, rng):
    zero_state = multi_state_at(model, 0.0, [0.0] * len(model.terms))
    from .incoherent_model import incoherent_kernel, mixed_order_kernel

    if len(set(model.orders)) == 1:
        pi_0 = incoherent_kernel(model, zero_state)
    else:
        pi_0 = mixed_order_kernel(model, zero_state)
    if isinstance(payoff, BondSpec):
        r = _joint_driver_samples(model, payoff.maturity, samples, rng)
        vals = _incoherent_kernel_samples(model, payoff.maturity, r) / pi_0
    elif isinstance(payoff, OptionSpec):
        t, T, strike = payoff.option_maturity, payoff.bond_maturity, payoff.strike
        r = _joint_driver_samples(model, t, samples, rng)
        numer = _incoherent_numer_samples(model, t, T, r)
        pi = _incoherent_kernel_samples(model, t, r)
        vals = np.maximum(numer - strike * pi, 0.0) / pi_0
    elif isinstance(payoff, SwaptionSpec):
        t, strike = payoff.option_maturity, payoff.strike
        r = _joint_driver_samples(model, t, samples, rng)
        pi = _incoherent_kernel_samples(model, t, r)
        numer_last = _incoherent_numer_samples(model, t, payoff.payment_dates[-1], r)
        fixed_leg = strike * sum(
            _incoherent_numer_samples(model, t, T, r) for T in payoff.payment_dates
        )
        vals = np.maximum(pi - numer_last - fixed_leg, 0.0) / pi_0
    else:
        raise ValueError(f"unsupported payoff type {type(payoff).__name__}")
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(samples))


def mc_price(model, payoff, samples: int, seed: int):
    """Plain Monte Carlo price E[pi_t payoff] / pi_0 with its standard error."""
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    rng = np.random.default_rng(seed)
    if isinstance(model, CoherentModel):
        return _mc_coherent(model, payoff, samples, rng)
    if isinstance(model, IncoherentModel):
        return _mc_incoherent(model, payoff, samples, rng)
    raise ValueError(f"unsupported model type {type(model).__name__}")


def mc_conditional_variance(model, state, samples: int, seed: int):
    """Estimate the conditional variance of the terminal chaos variable.

    Uses mean(X_inf^2) - (E_t[X_inf])^2 with the conditional mean known in
    closed form (martingale property), halving the estimator noise relative
    to a plain sample variance.
    """
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    rng = np.random.default_rng(seed)
    if isinstance(model, CoherentModel) and isinstance(state, GaussianState):
        x_t = chaos_value(model.n, state.R, state.Q)
        resid = math.sqrt(1.0 - state.Q)
        r_inf = state.R + resid * rng.standard_normal(samples)
        squares = chaos_value(model.n, r_inf, 1.0) ** 2
        est = float(np.mean(squares)) - x_t**2
    elif isinstance(model, IncoherentModel) and isinstance(state, MultiGaussianState):
        gram = np.asarray(state.residual_gram)
        vals, vecs = np.linalg.eigh(gram)
        factor = vecs * np.sqrt(np.clip(vals, 0.0, None))
        delta = rng.standard_normal((samples, gram.shape[0])) @ factor.T
        x_inf = np.zeros(samples)
        x_t = 0.0
        for i, term in enumerate(model.terms):
            x_inf += term.weight * chaos_value(term.order, state.values[i] + delta[:, i], 1.0)
            x_t += term.weight * chaos_value(term.order, state.values[i], state.brackets[i])
        squares = x_inf**2
        est = float(np.mean(squares)) - x_t**2
    else:
        raise ValueError("model/state pairing not supported")
    se = float(np.std(squares, ddof=1) / math.sqrt(samples))
    return est, se
