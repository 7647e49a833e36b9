"""Finite-dimensional models driven by Dirac-atom structure functions.

Placing the squared coefficient density on atoms T_1 < ... < T_N plus an
extra bookkeeping time T_{N+1} makes Q_t a step function and every path
of (R, Q, pi, P) piecewise constant.  Initial curves come out in closed
form, calibration to market bonds is an exact inversion, and simulation
reduces to drawing one Gaussian increment per atom.

Exact-arithmetic note: initial_curve works in whatever number type the
grid weights carry.  Feeding Fraction weights yields Fraction prices with
no rounding anywhere on the path from weights to curve.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coherent_model import MAX_ORDER, chaos_value, kernel_coefficient


@dataclass(frozen=True)
class AtomGrid:
    """Atom times T_1..T_N plus horizon T_{N+1}, with N+1 unit-sum weights.

    The horizon carries the residual weight but is not a tradable maturity;
    values of contracts maturing at or before T_N never depend on where the
    horizon sits.
    """

    maturities: tuple
    horizon: float
    weights: tuple

    def __post_init__(self) -> None:
        mats = tuple(self.maturities)
        weights = tuple(self.weights)
        if not mats:
            raise ValueError("grid needs at least one maturity")
        if mats[0] <= 0 or any(b <= a for a, b in zip(mats, mats[1:])):
            raise ValueError("maturities must be strictly increasing and positive")
        if not self.horizon > mats[-1]:
            raise ValueError(f"horizon {self.horizon} must exceed the last maturity {mats[-1]}")
        if len(weights) != len(mats) + 1:
            raise ValueError(
                f"need {len(mats) + 1} weights (one per maturity plus the horizon), got {len(weights)}"
            )
        if any(w < 0 or w > 1 for w in weights):
            raise ValueError("weights must lie in [0, 1]")
        if abs(sum(weights) - 1) > 1e-12:
            raise ValueError(f"weights must sum to 1 within 1e-12, got {sum(weights)!r}")
        object.__setattr__(self, "maturities", mats)
        object.__setattr__(self, "weights", weights)

    @property
    def atom_times(self) -> tuple:
        return self.maturities + (self.horizon,)

    def structure_function(self):
        from .structure_functions import DiscreteAtoms

        return DiscreteAtoms(times=self.atom_times, weights=self.weights)

    def cumulative_weight(self, t):
        """Q_t: total weight of atoms at or before t, in the weights' own arithmetic."""
        acc = 0
        for T, w in zip(self.atom_times, self.weights):
            if T <= t:
                acc = acc + w
        return acc


@dataclass(frozen=True)
class DiscountCurve:
    """Right-continuous step curve of time-0 bond prices."""

    maturities: tuple
    prices: tuple

    def __post_init__(self) -> None:
        mats = tuple(self.maturities)
        prices = tuple(self.prices)
        if not mats or len(mats) != len(prices):
            raise ValueError("maturities and prices must be nonempty and equal length")
        if mats[0] <= 0 or any(b <= a for a, b in zip(mats, mats[1:])):
            raise ValueError("maturities must be strictly increasing and positive")
        if any(p < 0 or p > 1 for p in prices):
            raise ValueError("bond prices must lie in [0, 1]")
        object.__setattr__(self, "maturities", mats)
        object.__setattr__(self, "prices", prices)

    def price_at(self, t):
        """P(0, t); equals 1 before the first maturity."""
        idx = bisect_right(self.maturities, t)
        return 1 if idx == 0 else self.prices[idx - 1]


def _check_order(n: int) -> None:
    if not isinstance(n, int) or not 1 <= n <= MAX_ORDER:
        raise ValueError(f"chaos order must be an integer in [1, {MAX_ORDER}], got {n}")


def initial_curve(grid: AtomGrid, n: int) -> DiscountCurve:
    """Time-0 curve P(0, t) = 1 - (cumulative weight)^n on each segment.

    Pure Python arithmetic throughout, so exact weight types give exact prices.
    """
    _check_order(n)
    prices = []
    s = 0
    for w in grid.weights:
        s = s + w
        prices.append(1 - s**n)
    return DiscountCurve(maturities=grid.atom_times, prices=tuple(prices))


def calibrate_weights(market: DiscountCurve, n: int, horizon=None) -> AtomGrid:
    """Invert the initial curve: weights reproducing the market bond prices.

    Cumulative weights are s_i = (1 - P_i)^(1/n); the horizon receives the
    remaining 1 - s_N.  Market prices must be strictly decreasing in (0, 1).
    """
    _check_order(n)
    weights = []
    s_prev = 0.0
    p_prev = 1.0
    for T, P in zip(market.maturities, market.prices):
        if not 0 < P < 1:
            raise ValueError(f"market price at maturity {T} must lie strictly in (0, 1), got {P}")
        if P >= p_prev:
            raise ValueError(f"market prices must be strictly decreasing; violated at maturity {T}")
        s = (1.0 - P) ** (1.0 / n)
        if s >= 1:
            raise ValueError(f"market price at maturity {T} is infeasible for a unit-mass grid")
        weights.append(s - s_prev)
        s_prev, p_prev = s, P
    weights.append(1.0 - s_prev)
    if horizon is None:
        horizon = market.maturities[-1] + 1.0
    return AtomGrid(maturities=market.maturities, horizon=horizon, weights=tuple(weights))


@dataclass(frozen=True)
class SimplePath:
    """One simulated piecewise-constant path of (R, Q, pi, P).

    Component k holds on [segment_starts[k], segment_starts[k+1]); the last
    segment starts at the horizon, where Q = 1 and the kernel vanishes.
    """

    bond_maturity: float
    segment_starts: tuple
    values: tuple
    brackets: tuple
    kernels: tuple
    bond_prices: tuple

    @property
    def jump_times(self) -> tuple:
        return self.segment_starts[1:]


def simulate_paths(grid: AtomGrid, n: int, bond_maturity: float, count: int, seed: int) -> list:
    """Exact path simulation: one N(0, p_i) increment of R per atom.

    Path j draws from its own counter-based stream keyed by (seed, j), so a
    given path is reproducible regardless of count, threading, or where the
    horizon atom sits.
    """
    _check_order(n)
    if count < 1:
        raise ValueError(f"path count must be a positive integer, got {count}")
    if not isinstance(seed, int) or seed < 0 or seed > 2**64 - 1:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    if not 0 < bond_maturity <= grid.maturities[-1]:
        raise ValueError(
            f"bond maturity must lie in (0, T_N] = (0, {grid.maturities[-1]}], got {bond_maturity}"
        )
    n_atoms = len(grid.weights)
    sds = np.sqrt(np.asarray([float(w) for w in grid.weights]))
    draws = np.empty((count, n_atoms))
    for j in range(count):
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, j], dtype=np.uint64)))
        draws[j] = rng.standard_normal(n_atoms)
    increments = draws * sds
    r = np.concatenate([np.zeros((count, 1)), np.cumsum(increments, axis=1)], axis=1)
    q = np.concatenate([[0.0], np.cumsum(sds**2)])
    q[-1] = 1.0
    q_T = float(grid.cumulative_weight(bond_maturity))

    pi = np.zeros_like(r)
    numer = np.zeros_like(r)
    for k in range(1, n + 1):
        w = float(kernel_coefficient(n, k))
        x = chaos_value(2 * n - 2 * k, r, q)
        pi += w * (1.0 - q**k) * x
        numer += w * (1.0 - q_T**k) * x
    starts = np.concatenate([[0.0], np.asarray([float(t) for t in grid.atom_times])])
    alive = starts < bond_maturity
    bond = np.ones_like(r)
    np.divide(numer, pi, out=bond, where=alive & (pi > 0))

    return [
        SimplePath(
            bond_maturity=bond_maturity,
            segment_starts=tuple(starts),
            values=tuple(r[j]),
            brackets=tuple(q),
            kernels=tuple(pi[j]),
            bond_prices=tuple(bond[j]),
        )
        for j in range(count)
    ]


def write_paths_csv(paths: list, out_dir) -> list:
    """Write one CSV per path (columns time,R,Q,pi,P); returns the file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    width = max(5, len(str(len(paths) - 1)))
    written = []
    for j, path in enumerate(paths):
        target = out / f"path_{j:0{width}d}.csv"
        with open(target, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", "R", "Q", "pi", "P"])
            for row in zip(path.segment_starts, path.values, path.brackets, path.kernels, path.bond_prices):
                writer.writerow([repr(float(v)) for v in row])
        written.append(target)
    return written


def read_market_curve(path) -> DiscountCurve:
    """Read a maturity,price CSV (header required) into a DiscountCurve."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"market file {path} is empty") from None
        if [h.strip().lower() for h in header[:2]] != ["maturity", "price"]:
            raise ValueError(f"market file {path} must start with a 'maturity,price' header")
        maturities, prices = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            try:
                maturities.append(float(row[0]))
                prices.append(float(row[1]))
            except (IndexError, ValueError):
                raise ValueError(f"market file {path} line {lineno}: expected 'maturity,price' numbers") from None
    if not maturities:
        raise ValueError(f"market file {path} contains no data rows")
    return DiscountCurve(maturities=tuple(maturities), prices=tuple(prices))
