"""Joint default probability and the leverage-diversification regime map.

The systemic default probability of two identical banks (leverage f,
diversification n, market of N projects) is Phi2(z, z, n/N).  Raising
leverage from a normal level f_n to an abnormal level f_a raises it by

    delta_phi2 = Phi2(z(f_a), z(f_a), n/N) - Phi2(z(f_n), z(f_n), n/N) >= 0.

A cell (n, chi) is "safe" when that increase is at most epsilon_safe, and
the critical diversification n* is the smallest n whose whole suffix
[n, N] is safe (scanned from n = N downward, so minimality of the
boundary is established by construction).  There may be no such n; that
outcome is reported as None, not an error.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import InitVar, dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DomainError
from .gaussian import DEFAULT_GRID, GridSpec, binorm_cdf
from .merton import BankStrategy, MarketParams, asset_correlation, z_score

EPSILON_SAFE = 1e-6

_METHODS = ("oracle", "grid")


def _check_method(method: str) -> str:
    if method not in _METHODS:
        raise ConfigError(f"unknown method {method!r}, expected one of {_METHODS}")
    return method


@dataclass(frozen=True)
class LeverageScenario:
    """A normal/abnormal leverage pair; f_abnormal > f_normal strictly.

    The degenerate equal pair (used for trivial zero-difference checks) is
    only constructible through :meth:`trivial`.
    """

    f_normal: float
    f_abnormal: float
    _allow_equal: InitVar[bool] = False

    def __post_init__(self, _allow_equal: bool) -> None:
        for name, f in (("f_normal", self.f_normal), ("f_abnormal", self.f_abnormal)):
            if not math.isfinite(f) or not 0.0 < f < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {f!r}")
        if self.f_abnormal < self.f_normal or (
            self.f_abnormal == self.f_normal and not _allow_equal
        ):
            raise DomainError(
                f"need f_abnormal > f_normal, got {self.f_abnormal} <= {self.f_normal}"
            )

    @classmethod
    def trivial(cls, f: float) -> "LeverageScenario":
        return cls(f, f, _allow_equal=True)

    @property
    def delta_f(self) -> float:
        return self.f_abnormal - self.f_normal


class Regime(str, Enum):
    SAFE = "safe"
    RISKY = "risky"


# both evaluation routes keep the differential above this: the oracle to
# quadrature noise, the grid because its tabulation is monotone in z
_DELTA_SLACK = 1e-6


@dataclass(frozen=True)
class RegimeCell:
    market_size: int
    n: int
    chi: float
    delta_phi2: float
    regime: Regime

    def __post_init__(self) -> None:
        if not self.delta_phi2 >= -_DELTA_SLACK:
            raise DomainError(
                f"leverage differential {self.delta_phi2} is negative beyond "
                f"numerical slack at (N={self.market_size}, n={self.n}, chi={self.chi})"
            )


@dataclass(frozen=True)
class SweepResult:
    """All cells of a regime sweep plus the per-(N, chi) critical levels."""

    scenario: LeverageScenario
    mu: float
    epsilon_safe: float
    cells: tuple[RegimeCell, ...]
    critical_n: dict[tuple[int, float], int | None]

    def risky_fraction(self, market_size: int) -> float:
        sub = [c for c in self.cells if c.market_size == market_size]
        if not sub:
            raise DomainError(f"no cells for market size {market_size}")
        return sum(c.regime is Regime.RISKY for c in sub) / len(sub)

    def market_sizes(self) -> list[int]:
        return sorted({c.market_size for c in self.cells})

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["N", "n", "chi", "delta_phi2", "regime"])
        for c in self.cells:
            writer.writerow([c.market_size, c.n, repr(c.chi), repr(c.delta_phi2), c.regime.value])
        return buf.getvalue()

    def to_json(self) -> str:
        by_n: dict[str, dict] = {}
        for size in self.market_sizes():
            cells = [
                {
                    "n": c.n,
                    "chi": c.chi,
                    "delta_phi2": c.delta_phi2,
                    "regime": c.regime.value,
                }
                for c in self.cells
                if c.market_size == size
            ]
            crit = {
                repr(chi): self.critical_n[(size, chi)]
                for (n_, chi) in sorted(self.critical_n)
                if n_ == size
            }
            by_n[str(size)] = {"cells": cells, "critical_n_by_chi": crit}
        doc = {
            "scenario": {
                "f_normal": self.scenario.f_normal,
                "f_abnormal": self.scenario.f_abnormal,
            },
            "mu": self.mu,
            "epsilon_safe": self.epsilon_safe,
            "markets": by_n,
        }
        return json.dumps(doc, indent=2)


def systemic_pd(
    strategy: BankStrategy,
    market: MarketParams,
    method: str = "oracle",
    grid_spec: GridSpec = DEFAULT_GRID,
) -> float:
    """Joint default probability Phi2(z, z, n/N) of two banks using the
    same strategy on the same market."""
    _check_method(method)
    z = z_score(strategy, market)
    rho = asset_correlation(strategy.diversification, market)
    return binorm_cdf(z, z, rho, method=method, spec=grid_spec)


def delta_phi2(
    scenario: LeverageScenario,
    n: int,
    market: MarketParams,
    method: str = "oracle",
    grid_spec: GridSpec = DEFAULT_GRID,
) -> float:
    """Increase in systemic default probability caused by moving from the
    normal to the abnormal leverage; nonnegative up to method tolerance."""
    if scenario.f_abnormal == scenario.f_normal:
        return 0.0
    high = systemic_pd(
        BankStrategy(scenario.f_abnormal, n), market, method=method, grid_spec=grid_spec
    )
    low = systemic_pd(
        BankStrategy(scenario.f_normal, n), market, method=method, grid_spec=grid_spec
    )
    return high - low


def critical_diversification(
    scenario: LeverageScenario,
    market: MarketParams,
    method: str = "oracle",
    epsilon_safe: float = EPSILON_SAFE,
    grid_spec: GridSpec = DEFAULT_GRID,
) -> int | None:
    """Smallest n such that every n' in [n, N] is safe, or None if even
    n = N is risky.  Scanning downward from N makes the returned level
    suffix-safe and minimal by construction."""
    _check_method(method)
    n_star: int | None = None
    for n in range(market.market_size, 0, -1):
        if delta_phi2(scenario, n, market, method=method, grid_spec=grid_spec) <= epsilon_safe:
            n_star = n
        else:
            break
    return n_star


def effective_critical(n_star: int | None, market_size: int) -> int:
    """Order-comparable encoding of a critical level: "no safe level"
    sorts above every feasible level as market_size + 1."""
    return market_size + 1 if n_star is None else n_star


def default_chi_grid(points: int = 100, lo: float = 0.001, hi: float = 9.0) -> np.ndarray:
    """Log-spaced chi grid over the standard sweep box."""
    if points < 1 or lo <= 0 or hi <= lo:
        raise ConfigError("need points >= 1 and 0 < lo < hi")
    return np.logspace(math.log10(lo), math.log10(hi), points)


def regime_sweep(
    scenario: LeverageScenario,
    market_sizes: Sequence[int],
    chi_values: Iterable[float],
    mu: float = 0.0,
    n_values: Sequence[int] | None = None,
    method: str = "oracle",
    epsilon_safe: float = EPSILON_SAFE,
    grid_spec: GridSpec = DEFAULT_GRID,
) -> SweepResult:
    """Classify every (N, n, chi) cell and derive the per-(N, chi) critical
    levels from the same delta values.

    Cells are emitted sorted by (N, chi, n) regardless of evaluation order,
    so repeated sweeps produce identical results.
    """
    _check_method(method)
    chis = [float(c) for c in chi_values]
    if not market_sizes or not chis:
        raise ConfigError("market_sizes and chi_values must be non-empty")
    cells: list[RegimeCell] = []
    critical: dict[tuple[int, float], int | None] = {}
    for size in market_sizes:
        if not isinstance(size, int) or size < 1:
            raise ConfigError(f"market sizes must be integers >= 1, got {size!r}")
        ns = list(n_values) if n_values is not None else list(range(1, size + 1))
        for n in ns:
            if not 1 <= n <= size:
                raise DomainError(
                    f"sweep cell (N={size}, n={n}) is invalid: need 1 <= n <= N"
                )
        # n outer, chi inner: the grid method reuses one tabulation per rho = n/N
        per_chi: dict[float, list[tuple[int, float]]] = {c: [] for c in chis}
        for n in ns:
            for chi in chis:
                try:
                    d = delta_phi2(
                        scenario,
                        n,
                        MarketParams.from_chi(size, chi, drift=mu),
                        method=method,
                        grid_spec=grid_spec,
                    )
                except Exception as exc:
                    exc.args = (f"sweep cell (N={size}, n={n}, chi={chi}): {exc}",)
                    raise
                per_chi[chi].append((n, d))
        for chi in chis:
            entries = sorted(per_chi[chi])
            for n, d in entries:
                regime = Regime.SAFE if d <= epsilon_safe else Regime.RISKY
                cells.append(
                    RegimeCell(market_size=size, n=n, chi=chi, delta_phi2=d, regime=regime)
                )
            # suffix-safe scan over the n values swept for this chi
            n_star: int | None = None
            for n, d in reversed(entries):
                if d <= epsilon_safe:
                    n_star = n
                else:
                    break
            critical[(size, chi)] = n_star
    cells.sort(key=lambda c: (c.market_size, c.chi, c.n))
    return SweepResult(
        scenario=scenario,
        mu=mu,
        epsilon_safe=epsilon_safe,
        cells=tuple(cells),
        critical_n=critical,
    )


def mu_sensitivity(
    scenario: LeverageScenario,
    market: MarketParams,
    mu_values: Sequence[float],
    method: str = "oracle",
    epsilon_safe: float = EPSILON_SAFE,
    grid_spec: GridSpec = DEFAULT_GRID,
) -> dict[float, int | None]:
    """Critical diversification as a function of the drift mu."""
    out: dict[float, int | None] = {}
    for mu in mu_values:
        out[float(mu)] = critical_diversification(
            scenario,
            market.with_drift(float(mu)),
            method=method,
            epsilon_safe=epsilon_safe,
            grid_spec=grid_spec,
        )
    return out
