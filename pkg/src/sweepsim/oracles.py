"""Closed-form and brute-force reference quantities used to check the simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from sweepsim.model import EcoParams, derive


@dataclass(frozen=True)
class BDWalkParams:
    b: float
    d: float
    i: int
    j: int
    k: int

    def __post_init__(self):
        if not (self.b > 0 and self.d > 0):
            raise ValueError("birth and death rates must be positive")
        if not (self.i <= self.j <= self.k and self.k > self.i):
            raise ValueError(f"need i <= j <= k and k > i, got {(self.i, self.j, self.k)}")


def bd_hitting_prob(w: BDWalkParams) -> float:
    """Probability that a linear birth-death process started at j hits k before i."""
    if w.b == w.d:
        return (w.j - w.i) / (w.k - w.i)
    log_rho = math.log(w.d / w.b)
    return math.expm1((w.j - w.i) * log_rho) / math.expm1((w.k - w.i) * log_rho)


def geometric_compound_pmfs(pa: float, pb: float, n_max: int) -> np.ndarray:
    """P(Z = n) for n = 0..n_max, Z a Geom(pa) number of Geom(pb) summands.

    Geometric laws have support {1, 2, ...}.  Computed by repeated
    convolution, so it does not rely on the compound law being geometric.
    """
    if not (0 < pa <= 1 and 0 < pb <= 1):
        raise ValueError("parameters must lie in (0, 1]")
    n = np.arange(n_max + 1)
    single = np.where(n >= 1, pb * (1 - pb) ** np.maximum(n - 1, 0), 0.0)
    out = np.zeros(n_max + 1)
    g = np.zeros(n_max + 1)
    g[0] = 1.0  # law of an empty sum
    for v in range(1, n_max + 1):
        g = np.convolve(g, single)[: n_max + 1]
        out += pa * (1 - pa) ** (v - 1) * g
    return out


def geometric_compound_pmf(pa: float, pb: float, n: int) -> float:
    return float(geometric_compound_pmfs(pa, pb, n)[n])


def check_geometric_compound(pa: float, pb: float, n_max: int) -> float:
    """Max deviation of the compound pmf from Geom(pa * pb) on 1..n_max."""
    pmf = geometric_compound_pmfs(pa, pb, n_max)[1:]
    n = np.arange(1, n_max + 1)
    p = pa * pb
    return float(np.max(np.abs(pmf - p * (1 - p) ** (n - 1))))


def sum_integral_residuals(cN: float, N: int) -> np.ndarray:
    """Residual of the sum-versus-integral comparison for every k = 1..N."""
    if N < 2:
        raise ValueError("N must be >= 2")
    logN = math.log(N)
    c = cN / logN
    k = np.arange(1, N + 1, dtype=float)
    terms = np.exp(c * np.log(k)) / (k + 1)
    partial = np.concatenate([[0.0], np.cumsum(terms[:-1])])  # sum over l < k
    if cN == 0:
        integral = np.log(k)
    else:
        integral = np.expm1(c * np.log(k)) / c
    return partial - integral


def sum_integral_residual(cN: float, N: int, k: int) -> float:
    if not 1 <= k <= N:
        raise ValueError("need 1 <= k <= N")
    logN = math.log(N)
    c = cN / logN
    s = math.fsum(math.exp(c * math.log(l)) / (l + 1) for l in range(1, k))
    integral = math.log(k) if cN == 0 else math.expm1(c * math.log(k)) / c
    return s - integral


def expected_upcrossings(s: float, epsK: int, k: int) -> float:
    """Leading-order mean number of k -> k+1 mutant upcrossings before epsK."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if not 1 <= k < epsK:
        raise ValueError("need 1 <= k < epsK")
    return (1 - (1 - s) ** (epsK - k) - (1 - s) ** (k + 1)) / s


# --------------------------------------------------------------------------
# constant-size Moran process with N1-N2 recombination
# --------------------------------------------------------------------------

@numba.njit(nogil=True, cache=True)
def _moran_kernel(rng, lab1, lab2, rate, t_end, r2):
    n = lab1.shape[0]
    t = rng.exponential(1.0 / rate)
    count = 0
    while t <= t_end:
        dead = min(int(rng.random() * n), n - 1)
        parent = min(int(rng.random() * n), n - 1)
        other = min(int(rng.random() * n), n - 1)
        rec = r2 > 0.0 and rng.random() < r2
        l1 = lab1[parent]
        l2 = lab2[other] if rec else lab2[parent]
        lab1[dead] = l1
        lab2[dead] = l2
        count += 1
        t += rng.exponential(1.0 / rate)
    return count


@dataclass
class MoranResult:
    count: int
    label1: np.ndarray
    label2: np.ndarray


def moran_birth_count(params: EcoParams, alpha: int, t_end: float, seed: int) -> MoranResult:
    """Replacement events of the type-alpha Moran process on [0, t_end].

    The population has ``floor(nbar_alpha K)`` individuals, each starting with
    its own founder label (1-based) at both neutral loci, and events occur at
    rate ``f_alpha * nbar_alpha * K``.
    """
    de = derive(params)
    nbar = (de.nbar_A, de.nbar_a)[alpha]
    f = (params.f_A, params.f_a)[alpha]
    n = math.floor(nbar * params.K)
    if n < 1:
        raise ValueError("Moran population would be empty")
    lab1 = np.arange(1, n + 1, dtype=np.int64)
    lab2 = lab1.copy()
    rng = np.random.default_rng(seed)
    count = _moran_kernel(rng, lab1, lab2, f * nbar * params.K, float(t_end), float(params.r2))
    return MoranResult(int(count), lab1, lab2)
