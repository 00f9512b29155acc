"""Ecological parameters of the three-locus sweep model and derived quantities.

Alleles at the selected locus are indexed ``A = 0`` (resident) and ``a = 1``
(mutant).  The competition matrix is indexed ``C[affected][affecting]``, so
``C[A][a]`` is the pressure an ``a`` individual puts on an ``A`` individual.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

A = 0
a = 1
ALLELES = ("A", "a")

#: r_j * log K above this is flagged: the weak-recombination regime is strained.
WEAK_RECOMBINATION_WARN = 5.0


class Geometry(str, enum.Enum):
    ADJACENT = "adjacent"  # SL-N1-N2
    SEPARATED = "separated"  # N1-SL-N2


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class EcoParams:
    f_A: float
    f_a: float
    D_A: float
    D_a: float
    C: Tuple[Tuple[float, float], Tuple[float, float]]
    K: int
    r1: float = 0.0
    r2: float = 0.0
    geometry: Geometry = Geometry.ADJACENT

    def __post_init__(self):
        C = tuple(tuple(float(x) for x in row) for row in self.C)
        if len(C) != 2 or any(len(row) != 2 for row in C):
            raise ParameterError("competition matrix must be 2x2")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "geometry", Geometry(self.geometry))
        if isinstance(self.K, bool) or int(self.K) != self.K:
            raise ParameterError(f"K must be an integer, got {self.K!r}")
        object.__setattr__(self, "K", int(self.K))

        values = {
            "f_A": self.f_A, "f_a": self.f_a, "D_A": self.D_A, "D_a": self.D_a,
            "r1": self.r1, "r2": self.r2,
            "C_AA": C[0][0], "C_Aa": C[0][1], "C_aA": C[1][0], "C_aa": C[1][1],
        }
        for name, v in values.items():
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
        if self.f_A <= 0 or self.f_a <= 0:
            raise ParameterError("fertilities must be positive")
        if self.D_A < 0 or self.D_a < 0:
            raise ParameterError("death rates must be non-negative")
        if min(x for row in C for x in row) < 0:
            raise ParameterError("competition coefficients must be non-negative")
        for name in ("r1", "r2"):
            if not 0.0 <= values[name] <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {values[name]}")
        if self.K < 1:
            raise ParameterError(f"K must be >= 1, got {self.K}")

    @classmethod
    def from_log_scaled(cls, *, r1_logK: float, r2_logK: float, K: int, **kw) -> "EcoParams":
        """Build with recombination given as the products r_j * log K."""
        logK = math.log(K)
        if logK == 0.0:
            raise ParameterError("r_j * log K is undefined for K = 1")
        return cls(K=K, r1=r1_logK / logK, r2=r2_logK / logK, **kw)

    @property
    def fertility(self) -> np.ndarray:
        return np.array([self.f_A, self.f_a], dtype=np.float64)

    @property
    def death(self) -> np.ndarray:
        return np.array([self.D_A, self.D_a], dtype=np.float64)

    @property
    def competition(self) -> np.ndarray:
        return np.array(self.C, dtype=np.float64)

    def replace(self, **changes) -> "EcoParams":
        kw = dict(f_A=self.f_A, f_a=self.f_a, D_A=self.D_A, D_a=self.D_a, C=self.C,
                  K=self.K, r1=self.r1, r2=self.r2, geometry=self.geometry)
        kw.update(changes)
        return EcoParams(**kw)


def reference_params(K: int = 1000, r1: float = 0.0, r2: float = 0.0,
                   geometry: Geometry = Geometry.ADJACENT) -> EcoParams:
    """The reference parameter set f = (2, 3), D = 0.5, all competition 1."""
    return EcoParams(f_A=2.0, f_a=3.0, D_A=0.5, D_a=0.5, C=((1.0, 1.0), (1.0, 1.0)),
                     K=K, r1=r1, r2=r2, geometry=geometry)


@dataclass(frozen=True)
class DerivedEco:
    nbar_A: float
    nbar_a: float
    S_aA: float
    S_Aa: float
    s: float
    sbar: float


def derive(params: EcoParams) -> DerivedEco:
    (C_AA, C_Aa), (C_aA, C_aa) = params.C
    if C_AA == 0 or C_aa == 0:
        raise ParameterError("diagonal competition must be positive")
    nbar_A = (params.f_A - params.D_A) / C_AA
    nbar_a = (params.f_a - params.D_a) / C_aa
    S_aA = params.f_a - params.D_a - C_aA * nbar_A
    S_Aa = params.f_A - params.D_A - C_Aa * nbar_a
    return DerivedEco(
        nbar_A=nbar_A,
        nbar_a=nbar_a,
        S_aA=S_aA,
        S_Aa=S_Aa,
        s=S_aA / params.f_a,
        sbar=abs(S_Aa) / params.f_A,
    )


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    r1_logK: float = 0.0
    r2_logK: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_sweep_regime(params: EcoParams) -> ValidationReport:
    """Check the conditions under which a single mutant can sweep.

    Every violated condition is reported on its own.  The weak-recombination
    scale is advisory only and lands in ``warnings``.
    """
    logK = math.log(params.K)
    report = ValidationReport(r1_logK=params.r1 * logK, r2_logK=params.r2 * logK)
    (C_AA, _), (_, C_aa) = params.C
    if C_AA <= 0:
        report.violations.append(f"diagonal competition must be positive (C_AA = {C_AA})")
    if C_aa <= 0:
        report.violations.append(f"diagonal competition must be positive (C_aa = {C_aa})")
    if report.violations:
        return report

    de = derive(params)
    if not de.nbar_A > 0:
        report.violations.append(f"nbar_A must be positive (nbar_A = {de.nbar_A})")
    if not de.nbar_a > 0:
        report.violations.append(f"nbar_a must be positive (nbar_a = {de.nbar_a})")
    if not de.S_aA > 0:
        report.violations.append(f"S_aA must be positive (S_aA = {de.S_aA})")
    if not de.S_Aa < 0:
        report.violations.append(f"S_Aa must be negative (S_Aa = {de.S_Aa})")

    for name, v in (("r1", report.r1_logK), ("r2", report.r2_logK)):
        if v > WEAK_RECOMBINATION_WARN:
            report.warnings.append(
                f"{name} * log K = {v:.3g} exceeds {WEAK_RECOMBINATION_WARN}; "
                "outside the weak-recombination regime"
            )
    return report
