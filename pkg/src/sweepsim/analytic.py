"""Closed-form sampling formula and the deterministic Lotka-Volterra flow.

All ``log K`` are natural logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from sweepsim.model import DerivedEco, EcoParams, Geometry, derive

# relative size of r1 + r2(1 - f_A/f_a) below which q3 uses its limit form
Q3_SINGULAR_REL = 1e-9
NEG_TOL = 1e-12


class NegativeProbability(ValueError):
    pass


class StepFailure(RuntimeError):
    pass


class NotReached(RuntimeError):
    pass


@dataclass(frozen=True)
class AnalyticQs:
    q1: float
    q2: float
    qbar2: float
    q3: float


@dataclass(frozen=True)
class AnalyticPs:
    p1: float
    p2: float
    p3: float
    p4: float
    p5: float

    def as_tuple(self) -> Tuple[float, float, float, float, float]:
        return (self.p1, self.p2, self.p3, self.p4, self.p5)


def compute_qs(params: EcoParams, derived: Optional[DerivedEco] = None) -> AnalyticQs:
    de = derive(params) if derived is None else derived
    if not (de.S_aA > 0 and de.S_Aa < 0):
        raise ValueError("q's are defined only when S_aA > 0 > S_Aa")
    logK = math.log(params.K)
    r1, r2 = params.r1, params.r2
    q1 = math.exp(-params.f_a * r1 * logK / de.S_aA)
    q2 = math.exp(-params.f_a * r2 * logK / de.S_aA)
    qbar2 = math.exp(-params.f_a * r2 * logK / abs(de.S_Aa))

    ratio = params.f_A / params.f_a
    x = r1 + r2 * (1.0 - ratio)
    if r1 == 0.0:
        q3 = 0.0
    else:
        # q2**ratio - q1*q2 = q2**ratio * (1 - exp(-lam x)) = q1*q2 * (exp(lam x) - 1);
        # expm1 keeps both forms accurate near the removable singularity at
        # x = 0, and picking the form by the sign of x avoids overflow
        lam = params.f_a * logK / de.S_aA
        base = q2 ** ratio
        if abs(x) < Q3_SINGULAR_REL * (r1 + r2):
            q3 = r1 * lam * base
        elif x > 0:
            q3 = r1 * base * (-math.expm1(-lam * x)) / x
        else:
            q3 = r1 * q1 * q2 * math.expm1(lam * x) / x
    return AnalyticQs(q1=q1, q2=q2, qbar2=qbar2, q3=q3)


def q3_direct(params: EcoParams) -> float:
    """The textbook expression for q3, without any singularity handling."""
    de = derive(params)
    logK = math.log(params.K)
    q1 = math.exp(-params.f_a * params.r1 * logK / de.S_aA)
    q2 = math.exp(-params.f_a * params.r2 * logK / de.S_aA)
    ratio = params.f_A / params.f_a
    return params.r1 * (q2 ** ratio - q1 * q2) / (params.r1 + params.r2 * (1 - ratio))


def compute_ps(qs: AnalyticQs) -> AnalyticPs:
    q1, q2, qb, q3 = qs.q1, qs.q2, qs.qbar2, qs.q3
    p = AnalyticPs(
        p1=q1 * q2 * (1 - (1 - q1) * (1 - qb)),
        p2=q1 * ((1 - q1 * q2) - q2 * qb * (1 - q1)),
        p3=q1 * q2 * (1 - qb) * (1 - q1),
        p4=qb * q3,
        p5=(1 - q1) * (1 - q1 * q2 * (1 - qb)) - qb * q3,
    )
    for k, v in enumerate(p.as_tuple(), start=1):
        if v < -NEG_TOL:
            raise NegativeProbability(f"p{k} = {v} < 0; q3 inconsistent with q1, q2?")
    return p


def separated_weights(qs: AnalyticQs) -> Tuple[float, float, float, float, float]:
    """Per-individual class weights for the N1-SL-N2 geometry (class 4 absent)."""
    q1, q2 = qs.q1, qs.q2
    return (q1 * q2, q1 * (1 - q2), (1 - q1) * q2, 0.0, (1 - q1) * (1 - q2))


def class_weights(params: EcoParams) -> Tuple[float, ...]:
    qs = compute_qs(params)
    if params.geometry is Geometry.SEPARATED:
        return separated_weights(qs)
    return compute_ps(qs).as_tuple()


def _counts(m) -> Tuple[int, ...]:
    if hasattr(m, "as_tuple"):
        m = m.as_tuple()
    m = tuple(int(x) for x in m)
    if len(m) != 5 or min(m) < 0:
        raise ValueError(f"class counts must be five non-negative integers, got {m}")
    return m


def multinomial_pmf(weights: Sequence[float], m: Sequence[int]) -> float:
    d = sum(m)
    coef = math.factorial(d)
    for mk in m:
        coef //= math.factorial(mk)
    prob = float(coef)
    for w, mk in zip(weights, m):
        prob *= w ** mk
    return prob


def theorem1_pmf(ps: AnalyticPs, d: int, m) -> float:
    m = _counts(m)
    if sum(m) != d:
        raise ValueError(f"class counts {m} do not sum to d = {d}")
    return multinomial_pmf(ps.as_tuple(), m)


def theorem2_pmf(qs: AnalyticQs, d: int, m) -> float:
    m = _counts(m)
    if sum(m) != d:
        raise ValueError(f"class counts {m} do not sum to d = {d}")
    if m[3] > 0:
        return 0.0
    return multinomial_pmf(separated_weights(qs), m)


def compositions(d: int, parts: int = 5) -> Iterator[Tuple[int, ...]]:
    """All tuples of ``parts`` non-negative integers summing to ``d``."""
    if parts == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in compositions(d - first, parts - 1):
            yield (first,) + rest


def fixation_prob(derived: DerivedEco) -> float:
    return derived.s


def escape_probabilities(weights: Sequence[float]) -> Dict[str, float]:
    """Marginal and joint escape probabilities implied by per-class weights."""
    w1, w2, w3, w4, w5 = weights
    return {
        "locus1": w3 + w4 + w5,
        "locus2": w2 + w4 + w5,
        "both": w4 + w5,
    }


# --------------------------------------------------------------------------
# Lotka-Volterra flow
# --------------------------------------------------------------------------

def lv_rhs(params: EcoParams, y: np.ndarray) -> np.ndarray:
    growth = params.fertility - params.death - params.competition @ y
    return growth * y


# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
ORDER = 5


def _dopri_step(f, y, h):
    k = np.empty((7, len(y)))
    k[0] = f(y)
    for i in range(1, 7):
        k[i] = f(y + h * (np.dot(_A[i], k[:i]) if i else 0))
    y5 = y + h * (_B5 @ k)
    err = h * ((_B5 - _B4) @ k)
    return y5, err


@dataclass(frozen=True)
class StepControl:
    atol: float = 1e-9
    rtol: float = 1e-9
    h0: Optional[float] = None
    max_step: float = math.inf
    fixed_step: Optional[float] = None
    max_steps: int = 1_000_000


@dataclass
class LVTrajectory:
    t: np.ndarray
    y: np.ndarray
    clamped: List[Tuple[float, int, float]] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]


def _integrate(params: EcoParams, z, t_end: float, ctl: StepControl):
    """Yield accepted ``(t, y, clamp_report)`` points from 0 to ``t_end``."""
    f = lambda y: lv_rhs(params, y)
    y = np.asarray(z, dtype=float).copy()
    t = 0.0
    if t_end <= 0:
        return
    if ctl.fixed_step is not None:
        n = max(1, int(round(t_end / ctl.fixed_step)))
        h = t_end / n
        for i in range(n):
            y, _ = _dopri_step(f, y, h)
            yield (i + 1) * h, y, None
        return

    h = ctl.h0 if ctl.h0 is not None else min(1e-3, t_end)
    h = min(h, ctl.max_step)
    for _ in range(ctl.max_steps):
        h = min(h, t_end - t)
        y_new, err = _dopri_step(f, y, h)
        scale = ctl.atol + ctl.rtol * np.maximum(np.abs(y), np.abs(y_new))
        e = math.sqrt(float(np.mean((err / scale) ** 2)))
        if e <= 1.0:
            t = t_end if t_end - (t + h) <= 1e-15 * max(1.0, t_end) else t + h
            report = None
            neg = y_new < 0
            if neg.any():
                for i in np.flatnonzero(neg):
                    if y_new[i] < -ctl.atol:
                        report = (t, int(i), float(y_new[i]))
                y_new = np.where(neg, 0.0, y_new)
            y = y_new
            yield t, y, report
            if t >= t_end:
                return
        fac = 5.0 if e == 0 else min(5.0, max(0.2, 0.9 * e ** (-1 / ORDER)))
        h = min(h * fac, ctl.max_step)
        if h < 1e-14 * max(1.0, abs(t)):
            raise StepFailure(f"step size underflow at t = {t}")
    raise StepFailure(f"more than {ctl.max_steps} steps before t = {t_end}")


def lv_flow(params: EcoParams, z, t_end: float, step_control: Optional[StepControl] = None) -> LVTrajectory:
    """Integrate the competitive Lotka-Volterra system from ``z`` to ``t_end``.

    Negative excursions are clamped to 0 (the axes are invariant); any dip
    below ``-atol`` is recorded in ``LVTrajectory.clamped``.
    """
    z = np.asarray(z, dtype=float)
    if (z < 0).any():
        raise ValueError("initial state must be non-negative")
    if t_end < 0:
        raise ValueError("t_end must be non-negative")
    ctl = step_control or StepControl()
    ts, ys, clamped = [0.0], [z.copy()], []
    for t, y, rep in _integrate(params, z, t_end, ctl):
        ts.append(t)
        ys.append(y.copy())
        if rep is not None:
            clamped.append(rep)
    return LVTrajectory(np.array(ts), np.array(ys), clamped)


def _in_box(y, nbar_a: float, eps: float) -> bool:
    return y[0] <= eps * eps / 2 and abs(y[1] - nbar_a) <= eps / 2


def t_eps_of_z(params: EcoParams, z, eps: float, *, confirm: float = 10.0,
               t_cap: float = 1000.0, sample_dt: float = 0.01) -> float:
    """Entry time into the neighbourhood of the mutant equilibrium.

    The target box is ``n_A <= eps**2 / 2`` and ``|n_a - nbar_a| <= eps / 2``.
    Returns the start of the first in-box stretch that lasts ``confirm`` time
    units, with the entry located by bisection between samples.
    """
    z = np.asarray(z, dtype=float)
    if z[0] < 0 or not z[1] > 0:
        raise ValueError("need z_A >= 0 and z_a > 0")
    nbar_a = derive(params).nbar_a
    f = lambda y: lv_rhs(params, y)
    ctl = StepControl(max_step=sample_dt)

    t_prev, y_prev = 0.0, z.copy()
    entry = 0.0 if _in_box(z, nbar_a, eps) else None
    for t, y, _ in _integrate(params, z, t_cap, ctl):
        inside = _in_box(y, nbar_a, eps)
        if inside and entry is None:
            lo, hi = 0.0, t - t_prev
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if _in_box(_dopri_step(f, y_prev, mid)[0], nbar_a, eps):
                    hi = mid
                else:
                    lo = mid
            entry = t_prev + hi
        elif not inside:
            entry = None
        if entry is not None and t - entry >= confirm:
            return entry
        t_prev, y_prev = t, y
    raise NotReached(f"trajectory from {z.tolist()} did not settle before t = {t_cap}")


def t_eps_grid_max(params: EcoParams, zs: Sequence, eps: float, **kw) -> float:
    """Largest ``t_eps_of_z`` over user-supplied starting points (a lower bound
    on the supremum over the whole entry set)."""
    return max(t_eps_of_z(params, z, eps, **kw) for z in zs)


def summary(params: EcoParams) -> Dict[str, float]:
    """Flat record of the analytic predictions for one parameter set."""
    de = derive(params)
    qs = compute_qs(params, de)
    ps = compute_ps(qs)
    out = {"q1": qs.q1, "q2": qs.q2, "qbar2": qs.qbar2, "q3": qs.q3}
    out.update({f"p{k}": v for k, v in enumerate(ps.as_tuple(), start=1)})
    out.update({"s": de.s, "sbar": de.sbar, "nbar_A": de.nbar_A, "nbar_a": de.nbar_a,
                "S_aA": de.S_aA, "S_Aa": de.S_Aa})
    return out
