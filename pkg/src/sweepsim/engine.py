"""Exact event-driven simulation of the three-locus birth-death process.

Individuals live in per-trait dense arrays (row ``A = 0`` and row ``a = 1``)
with swap-remove deletion, so uniform sampling within a trait is O(1).
Each individual carries two founder labels, one per neutral locus:
``MUTANT = 0`` for material from the initial mutant and ``i >= 1`` for the
i-th resident alive at time 0.

Births are generated per trait at rate ``f_alpha * n_alpha``.  The father is
drawn among all living individuals (the mother included) with probability
proportional to fertility, which reproduces the genotype-level birth rates
exactly without enumerating genotype pairs.
"""

from __future__ import annotations

import csv
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numba
import numpy as np

from sweepsim.model import ALLELES, A, EcoParams, Geometry, a, derive, validate_sweep_regime

MUTANT = 0

BIRTH_A, BIRTH_a, DEATH_A, DEATH_a = 0, 1, 2, 3
EVENT_NAMES = ("birth A", "birth a", "death A", "death a")

STATUS_DONE, STATUS_CAP, STATUS_EPS = 0, 1, 2

DEFAULT_EPS = 0.1


class RegimeError(ValueError):
    """Parameters fail the sweep-regime validation."""


class EventCapExceeded(RuntimeError):
    def __init__(self, outcome: "SweepOutcome", cap: int):
        super().__init__(f"run with seed {outcome.seed} exceeded the event cap ({cap} events)")
        self.outcome = outcome
        self.cap = cap


class AttemptCapExceeded(RuntimeError):
    def __init__(self, attempts: int, found: int, wanted: int):
        super().__init__(
            f"collected {found}/{wanted} conditioned replicates in {attempts} attempts"
        )
        self.attempts = attempts
        self.found = found


def founder_name(label: int) -> str:
    return "Mutant" if label == MUTANT else f"Resident({label})"


def default_event_cap(K: int) -> int:
    return int(500 * K * (1 + math.log(K)))


def replicate_seed(master_seed: int, index: int) -> int:
    """Stable 63-bit seed for replicate ``index`` of a batch."""
    ss = np.random.SeedSequence([int(master_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------

# _advance exit codes
_LOST, _CAP, _EPS, _FULL, _TRAJ_FULL = 0, 1, 2, 3, 4


@numba.njit(nogil=True, cache=True)
def _rates(nA, na, coef, K):
    fA, fa, DA, Da, CAA, CAa, CaA, Caa = coef
    bA = fA * nA
    ba = fa * na
    dA = (DA + CAA * nA / K + CAa * na / K) * nA
    da = (Da + CaA * nA / K + Caa * na / K) * na
    return bA, ba, dA, da


@numba.njit(nogil=True, cache=True)
def _parent_sources(trait, mi, ftrait, fi, rec1, rec2, separated):
    """Registry positions the newborn copies its N1 and N2 labels from."""
    if rec1:
        t1, i1 = ftrait, fi
    else:
        t1, i1 = trait, mi
    if separated:
        # N1 and N2 sit on opposite sides of the selected locus
        if rec2:
            t2, i2 = ftrait, fi
        else:
            t2, i2 = trait, mi
    elif not rec2:
        t2, i2 = t1, i1
    elif rec1:
        t2, i2 = trait, mi
    else:
        t2, i2 = ftrait, fi
    return t1, i1, t2, i2


@numba.njit(nogil=True, cache=True)
def _uniform_index(rng, n):
    # Generator.integers with a varying bound is slow under numba;
    # the bias of floor(U * n) is below n / 2**53.
    return min(int(rng.random() * n), n - 1)


@numba.njit(nogil=True, cache=True)
def _advance(rng, ids, lab1, lab2, counts, clock, ctr, coef, K, r1, r2, separated,
             until_loss, max_events, eps_level, stop_at_eps, lo_A, hi_A, up, traj, traj_stride):
    # clock = [t, t_eps, s_eps, last_dt]; ctr = [events, next_id, n_traj, last_code].
    # Everything is kept in one loop body: splitting it into jitted calls that
    # take arrays costs a factor of four in speed.
    t = clock[0]
    t_eps = clock[1]
    s_eps = clock[2]
    dt = clock[3]
    events = ctr[0]
    next_id = ctr[1]
    ntraj = ctr[2]
    code = ctr[3]
    cap = ids.shape[1]
    hit = not np.isnan(t_eps)
    fa_ = coef[1]
    fA_ = coef[0]
    while True:
        nA = counts[0]
        na = counts[1]
        if nA + na == 0 or (until_loss and (nA == 0 or na == 0)):
            status = _LOST
            break
        if stop_at_eps and hit:
            status = _EPS
            break
        if events >= max_events:
            status = _CAP
            break
        if nA >= cap or na >= cap:
            status = _FULL
            break
        if traj_stride > 0 and ntraj >= traj.shape[0]:
            status = _TRAJ_FULL
            break

        bA, ba, dA, da = _rates(nA, na, coef, K)
        total = bA + ba + dA + da
        dt = rng.exponential(1.0 / total)
        u = rng.random() * total
        if u < bA + ba:
            tr = 0 if u < bA else 1
            mi = _uniform_index(rng, counts[tr])
            wA = fA_ * nA
            ft = 0 if rng.random() * (wA + fa_ * na) < wA else 1
            fi = _uniform_index(rng, counts[ft])
            rec1 = r1 > 0.0 and rng.random() < r1
            rec2 = r2 > 0.0 and rng.random() < r2
            t1, i1, t2, i2 = _parent_sources(tr, mi, ft, fi, rec1, rec2, separated)
            k = counts[tr]
            ids[tr, k] = next_id
            lab1[tr, k] = lab1[t1, i1]
            lab2[tr, k] = lab2[t2, i2]
            counts[tr] = k + 1
            next_id += 1
            code = tr
        else:
            tr = 0 if u < bA + ba + dA else 1
            idx = _uniform_index(rng, counts[tr])
            last = counts[tr] - 1
            ids[tr, idx] = ids[tr, last]
            lab1[tr, idx] = lab1[tr, last]
            lab2[tr, idx] = lab2[tr, last]
            counts[tr] = last
            code = 2 + tr
        t += dt
        events += 1

        if not hit:
            if code == 1:
                up[na] += 1
            if counts[1] == eps_level:
                hit = True
                t_eps = t
        if np.isnan(s_eps) and (counts[0] < lo_A or counts[0] > hi_A):
            s_eps = t
        if traj_stride > 0 and events % traj_stride == 0:
            traj[ntraj, 0] = t
            traj[ntraj, 1] = counts[0]
            traj[ntraj, 2] = counts[1]
            ntraj += 1

    clock[0] = t
    clock[1] = t_eps
    clock[2] = s_eps
    clock[3] = dt
    ctr[0] = events
    ctr[1] = next_id
    ctr[2] = ntraj
    ctr[3] = code
    return status


# --------------------------------------------------------------------------
# population state
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Individual:
    id: int
    alpha: int
    label1: int
    label2: int

    def __str__(self):
        return (f"#{self.id} {ALLELES[self.alpha]} "
                f"[{founder_name(self.label1)}, {founder_name(self.label2)}]")


@dataclass
class PopulationState:
    """Living individuals, stored as per-trait rows of preallocated arrays.

    Only the first ``counts[alpha]`` columns of row ``alpha`` are alive.
    """

    ids: np.ndarray
    label1: np.ndarray
    label2: np.ndarray
    counts: np.ndarray
    t: float = 0.0
    next_id: int = 0
    n_founders: int = 0

    @property
    def n_A(self) -> int:
        return int(self.counts[A])

    @property
    def n_a(self) -> int:
        return int(self.counts[a])

    def __len__(self) -> int:
        return self.n_A + self.n_a

    @property
    def capacity(self) -> int:
        return self.ids.shape[1]

    def trait_arrays(self, alpha: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Views ``(ids, label1, label2)`` of the living individuals of one trait."""
        n = self.counts[alpha]
        return self.ids[alpha, :n], self.label1[alpha, :n], self.label2[alpha, :n]

    def individuals(self, alpha: Optional[int] = None) -> Iterator[Individual]:
        traits = (A, a) if alpha is None else (alpha,)
        for tr in traits:
            ids, l1, l2 = self.trait_arrays(tr)
            for i in range(len(ids)):
                yield Individual(int(ids[i]), tr, int(l1[i]), int(l2[i]))

    def ensure_capacity(self, extra: int = 1) -> None:
        need = int(self.counts.max()) + extra
        if need > self.capacity:
            cap = max(need, 2 * self.capacity)
            for name in ("ids", "label1", "label2"):
                old = getattr(self, name)
                new = np.zeros((2, cap), dtype=old.dtype)
                new[:, : old.shape[1]] = old
                setattr(self, name, new)

    def compact(self) -> "PopulationState":
        """Copy trimmed to the living individuals."""
        cap = max(1, int(self.counts.max()))
        out = PopulationState(
            ids=np.zeros((2, cap), dtype=np.int64),
            label1=np.zeros((2, cap), dtype=np.int64),
            label2=np.zeros((2, cap), dtype=np.int64),
            counts=self.counts.copy(),
            t=self.t,
            next_id=self.next_id,
            n_founders=self.n_founders,
        )
        for tr in (A, a):
            n = self.counts[tr]
            out.ids[tr, :n] = self.ids[tr, :n]
            out.label1[tr, :n] = self.label1[tr, :n]
            out.label2[tr, :n] = self.label2[tr, :n]
        return out

    def check(self) -> None:
        """Raise AssertionError if the registry is inconsistent."""
        assert self.counts.shape == (2,) and (self.counts >= 0).all()
        all_ids = np.concatenate([self.trait_arrays(A)[0], self.trait_arrays(a)[0]])
        assert len(all_ids) == len(self)
        assert len(np.unique(all_ids)) == len(all_ids), "duplicate ids"
        assert (all_ids < self.next_id).all()
        for tr in (A, a):
            _, l1, l2 = self.trait_arrays(tr)
            for lab in (l1, l2):
                assert ((lab >= 0) & (lab <= self.n_founders)).all(), "unknown founder label"


def init_population(params: EcoParams, capacity: Optional[int] = None) -> PopulationState:
    """Resident population at ``floor(nbar_A K)`` plus a single mutant."""
    de = derive(params)
    n0 = math.floor(de.nbar_A * params.K)
    if capacity is None:
        capacity = int(1.5 * max(de.nbar_A, de.nbar_a) * params.K) + 64
    capacity = max(capacity, n0 + 1, 2)
    ids = np.zeros((2, capacity), dtype=np.int64)
    lab1 = np.zeros((2, capacity), dtype=np.int64)
    ids[A, :n0] = np.arange(n0)
    lab1[A, :n0] = np.arange(1, n0 + 1)
    ids[a, 0] = n0
    lab1[a, 0] = MUTANT
    return PopulationState(
        ids=ids,
        label1=lab1,
        label2=lab1.copy(),
        counts=np.array([n0, 1], dtype=np.int64),
        t=0.0,
        next_id=n0 + 1,
        n_founders=n0,
    )


class Rates(NamedTuple):
    b_A: float
    b_a: float
    d_A: float
    d_a: float

    @property
    def total(self) -> float:
        return self.b_A + self.b_a + self.d_A + self.d_a


def _coef(params: EcoParams) -> Tuple[float, ...]:
    (C_AA, C_Aa), (C_aA, C_aa) = params.C
    return (float(params.f_A), float(params.f_a), float(params.D_A), float(params.D_a),
            C_AA, C_Aa, C_aA, C_aa)


def total_rates(state: PopulationState, params: EcoParams) -> Rates:
    return Rates(*_rates(state.n_A, state.n_a, _coef(params), float(params.K)))


class Event(NamedTuple):
    code: int
    dt: float

    @property
    def kind(self) -> str:
        return "birth" if self.code < 2 else "death"

    @property
    def alpha(self) -> int:
        return self.code % 2

    def __str__(self):
        return f"{EVENT_NAMES[self.code]} after {self.dt:.4g}"


class _Run:
    """Mutable bookkeeping threaded through repeated ``_advance`` calls."""

    def __init__(self, state: PopulationState, level: int, band: Tuple[float, float],
                 traj_stride: int, n_up: int):
        self.clock = np.array([state.t, math.nan, math.nan, 0.0])
        self.ctr = np.array([0, state.next_id, 0, -1], dtype=np.int64)
        self.level = level
        self.band = band
        self.up = np.zeros(max(n_up, 1), dtype=np.int64)
        self.traj_stride = traj_stride
        self.traj = np.empty((1024 if traj_stride > 0 else 0, 3))
        if state.n_a >= level:
            self.clock[1] = state.t
        if not band[0] <= state.n_A <= band[1]:
            self.clock[2] = state.t
        if traj_stride > 0:
            self.traj[0] = (state.t, state.n_A, state.n_a)
            self.ctr[2] = 1

    def drive(self, state: PopulationState, params: EcoParams, rng, *, until_loss: bool,
              max_events: int, stop_at_eps: bool) -> int:
        coef = _coef(params)
        separated = params.geometry is Geometry.SEPARATED
        while True:
            status = _advance(
                rng, state.ids, state.label1, state.label2, state.counts, self.clock, self.ctr,
                coef, float(params.K), float(params.r1), float(params.r2), separated,
                until_loss, max_events, self.level, stop_at_eps,
                float(self.band[0]), float(self.band[1]), self.up, self.traj,
                self.traj_stride,
            )
            state.t = float(self.clock[0])
            state.next_id = int(self.ctr[1])
            if status == _FULL:
                state.ensure_capacity()
            elif status == _TRAJ_FULL:
                bigger = np.empty((2 * len(self.traj), 3))
                bigger[: len(self.traj)] = self.traj
                self.traj = bigger
            else:
                return status

    @property
    def events(self) -> int:
        return int(self.ctr[0])

    def trajectory(self, state: PopulationState) -> np.ndarray:
        rows = self.traj[: self.ctr[2]]
        if len(rows) == 0 or rows[-1, 0] != state.t:
            rows = np.vstack([rows, [(state.t, state.n_A, state.n_a)]])
        return rows


def step(state: PopulationState, params: EcoParams, rng: np.random.Generator) -> Event:
    """Apply one event to ``state`` in place and return it."""
    if len(state) == 0:
        raise ValueError("cannot step an empty population")
    run = _Run(state, level=0, band=(-math.inf, math.inf), traj_stride=0, n_up=0)
    run.drive(state, params, rng, until_loss=False, max_events=1, stop_at_eps=False)
    return Event(int(run.ctr[3]), float(run.clock[3]))


def apply_birth(state: PopulationState, mother: Tuple[int, int], father: Tuple[int, int],
                rec1: bool, rec2: bool, geometry: Geometry) -> Individual:
    """Birth with given parents and recombination flags, applied in place.

    ``mother`` and ``father`` are ``(trait, index)`` registry positions.  The
    newborn takes the mother's selected allele.
    """
    state.ensure_capacity()
    tr, mi = mother
    ft, fi = father
    for t_, i_ in (mother, father):
        if not 0 <= i_ < state.counts[t_]:
            raise IndexError(f"no living individual at position {(t_, i_)}")
    t1, i1, t2, i2 = _parent_sources(tr, mi, ft, fi, bool(rec1), bool(rec2),
                                     Geometry(geometry) is Geometry.SEPARATED)
    k = state.counts[tr]
    state.ids[tr, k] = state.next_id
    state.label1[tr, k] = state.label1[t1, i1]
    state.label2[tr, k] = state.label2[t2, i2]
    state.counts[tr] = k + 1
    state.next_id += 1
    return Individual(int(state.ids[tr, k]), tr, int(state.label1[tr, k]),
                      int(state.label2[tr, k]))


# --------------------------------------------------------------------------
# whole runs
# --------------------------------------------------------------------------

@dataclass
class SweepOutcome:
    fixed: bool
    t_ext: float
    event_count: int
    seed: int
    final_pop: Optional[PopulationState] = None
    t_eps: float = math.nan
    s_eps: float = math.nan
    upcross_counts: Optional[np.ndarray] = None
    trajectory: Optional[np.ndarray] = None
    status: int = STATUS_DONE

    @property
    def reached_eps(self) -> bool:
        return not math.isnan(self.t_eps)


def eps_level(params: EcoParams, eps: float) -> int:
    return math.floor(eps * params.K)


def resident_band(params: EcoParams, eps: float) -> Tuple[float, float]:
    """Bounds of the band the resident count stays in during the first phase."""
    de = derive(params)
    (C_AA, C_Aa), _ = params.C
    half = 2 * eps * C_Aa / C_AA
    return params.K * (de.nbar_A - half), params.K * (de.nbar_A + half)


def _check_regime(params: EcoParams) -> None:
    report = validate_sweep_regime(params)
    if not report.ok:
        raise RegimeError("; ".join(report.violations))


def _simulate(params: EcoParams, seed: int, *, eps: float, stop_at_eps: bool,
              event_cap: Optional[int], trajectory_stride: int) -> SweepOutcome:
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    rng = np.random.default_rng(seed)
    state = init_population(params)
    level = eps_level(params, eps)
    cap = default_event_cap(params.K) if event_cap is None else int(event_cap)
    run = _Run(state, level, resident_band(params, eps), int(trajectory_stride), level)
    status = run.drive(state, params, rng, until_loss=True, max_events=cap,
                       stop_at_eps=stop_at_eps)
    status = {_LOST: STATUS_DONE, _CAP: STATUS_CAP, _EPS: STATUS_EPS}[status]
    fixed = status == STATUS_DONE and state.n_A == 0 and state.n_a > 0
    outcome = SweepOutcome(
        fixed=fixed,
        t_ext=state.t if status == STATUS_DONE else math.nan,
        event_count=run.events,
        seed=seed,
        final_pop=state.compact() if fixed or status == STATUS_EPS else None,
        t_eps=float(run.clock[1]),
        s_eps=float(run.clock[2]),
        upcross_counts=run.up,
        trajectory=run.trajectory(state) if trajectory_stride > 0 else None,
        status=status,
    )
    if status == STATUS_CAP:
        raise EventCapExceeded(outcome, cap)
    return outcome


def run_sweep(params: EcoParams, seed: int, *, eps: float = DEFAULT_EPS,
              event_cap: Optional[int] = None, trajectory_stride: int = 0) -> SweepOutcome:
    """Simulate from a single mutant until one allele is lost.

    ``eps`` only affects the diagnostics recorded on the outcome: ``t_eps``
    (first time the mutant count reaches ``floor(eps K)``), ``s_eps`` (first
    exit of the resident count from its band) and the upcrossing counts
    ``upcross_counts[k]`` of k -> k+1 before ``t_eps``.
    """
    _check_regime(params)
    return _simulate(params, seed, eps=eps, stop_at_eps=False, event_cap=event_cap,
                     trajectory_stride=trajectory_stride)


def run_unconditioned(params: EcoParams, n_runs: int, master_seed: int, *,
                      threads: int = 1, **sweep_kw) -> List[SweepOutcome]:
    """``n_runs`` independent sweeps, replicate j seeded from (master_seed, j)."""
    _check_regime(params)

    def one(j):
        o = run_sweep(params, replicate_seed(master_seed, j), **sweep_kw)
        o.final_pop = None
        return o

    if threads <= 1:
        return [one(j) for j in range(n_runs)]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(one, range(n_runs)))


class ConditionedRun:
    """Lazily collect the first ``n_fixed`` fixation outcomes by replicate index.

    Iterating yields ``(replicate, outcome)`` pairs in replicate order.
    Replicate ``j`` is always seeded from ``(seed, j)``, so the yielded
    sequence does not depend on ``threads``.  After iteration ``attempts``
    holds the number of replicates consumed.
    """

    def __init__(self, params: EcoParams, n_fixed: int, seed: int, *, threads: int = 1,
                 max_attempts: Optional[int] = None, **sweep_kw):
        _check_regime(params)
        self.params = params
        self.n_fixed = int(n_fixed)
        self.seed = int(seed)
        self.threads = max(1, int(threads))
        self.max_attempts = (1000 + 50 * self.n_fixed) if max_attempts is None else max_attempts
        self.sweep_kw = sweep_kw
        self.attempts = 0
        self.found = 0

    def _one(self, j: int) -> SweepOutcome:
        return run_sweep(self.params, replicate_seed(self.seed, j), **self.sweep_kw)

    def __iter__(self) -> Iterator[Tuple[int, SweepOutcome]]:
        self.attempts = self.found = 0
        if self.n_fixed <= 0:
            return
        if self.threads == 1:
            for j in range(self.max_attempts):
                outcome = self._one(j)
                self.attempts = j + 1
                if outcome.fixed:
                    self.found += 1
                    yield j, outcome
                    if self.found == self.n_fixed:
                        return
            raise AttemptCapExceeded(self.attempts, self.found, self.n_fixed)

        window = 4 * self.threads
        ex = ThreadPoolExecutor(self.threads)
        pending: deque = deque()
        nxt = 0
        try:
            while True:
                while len(pending) < window and nxt < self.max_attempts:
                    pending.append((nxt, ex.submit(self._one, nxt)))
                    nxt += 1
                if not pending:
                    raise AttemptCapExceeded(self.attempts, self.found, self.n_fixed)
                j, fut = pending.popleft()
                outcome = fut.result()
                self.attempts = j + 1
                if outcome.fixed:
                    self.found += 1
                    yield j, outcome
                    if self.found == self.n_fixed:
                        return
        finally:
            for _, fut in pending:
                fut.cancel()
            ex.shutdown(wait=True)


def run_conditioned(params: EcoParams, n_fixed: int, seed: int, **kw) -> ConditionedRun:
    return ConditionedRun(params, n_fixed, seed, **kw)


# --------------------------------------------------------------------------
# first-phase upcrossing diagnostic
# --------------------------------------------------------------------------

def count_upcrossings(params: EcoParams, levels: Iterable[int], seed: int, *,
                      eps: float = DEFAULT_EPS, max_attempts: int = 100_000) -> Dict[int, int]:
    """Upcrossings k -> k+1 of the mutant count before it first hits floor(eps K).

    Runs in which the mutant dies out first are discarded and redrawn from
    seeds derived from ``(seed, attempt)``.
    """
    _check_regime(params)
    levels = sorted(set(int(k) for k in levels))
    level = eps_level(params, eps)
    for attempt in range(max_attempts):
        o = _simulate(params, replicate_seed(seed, attempt), eps=eps, stop_at_eps=True,
                      event_cap=None, trajectory_stride=0)
        if o.reached_eps:
            return {k: int(o.upcross_counts[k]) if 0 <= k < level else 0 for k in levels}
    raise AttemptCapExceeded(max_attempts, 0, 1)


@dataclass
class UpcrossingSummary:
    levels: List[int]
    mean: Dict[int, float]
    se: Dict[int, float]
    n_runs: int


def upcrossing_means(params: EcoParams, levels: Sequence[int], n_runs: int, master_seed: int,
                     *, eps: float = DEFAULT_EPS, threads: int = 1) -> UpcrossingSummary:
    levels = sorted(set(int(k) for k in levels))

    def one(j):
        return count_upcrossings(params, levels, replicate_seed(master_seed, j), eps=eps)

    if threads <= 1:
        rows = [one(j) for j in range(n_runs)]
    else:
        with ThreadPoolExecutor(threads) as ex:
            rows = list(ex.map(one, range(n_runs)))
    mat = np.array([[r[k] for k in levels] for r in rows], dtype=float).reshape(n_runs, len(levels))
    mean = mat.mean(axis=0) if n_runs else np.full(len(levels), math.nan)
    se = mat.std(axis=0, ddof=1) / math.sqrt(n_runs) if n_runs > 1 else np.full(len(levels), math.nan)
    return UpcrossingSummary(levels, dict(zip(levels, mean.tolist())),
                             dict(zip(levels, se.tolist())), n_runs)


# --------------------------------------------------------------------------
# CSV output
# --------------------------------------------------------------------------

def write_trajectory_csv(path, trajectory: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "n_A", "n_a"])
        for t, nA, na in trajectory:
            w.writerow([repr(float(t)), int(nA), int(na)])


def write_outcomes_csv(path, rows: Iterable[Tuple[int, SweepOutcome, int]]) -> None:
    """Rows of ``(replicate, outcome, attempts)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["replicate", "seed", "fixed", "t_ext", "event_count", "attempts"])
        for rep, o, attempts in rows:
            w.writerow([rep, o.seed, int(o.fixed), repr(o.t_ext), o.event_count, attempts])
