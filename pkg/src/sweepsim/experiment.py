"""Conditioned replicate batches, aggregation and comparison with the formula."""

from __future__ import annotations

import csv
import json
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from sweepsim import analytic, oracles
from sweepsim.config import ExperimentConfig
from sweepsim.engine import (
    AttemptCapExceeded,
    EventCapExceeded,
    RegimeError,
    run_conditioned,
    upcrossing_means,
    eps_level,
)
from sweepsim.genealogy import (
    classify, escapes, individual_classes, marginal_classes, sample_partition,
)
from sweepsim.model import Geometry, derive, validate_sweep_regime

CSV_HEADER = ["replicate", "seed", "fixed", "t_ext", "event_count",
              "m1", "m2", "m3", "m4", "m5", "in_delta"]

# stream index used to derive the sampling RNG from a replicate's seed
_SAMPLE_STREAM = 1


@dataclass
class ReplicateRecord:
    replicate: int
    seed: int
    t_ext: float
    event_count: int
    m: Tuple[int, int, int, int, int]
    in_delta: bool
    classes: Tuple[Optional[int], ...]
    marginal: Tuple[int, ...]
    escapes: Tuple[Tuple[bool, bool], ...]

    def csv_row(self) -> List[Any]:
        return [self.replicate, self.seed, 1, repr(self.t_ext), self.event_count,
                *self.m, int(self.in_delta)]


@dataclass
class ExperimentResult:
    summary: Dict[str, Any]
    records: List[ReplicateRecord] = field(default_factory=list)
    truncated: bool = False
    error: Optional[str] = None


def sample_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _SAMPLE_STREAM]))


def collect(config: ExperimentConfig, threads: int = 1) -> Tuple[List[ReplicateRecord], int, Optional[str]]:
    """Run the conditioned batch and reduce each fixed replicate to its classes.

    Returns the records, the number of attempts, and an error message if the
    batch stopped early on an event or attempt cap.
    """
    records: List[ReplicateRecord] = []
    sweep_kw = {"eps": config.eps_diag}
    if config.event_cap is not None:
        sweep_kw["event_cap"] = config.event_cap
    batch = run_conditioned(config.params, config.n_fixed, config.master_seed,
                            threads=threads, max_attempts=config.max_attempts, **sweep_kw)
    error = None
    try:
        for rep, outcome in batch:
            part = sample_partition(outcome.final_pop, config.d, sample_rng(outcome.seed))
            cc = classify(part)
            records.append(ReplicateRecord(
                replicate=rep, seed=outcome.seed, t_ext=outcome.t_ext,
                event_count=outcome.event_count, m=cc.as_tuple(), in_delta=cc.in_delta,
                classes=tuple(individual_classes(part)), marginal=tuple(marginal_classes(part)),
                escapes=tuple(escapes(part)),
            ))
    except (EventCapExceeded, AttemptCapExceeded) as exc:
        error = str(exc)
    return records, batch.attempts, error


def _freq_se(count: int, n: int) -> Tuple[float, float]:
    if n == 0:
        return math.nan, math.nan
    f = count / n
    return f, math.sqrt(f * (1 - f) / n)


def empirical_summary(records: Sequence[ReplicateRecord], attempts: int) -> Dict[str, Any]:
    records = sorted(records, key=lambda r: r.replicate)
    n = len(records)
    classes = [c for r in records for c in r.classes]
    n_ind = len(classes)
    strict = Counter(classes)
    tally = Counter(c for r in records for c in r.marginal)
    freqs, ses = zip(*(_freq_se(tally[k], n_ind) for k in range(1, 6))) if n_ind else ([], [])

    histogram = Counter(",".join(map(str, r.m)) for r in records if r.in_delta)
    outside = sum(1 for r in records if not r.in_delta)

    esc = [e for r in records for e in r.escapes]
    e1 = sum(x for x, _ in esc) / len(esc) if esc else math.nan
    e2 = sum(y for _, y in esc) / len(esc) if esc else math.nan
    both = sum(x and y for x, y in esc) / len(esc) if esc else math.nan

    return {
        "n_replicates": n,
        "attempts": attempts,
        "fixation_frequency": n / attempts if attempts else math.nan,
        "fixation_se": math.sqrt((n / attempts) * (1 - n / attempts) / attempts) if attempts else math.nan,
        "n_individuals": n_ind,
        "class_counts": [tally[k] for k in range(1, 6)],
        "class_frequencies": list(freqs),
        "class_se": list(ses),
        "unclassified_frequency": strict[None] / n_ind if n_ind else math.nan,
        "mvector_counts": dict(sorted(histogram.items())),
        "mvector_frequencies": {k: v / n for k, v in sorted(histogram.items())},
        "outside_delta_frequency": outside / n if n else math.nan,
        "escape": {"locus1": e1, "locus2": e2, "both": both,
                   "dependence": both - e1 * e2},
        "mean_t_ext": float(np.mean([r.t_ext for r in records])) if n else math.nan,
        "mean_event_count": float(np.mean([r.event_count for r in records])) if n else math.nan,
    }


def analytic_summary(config: ExperimentConfig) -> Dict[str, Any]:
    out = analytic.summary(config.params)
    weights = analytic.class_weights(config.params)
    out["geometry"] = config.params.geometry.value
    out["class_weights"] = list(weights)
    out["escape"] = analytic.escape_probabilities(weights)
    out["escape"]["dependence"] = (out["escape"]["both"]
                                   - out["escape"]["locus1"] * out["escape"]["locus2"])
    return out


def comparison_summary(config: ExperimentConfig, emp: Dict[str, Any],
                       ana: Dict[str, Any]) -> Dict[str, Any]:
    w = ana["class_weights"]
    f = emp["class_frequencies"]
    n_ind = emp["n_individuals"]
    if not n_ind:
        return {"tv_distance": math.nan}
    tv = 0.5 * sum(abs(fk - wk) for fk, wk in zip(f, w))
    z = [((fk - wk) / math.sqrt(wk * (1 - wk) / n_ind)) if 0 < wk < 1 else None
         for fk, wk in zip(f, w)]
    s = ana["s"]
    n_att = emp["attempts"]
    out = {
        "tv_distance": tv,
        "z_scores": z,
        "fixation_z": (emp["fixation_frequency"] - s) / math.sqrt(s * (1 - s) / n_att),
        "escape_dependence_empirical": emp["escape"]["dependence"],
        "escape_dependence_analytic": ana["escape"]["dependence"],
    }
    if config.d > 1:
        n = emp["n_replicates"]
        qs = analytic.compute_qs(config.params)
        ps = analytic.compute_ps(qs)
        counts = emp["mvector_counts"]
        total = 0.0
        for m in analytic.compositions(config.d):
            if config.params.geometry is Geometry.SEPARATED:
                p = analytic.theorem2_pmf(qs, config.d, m)
            else:
                p = analytic.theorem1_pmf(ps, config.d, m)
            total += abs(counts.get(",".join(map(str, m)), 0) / n - p)
        out["tv_distance_mvector"] = 0.5 * (total + emp["outside_delta_frequency"])
    return out


def diagnostics_summary(config: ExperimentConfig, threads: int = 1) -> Dict[str, Any]:
    params = config.params
    de = derive(params)
    eps = config.eps_diag
    level = eps_level(params, eps)
    logK = math.log(params.K)
    out: Dict[str, Any] = {
        "s": de.s,
        "eps": eps,
        "eps_level": level,
        "reach_eps_probability": (
            oracles.bd_hitting_prob(oracles.BDWalkParams(
                b=params.f_a, d=params.f_a - de.S_aA, i=0, j=1, k=level))
            if level > 1 else math.nan
        ),
        "first_phase_duration": logK / de.S_aA,
        "third_phase_duration": logK / abs(de.S_Aa),
        "t_eps_of_z": analytic.t_eps_of_z(params, (de.nbar_A, eps), eps),
        "geometric_compound_max_deviation": oracles.check_geometric_compound(0.5, 0.5, 200),
    }
    levels = [k for k in config.upcross_levels if 1 <= k < level]
    if levels and level > 1:
        um = upcrossing_means(params, levels, config.n_fixed, config.master_seed,
                              eps=eps, threads=threads)
        out["upcrossings"] = {
            str(k): {"expected": oracles.expected_upcrossings(de.s, level, k),
                     "mean": um.mean[k], "se": um.se[k]}
            for k in levels
        }
        out["upcrossing_runs"] = um.n_runs
    return out


def json_safe(obj):
    """JSON-safe copy: NaN and inf become null."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    return obj


def write_replicates_csv(path, records: Iterable[ReplicateRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in sorted(records, key=lambda r: r.replicate):
            w.writerow(r.csv_row())


def write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(json_safe(obj), fh, indent=2)
        fh.write("\n")


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run one configured experiment and write its output files.

    Raises RegimeError when the parameters do not describe a sweep.  Cap
    overruns do not raise: the partial result comes back with
    ``truncated=True`` and the files are still written.
    """
    report = validate_sweep_regime(config.params)
    if not report.ok:
        raise RegimeError("; ".join(report.violations))
    started = time.perf_counter()

    if config.mode == "analytic":
        summary = analytic.summary(config.params)
        summary["class_weights"] = list(analytic.class_weights(config.params))
        if config.out_json:
            write_json(config.out_json, summary)
        return ExperimentResult(summary)

    if config.mode == "diagnostics":
        summary = diagnostics_summary(config, threads)
        if config.out_json:
            write_json(config.out_json, summary)
        return ExperimentResult(summary)

    records, attempts, error = collect(config, threads)
    emp = empirical_summary(records, attempts)
    ana = analytic_summary(config)
    comparison = comparison_summary(config, emp, ana) if config.mode == "compare" else None
    truncated = error is not None
    summary = {
        "config_echo": config.echo(),
        "analytic": ana,
        "empirical": emp,
        "comparison": comparison,
        "runtime": {"seconds": time.perf_counter() - started, "threads": threads,
                    "truncated": truncated, "error": error,
                    "warnings": report.warnings},
        "truncated": truncated,
    }
    if config.out_csv:
        write_replicates_csv(config.out_csv, records)
    if config.out_json:
        write_json(config.out_json, summary)
    return ExperimentResult(summary, records, truncated, error)
