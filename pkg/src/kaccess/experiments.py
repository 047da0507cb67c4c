"""Reproducible threshold scans and H^k-versus-closure comparisons.

Config files are flat ``key = value`` text; ``#`` starts a comment and list
values are comma separated.  Recognized keys (defaults in brackets):

    k             positive integer                            [1]
    h_values      list of heights, e.g. ``10, 20, 40``         (required)
    scaling       constant | linear | main | nk_above | nk_below   [main]
    params        list of scaling parameters                  (required)
                    constant: the arity n itself
                    linear:   alpha in f(h) = alpha * h
                    main:     c in c * (h/(e k))**(1/k) + margin * term
                    nk_above: g in h/e + g * log(h)
                    nk_below: g in h/e + log(h)/(2e) - g
    margin        signed real, main scaling only               [0]
    margin_mode   log (term = log(h)**(1/k)) | power (term = h**exponent)  [log]
    exponent      positive real, power margin only             [0.5]
    rounding      round (half up) | floor                     [round]
    trials        positive integer                            [1000]
    budget        label evaluations per trial, or ``none``     [1000000]
    master_seed   integer                                     [0]
    workers       threads                                     [1]
    retry_undecided  undecided fraction that triggers one rerun with 10x budget  [0.05]
    z             Wilson z                                    [2.576]
    output        path prefix for .csv / .json / .config.txt  (required to write)
    search_order           greedy | natural                   [greedy]
    search_corridors       corridor offsets, may be empty     [0.0, 0.1, 0.2]
    search_corridor_share  budget share per corridor pass     [0.1]

Every run writes the fully resolved config (parseable by the same grammar)
next to its outputs.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from kaccess.accessibility import SearchPlan, is_k_accessible
from kaccess.closure import build_Hk, is_1_accessible_dag, k_transitive_closure
from kaccess.estimate import (
    DEFAULT_Z,
    SEED_DERIVATION,
    ThetaEstimate,
    exact_theta,
    exact_theta_dag,
    monte_carlo_theta,
    wilson_interval,
)
from kaccess.tree import build_nary_tree, derive_seed, sample_labeling

log = logging.getLogger(__name__)

SCALINGS = ("constant", "linear", "main", "nk_above", "nk_below")
H_STREAM_SALT = 0x5D588B656C078965


class ConfigError(ValueError):
    pass


def _round(x: float, rounding: str) -> int:
    if rounding == "round":
        return math.floor(x + 0.5)
    if rounding == "floor":
        return math.floor(x)
    raise ValueError(f"rounding must be 'round' or 'floor', got {rounding!r}")


def scaling_arity(
    h: int,
    k: int,
    c: float,
    margin: float = 0.0,
    margin_mode: str = "log",
    exponent: float = 0.5,
    rounding: str = "round",
) -> int:
    """Arity ``c * (h/(e k))**(1/k) + margin * term``, rounded.

    ``term`` is ``log(h)**(1/k)`` (the growing margin of the accessible side)
    or ``h**exponent`` (the polynomial margin of the blocked side; pass a
    negative ``margin``).
    """
    if h < 1 or k < 1 or c <= 0:
        raise ValueError(f"need h >= 1, k >= 1, c > 0, got h={h}, k={k}, c={c}")
    if margin_mode == "log":
        term = math.log(h) ** (1.0 / k)
    elif margin_mode == "power":
        term = h**exponent
    else:
        raise ValueError(f"margin_mode must be 'log' or 'power', got {margin_mode!r}")
    n = _round(c * (h / (math.e * k)) ** (1.0 / k) + margin * term, rounding)
    if n < 1:
        raise ValueError(f"scaling gives arity {n} < 1 at h={h}, k={k}, c={c}, margin={margin}")
    return n


@dataclass(frozen=True)
class ScanConfig:
    h_values: tuple[int, ...]
    params: tuple[float, ...]
    k: int = 1
    scaling: str = "main"
    margin: float = 0.0
    margin_mode: str = "log"
    exponent: float = 0.5
    rounding: str = "round"
    trials: int = 1000
    budget: int | None = 1_000_000
    master_seed: int = 0
    workers: int = 1
    retry_undecided: float = 0.05
    z: float = DEFAULT_Z
    output: str | None = None
    plan: SearchPlan = field(default_factory=SearchPlan)

    def __post_init__(self) -> None:
        if not self.h_values or any(h < 0 for h in self.h_values):
            raise ConfigError("h_values must be a nonempty list of nonnegative heights")
        if not self.params:
            raise ConfigError("params must be nonempty")
        if self.scaling not in SCALINGS:
            raise ConfigError(f"scaling must be one of {SCALINGS}, got {self.scaling!r}")
        if self.scaling in ("constant", "linear", "main") and any(p <= 0 for p in self.params):
            raise ConfigError(f"{self.scaling} scaling needs positive params")
        if self.k < 1 or self.trials < 1 or self.workers < 1:
            raise ConfigError("k, trials and workers must be positive")
        if self.budget is not None and self.budget < 1:
            raise ConfigError("budget must be positive or none")
        if self.rounding not in ("round", "floor"):
            raise ConfigError("rounding must be 'round' or 'floor'")
        if self.margin_mode not in ("log", "power"):
            raise ConfigError("margin_mode must be 'log' or 'power'")

    def arity(self, h: int, param: float) -> int:
        """Arity used at height ``h``; a height-0 tree is a single vertex whatever the arity."""
        if h == 0:
            return 1
        if self.scaling == "constant":
            n = _round(param, self.rounding)
        elif self.scaling == "linear":
            n = _round(param * h, self.rounding)
        elif self.scaling == "main":
            return scaling_arity(
                h, self.k, param, self.margin, self.margin_mode, self.exponent, self.rounding
            )
        elif self.scaling == "nk_above":
            n = _round(h / math.e + param * math.log(h), self.rounding)
        else:
            n = _round(h / math.e + math.log(h) / (2 * math.e) - param, self.rounding)
        if n < 1:
            raise ValueError(f"{self.scaling} scaling gives arity {n} < 1 at h={h}, param={param}")
        return n

    def resolved_text(self) -> str:
        lines = [
            f"k = {self.k}",
            f"h_values = {', '.join(map(str, self.h_values))}",
            f"scaling = {self.scaling}",
            f"params = {', '.join(map(repr, self.params))}",
            f"margin = {self.margin!r}",
            f"margin_mode = {self.margin_mode}",
            f"exponent = {self.exponent!r}",
            f"rounding = {self.rounding}",
            f"trials = {self.trials}",
            f"budget = {'none' if self.budget is None else self.budget}",
            f"master_seed = {self.master_seed}",
            f"workers = {self.workers}",
            f"retry_undecided = {self.retry_undecided!r}",
            f"z = {self.z!r}",
            f"output = {self.output or ''}",
            f"search_order = {self.plan.order}",
            f"search_corridors = {', '.join(map(repr, self.plan.corridors))}",
            f"search_corridor_share = {self.plan.corridor_share!r}",
            f"# seed_derivation: trial i uses {SEED_DERIVATION}",
        ]
        return "\n".join(lines) + "\n"


_INT_KEYS = {"k", "trials", "master_seed", "workers"}
_FLOAT_KEYS = {"margin", "exponent", "retry_undecided", "z"}
_STR_KEYS = {"scaling", "margin_mode", "rounding"}


def parse_config(text: str) -> ScanConfig:
    values: dict = {}
    plan: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key == "h_values":
                values[key] = tuple(int(v) for v in value.split(",") if v.strip())
            elif key == "params":
                values[key] = tuple(float(v) for v in value.split(",") if v.strip())
            elif key == "budget":
                values[key] = None if value.lower() == "none" else int(value)
            elif key in _INT_KEYS:
                values[key] = int(value, 0)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "output":
                values[key] = value or None
            elif key in _STR_KEYS:
                values[key] = value
            elif key == "search_order":
                plan["order"] = value
            elif key == "search_corridors":
                plan["corridors"] = tuple(float(v) for v in value.split(",") if v.strip())
            elif key == "search_corridor_share":
                plan["corridor_share"] = float(value)
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    for required in ("h_values", "params"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    try:
        values["plan"] = SearchPlan(**plan)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ScanConfig(**values)


@dataclass(frozen=True)
class ScanRow:
    h: int
    k: int
    n_used: int
    c: float
    trials: int
    accessible: int
    blocked: int
    undecided: int
    theta_lo: float
    theta_hi: float
    wilson_lo: float
    wilson_hi: float
    runtime: float

    def __post_init__(self) -> None:
        if self.accessible + self.blocked + self.undecided != self.trials:
            raise ValueError("verdict counts do not sum to trials")
        if not 0.0 <= self.theta_lo <= self.theta_hi <= 1.0:
            raise ValueError("bracket must satisfy 0 <= theta_lo <= theta_hi <= 1")
        if not 0.0 <= self.wilson_lo <= self.wilson_hi <= 1.0:
            raise ValueError("Wilson bounds must lie in [0, 1]")

    @classmethod
    def from_estimate(cls, h: int, k: int, n: int, c: float, est: ThetaEstimate,
                      runtime: float) -> "ScanRow":
        return cls(h, k, n, c, est.trials, est.accessible, est.blocked, est.undecided,
                   est.theta_lo, est.theta_hi, est.wilson_lo, est.wilson_hi, runtime)


ROW_FIELDS = tuple(f.name for f in dataclasses.fields(ScanRow))


def rows_to_csv(rows: list[ScanRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROW_FIELDS)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in dataclasses.astuple(row)])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ScanRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != ROW_FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for rec in reader:
        kwargs = {}
        for f in dataclasses.fields(ScanRow):
            kwargs[f.name] = int(rec[f.name]) if f.type in ("int", int) else float(rec[f.name])
        out.append(ScanRow(**kwargs))
    return out


def rows_to_json(rows: list[ScanRow]) -> str:
    return json.dumps([dataclasses.asdict(r) for r in rows], indent=1) + "\n"


def run_scan(config: ScanConfig, write: bool = True) -> list[ScanRow]:
    """One Monte Carlo estimate per (h, param); rows sorted by (h, param).

    Every row uses ``config.master_seed`` (common random numbers across rows).
    A row whose undecided fraction reaches ``retry_undecided`` is rerun once
    with ten times the budget.
    """
    rows = []
    for h in sorted(set(config.h_values)):
        for param in sorted(set(config.params)):
            n = config.arity(h, param)
            start = time.perf_counter()
            budget = config.budget
            est = monte_carlo_theta(n, h, config.k, config.trials, config.master_seed,
                                    budget, config.workers, config.z, config.plan)
            if budget is not None and est.undecided_fraction >= config.retry_undecided:
                log.info("h=%d param=%g: %.1f%% undecided, rerunning with budget %d",
                         h, param, 100 * est.undecided_fraction, 10 * budget)
                est = monte_carlo_theta(n, h, config.k, config.trials, config.master_seed,
                                        10 * budget, config.workers, config.z, config.plan)
            rows.append(ScanRow.from_estimate(h, config.k, n, param, est,
                                              time.perf_counter() - start))
            log.info("h=%d param=%g n=%d theta in [%.4f, %.4f]",
                     h, param, n, est.theta_lo, est.theta_hi)
    if write and config.output:
        write_scan(config, rows)
    return rows


def write_scan(config: ScanConfig, rows: list[ScanRow]) -> dict[str, Path]:
    prefix = Path(config.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": prefix.with_name(prefix.name + ".csv"),
        "json": prefix.with_name(prefix.name + ".json"),
        "config": prefix.with_name(prefix.name + ".config.txt"),
    }
    paths["csv"].write_text(rows_to_csv(rows))
    paths["json"].write_text(rows_to_json(rows))
    paths["config"].write_text(config.resolved_text())
    return paths


@dataclass(frozen=True)
class Lemma1Report:
    """theta_1 of H^k against theta_1 of the k-transitive closure T^k."""

    mode: str
    n: int
    h: int
    k: int
    theta_closure: Fraction | float
    theta_hk: Fraction | float
    holds: bool
    trials: int | None = None
    standard_error: float | None = None

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        for key in ("theta_closure", "theta_hk"):
            if isinstance(d[key], Fraction):
                d[key] = str(d[key])
        return d


def run_lemma1_check(
    n: int,
    h: int,
    k: int,
    trials: int = 10_000,
    master_seed: int = 0,
    mode: str = "exact",
    cap: int = 9,
) -> Lemma1Report:
    """Compare theta_1(H^k) with theta_1(T^k) on the complete n-ary tree of height h.

    ``exact`` enumerates rank orders on both graphs (both must have at most
    ``cap`` vertices).  ``mc`` labels each graph independently ``trials``
    times and checks ``p_H >= p_T - 3 * SE`` with the combined standard error.
    """
    tree = build_nary_tree(n, h)
    closure = k_transitive_closure(tree, k)
    hk = build_Hk(n, h, k)
    if mode == "exact":
        t_side = exact_theta_dag(closure, cap=cap)
        h_side = exact_theta(hk.tree, 1, cap=cap)
        return Lemma1Report("exact", n, h, k, t_side, h_side, h_side >= t_side)
    if mode != "mc":
        raise ValueError(f"mode must be 'exact' or 'mc', got {mode!r}")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    hits_t = sum(
        is_1_accessible_dag(closure, sample_labeling(tree, derive_seed(master_seed, i)))
        for i in range(trials)
    )
    h_seed = master_seed ^ H_STREAM_SALT
    hits_h = sum(
        is_k_accessible(hk.tree, sample_labeling(hk.tree, derive_seed(h_seed, i)), 1).accessible
        for i in range(trials)
    )
    p_t, p_h = hits_t / trials, hits_h / trials
    se = math.sqrt(p_t * (1 - p_t) / trials + p_h * (1 - p_h) / trials)
    return Lemma1Report("mc", n, h, k, p_t, p_h, p_h >= p_t - 3 * se, trials, se)


def monotone_within_overlap(
    counts: list[int], trials: list[int], direction: str, z: float = DEFAULT_Z
) -> bool:
    """Whether proportions ``counts/trials`` are monotone up to Wilson-interval overlap.

    A step against ``direction`` ("up" or "down") is tolerated when the two
    Wilson intervals overlap.
    """
    if direction not in ("up", "down"):
        raise ValueError("direction must be 'up' or 'down'")
    ivals = [wilson_interval(c, t, z) for c, t in zip(counts, trials)]
    props = [c / t for c, t in zip(counts, trials)]
    for i in range(1, len(props)):
        (lo0, hi0), (lo1, hi1) = ivals[i - 1], ivals[i]
        if direction == "up" and props[i] < props[i - 1] and hi1 < lo0:
            return False
        if direction == "down" and props[i] > props[i - 1] and lo1 > hi0:
            return False
    return True
