"""Experiment configs, population runners, reports, and instance persistence.

Every runner maps (config, master_seed) to a report deterministically: challenge
words and perturbation draws come from keyed counter streams, work is split at
instance granularity, and results are assembled in submission order, so the
report bytes do not depend on the worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import streams
from .core import (
    ComparatorParams,
    PowerParams,
    PufInstance,
    derive_instance_seed,
    evaluate_grid,
    make_instance,
)
from .crossbar import CrossbarArray, Selection
from .device import DeviceParams, Environment
from .metrics import (
    ResponseRecord,
    diffuseness,
    mean_bit_aliasing,
    noise_free_variant,
    sac_challenge_test,
    sac_map,
    uniqueness,
)
from .power import collect_traces, snr
from .streams import DOMAIN_EXPERIMENT, derive_key_int

__all__ = [
    "ExperimentConfig",
    "Report",
    "experiment_words",
    "load_config",
    "load_instance",
    "run_experiment",
    "run_metrics_suite",
    "run_reliability_sweep",
    "run_sac_experiment",
    "run_snr_sweep",
    "save_instance",
    "standard_conditions",
    "write_report",
]

REPORT_FORMAT = "nrpuf-report"
REPORT_VERSION = 1
INSTANCE_FORMAT = "nrpuf-instance"
INSTANCE_VERSION = 1

KINDS = ("metrics", "reliability", "sac", "snr")

# word-stream tags under DOMAIN_EXPERIMENT
_TAG_METRICS_WORDS = 1
_TAG_RELIABILITY_WORDS = 2
_TAG_WORST_BASES = 3
_TAG_WORST_FLIPS = 4
_TAG_SNR_WORDS = 5
_TAG_SAC_DRAWS = 6


def standard_conditions() -> tuple[DeviceParams, Environment]:
    """Device population and read corner used for all headline evaluations.

    The 0.015 eV activation energy is a behavioral fit: together with the
    10 K temperature jitter and the 1/30 supply jitter it reproduces the
    published reliability band (2-5% error at CS=1 falling below ~2% at
    CS=5 with a 20 nA sense margin).
    """
    dev = DeviceParams(
        mu_ln_r=math.log(316227.7660168379),
        sigma_ln_r=0.5874,
        stuck_on_prob=0.10,
        lrs_range=(1e3, 1e4),
        nonlin_alpha=2.0,
        activation_energy=0.015,
        ref_voltage=0.1,
        ref_temperature=300.0,
    )
    env = Environment(
        read_voltage=0.1,
        temperature=300.0,
        supply_sigma_frac=0.1 / 3.0,
        temp_jitter=10.0,
    )
    return dev, env


def experiment_words(master_seed: int, tag: int, count: int, index: int = 0) -> np.ndarray:
    """Deterministic uint64 challenge words for one experiment sub-stream."""
    key = derive_key_int(DOMAIN_EXPERIMENT, master_seed, tag, index)
    return streams.prf_u64(key, np.arange(count, dtype=np.uint64))


def _experiment_rng(master_seed: int, tag: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(derive_key_int(DOMAIN_EXPERIMENT, master_seed, tag, index))


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _standard_device() -> DeviceParams:
    return standard_conditions()[0]


def _standard_environment() -> Environment:
    return standard_conditions()[1]


@dataclass(frozen=True)
class ExperimentConfig:
    """Full parameter set of one experiment run.

    JSON layout groups the fields (array, comparator, counts, device,
    environment, power, reliability, sac, snr); ``from_dict`` rejects unknown
    keys so a typo cannot silently fall back to a default.
    """

    kind: str
    master_seed: int = 1
    rows: int = 128
    cols: int = 128
    cs: int = 5
    offset_sigma: float = 5e-9
    sense_margin: float = 2e-8
    instances: int = 10
    challenges: int = 1000
    trials: int = 1
    bits_per_vector: int = 64
    device: DeviceParams = field(default_factory=_standard_device)
    environment: Environment = field(default_factory=_standard_environment)
    power: PowerParams = field(default_factory=PowerParams)
    cs_sweep: tuple[int, ...] = (1, 2, 3, 4, 5)
    margin_sweep: tuple[float, ...] = (1e-8, 2e-8, 4e-8, 6e-8, 8e-8, 1e-7)
    dummy_sweep: tuple[int, ...] = (0, 1, 2, 4, 8, 16, 32)
    sac_samples: int = 200
    sac_max_k: int = 2
    worst_sets: int = 32
    worst_hd: int = 5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        for name in ("master_seed", "rows", "cols", "cs", "instances",
                     "challenges", "trials", "bits_per_vector", "sac_samples",
                     "worst_sets", "worst_hd"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"{name} must be an integer")
        if self.master_seed < 0:
            raise ValueError("master_seed cannot be negative")
        if self.rows < 2 or self.cols < 1:
            raise ValueError("array needs at least 2 rows and 1 column")
        if not 1 <= self.cs <= self.cols:
            raise ValueError("cs must be in [1, cols]")
        if min(self.instances, self.challenges, self.trials, self.sac_samples,
               self.worst_sets) < 1:
            raise ValueError("counts must be positive")
        if not 1 <= self.bits_per_vector <= 64:
            raise ValueError("bits_per_vector must be in [1, 64]")
        if not 1 <= self.worst_hd <= 64:
            raise ValueError("worst_hd must be in [1, 64]")
        if not 0 <= self.sac_max_k <= 2:
            raise ValueError("sac_max_k must be 0, 1 or 2")
        if len(self.cs_sweep) == 0 or any(
            not 1 <= c <= self.cols for c in self.cs_sweep
        ):
            raise ValueError("cs_sweep values must lie in [1, cols]")
        if len(self.margin_sweep) == 0 or min(self.margin_sweep) < 0:
            raise ValueError("margin_sweep values cannot be negative")
        if len(self.dummy_sweep) == 0 or min(self.dummy_sweep) < 0:
            raise ValueError("dummy_sweep values cannot be negative")
        # sweep tables are keyed by these values; force strict ordering
        for name in ("cs_sweep", "margin_sweep", "dummy_sweep"):
            sweep = getattr(self, name)
            if any(b <= a for a, b in zip(sweep, sweep[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.offset_sigma < 0 or self.sense_margin < 0:
            raise ValueError("comparator parameters cannot be negative")

    @classmethod
    def standard(cls, kind: str, **overrides) -> "ExperimentConfig":
        """Defaults sized for the headline run of each experiment kind."""
        sized = {
            "metrics": dict(instances=100, challenges=1000, trials=1),
            "reliability": dict(instances=24, challenges=500, trials=50),
            "sac": dict(instances=10, challenges=500),
            "snr": dict(instances=10, challenges=2000),
        }
        if kind not in sized:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        merged = {**sized[kind], **overrides}
        return cls(kind=kind, **merged)

    def to_dict(self) -> dict:
        dev = {f.name: getattr(self.device, f.name) for f in fields(DeviceParams)}
        dev["lrs_range"] = list(self.device.lrs_range)
        return {
            "kind": self.kind,
            "master_seed": self.master_seed,
            "array": {"rows": self.rows, "cols": self.cols, "cs": self.cs},
            "comparator": {
                "offset_sigma": self.offset_sigma,
                "sense_margin": self.sense_margin,
            },
            "counts": {
                "instances": self.instances,
                "challenges": self.challenges,
                "trials": self.trials,
                "bits_per_vector": self.bits_per_vector,
            },
            "device": dev,
            "environment": {
                f.name: getattr(self.environment, f.name) for f in fields(Environment)
            },
            "power": {f.name: getattr(self.power, f.name) for f in fields(PowerParams)},
            "reliability": {
                "cs_sweep": list(self.cs_sweep),
                "margin_sweep": list(self.margin_sweep),
            },
            "sac": {
                "samples": self.sac_samples,
                "max_k": self.sac_max_k,
                "worst_sets": self.worst_sets,
                "worst_hd": self.worst_hd,
            },
            "snr": {"dummy_sweep": list(self.dummy_sweep)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        data = dict(data)
        kwargs = {}

        def take(group: dict, key: str, dest: str, caster):
            if key in group:
                kwargs[dest] = caster(group.pop(key))

        def group(name: str) -> dict:
            g = data.pop(name, {})
            if not isinstance(g, dict):
                raise ValueError(f"config section {name!r} must be an object")
            return g

        def intval(v):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"expected an integer, got {v!r}")
            return v

        def floatval(v):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValueError(f"expected a number, got {v!r}")
            return float(v)

        def int_tuple(v):
            if not isinstance(v, (list, tuple)):
                raise ValueError(f"expected a list, got {v!r}")
            return tuple(intval(x) for x in v)

        def float_tuple(v):
            if not isinstance(v, (list, tuple)):
                raise ValueError(f"expected a list, got {v!r}")
            return tuple(floatval(x) for x in v)

        take(data, "kind", "kind", str)
        take(data, "master_seed", "master_seed", intval)
        for name, g in (("array", group("array")),):
            take(g, "rows", "rows", intval)
            take(g, "cols", "cols", intval)
            take(g, "cs", "cs", intval)
            if g:
                raise ValueError(f"unknown keys in {name!r}: {sorted(g)}")
        g = group("comparator")
        take(g, "offset_sigma", "offset_sigma", floatval)
        take(g, "sense_margin", "sense_margin", floatval)
        if g:
            raise ValueError(f"unknown keys in 'comparator': {sorted(g)}")
        g = group("counts")
        take(g, "instances", "instances", intval)
        take(g, "challenges", "challenges", intval)
        take(g, "trials", "trials", intval)
        take(g, "bits_per_vector", "bits_per_vector", intval)
        if g:
            raise ValueError(f"unknown keys in 'counts': {sorted(g)}")

        g = group("device")
        dev_kwargs = {}
        for f in fields(DeviceParams):
            if f.name in g:
                raw = g.pop(f.name)
                if f.name == "lrs_range":
                    dev_kwargs[f.name] = tuple(float_tuple(raw))
                else:
                    dev_kwargs[f.name] = floatval(raw)
        if g:
            raise ValueError(f"unknown keys in 'device': {sorted(g)}")
        base_dev = _standard_device()
        kwargs["device"] = replace(base_dev, **dev_kwargs) if dev_kwargs else base_dev

        g = group("environment")
        env_kwargs = {f.name: floatval(g.pop(f.name)) for f in fields(Environment)
                      if f.name in g}
        if g:
            raise ValueError(f"unknown keys in 'environment': {sorted(g)}")
        base_env = _standard_environment()
        kwargs["environment"] = (
            replace(base_env, **env_kwargs) if env_kwargs else base_env
        )

        g = group("power")
        pow_kwargs = {f.name: floatval(g.pop(f.name)) for f in fields(PowerParams)
                      if f.name in g}
        if g:
            raise ValueError(f"unknown keys in 'power': {sorted(g)}")
        kwargs["power"] = PowerParams(**pow_kwargs)

        g = group("reliability")
        take(g, "cs_sweep", "cs_sweep", int_tuple)
        take(g, "margin_sweep", "margin_sweep", float_tuple)
        if g:
            raise ValueError(f"unknown keys in 'reliability': {sorted(g)}")
        g = group("sac")
        take(g, "samples", "sac_samples", intval)
        take(g, "max_k", "sac_max_k", intval)
        take(g, "worst_sets", "worst_sets", intval)
        take(g, "worst_hd", "worst_hd", intval)
        if g:
            raise ValueError(f"unknown keys in 'sac': {sorted(g)}")
        g = group("snr")
        take(g, "dummy_sweep", "dummy_sweep", int_tuple)
        if g:
            raise ValueError(f"unknown keys in 'snr': {sorted(g)}")

        if data:
            raise ValueError(f"unknown config keys: {sorted(data)}")
        if "kind" not in kwargs:
            raise ValueError("config needs a 'kind'")
        return cls(**kwargs)

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return ExperimentConfig.from_json(fh.read())


def canonical_json(obj) -> str:
    """Stable byte layout: sorted keys, no whitespace, NaN forbidden."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    return obj


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    """Experiment output: the exact config echoed back plus the results."""

    kind: str
    config: dict
    results: dict

    def to_json(self) -> str:
        return canonical_json(
            {
                "format": REPORT_FORMAT,
                "version": REPORT_VERSION,
                "kind": self.kind,
                "config": self.config,
                "results": self.results,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        data = json.loads(text)
        if data.get("format") != REPORT_FORMAT:
            raise ValueError("not a report file")
        if data.get("version") != REPORT_VERSION:
            raise ValueError(f"unsupported report version {data.get('version')!r}")
        return cls(data["kind"], data["config"], data["results"])


def _flat_rows(value) -> bool:
    return (
        isinstance(value, list)
        and len(value) > 0
        and all(
            isinstance(r, dict)
            and all(not isinstance(v, dict) for v in r.values())
            for r in value
        )
    )


def _csv_cell(value):
    return json.dumps(value) if isinstance(value, list) else value


def write_report(report: Report, out_dir, fmt: str = "json") -> list:
    """Write the report under out_dir; returns the written paths."""
    import pathlib

    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        path = out / f"{report.kind}_report.json"
        path.write_text(report.to_json() + "\n", encoding="utf-8")
        written.append(path)
    elif fmt == "csv":
        import csv as _csv

        cfg_path = out / f"{report.kind}_config.json"
        cfg_path.write_text(canonical_json(report.config) + "\n", encoding="utf-8")
        written.append(cfg_path)
        scalars = {}

        def walk(prefix, value):
            if _flat_rows(value):
                path = out / f"{report.kind}_{prefix}.csv"
                with open(path, "w", newline="", encoding="utf-8") as fh:
                    w = _csv.writer(fh)
                    keys = sorted(value[0])
                    w.writerow(keys)
                    for row in value:
                        w.writerow([_csv_cell(row.get(k, "")) for k in keys])
                written.append(path)
            elif isinstance(value, dict):
                for k in sorted(value):
                    walk(f"{prefix}_{k}" if prefix else k, value[k])
            elif isinstance(value, list):
                scalars[prefix] = json.dumps(value)
            else:
                scalars[prefix] = value

        walk("", report.results)
        path = out / f"{report.kind}_summary.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = _csv.writer(fh)
            w.writerow(["metric", "value"])
            for k in sorted(scalars):
                w.writerow([k, scalars[k]])
        written.append(path)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return written


# ---------------------------------------------------------------------------
# shared run helpers
# ---------------------------------------------------------------------------


def _build_puf(config: ExperimentConfig, index: int, cs: int | None = None) -> PufInstance:
    seed = derive_instance_seed(config.master_seed, index)
    return make_instance(
        config.device,
        seed,
        rows=config.rows,
        cols=config.cols,
        cs=config.cs if cs is None else cs,
        offset_sigma=config.offset_sigma,
        sense_margin=config.sense_margin,
    )


def _with_settings(puf: PufInstance, cs: int, margin: float) -> PufInstance:
    """Same arrays and offsets under a different CS width / sense margin."""
    comp_a = ComparatorParams(puf.comp_a.offset_sigma, margin, puf.comp_a.offset_value)
    comp_b = ComparatorParams(puf.comp_b.offset_sigma, margin, puf.comp_b.offset_value)
    return PufInstance(
        puf.cba_a, puf.cba_b, puf.dummy, comp_a, comp_b, cs, puf.instance_seed,
        hidden_bits=puf.hidden_bits,
    )


def _pool_map(fn, jobs, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs, chunksize=1))


def _worst_case_sets(config: ExperimentConfig, index: int = 0) -> np.ndarray:
    """Challenge sets whose members sit within worst_hd bit flips of a base."""
    n = config.bits_per_vector
    bases = experiment_words(config.master_seed, _TAG_WORST_BASES,
                             config.worst_sets, index)
    rng = _experiment_rng(config.master_seed, _TAG_WORST_FLIPS, index)
    sets = np.empty((config.worst_sets, n), dtype=np.uint64)
    for s in range(config.worst_sets):
        base = bases[s]
        members = {int(base)}
        sets[s, 0] = base
        i = 1
        while i < n:
            hd = 1 + int(rng.integers(config.worst_hd))
            mask = 0
            for pos in rng.choice(64, size=hd, replace=False):
                mask |= 1 << int(pos)
            cand = int(base) ^ mask
            if cand in members:
                continue
            members.add(cand)
            sets[s, i] = np.uint64(cand)
            i += 1
    return sets


def _quiet_pair(puf: PufInstance, env: Environment) -> tuple[PufInstance, Environment]:
    return noise_free_variant(puf), Environment(
        read_voltage=env.read_voltage, temperature=env.temperature
    )


def _spearman(xs, ys) -> float:
    """Rank correlation without ties (sweep points are distinct)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    rx = np.argsort(np.argsort(xs)).astype(float)
    ry = np.argsort(np.argsort(ys)).astype(float)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float((rx**2).sum()) * float((ry**2).sum()))
    if denom == 0.0:
        raise ValueError("rank correlation undefined for constant input")
    return float((rx * ry).sum()) / denom


# ---------------------------------------------------------------------------
# metrics suite
# ---------------------------------------------------------------------------


def _metrics_job(args) -> tuple:
    config, index, words, worst = args
    puf = _build_puf(config, index)
    n = config.bits_per_vector
    grid = evaluate_grid(puf, words, config.environment, trials=config.trials)
    c_vec = len(words) // n
    bits = (
        grid["bit"].reshape(c_vec, n, config.trials).transpose(0, 2, 1)
    )  # (c, tr, n)
    quiet, env0 = _quiet_pair(puf, config.environment)
    wbits = evaluate_grid(quiet, worst.reshape(-1), env0)["bit"][:, 0]
    worst_uf = 100.0 * wbits.reshape(worst.shape).mean(axis=1)
    return bits.astype(np.uint8), worst_uf


def run_metrics_suite(config: ExperimentConfig, workers: int = 1) -> Report:
    """Population quality metrics over shared random challenge vectors.

    Uniformity, aliasing, uniqueness and diffuseness come from one
    (instances x vectors x trials x bits) response block; worst-case
    uniformity is measured separately on low-distance challenge sets,
    noise-free so the set structure is the only variable.
    """
    n = config.bits_per_vector
    c_vec = config.challenges // n
    if c_vec < 1:
        raise ValueError("challenges must cover at least one response vector")
    words = experiment_words(config.master_seed, _TAG_METRICS_WORDS, c_vec * n)
    worst = _worst_case_sets(config)
    jobs = [(config, i, words, worst) for i in range(config.instances)]
    results = _pool_map(_metrics_job, jobs, workers)

    block = np.stack([r[0] for r in results])  # (p, c, tr, n)
    records = ResponseRecord(block)
    p, c, tr = records.p, records.c, records.tr

    uf_values = 100.0 * block.reshape(p * c * tr, n).mean(axis=1)
    k = block.sum(axis=0, dtype=np.int64)  # (c, tr, n)
    pairs = p * (p - 1) // 2
    uq_slices = 100.0 * (k * (p - k)).sum(axis=2) / (pairs * n)  # (c, tr)
    ba_slices = 100.0 * k / p  # per (c, tr, bit) position
    df_values = np.array([diffuseness(records, i) for i in range(p)])
    worst_uf = np.stack([r[1] for r in results])  # (p, sets)

    hist_counts, hist_edges = np.histogram(uf_values, bins=25, range=(0.0, 100.0))

    def stat(a):
        return {"mean": float(np.mean(a)), "std": float(np.std(a))}

    results_dict = {
        "population": p,
        "challenge_vectors": c,
        "trials": tr,
        "bits_per_vector": n,
        "uniformity": stat(uf_values),
        "worst_case_uniformity": {
            **stat(worst_uf),
            "sets": config.worst_sets,
            "max_hd": config.worst_hd,
        },
        "bit_aliasing": {"mean": mean_bit_aliasing(records),
                         "std": float(np.std(ba_slices))},
        "uniqueness": {"mean": uniqueness(records), "std": float(np.std(uq_slices))},
        "diffuseness": stat(df_values),
        "uniformity_histogram": {
            "bin_edges": [float(e) for e in hist_edges],
            "counts": [int(v) for v in hist_counts],
        },
    }
    return Report("metrics", config.to_dict(), _jsonable(results_dict))


# ---------------------------------------------------------------------------
# reliability sweep
# ---------------------------------------------------------------------------


def _reliability_job(args) -> np.ndarray:
    config, index = args
    base = _build_puf(config, index)
    words = experiment_words(config.master_seed, _TAG_RELIABILITY_WORDS,
                             config.challenges, index)
    tr = config.trials
    pairs = tr * (tr - 1) // 2
    out = np.empty((len(config.cs_sweep), len(config.margin_sweep)))
    for ci, cs in enumerate(config.cs_sweep):
        for mi, margin in enumerate(config.margin_sweep):
            puf = _with_settings(base, cs, margin)
            bits = evaluate_grid(puf, words, config.environment, trials=tr)["bit"]
            k = bits.sum(axis=1, dtype=np.int64)
            out[ci, mi] = 100.0 * float((k * (tr - k)).sum()) / (pairs * len(words))
    return out


def run_reliability_sweep(config: ExperimentConfig, workers: int = 1) -> Report:
    """Mean bit error rate across CS widths and sense margins.

    Each instance sees its own challenge draw; one instance's crossbars are
    built once and re-read under every (cs, margin) pair, which is exactly
    how a physical sweep would reuse the same die.
    """
    if config.trials < 2:
        raise ValueError("reliability needs at least two trials per challenge")
    jobs = [(config, i) for i in range(config.instances)]
    per_instance = np.stack(_pool_map(_reliability_job, jobs, workers))
    mean_ber = per_instance.mean(axis=0)  # (cs, margin)
    rows = []
    for ci, cs in enumerate(config.cs_sweep):
        for mi, margin in enumerate(config.margin_sweep):
            ber = float(mean_ber[ci, mi])
            rows.append(
                {
                    "cs": cs,
                    "sense_margin": margin,
                    "mean_ber_percent": ber,
                    "reliability_percent": 100.0 - ber,
                }
            )
    results = {
        "instances": config.instances,
        "challenges": config.challenges,
        "trials": config.trials,
        "rows": rows,
    }
    return Report("reliability", config.to_dict(), _jsonable(results))


# ---------------------------------------------------------------------------
# avalanche / worst-case structure
# ---------------------------------------------------------------------------


def _random_selection(config: ExperimentConfig, rng: np.random.Generator) -> Selection:
    cols = tuple(int(c) for c in rng.choice(config.cols, size=config.cs, replace=False))
    rows = tuple(int(r) for r in rng.choice(config.rows, size=2, replace=False))
    return Selection(cols, (rows[0], rows[1]))


def _sac_job(args) -> dict:
    config, index = args
    puf = _build_puf(config, index)
    draw_key = derive_key_int(DOMAIN_EXPERIMENT, config.master_seed,
                              _TAG_SAC_DRAWS, index)
    ref = _random_selection(config, np.random.default_rng(draw_key))
    maps = {}
    for pipeline in ("dual", "single"):
        # same rng seed per pipeline: both see identical perturbed selections
        rng = np.random.default_rng(derive_key_int(draw_key, 1))
        maps[pipeline] = sac_map(
            puf, config.environment, ref,
            max_j=config.cs, max_k=config.sac_max_k,
            samples=config.sac_samples, rng=rng, pipeline=pipeline,
        )
    sets = _worst_case_sets(config, index)
    quiet, env0 = _quiet_pair(puf, config.environment)
    uf = {}
    for pipeline in ("dual", "single"):
        bits = evaluate_grid(
            quiet, sets.reshape(-1), env0, pipeline=pipeline, expand_mode="direct"
        )["bit"][:, 0]
        uf[pipeline] = 100.0 * bits.reshape(sets.shape).mean(axis=1)
    bases = experiment_words(config.master_seed, _TAG_SAC_DRAWS,
                             config.challenges, index + 1)
    chal_rates = {}
    for pipeline in ("dual", "single"):
        rates = []
        for hd in range(1, config.worst_hd + 1):
            rng = np.random.default_rng(derive_key_int(draw_key, 2, hd))
            rates.append(
                sac_challenge_test(puf, config.environment, bases, hd, rng,
                                   pipeline=pipeline)
            )
        chal_rates[pipeline] = rates
    return {
        "max_dev_dual": maps["dual"].max_deviation(),
        "max_dev_single": maps["single"].max_deviation(),
        "grid_dual": maps["dual"].grid,
        "grid_single": maps["single"].grid,
        "worst_uf_dual": float(uf["dual"].mean()),
        "worst_uf_single": float(uf["single"].mean()),
        # per-set closeness to 50; set skews are symmetric across sets, so the
        # plain mean washes out exactly the structure this probe looks for
        "worst_uf_mad_dual": float(np.abs(uf["dual"] - 50.0).mean()),
        "worst_uf_mad_single": float(np.abs(uf["single"] - 50.0).mean()),
        "challenge_rates_dual": chal_rates["dual"],
        "challenge_rates_single": chal_rates["single"],
    }


def run_sac_experiment(config: ExperimentConfig, workers: int = 1) -> Report:
    """Dual versus single pipeline under structured challenge pressure.

    Two probes per seed: selection-level transition maps (how often the
    output flips when j columns / k rows of the read address change), and
    worst-case uniformity over low-distance challenge sets routed through
    the locality-preserving decoder expansion.
    """
    jobs = [(config, i) for i in range(config.instances)]
    per_seed = _pool_map(_sac_job, jobs, workers)
    rows = [
        {
            "seed_index": i,
            "max_dev_dual": r["max_dev_dual"],
            "max_dev_single": r["max_dev_single"],
            "worst_uf_dual": r["worst_uf_dual"],
            "worst_uf_single": r["worst_uf_single"],
            "worst_uf_mad_dual": r["worst_uf_mad_dual"],
            "worst_uf_mad_single": r["worst_uf_mad_single"],
        }
        for i, r in enumerate(per_seed)
    ]
    grid_dual = np.nanmean(np.stack([r["grid_dual"] for r in per_seed]), axis=0)
    grid_single = np.nanmean(np.stack([r["grid_single"] for r in per_seed]), axis=0)
    chal_rows = [
        {
            "hd": hd,
            "rate_dual": float(
                np.mean([r["challenge_rates_dual"][hd - 1] for r in per_seed])
            ),
            "rate_single": float(
                np.mean([r["challenge_rates_single"][hd - 1] for r in per_seed])
            ),
        }
        for hd in range(1, config.worst_hd + 1)
    ]
    results = {
        "seeds": rows,
        "challenge_transition_rates": chal_rows,
        "aggregate": {
            "mean_max_dev_dual": float(np.mean([r["max_dev_dual"] for r in per_seed])),
            "mean_max_dev_single": float(
                np.mean([r["max_dev_single"] for r in per_seed])
            ),
            "worst_uf_mean_dual": float(
                np.mean([r["worst_uf_dual"] for r in per_seed])
            ),
            "worst_uf_mean_single": float(
                np.mean([r["worst_uf_single"] for r in per_seed])
            ),
            "worst_uf_mad_dual": float(
                np.mean([r["worst_uf_mad_dual"] for r in per_seed])
            ),
            "worst_uf_mad_single": float(
                np.mean([r["worst_uf_mad_single"] for r in per_seed])
            ),
        },
        "mean_map_dual": grid_dual,
        "mean_map_single": grid_single,
    }
    return Report("sac", config.to_dict(), _jsonable(results))


# ---------------------------------------------------------------------------
# power SNR sweep
# ---------------------------------------------------------------------------


def _snr_job(args) -> list:
    config, index = args
    puf = _build_puf(config, index)
    words = experiment_words(config.master_seed, _TAG_SNR_WORDS,
                             config.challenges, index)
    out = []
    for dummy in config.dummy_sweep:
        trace = collect_traces(
            puf, words, config.environment, dummy_count=dummy,
            power_params=config.power,
        )
        out.append(snr(trace))
    return out


def run_snr_sweep(config: ExperimentConfig, workers: int = 1) -> Report:
    """Leakage SNR as dummy-array activity is dialed up."""
    jobs = [(config, i) for i in range(config.instances)]
    per_seed = np.array(_pool_map(_snr_job, jobs, workers))  # (seeds, dummies)
    mean_snr = per_seed.mean(axis=0)
    rows = [
        {
            "dummy_count": d,
            "mean_snr": float(mean_snr[j]),
            "snr_per_seed": [float(v) for v in per_seed[:, j]],
        }
        for j, d in enumerate(config.dummy_sweep)
    ]
    results = {
        "seeds": config.instances,
        "challenges": config.challenges,
        "rows": rows,
        "spearman_rho": _spearman(config.dummy_sweep, mean_snr)
        if len(config.dummy_sweep) > 1
        else None,
    }
    return Report("snr", config.to_dict(), _jsonable(results))


_RUNNERS = {
    "metrics": run_metrics_suite,
    "reliability": run_reliability_sweep,
    "sac": run_sac_experiment,
    "snr": run_snr_sweep,
}


def run_experiment(config: ExperimentConfig, workers: int = 1) -> Report:
    return _RUNNERS[config.kind](config, workers)


# ---------------------------------------------------------------------------
# instance persistence
# ---------------------------------------------------------------------------


def _array_payload(arr: CrossbarArray) -> dict:
    return {
        "resistances": [[repr(float(v)) for v in row] for row in arr.resistances],
        "stuck": [[int(v) for v in row] for row in arr.stuck],
    }


def _array_from_payload(data: dict, device: DeviceParams) -> CrossbarArray:
    res = np.array(
        [[float(v) for v in row] for row in data["resistances"]], dtype=np.float64
    )
    stuck = np.array(data["stuck"], dtype=bool)
    return CrossbarArray(res, stuck, device)


def save_instance(puf: PufInstance, path) -> None:
    """Persist one instance as JSON: a header plus exact resistance matrices.

    Resistances are stored as shortest round-trip decimal strings, so a
    reloaded instance reproduces every response bit, not just statistics.
    """
    dev = puf.cba_a.params
    dev_dict = {f.name: getattr(dev, f.name) for f in fields(DeviceParams)}
    dev_dict["lrs_range"] = list(dev.lrs_range)
    payload = {
        "format": INSTANCE_FORMAT,
        "version": INSTANCE_VERSION,
        "instance_seed": int(puf.instance_seed),
        "cs": int(puf.cs),
        "rows": int(puf.rows),
        "cols": int(puf.cols),
        "hidden_bits": int(puf.hidden_bits),
        "device": dev_dict,
        "comparators": {
            "offset_sigma": puf.comp_a.offset_sigma,
            "sense_margin": puf.comp_a.sense_margin,
            "offset_a": puf.comp_a.offset_value,
            "offset_b": puf.comp_b.offset_value,
        },
        "arrays": {
            "a": _array_payload(puf.cba_a),
            "b": _array_payload(puf.cba_b),
            "dummy": _array_payload(puf.dummy),
        },
    }
    payload["checksum"] = hashlib.sha256(
        canonical_json(payload).encode("utf-8")
    ).hexdigest()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(payload) + "\n")


def load_instance(path) -> PufInstance:
    """Rebuild an instance from ``save_instance`` output, verifying integrity."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed instance file: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != INSTANCE_FORMAT:
        raise ValueError("not an instance file")
    if payload.get("version") != INSTANCE_VERSION:
        raise ValueError(
            f"unsupported instance version {payload.get('version')!r}, "
            f"expected {INSTANCE_VERSION}"
        )
    stored = payload.pop("checksum", None)
    if stored is None:
        raise ValueError("instance file has no checksum")
    actual = hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
    if actual != stored:
        raise ValueError("instance checksum mismatch, file corrupted or edited")
    try:
        dev_dict = dict(payload["device"])
        dev_dict["lrs_range"] = tuple(dev_dict["lrs_range"])
        device = DeviceParams(**dev_dict)
        comps = payload["comparators"]
        comp_a = ComparatorParams(
            comps["offset_sigma"], comps["sense_margin"], comps["offset_a"]
        )
        comp_b = ComparatorParams(
            comps["offset_sigma"], comps["sense_margin"], comps["offset_b"]
        )
        puf = PufInstance(
            _array_from_payload(payload["arrays"]["a"], device),
            _array_from_payload(payload["arrays"]["b"], device),
            _array_from_payload(payload["arrays"]["dummy"], device),
            comp_a,
            comp_b,
            payload["cs"],
            payload["instance_seed"],
            hidden_bits=payload["hidden_bits"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed instance file: {exc}") from exc
    if puf.rows != payload["rows"] or puf.cols != payload["cols"]:
        raise ValueError("instance header dimensions disagree with the matrices")
    return puf
