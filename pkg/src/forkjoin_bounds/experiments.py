"""Parameter sweeps over service models and their CSV output.

Three presets are built in:

``table1``
    Five-node fork-join network, symmetric exponential mixture with
    ``a`` in {1, 1/2, 1/3, 1/4, 1/5}.
``table2``
    Same network, independent exponential services with mean 1 except
    node 4, whose mean runs over 1..10.
``table3``
    Tandem queues with scaled Erlang(r) services, r in 1..10. The preset
    uses n = 10 nodes: with unit exponentials (r = 1) that is the size whose
    expected cycle maximum equals the harmonic number H_10 = 2.928968.

Sweep point i is simulated with replication index i, so rows are independent
of each other and of the order in which they are computed.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import network
from .network import Topology
from .stochastic import (
    DEFAULT_SEED,
    BoundsReport,
    IndependentExponential,
    LinearMixture,
    ScaledErlang,
    ServiceModel,
    estimate_gamma,
    format_model,
    lower_bound,
    upper_bound,
)

__all__ = [
    "CSV_SCHEMA",
    "TABLE_NAMES",
    "ExperimentConfig",
    "preset",
    "load_config",
    "run_sweep",
    "bounds_only",
    "write_csv",
    "render_csv",
]

CSV_SCHEMA = "forkjoin-bounds-csv v1"
DEFAULT_CYCLES = 100_000
TABLE_NAMES = ("table1", "table2", "table3")
COLUMNS = ("lower", "gamma_hat", "upper", "upper_error", "upper_method", "stderr", "k", "seed")


@dataclass
class ExperimentConfig:
    """A named sweep: one topology, one model per sweep value."""

    name: str
    topology: Topology
    param_name: str
    params: list
    model_for: Callable[[object], ServiceModel]
    cycles: int = DEFAULT_CYCLES
    seed: int = DEFAULT_SEED
    upper_method: str = "auto"
    description: str = ""
    n: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.cycles < 1:
            raise ValueError("cycles must be at least 1")
        if self.seed is None:
            raise ValueError("a seed is required")
        for v in self.params:
            self.model_for(v)  # validates the sweep value

    def models(self) -> list[ServiceModel]:
        return [self.model_for(v) for v in self.params]


def _table1_model(a):
    return LinearMixture.symmetric(a, 5)


def _table2_model(mu):
    return IndependentExponential((1.0, 1.0, 1.0, float(mu), 1.0))


@dataclass(frozen=True)
class _Erlang:
    n: int

    def __call__(self, r):
        return ScaledErlang(int(r), self.n)


def preset(name: str, n: int | None = None) -> ExperimentConfig:
    """Built-in sweep configuration by name; ``n`` resizes the table3 tandem."""
    if name == "table1":
        return ExperimentConfig(
            "table1",
            network.fig1(),
            "a",
            [Fraction(1), Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 5)],
            _table1_model,
            description="dependent service times: symmetric exponential mixture",
        )
    if name == "table2":
        return ExperimentConfig(
            "table2",
            network.fig1(),
            "mean_tau4",
            [float(m) for m in range(1, 11)],
            _table2_model,
            description="fork-join network: exponential services, node 4 slowed down",
        )
    if name == "table3":
        n = 10 if n is None else n
        return ExperimentConfig(
            "table3",
            network.tandem(n),
            "r",
            list(range(1, 11)),
            _Erlang(n),
            description=f"tandem queues, n={n}: scaled Erlang services",
            n=n,
        )
    raise KeyError(f"unknown table {name!r}; choose from {', '.join(TABLE_NAMES)}")


def load_config(path: str | Path, n: int | None = None) -> ExperimentConfig:
    """Read a JSON sweep file layered over a preset.

    Keys: ``table`` (required), and optionally ``n``, ``cycles``, ``seed``,
    ``upper_method`` and ``sweep`` (list of parameter values; fractions may be
    given as strings such as ``"1/3"``). ``n`` passed here wins over the file.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if "table" not in data:
        raise ValueError(f"{path}: missing 'table' key")
    cfg = preset(data["table"], n if n is not None else data.get("n"))
    changes = {k: data[k] for k in ("cycles", "seed", "upper_method") if k in data}
    if "sweep" in data:
        conv = Fraction if cfg.param_name == "a" else (int if cfg.param_name == "r" else float)
        changes["params"] = [conv(v) for v in data["sweep"]]
    return replace(cfg, **changes)


def _run_point(args) -> BoundsReport:
    model, topology, cycles, seed, replication, upper_method = args
    return estimate_gamma(model, topology, cycles, seed, replication=replication, upper_method=upper_method)


def run_sweep(cfg: ExperimentConfig, jobs: int = 1) -> list[BoundsReport]:
    """Simulate every sweep point; results come back in sweep order."""
    tasks = [
        (model, cfg.topology, cfg.cycles, cfg.seed, i, cfg.upper_method) for i, model in enumerate(cfg.models())
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_point, tasks))
    return [_run_point(t) for t in tasks]


def bounds_only(model: ServiceModel, upper_method: str = "auto", seed: int = DEFAULT_SEED) -> BoundsReport:
    ub = upper_bound(model, upper_method, seed=seed)
    return BoundsReport(lower_bound(model), ub.value, ub.error, ub.method)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return f"{float(v):.6f}"


def _param_text(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return f"{float(v):.6f}"


def write_csv(stream, reports: list[BoundsReport], params: list, param_name: str, meta: dict) -> None:
    """CSV with ``#`` metadata lines, a header row, then one row per report."""
    stream.write(f"# {CSV_SCHEMA}\n")
    for key, value in meta.items():
        stream.write(f"# {key}: {value}\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow((param_name,) + COLUMNS)
    for p, rep in zip(params, reports):
        writer.writerow(
            [
                _param_text(p),
                _fmt(rep.lower),
                _fmt(rep.gamma_hat),
                _fmt(rep.upper),
                _fmt(rep.upper_error),
                rep.upper_method,
                _fmt(rep.stderr),
                _fmt(rep.k),
                _fmt(rep.seed),
            ]
        )


def topology_summary(t: Topology) -> str:
    edges = " ".join(f"{i}->{j}" for i, j in t.edges)
    return f"nodes={t.n} edges={edges or '(none)'}"


def render_csv(cfg: ExperimentConfig, reports: list[BoundsReport]) -> str:
    buf = io.StringIO()
    meta = {
        "experiment": cfg.name,
        "description": cfg.description,
        "topology": topology_summary(cfg.topology),
        "models": "; ".join(format_model(m).strip().replace("\n", " / ") for m in cfg.models()),
        "cycles": cfg.cycles,
        "seed": cfg.seed,
        "upper_method": cfg.upper_method,
    }
    write_csv(buf, reports, cfg.params, cfg.param_name, meta)
    return buf.getvalue()
