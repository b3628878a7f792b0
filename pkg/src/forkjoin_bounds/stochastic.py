"""Service-time models, the mean cycle time bounds, and simulation estimates.

For i.i.d. cycles the mean cycle time γ satisfies

    max_i E[τ_i1]  <=  γ  <=  E[max_i τ_i1].

``lower_bound`` evaluates the left side analytically and ``upper_bound`` the
right side by closed form, quadrature or Monte Carlo.

Random streams
--------------
Every random draw comes from a PCG64 generator seeded by
``SeedSequence(seed, spawn_key=(purpose, replication, j))`` where ``j`` is the
0-based node (or mixing factor) index, ``purpose`` is ``SIMULATION`` or
``UPPER_MC`` and ``replication`` separates sweep points. Draws are generated
sequentially per stream, so results do not depend on chunking or on the order
in which replications are scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Union

import numpy as np
from scipy import integrate, special

from .dynamics import mean_cycle_estimate, run
from .network import ParseError, Topology

__all__ = [
    "DEFAULT_SEED",
    "SIMULATION",
    "UPPER_MC",
    "IndependentExponential",
    "ScaledErlang",
    "LinearMixture",
    "Deterministic",
    "ServiceModel",
    "UpperBound",
    "UpperBoundError",
    "BoundsReport",
    "make_streams",
    "sample",
    "draw",
    "lower_bound",
    "upper_bound",
    "gumbel_hartley_bound",
    "batch_means_stderr",
    "estimate_gamma",
    "parse_model",
    "format_model",
]

DEFAULT_SEED = 20240101
SIMULATION = 0
UPPER_MC = 1


def _harmonic(n: int) -> float:
    return math.fsum(1.0 / i for i in range(1, n + 1))


def _exp_draws(rng: np.random.Generator, size) -> np.ndarray:
    # inverse CDF; 1 - u lies in (0, 1] so the log is finite
    return -np.log1p(-rng.random(size))


@dataclass(frozen=True)
class IndependentExponential:
    """Independent exponential service times with the given means."""

    means: tuple[float, ...]

    def __post_init__(self):
        means = tuple(float(m) for m in self.means)
        if not means or not all(m > 0 and math.isfinite(m) for m in means):
            raise ValueError("exponential means must be positive and finite")
        object.__setattr__(self, "means", means)

    @property
    def n(self) -> int:
        return len(self.means)

    def mean_vector(self) -> np.ndarray:
        return np.array(self.means)

    def draw(self, streams, size: int) -> np.ndarray:
        return np.column_stack([_exp_draws(g, size) * m for g, m in zip(streams, self.means)])


@dataclass(frozen=True)
class ScaledErlang:
    """``τ = ξ / r`` with ξ ~ Erlang(r, rate 1), i.i.d. over n nodes; mean 1, variance 1/r."""

    r: int
    n: int

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError("Erlang shape r must be a positive integer")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("node count must be a positive integer")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "n", int(self.n))

    def mean_vector(self) -> np.ndarray:
        return np.ones(self.n)

    @property
    def variance(self) -> float:
        return 1.0 / self.r

    def draw(self, streams, size: int) -> np.ndarray:
        return np.column_stack([_exp_draws(g, (size, self.r)).sum(axis=1) / self.r for g in streams])


@dataclass(frozen=True)
class LinearMixture:
    """``τ_i = Σ_j a_ij ξ_j`` with i.i.d. unit-mean exponential factors ξ_j.

    Use :meth:`symmetric` for the family with ``a`` on the diagonal and
    ``(1 - a)/(n - 1)`` elsewhere.
    """

    coefficients: tuple[tuple[float, ...], ...]
    a: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.coefficients)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise ValueError("mixture coefficients must form a non-empty square matrix")
        if any(v < 0 or not math.isfinite(v) for row in rows for v in row):
            raise ValueError("mixture coefficients must be nonnegative and finite")
        if any(sum(row) <= 0 for row in rows):
            raise ValueError("every node needs a positive coefficient")
        object.__setattr__(self, "coefficients", rows)

    @classmethod
    def symmetric(cls, a, n: int = 5) -> "LinearMixture":
        a = _as_fraction(a)
        if n < 2:
            raise ValueError("the symmetric mixture needs at least two nodes")
        if not Fraction(1, n) <= a <= 1:
            raise ValueError(f"a must lie in [1/{n}, 1], got {a}")
        b = (1 - a) / (n - 1)
        rows = tuple(tuple(float(a if i == j else b) for j in range(n)) for i in range(n))
        return cls(rows, a=a)

    @property
    def n(self) -> int:
        return len(self.coefficients)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.coefficients)

    def mean_vector(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def is_diagonal(self) -> bool:
        m = self.matrix
        return bool(np.all(m[~np.eye(self.n, dtype=bool)] == 0))

    def symmetric_parts(self) -> tuple[float, float] | None:
        """``(a, b)`` when the matrix has one diagonal and one off-diagonal value."""
        m = self.matrix
        d = np.diag(m)
        off = m[~np.eye(self.n, dtype=bool)]
        if np.all(d == d[0]) and (off.size == 0 or np.all(off == off[0])):
            return float(d[0]), float(off[0]) if off.size else 0.0
        return None

    def draw(self, streams, size: int) -> np.ndarray:
        xi = [_exp_draws(g, size) for g in streams]
        m = self.matrix
        # fixed summation order: identical rows give bit-identical service times
        tau = np.zeros((size, self.n))
        for j in range(self.n):
            tau += xi[j][:, None] * m[:, j][None, :]
        return tau


@dataclass(frozen=True)
class Deterministic:
    """Constant service times (zero variance)."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals or not all(v >= 0 and math.isfinite(v) for v in vals):
            raise ValueError("deterministic service times must be nonnegative and finite")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    def mean_vector(self) -> np.ndarray:
        return np.array(self.values)

    def draw(self, streams, size: int) -> np.ndarray:
        return np.tile(np.array(self.values), (size, 1))


ServiceModel = Union[IndependentExponential, ScaledErlang, LinearMixture, Deterministic]


def _as_fraction(a) -> Fraction:
    if isinstance(a, Fraction):
        return a
    if isinstance(a, str):
        return Fraction(a.strip())
    return Fraction(a).limit_denominator(10**6)


def make_streams(seed: int, count: int, replication: int = 0, purpose: int = SIMULATION) -> list[np.random.Generator]:
    """One independent generator per node or factor, see the module docstring."""
    return [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(purpose, replication, j))))
        for j in range(count)
    ]


def draw(model: ServiceModel, streams, size: int) -> np.ndarray:
    """``size`` consecutive cycles of service times, shape ``(size, n)``."""
    if len(streams) != model.n and not isinstance(model, Deterministic):
        raise ValueError(f"model needs {model.n} streams, got {len(streams)}")
    return model.draw(streams, size)


def sample(model: ServiceModel, streams) -> np.ndarray:
    """One cycle's service-time vector; advances the streams."""
    return draw(model, streams, 1)[0]


def lower_bound(model: ServiceModel) -> float:
    """``‖E[T_1]‖``: the largest mean service time."""
    return float(np.max(model.mean_vector()))


class UpperBound(NamedTuple):
    value: float
    error: float
    method: str


class UpperBoundError(RuntimeError):
    """The requested precision was not reached; ``partial`` holds the best estimate."""

    def __init__(self, message: str, partial: UpperBound):
        super().__init__(message)
        self.partial = partial


def _closed_form(model: ServiceModel) -> float | None:
    if isinstance(model, Deterministic):
        return max(model.values)
    if isinstance(model, IndependentExponential) and len(set(model.means)) == 1:
        return model.means[0] * _harmonic(model.n)
    if isinstance(model, ScaledErlang) and model.r == 1:
        return _harmonic(model.n)
    if isinstance(model, LinearMixture):
        parts = model.symmetric_parts()
        if parts is not None and parts[0] >= parts[1]:
            # τ_i = (a - b) ξ_i + b Σ_j ξ_j, so max_i τ_i = (a - b) max_j ξ_j + b Σ_j ξ_j
            a, b = parts
            return (a - b) * _harmonic(model.n) + model.n * b
    return None


def _survival_parts(model: ServiceModel):
    """Per-component survival functions and tail integrals for independent models."""
    if isinstance(model, LinearMixture) and model.is_diagonal():
        model = IndependentExponential(tuple(np.diag(model.matrix)))
    if isinstance(model, IndependentExponential):
        means = np.array(model.means)

        def log_cdf(t):
            return np.sum(np.log(-np.expm1(-t / means)))

        def tail(t):
            return float(np.sum(means * np.exp(-t / means)))

        return log_cdf, tail, float(means.max())
    if isinstance(model, ScaledErlang):
        r, n = model.r, model.n

        def log_cdf(t):
            with np.errstate(divide="ignore"):
                return n * np.log(special.gammainc(r, r * t))

        def tail(t):
            # n * E[(τ - t)^+] for τ ~ Gamma(r, rate r)
            return float(n * (special.gammaincc(r + 1, r * t) - t * special.gammaincc(r, r * t)))

        return log_cdf, tail, 1.0
    return None


def _quadrature(model: ServiceModel, tol: float) -> UpperBound:
    parts = _survival_parts(model)
    if parts is None:
        raise ValueError(f"quadrature needs independent components with known CDFs, not {type(model).__name__}")
    log_cdf, tail, scale = parts
    cutoff = scale
    while tail(cutoff) > 1e-9 * min(1.0, tol / 1e-7):
        cutoff *= 1.5

    def integrand(t):
        if t <= 0:
            return 1.0
        return -math.expm1(log_cdf(t))

    value, err = integrate.quad(integrand, 0.0, cutoff, epsabs=1e-11, epsrel=1e-12, limit=500)
    total_err = err + tail(cutoff)
    result = UpperBound(value, total_err, "quadrature")
    if total_err > tol:
        raise UpperBoundError(f"quadrature error {total_err:.2e} exceeds tolerance {tol:.2e}", result)
    return result


def _monte_carlo(model: ServiceModel, n_samples: int, seed: int, precision: float | None, block: int = 10**6) -> UpperBound:
    streams = make_streams(seed, model.n, purpose=UPPER_MC)
    count = 0
    mean = 0.0
    m2 = 0.0
    while count < n_samples:
        size = min(block, n_samples - count)
        mx = draw(model, streams, size).max(axis=1)
        bmean = float(mx.mean())
        bm2 = float(((mx - bmean) ** 2).sum())
        total = count + size
        delta = bmean - mean
        mean += delta * size / total
        m2 += bm2 + delta**2 * count * size / total
        count = total
    stderr = math.sqrt(m2 / (count - 1) / count) if count > 1 else math.inf
    result = UpperBound(mean, stderr, "monte-carlo")
    if precision is not None and stderr > precision:
        raise UpperBoundError(
            f"Monte Carlo standard error {stderr:.2e} after {count} draws exceeds goal {precision:.2e}", result
        )
    return result


def upper_bound(
    model: ServiceModel,
    method: str = "auto",
    *,
    tol: float = 1e-7,
    n_samples: int = 10**7,
    seed: int = DEFAULT_SEED,
    precision: float | None = None,
) -> UpperBound:
    """``E‖T_1‖ = E[max_i τ_i1]`` with an error estimate.

    Parameters
    ----------
    method : {"auto", "closed-form", "quadrature", "monte-carlo"}
        ``auto`` prefers a closed form, then quadrature (independent
        components), then Monte Carlo.
    tol : float
        Absolute error budget for quadrature.
    n_samples, seed, precision
        Monte Carlo budget, seed and optional standard-error goal.

    Raises
    ------
    UpperBoundError
        If quadrature or Monte Carlo misses its precision goal. The partial
        estimate is attached.
    """
    if method == "auto":
        exact = _closed_form(model)
        if exact is not None:
            return UpperBound(exact, 0.0, "closed-form")
        if _survival_parts(model) is not None:
            return _quadrature(model, tol)
        return _monte_carlo(model, n_samples, seed, precision)
    if method == "closed-form":
        exact = _closed_form(model)
        if exact is None:
            raise ValueError(f"no closed form for {model!r}")
        return UpperBound(exact, 0.0, "closed-form")
    if method == "quadrature":
        return _quadrature(model, tol)
    if method == "monte-carlo":
        return _monte_carlo(model, n_samples, seed, precision)
    raise ValueError(f"unknown method {method!r}")


def gumbel_hartley_bound(mean: float, variance: float, k: int) -> float:
    """Upper bound on the expected maximum of k i.i.d. variables with the given moments."""
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    if k < 1:
        raise ValueError("k must be at least 1")
    return mean + (k - 1) / math.sqrt(2 * k - 1) * math.sqrt(variance)


def batch_means_stderr(norms: np.ndarray, batches: int = 20) -> float:
    """Standard error of ``‖x(k)‖/k`` from batch means of the per-cycle increments."""
    k = len(norms)
    batches = min(batches, k)
    if batches < 2:
        return math.nan
    inc = np.diff(norms, prepend=0.0)
    means = np.array([b.mean() for b in np.array_split(inc, batches)])
    return float(means.std(ddof=1) / math.sqrt(batches))


@dataclass
class BoundsReport:
    """Bounds on the mean cycle time, optionally with a simulation estimate."""

    lower: float
    upper: float
    upper_error: float
    upper_method: str
    gamma_hat: float | None = None
    stderr: float | None = None
    k: int | None = None
    seed: int | None = None
    replication: int = 0

    @property
    def bracketed(self) -> bool | None:
        """``lower <= gamma_hat <= upper``; None without a simulation estimate."""
        if self.gamma_hat is None:
            return None
        return self.lower <= self.gamma_hat <= self.upper

    def bracketed_within(self, nsigma: float = 3.0) -> bool | None:
        """``lower <= gamma_hat <= upper + nsigma * (stderr + upper_error)``."""
        if self.gamma_hat is None:
            return None
        slack = nsigma * ((self.stderr or 0.0) + self.upper_error)
        return self.lower <= self.gamma_hat <= self.upper + slack


def estimate_gamma(
    model: ServiceModel,
    t: Topology,
    k: int = 100_000,
    seed: int = DEFAULT_SEED,
    *,
    replication: int = 0,
    upper_method: str = "auto",
    upper_kwargs: dict | None = None,
    batches: int = 20,
) -> BoundsReport:
    """Simulate k cycles and report ``‖x(k)‖/k`` next to both bounds."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if model.n != t.n:
        raise ValueError(f"model has {model.n} nodes, topology has {t.n}")
    streams = make_streams(seed, model.n, replication=replication, purpose=SIMULATION)
    traj = run(t, draw(model, streams, k), k)
    ub = upper_bound(model, upper_method, **({"seed": seed} | (upper_kwargs or {})))
    return BoundsReport(
        lower=lower_bound(model),
        upper=ub.value,
        upper_error=ub.error,
        upper_method=ub.method,
        gamma_hat=mean_cycle_estimate(traj),
        stderr=batch_means_stderr(traj.norms, batches),
        k=k,
        seed=seed,
        replication=replication,
    )


def parse_model(text: str, n: int | None = None, source: str | None = None) -> ServiceModel:
    """Parse a model description.

    Accepted forms (the leading ``model`` keyword is optional)::

        model exponential m1 m2 ... mn
        model erlang r
        model mixture a
        model mixture-full            # followed by n rows of n coefficients
        model deterministic c1 ... cn

    ``erlang`` and ``mixture`` take their node count from ``n``.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line.split()))
    if not lines:
        raise ParseError("empty model description", None, source)
    lineno, head = lines[0]
    if head[0].lower() == "model":
        head = head[1:]
    if not head:
        raise ParseError("missing model kind", lineno, source)
    kind, args = head[0].lower(), head[1:]

    def numbers(tokens, ln, what):
        try:
            return [float(_as_fraction(tok)) for tok in tokens]
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{what} must be numbers, got {' '.join(tokens)!r}", ln, source) from None

    def need_n(ln):
        if n is None:
            raise ParseError(f"'{kind}' needs the node count of a topology", ln, source)
        return n

    def one_line():
        if len(lines) > 1:
            raise ParseError("unexpected extra line", lines[1][0], source)

    try:
        if kind == "exponential":
            one_line()
            means = numbers(args, lineno, "means")
            if n is not None and len(means) != n:
                raise ParseError(f"expected {n} means, got {len(means)}", lineno, source)
            return IndependentExponential(tuple(means))
        if kind == "deterministic":
            one_line()
            vals = numbers(args, lineno, "service times")
            if n is not None and len(vals) == 1:
                vals = vals * n
            if n is not None and len(vals) != n:
                raise ParseError(f"expected {n} service times, got {len(vals)}", lineno, source)
            return Deterministic(tuple(vals))
        if kind == "erlang":
            one_line()
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError("expected 'erlang r' with a positive integer r", lineno, source)
            return ScaledErlang(int(args[0]), need_n(lineno))
        if kind == "mixture":
            one_line()
            if len(args) != 1:
                raise ParseError("expected 'mixture a'", lineno, source)
            try:
                a = _as_fraction(args[0])
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"mixture weight is not a number: {args[0]!r}", lineno, source) from None
            return LinearMixture.symmetric(a, need_n(lineno))
        if kind == "mixture-full":
            vals = numbers(args, lineno, "coefficients")
            for ln, toks in lines[1:]:
                vals += numbers(toks, ln, "coefficients")
            size = n if n is not None else math.isqrt(len(vals))
            if len(vals) != size * size:
                raise ParseError(f"expected {size}x{size} coefficients, got {len(vals)}", lines[-1][0], source)
            rows = tuple(tuple(vals[i * size:(i + 1) * size]) for i in range(size))
            return LinearMixture(rows)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), lineno, source) from None
    raise ParseError(f"unknown model kind {kind!r}", lineno, source)


def _fmt_num(v: float) -> str:
    return repr(float(v))


def format_model(model: ServiceModel) -> str:
    if isinstance(model, IndependentExponential):
        return "model exponential " + " ".join(map(_fmt_num, model.means)) + "\n"
    if isinstance(model, ScaledErlang):
        return f"model erlang {model.r}\n"
    if isinstance(model, Deterministic):
        return "model deterministic " + " ".join(map(_fmt_num, model.values)) + "\n"
    if isinstance(model, LinearMixture):
        if model.a is not None:
            return f"model mixture {model.a}\n"
        rows = "\n".join(" ".join(map(_fmt_num, row)) for row in model.coefficients)
        return "model mixture-full\n" + rows + "\n"
    raise TypeError(f"not a service model: {model!r}")
