"""Optimization over measurement settings: visibilities, efficiencies, sweeps.

All searches use a seeded multi-start simplex method (adaptive
Nelder-Mead) over Bloch angles, two per setting or one when the settings
are confined to a plane. Each start is refined by restarting from its
best point until the value stops improving. Starts are independent, so
they run on a thread pool; the compiled kernel releases the GIL.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _backend as K
from . import quantum as q
from .catalog import BellInequality, CorrelationInequality
from .errors import NumericalError

VIOLATION_THRESHOLD = -1e-12
_MODES = {None: K.MODE_SPHERE, "xy": K.MODE_XY, "xz": K.MODE_XZ}


def worker_count() -> int:
    env = os.environ.get("GEOCH_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 64
    tolerance: float = 1e-8
    max_iterations: int = 2000
    seed: int = 0
    plane: str | None = None

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.plane not in _MODES:
            raise ValueError(f"plane must be one of None, 'xy', 'xz'; got {self.plane!r}")

    @property
    def mode(self) -> int:
        return _MODES[self.plane]

    def as_dict(self) -> dict:
        return {"starts": self.starts, "tolerance": self.tolerance,
                "max_iterations": self.max_iterations, "seed": self.seed, "plane": self.plane}


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    converged: int
    evaluations: int


def _local_search(problem, x0, cfg: OptimizerConfig):
    # The simplex stops on value spread, kept well below the reported
    # tolerance but above what double rounding can resolve.
    ftol = max(cfg.tolerance * 1e-4, 1e-14)
    x, f, _, ok = problem.minimize(x0, 0.5, ftol, 1e-9, cfg.max_iterations)
    for _ in range(8):
        x2, f2, _, ok2 = problem.minimize(x, 0.1, max(ftol * 1e-2, 1e-15), 1e-10, cfg.max_iterations)
        improved = f2 < f - ftol
        if f2 < f:
            x, f = x2, f2
        ok = ok or ok2
        if not improved:
            break
    return x, f, ok


def _random_start(rng: np.random.Generator, nvar: int, mode: int) -> np.ndarray:
    x = rng.uniform(0.0, 2 * math.pi, nvar)
    if mode == K.MODE_SPHERE:
        x[0::2] = np.arccos(rng.uniform(-1.0, 1.0, nvar // 2))
    return x


def multistart(factory: Callable[[], object], cfg: OptimizerConfig, warm: Sequence[np.ndarray] = (),
               starts: int | None = None, salt: int = 0) -> SearchResult:
    """Minimize the problem built by ``factory`` from warm and random starts.

    Start ``k`` draws its point from a generator seeded with
    ``(cfg.seed, salt, k)``, so results do not depend on the worker count.
    """
    n_random = cfg.starts if starts is None else starts
    probe = factory()
    nvar = probe.nvar
    x0s = [np.asarray(w, dtype=np.float64) for w in warm]
    for k in range(n_random):
        rng = np.random.default_rng([cfg.seed, salt, k])
        x0s.append(_random_start(rng, nvar, cfg.mode))

    def run(x0):
        prob = factory()
        x, f, ok = _local_search(prob, x0, cfg)
        return x, f, ok, prob.evaluations

    workers = min(worker_count(), len(x0s))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, x0s))
    else:
        results = [run(x0) for x0 in x0s]
    best = min(range(len(results)), key=lambda i: (results[i][1], i))
    converged = sum(1 for r in results if r[2] and math.isfinite(r[1]))
    if converged == 0:
        raise NumericalError("no optimizer start converged")
    x, f, _, _ = results[best]
    return SearchResult(x, f, converged, sum(r[3] for r in results))


def _density(psi) -> np.ndarray:
    a = np.asarray(psi, dtype=np.complex128)
    return q.density(a) if a.ndim == 1 else a


def _tensor(ineq):
    if isinstance(ineq, CorrelationInequality):
        coeffs, m = q.correlation_tensor(ineq)
        return coeffs, m, K.KIND_OBSERVABLE
    coeffs, m = q.coefficient_tensor(ineq)
    return coeffs, m, K.KIND_PROJECTOR


def _state_factory(ineq, rho, eta, cfg):
    coeffs, m, kind = _tensor(ineq)
    n = ineq.scenario.parties
    if rho.shape[0] != 1 << n:
        raise ValueError("state dimension does not match the scenario")
    return lambda: K.Problem(coeffs, n, m, eta, cfg.mode, kind, "expect", rho=rho)


def _eig_factory(ineq, basis, eta, cfg):
    coeffs, m, kind = _tensor(ineq)
    n = ineq.scenario.parties
    return lambda: K.Problem(coeffs, n, m, eta, cfg.mode, kind, "eig", basis=basis)


def settings_of(ineq, x, cfg: OptimizerConfig):
    return q.settings_from_angles(x, ineq.scenario.parties, max(ineq.scenario.settings), cfg.plane)


def min_expectation(ineq, psi, eta: float = 1.0, cfg: OptimizerConfig = OptimizerConfig(),
                    warm: Sequence[np.ndarray] = ()):
    """Minimal ``<B(eta)>`` over settings for a state; returns ``(settings, value, angles)``."""
    rho = _density(psi)
    res = multistart(_state_factory(ineq, rho, eta, cfg), cfg, warm)
    return settings_of(ineq, res.x, cfg), res.value, res.x


def min_eigenvalue(ineq, basis=None, eta: float = 1.0, cfg: OptimizerConfig = OptimizerConfig(),
                   warm: Sequence[np.ndarray] = (), starts: int | None = None):
    """Minimal lowest eigenvalue of ``B(eta)`` (optionally restricted to ``basis``)."""
    res = multistart(_eig_factory(ineq, basis, eta, cfg), cfg, warm, starts)
    return settings_of(ineq, res.x, cfg), res.value, res.x


def white_noise_value(ineq: BellInequality, eta: float = 1.0) -> float:
    """``<B(eta)>`` on the maximally mixed state: each k-site term is ``(eta/2)**k``."""
    return float(sum(float(c) * (eta / 2) ** len(coord) for coord, c in ineq.terms().items()))


def visibility_from(f_noise: float, f_state: float, bound: float = 0.0) -> float | None:
    """Critical mixing weight where ``v f_state + (1 - v) f_noise`` reaches ``bound``."""
    if not f_state < bound + VIOLATION_THRESHOLD or f_noise <= f_state:
        return None
    return min(1.0, max(0.0, (f_noise - bound) / (f_noise - f_state)))


@dataclass
class ViolationReport:
    inequality: str
    state: str
    eta: float
    settings: list[float]
    min_expectation: float
    white_noise: float
    v_crit: float | None
    robustness: float
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "inequality": self.inequality,
            "state": self.state,
            "eta": self.eta,
            "settings": [float(x) for x in self.settings],
            "min_expectation": self.min_expectation,
            "white_noise": self.white_noise,
            "v_crit": self.v_crit,
            "robustness": self.robustness,
            "optimizer": self.config,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def violation_report(ineq: BellInequality, psi, eta: float = 1.0, cfg: OptimizerConfig = OptimizerConfig(),
                     state_label: str = "", warm: Sequence[np.ndarray] = ()) -> ViolationReport:
    _, f, x = min_expectation(ineq, psi, eta, cfg, warm)
    f_noise = white_noise_value(ineq, eta)
    v = visibility_from(f_noise, f, float(ineq.lower_bound))
    return ViolationReport(ineq.name, state_label, eta, list(x), f, f_noise, v,
                           0.0 if v is None else 1.0 - v, cfg.as_dict())


def critical_visibility(ineq: BellInequality, psi, eta: float = 1.0,
                        cfg: OptimizerConfig = OptimizerConfig()) -> float | None:
    """``v_crit = f_I / (f_I - f_psi)``; None when the state shows no violation."""
    return violation_report(ineq, psi, eta, cfg).v_crit


def analytic_reference(kind: str, **params) -> float | None:
    """Closed forms for GHZ states and the CHM family.

    ``ghz_vcrit(alpha)``: ``1 / (2 sin 2a)``, None if ``sin 2a <= 1/2``;
    ``ghz_lambda(eta, theta)``: ``3/2 (1 - eta) + eta^2/2 (1 - sqrt(1 + 3 cos^2 theta))``;
    ``ghz_entropy(alpha)``: base-2 entropy of one qubit;
    ``w_epr_quartic(eta)``: ``3 eta (2 - 3 eta) / (32 (1 - eta))``.
    """
    if kind == "ghz_vcrit":
        s = math.sin(2 * params["alpha"])
        return None if s <= 0.5 else 1.0 / (2.0 * s)
    if kind == "ghz_lambda":
        eta, theta = params["eta"], params.get("theta", 0.0)
        if not 0.0 <= eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        return 1.5 * (1 - eta) + 0.5 * eta ** 2 * (1 - math.sqrt(1 + 3 * math.cos(theta) ** 2))
    if kind == "ghz_entropy":
        a = params["alpha"]
        return _binary_entropy(math.cos(a) ** 2)
    if kind == "w_epr_quartic":
        eta = params["eta"]
        if not 0.0 <= eta < 1.0:
            raise ValueError("eta must lie in [0, 1)")
        return 3 * eta * (2 - 3 * eta) / (32 * (1 - eta))
    raise ValueError(f"unknown reference {kind!r}")


def _binary_entropy(p: float) -> float:
    return 0.0 - sum(x * math.log2(x) for x in (p, 1.0 - p) if x > 0)


def entanglement_entropy(psi) -> float:
    """Base-2 entropy of party A's reduced state for a pure three-qubit state."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (8,) or abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValueError("expected a normalized three-qubit state vector")
    m = psi.reshape(2, 4)
    rho_a = m @ m.conj().T
    w, _, sweeps = K.jacobi_eigh(rho_a, False)
    if sweeps < 0:
        raise NumericalError("Jacobi eigensolver did not converge")
    # For a qubit the spectrum is (p, 1 - p); using the trace keeps pure cases exact.
    p = float(min(max(w[0], 0.0), 1.0))
    return _binary_entropy(p)


# --- critical detection efficiency ---------------------------------------

@dataclass
class EfficiencyResult:
    eta_crit: float | None
    scan: list[tuple[float, float]]
    bisection: list[tuple[float, float]]
    violated: bool

    def to_json(self) -> dict:
        return {"eta_crit": self.eta_crit, "violated": self.violated,
                "scan": [list(p) for p in self.scan]}


def critical_efficiency(ineq: BellInequality, target="full", cfg: OptimizerConfig = OptimizerConfig(),
                        scan_step: float = 0.02, resolution: float = 1e-4,
                        scan_from: float = 0.0) -> EfficiencyResult:
    """Smallest efficiency at which the minimum over settings turns negative.

    ``target`` is a state vector or density matrix (minimize ``<B(eta)>``),
    a 2-D array of orthonormal columns with ``('subspace', basis)``, or
    ``'full'`` (lowest eigenvalue over the whole space). A grid scan from
    ``eta = 1`` down to ``scan_from`` checks that violation happens on a
    single upper interval; bisection then refines to ``resolution``.
    Each grid point is warm-started from its neighbour and adds
    ``max(2, starts // 16)`` fresh random starts.
    """
    fine = cfg
    extra = max(2, cfg.starts // 16)
    if isinstance(target, str) and target == "full":
        factory = lambda eta: _eig_factory(ineq, None, eta, fine)  # noqa: E731
    elif isinstance(target, tuple) and target[0] == "subspace":
        basis = np.asarray(target[1], dtype=np.complex128)
        factory = lambda eta: _eig_factory(ineq, basis, eta, fine)  # noqa: E731
    else:
        rho = _density(target)
        factory = lambda eta: _state_factory(ineq, rho, eta, fine)  # noqa: E731

    cache: dict[float, tuple[float, np.ndarray]] = {}

    def g(eta, warm, salt, starts):
        key = round(eta, 12)
        if key not in cache:
            res = multistart(factory(eta), fine, warm, starts, salt)
            cache[key] = (res.value, res.x)
        return cache[key]

    f1, x1 = g(1.0, (), 0, cfg.starts)
    scan = [(1.0, f1)]
    if not f1 < VIOLATION_THRESHOLD:
        return EfficiencyResult(None, scan, [], False)
    xs = {1.0: x1}
    n_steps = int(round((1.0 - scan_from) / scan_step))
    x_prev = x1
    for k in range(1, n_steps + 1):
        eta = round(1.0 - k * scan_step, 12)
        f, x = g(eta, (x_prev,), k, extra)
        scan.append((eta, f))
        xs[eta] = x
        if f < VIOLATION_THRESHOLD:
            x_prev = x
    signs = [f < VIOLATION_THRESHOLD for _, f in scan]
    first_ok = signs.index(False) if False in signs else len(signs)
    if any(signs[first_ok:]):
        raise NumericalError("violation region is not a single interval ending at eta = 1",
                             scan=scan)
    if first_ok == len(signs):
        return EfficiencyResult(scan[-1][0], scan, [], True)
    hi, lo = scan[first_ok - 1][0], scan[first_ok][0]
    x_hi = xs[hi]
    bis = []
    salt = 10_000
    while hi - lo > resolution:
        mid = 0.5 * (hi + lo)
        salt += 1
        f, x = g(mid, (x_hi,), salt, extra)
        bis.append((mid, f))
        if f < VIOLATION_THRESHOLD:
            hi, x_hi = mid, x
        else:
            lo = mid
    return EfficiencyResult(hi, scan, bis, True)


# --- sweeps ---------------------------------------------------------------

@dataclass
class SweepRow:
    axis: float
    min_expectation: float
    v_crit: float | None
    robustness: float


def sweep(ineq: BellInequality, kind: str, params: Sequence[float], axis: str,
          values: Sequence[float], cfg: OptimizerConfig = OptimizerConfig(), eta: float = 1.0,
          warm_starts: int | None = None) -> list[SweepRow]:
    """Robustness along ``eta`` (fixed state) or ``alpha`` (GHZ family at fixed ``eta``).

    The first grid point uses ``cfg.starts`` random starts; later points
    are warm-started from the previous optimum plus ``warm_starts``
    random ones (default ``max(2, starts // 16)``).
    """
    if axis not in ("eta", "alpha"):
        raise ValueError("axis must be 'eta' or 'alpha'")
    if axis == "alpha" and kind != "ghz":
        raise ValueError("the alpha axis applies to the GHZ family")
    extra = max(2, cfg.starts // 16) if warm_starts is None else warm_starts
    rows, x_prev = [], None
    for k, val in enumerate(values):
        if axis == "eta":
            if not 0.0 <= val <= 1.0:
                raise ValueError("eta values must lie in [0, 1]")
            psi, e = q.state_vector(kind, params), val
        else:
            if not 0.0 <= val <= math.pi / 2:
                raise ValueError("alpha values must lie in [0, pi/2]")
            psi, e = q.state_vector("ghz", [val]), eta
        rho = q.density(psi)
        starts = cfg.starts if x_prev is None else extra
        res = multistart(_state_factory(ineq, rho, e, cfg), cfg, () if x_prev is None else (x_prev,),
                         starts, k)
        x_prev = res.x
        v = visibility_from(white_noise_value(ineq, e), res.value, float(ineq.lower_bound))
        rows.append(SweepRow(float(val), res.value, v, 0.0 if v is None else 1.0 - v))
    return rows


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    s = f"{x:.10f}"
    return "0.0000000000" if s == "-0.0000000000" else s


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axis", "min_expectation", "v_crit", "robustness"])
    for r in rows:
        w.writerow([_fmt(r.axis), _fmt(r.min_expectation), _fmt(r.v_crit), _fmt(r.robustness)])
    return buf.getvalue()
