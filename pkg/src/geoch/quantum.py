"""Dense few-qubit quantum layer: states, lossy projectors, Bell operators.

Qubit 0 (party A) is the most significant tensor factor, and
``sigma_z |0> = |0>``. A detection of party X with setting vector ``b``
is represented by ``eta * (1 + b.sigma) / 2``, so a k-site joint
probability carries ``eta**k``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend as K
from .catalog import OUTCOMES, BellInequality, CorrelationInequality, coordinate_order
from .errors import NumericalError

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if abs(math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2) - 1.0) > 1e-12:
            raise ValueError(f"Bloch vector {self.as_tuple()} is not a unit vector")

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "BlochVector":
        return cls(math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))

    @classmethod
    def in_plane(cls, angle: float, plane: str) -> "BlochVector":
        if plane == "xy":
            return cls(math.cos(angle), math.sin(angle), 0.0)
        if plane == "xz":
            return cls(math.cos(angle), 0.0, math.sin(angle))
        raise ValueError(f"unknown plane {plane!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def sigma(self) -> np.ndarray:
        return self.x * SX + self.y * SY + self.z * SZ


# settings[party][setting - 1]
SettingsAssignment = Sequence[Sequence[BlochVector]]


def settings_from_angles(angles: Sequence[float], parties: int, per_party: int,
                         plane: str | None = None) -> list[list[BlochVector]]:
    """Inverse of the optimizer's angle layout (party-major, setting-minor)."""
    angles = list(angles)
    out, pos = [], 0
    for _ in range(parties):
        row = []
        for _ in range(per_party):
            if plane is None:
                row.append(BlochVector.from_angles(angles[pos], angles[pos + 1]))
                pos += 2
            else:
                row.append(BlochVector.in_plane(angles[pos], plane))
                pos += 1
        out.append(row)
    return out


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out


def projector(b: BlochVector, eta: float = 1.0) -> np.ndarray:
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if not isinstance(b, BlochVector):
        b = BlochVector(*b)
    return eta * 0.5 * (I2 + b.sigma())


def symdiff_operator(projectors: Sequence[np.ndarray]) -> np.ndarray:
    """Operator for ``P(X1 xor X2 xor ...)``: ``X + Y - 2 X Y`` applied recursively."""
    if len(projectors) < 1:
        raise ValueError("need at least one site")
    acc = np.asarray(projectors[0], dtype=np.complex128)
    for p in projectors[1:]:
        p = np.asarray(p, dtype=np.complex128)
        if p.shape != (2, 2):
            raise ValueError("site operators must be 2x2")
        ia, ib = np.eye(acc.shape[0]), np.eye(2)
        acc = np.kron(acc, ib) + np.kron(ia, p) - 2 * np.kron(acc, p)
    return acc


# --- states -------------------------------------------------------------

def state_vector(kind: str, params: Sequence[float] = ()) -> np.ndarray:
    """Pure three-qubit states.

    ``ghz(alpha)``: cos a |000> + sin a |111>;
    ``w(theta, phi)``: sin t cos p |001> + sin t sin p |010> + cos t |100>;
    ``epr``: |0> (|01> + |10>) / sqrt 2; ``product``: |000>.
    """
    psi = np.zeros(8, dtype=np.complex128)
    if kind == "ghz":
        (a,) = params
        psi[0], psi[7] = math.cos(a), math.sin(a)
    elif kind == "w":
        t, p = params
        psi[1], psi[2], psi[4] = math.sin(t) * math.cos(p), math.sin(t) * math.sin(p), math.cos(t)
    elif kind == "epr":
        psi[1] = psi[2] = 1 / math.sqrt(2)
    elif kind == "product":
        psi[0] = 1.0
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    return psi


def density(psi: np.ndarray, visibility: float = 1.0) -> np.ndarray:
    if not 0.0 <= visibility <= 1.0:
        raise ValueError("visibility must lie in [0, 1]")
    psi = np.asarray(psi, dtype=np.complex128)
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValueError("state vector is not normalized")
    d = psi.shape[0]
    return visibility * np.outer(psi, psi.conj()) + (1 - visibility) * np.eye(d) / d


def make_state(kind: str, params: Sequence[float] = (), visibility: float = 1.0) -> np.ndarray:
    """``v |psi><psi| + (1 - v) 1/8``."""
    return density(state_vector(kind, params), visibility)


GHZ_BASIS = np.eye(8, dtype=np.complex128)[:, [0, 7]]
W_EPR_BASIS = np.eye(8, dtype=np.complex128)[:, [1, 2, 4, 7]]


# --- operators ----------------------------------------------------------

def coefficient_tensor(ineq: BellInequality) -> tuple[np.ndarray, int]:
    """Flattened ``(m+1)**n`` tensor; slot 0 of a party means "not measured".

    Returns the tensor and ``m``, the largest settings count.
    """
    sc = ineq.scenario
    m = max(sc.settings)
    t = np.zeros((m + 1,) * sc.parties)
    for coord, c in ineq.terms().items():
        idx = [0] * sc.parties
        for p, s in coord:
            idx[p] = s
        t[tuple(idx)] += float(c)
    return t.ravel(), m


def correlation_tensor(ineq: CorrelationInequality) -> tuple[np.ndarray, int]:
    """Tensor over observables ``b.sigma`` with the ``(-1)**(k+1)`` sign folded in."""
    sc = ineq.scenario
    m = max(sc.settings)
    sign = (-1) ** (sc.parties + 1)
    t = np.zeros((m + 1,) * sc.parties)
    for s, c in ineq.terms:
        t[tuple(s)] += sign * float(c)
    return t.ravel(), m


def _ops_stack(settings: SettingsAssignment, m: int, eta: float, kind: str) -> np.ndarray:
    n = len(settings)
    ops = np.zeros((n, m + 1, 2, 2), dtype=np.complex128)
    for p, row in enumerate(settings):
        ops[p, 0] = I2
        for s, b in enumerate(row, start=1):
            ops[p, s] = projector(b, eta) if kind == "projector" else b.sigma()
    return ops


def _check_settings(settings, scenario):
    if len(settings) != scenario.parties or any(len(r) < k for r, k in zip(settings, scenario.settings)):
        raise ValueError("settings do not cover the scenario")


def bell_operator(ineq: BellInequality, settings: SettingsAssignment, eta: float = 1.0) -> np.ndarray:
    """``sum c * eta**k * (tensor product of projectors)``, identity on absent sites."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    _check_settings(settings, ineq.scenario)
    coeffs, m = coefficient_tensor(ineq)
    return K.bell_matrix(coeffs, _ops_stack(settings, m, eta, "projector"))


def correlation_operator(ineq: CorrelationInequality, settings: SettingsAssignment) -> np.ndarray:
    _check_settings(settings, ineq.scenario)
    coeffs, m = correlation_tensor(ineq)
    return K.bell_matrix(coeffs, _ops_stack(settings, m, 1.0, "observable"))


def _hermitian(op: np.ndarray, tol: float = 1e-12) -> bool:
    return op.ndim == 2 and op.shape[0] == op.shape[1] and np.allclose(op, op.conj().T, atol=tol, rtol=0)


def expectation(rho: np.ndarray, op: np.ndarray) -> float:
    rho, op = np.asarray(rho), np.asarray(op)
    if rho.shape != op.shape:
        raise ValueError("dimension mismatch")
    if not (_hermitian(rho) and _hermitian(op)):
        raise ValueError("expectation needs Hermitian inputs")
    val = np.einsum("ij,ji->", rho, op)
    if abs(val.imag) > 1e-10:
        raise NumericalError(f"trace has imaginary part {val.imag:.3e}")
    return float(val.real)


def lowest_eig(op: np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest eigenvalue and a unit eigenvector (cyclic Jacobi)."""
    op = np.asarray(op, dtype=np.complex128)
    if not _hermitian(op, 1e-10):
        raise ValueError("operator is not Hermitian")
    w, v, sweeps = K.jacobi_eigh(op, True)
    if sweeps < 0:
        raise NumericalError("Jacobi eigensolver did not converge in 100 sweeps")
    vec = v[:, 0]
    return float(w[0]), vec / np.linalg.norm(vec)


def eigenvalues(op: np.ndarray) -> np.ndarray:
    w, _, sweeps = K.jacobi_eigh(np.asarray(op, dtype=np.complex128), False)
    if sweeps < 0:
        raise NumericalError("Jacobi eigensolver did not converge in 100 sweeps")
    return w


def restrict_subspace(op: np.ndarray, basis) -> np.ndarray:
    """Matrix of ``<b_i| op |b_j>`` for orthonormal columns (or a list of vectors)."""
    b = np.asarray(basis, dtype=np.complex128)
    if isinstance(basis, (list, tuple)):
        b = b.T
    if b.shape[0] != op.shape[0]:
        raise ValueError("basis vectors do not match the operator dimension")
    if not np.allclose(b.conj().T @ b, np.eye(b.shape[1]), atol=1e-10, rtol=0):
        raise ValueError("basis is not orthonormal")
    return b.conj().T @ op @ b


# --- outcome statistics -------------------------------------------------

def outcome_strings(n: int) -> list[str]:
    out = [""]
    for _ in range(n):
        out = [o + ch for o in out for ch in OUTCOMES]
    return out


def outcome_distribution(rho: np.ndarray, settings: SettingsAssignment, eta: float,
                         setting_tuple: Sequence[int]) -> dict[str, float]:
    """Probabilities of every ``+``/``-``/``u`` string for one setting tuple.

    Each party is lost with probability ``1 - eta`` independently; detected
    parties get the Born-rule outcome of ``(1 +- b.sigma) / 2``.
    """
    n = len(setting_tuple)
    local = []
    for p, s in enumerate(setting_tuple):
        b = settings[p][s - 1]
        up = projector(b, 1.0)
        local.append({"+": eta * up, "-": eta * (I2 - up), "u": (1 - eta) * I2})
    out = {}
    for o in outcome_strings(n):
        op = kron_all(local[p][ch] for p, ch in enumerate(o))
        out[o] = max(0.0, float(np.einsum("ij,ji->", rho, op).real))
    return out


@dataclass
class CountTable:
    trials: int
    eta: float
    settings: list[list[BlochVector]]
    counts: dict[tuple[int, ...], dict[str, int]]

    def count(self, setting_tuple, outcome: str) -> int:
        return self.counts.get(tuple(setting_tuple), {}).get(outcome, 0)

    def as_mapping(self) -> dict:
        return {(s, o): n for s, row in self.counts.items() for o, n in row.items()}

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "eta": self.eta,
            "settings": [list(b.as_tuple()) for row in self.settings for b in row],
            "counts": {",".join(map(str, s)): dict(row) for s, row in sorted(self.counts.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"


def sample_counts(rho: np.ndarray, settings: SettingsAssignment, eta: float, trials: int,
                  seed: int, setting_tuples=None) -> CountTable:
    """Draw ``trials`` events per setting tuple by inverse CDF over joint outcomes.

    Randomness comes from numpy's PCG64 seeded with ``(seed, tuple index)``,
    so every tuple has its own reproducible stream.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = len(settings)
    if setting_tuples is None:
        import itertools
        setting_tuples = list(itertools.product(*[range(1, len(r) + 1) for r in settings]))
    strings = outcome_strings(n)
    counts = {}
    for k, st in enumerate(setting_tuples):
        dist = outcome_distribution(rho, settings, eta, st)
        cdf = np.cumsum([dist[o] for o in strings])
        cdf /= cdf[-1]
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k])))
        idx = np.searchsorted(cdf, rng.random(trials), side="right")
        hist = np.bincount(np.minimum(idx, len(strings) - 1), minlength=len(strings))
        counts[tuple(st)] = {o: int(c) for o, c in zip(strings, hist) if c}
    return CountTable(trials, eta, [list(r) for r in settings], counts)


def joint_probabilities(rho: np.ndarray, settings: SettingsAssignment, eta: float,
                        ineq: BellInequality) -> dict:
    """Detection probabilities ``P(X_i+, ...)`` for every coordinate of ``ineq``."""
    out = {}
    n = ineq.scenario.parties
    for coord in coordinate_order(ineq.scenario):
        mats = [I2] * n
        for p, s in coord:
            mats[p] = projector(settings[p][s - 1], eta)
        out[coord] = float(np.einsum("ij,ji->", rho, kron_all(mats)).real)
    return out
