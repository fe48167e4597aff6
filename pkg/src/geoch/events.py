"""Finite event algebra over local-hidden-variable sample spaces.

A sample space holds every deterministic assignment of binary outcomes to
the observables of a scenario. Points are numbered so that bit
``offset(party) + setting - 1`` of the point index holds the outcome of
that observable: party-major, setting-minor, little-endian. Events are
bitsets over point indices, stored as Python ints, and are immutable.

Extrema of linear expressions over LHV models are attained at point
masses (the expression is linear in the measure, so its minimum over the
simplex sits on a vertex). :func:`lhv_extrema` therefore just evaluates
the expression on every point, with exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import SizeError, SpaceMismatchError

MAX_OBSERVABLES = 24
_CHUNK = 1 << 16


@dataclass(frozen=True)
class SampleSpace:
    parties: int
    settings: tuple[int, ...]
    outcomes: int = 2

    def __post_init__(self):
        object.__setattr__(self, "settings", tuple(int(s) for s in self.settings))
        if self.parties < 1 or len(self.settings) != self.parties:
            raise ValueError("need one settings count per party and at least one party")
        if any(s < 1 for s in self.settings):
            raise ValueError("every party needs at least one setting")
        if self.outcomes != 2:
            raise ValueError("only binary outcomes are supported")
        if sum(self.settings) > MAX_OBSERVABLES:
            raise SizeError(f"sample space of 2^{sum(self.settings)} points exceeds 2^{MAX_OBSERVABLES}")

    @property
    def observables(self) -> int:
        return sum(self.settings)

    @property
    def size(self) -> int:
        return 1 << self.observables

    def bit(self, party: int, setting: int) -> int:
        """Bit position of observable ``setting`` (counted from 1) of ``party``."""
        if not 0 <= party < self.parties:
            raise IndexError(f"party {party} out of range")
        if not 1 <= setting <= self.settings[party]:
            raise IndexError(f"setting {setting} out of range for party {party}")
        return sum(self.settings[:party]) + setting - 1

    def assignment(self, point: int) -> tuple[tuple[int, ...], ...]:
        """Outcomes per party and setting for a point index."""
        if not 0 <= point < self.size:
            raise IndexError("point out of range")
        out, pos = [], 0
        for s in self.settings:
            out.append(tuple((point >> (pos + i)) & 1 for i in range(s)))
            pos += s
        return tuple(out)

    def point(self, assignment: Sequence[Sequence[int]]) -> int:
        idx, pos = 0, 0
        for s, values in zip(self.settings, assignment):
            if len(values) != s:
                raise ValueError("assignment shape does not match the space")
            for i, v in enumerate(values):
                idx |= (int(v) & 1) << (pos + i)
            pos += s
        return idx

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1


def build_space(parties: int, settings: Sequence[int], outcomes: int = 2) -> SampleSpace:
    return SampleSpace(parties, tuple(settings), outcomes)


@dataclass(frozen=True)
class Event:
    space: SampleSpace
    members: int

    def _check(self, other: "Event"):
        if not isinstance(other, Event):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatchError("events live in different sample spaces")
        return None

    def __xor__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Event(self.space, self.members ^ other.members)

    def __and__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Event(self.space, self.members & other.members)

    def __or__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Event(self.space, self.members | other.members)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Event(self.space, self.members & ~other.members)

    def __invert__(self):
        return complement(self)

    def __len__(self):
        return self.members.bit_count()

    def __contains__(self, point: int) -> bool:
        return bool((self.members >> point) & 1)

    def indicator(self) -> np.ndarray:
        """Boolean membership array over all points."""
        n = self.space.size
        raw = self.members.to_bytes((n + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return bits[:n].astype(bool)


def empty(space: SampleSpace) -> Event:
    return Event(space, 0)


def whole(space: SampleSpace) -> Event:
    return Event(space, space.full_mask)


def _bit_pattern(size: int, bit: int) -> int:
    # points whose index has `bit` set: runs of 2^bit ones with period 2^(bit+1)
    half = 1 << bit
    period = half << 1
    block = ((1 << half) - 1) << half
    reps = size // period
    repunit = ((1 << (period * reps)) - 1) // ((1 << period) - 1)
    return block * repunit


def elementary_event(space: SampleSpace, party: int, setting: int, outcome: int = 1) -> Event:
    """Points where ``party`` gets ``outcome`` (0 or 1) for ``setting`` (from 1)."""
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    mask = _bit_pattern(space.size, space.bit(party, setting))
    return Event(space, mask if outcome else space.full_mask ^ mask)


def sym_diff(x: Event, y: Event) -> Event:
    return x ^ y


def sym_diff_all(events: Iterable[Event]) -> Event:
    return reduce(sym_diff, events)


def complement(x: Event) -> Event:
    return Event(x.space, x.space.full_mask ^ x.members)


@dataclass(frozen=True)
class Measure:
    space: SampleSpace
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.space.size,):
            raise ValueError("one weight per point is required")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def uniform_measure(space: SampleSpace) -> Measure:
    return Measure(space, np.full(space.size, 1.0 / space.size))


def point_mass(space: SampleSpace, point: int) -> Measure:
    w = np.zeros(space.size)
    w[point] = 1.0
    return Measure(space, w)


def random_measure(space: SampleSpace, rng: np.random.Generator) -> Measure:
    w = rng.dirichlet(np.ones(space.size))
    return Measure(space, w / w.sum())


def prob(m: Measure, x: Event) -> float:
    if m.space != x.space:
        raise SpaceMismatchError("measure and event live in different sample spaces")
    return float(m.weights[x.indicator()].sum())


# An event identifier is (party, setting) with settings counted from 1.
EventId = tuple[int, int]


@dataclass(frozen=True)
class SeparationExpression:
    """``constant + sum(coefficient * P(e1 xor e2 xor ...))`` over elementary events."""

    terms: tuple[tuple[Fraction, tuple[EventId, ...]], ...]
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        clean = tuple((Fraction(c), tuple((int(p), int(s)) for p, s in ev)) for c, ev in self.terms)
        if any(not ev for _, ev in clean):
            raise ValueError("every term needs at least one event")
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "constant", Fraction(self.constant))

    def check(self, space: SampleSpace) -> None:
        for _, ev in self.terms:
            for p, s in ev:
                space.bit(p, s)

    def evaluate(self, m: Measure) -> float:
        total = float(self.constant)
        for c, ev in self.terms:
            x = sym_diff_all(elementary_event(m.space, p, s) for p, s in ev)
            total += float(c) * prob(m, x)
        return total

    def point_values(self, space: SampleSpace, points: np.ndarray) -> np.ndarray:
        """Integer values of ``scale * expr`` at the given points; see :func:`lhv_extrema`."""
        scale = self.scale
        acc = np.full(points.shape, int(self.constant * scale), dtype=np.int64)
        for c, ev in self.terms:
            parity = np.zeros(points.shape, dtype=np.int64)
            for p, s in ev:
                parity ^= (points >> space.bit(p, s)) & 1
            acc += int(c * scale) * parity
        return acc

    @property
    def scale(self) -> int:
        dens = [c.denominator for c, _ in self.terms] + [self.constant.denominator]
        return reduce(math.lcm, dens, 1)


def lhv_extrema(expr: SeparationExpression, space: SampleSpace) -> tuple[Fraction, Fraction]:
    """Exact minimum and maximum of ``expr`` over all deterministic assignments."""
    expr.check(space)
    lo = hi = None
    for start in range(0, space.size, _CHUNK):
        pts = np.arange(start, min(start + _CHUNK, space.size), dtype=np.int64)
        vals = expr.point_values(space, pts)
        a, b = int(vals.min()), int(vals.max())
        lo = a if lo is None else min(lo, a)
        hi = b if hi is None else max(hi, b)
    return Fraction(lo, expr.scale), Fraction(hi, expr.scale)
