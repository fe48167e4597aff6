"""Catalog of CH-type inequalities and converters between their forms.

Four representations are used:

* :class:`SeparationInequality` -- sums of ``P(X1 xor X2 xor ...)`` on each side;
* :class:`BellInequality` -- coefficients over joint detection probabilities,
  stored canonically as ``f(P) >= lower_bound``;
* :class:`CorrelationInequality` -- coefficients over full correlators
  ``E = 2 P(xor) - 1``;
* :class:`CountInequality` -- coincidence counts over outcomes ``+``, ``-``, ``u``.

Parties are indexed from 0 and carry labels ``A``..``E``; settings are
counted from 1 so that ``(0, 2)`` reads as ``A2``. All coefficients are
exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from . import events as ev
from .errors import UnknownInequalityError

LABELS = "ABCDE"
OUTCOMES = "+-u"

Site = tuple[int, int]  # (party, setting)
Coordinate = tuple[Site, ...]


@dataclass(frozen=True)
class Scenario:
    settings: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        settings = tuple(int(s) for s in self.settings)
        labels = tuple(self.labels) or tuple(LABELS[: len(settings)])
        if not 1 <= len(settings) <= 5:
            raise ValueError("scenarios have between 1 and 5 parties")
        if len(labels) != len(settings) or len(set(labels)) != len(labels):
            raise ValueError("need one distinct label per party")
        if any(not 1 <= s <= 3 for s in settings):
            raise ValueError("between 1 and 3 settings per party")
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "labels", labels)

    @property
    def parties(self) -> int:
        return len(self.settings)

    def space(self) -> ev.SampleSpace:
        return ev.build_space(self.parties, self.settings)

    def party_index(self, party) -> int:
        if isinstance(party, str):
            if party not in self.labels:
                raise KeyError(f"party {party!r} not in scenario {''.join(self.labels)}")
            return self.labels.index(party)
        if not 0 <= party < self.parties:
            raise KeyError(f"party {party} not in scenario")
        return int(party)

    def site_label(self, site: Site) -> str:
        return f"{self.labels[site[0]]}{site[1]}"

    def coordinate_label(self, coord: Coordinate) -> str:
        return "".join(self.site_label(s) for s in coord)

    def as_dict(self) -> dict:
        return {"parties": self.parties, "settings": list(self.settings)}


TRIPARTITE = Scenario((2, 2, 2))
BIPARTITE = Scenario((2, 2))


def coordinate_order(scenario: Scenario) -> tuple[Coordinate, ...]:
    """Joint-probability coordinates in canonical order.

    For three parties with two settings each this is the 26-entry order
    singles, then pairs AB, BC, AC, then triples sorted by how many second
    settings they use. Other scenarios list subsets by size, party subsets
    lexicographically, then settings lexicographically.
    """
    n, st = scenario.parties, scenario.settings
    if st == (2, 2, 2):
        singles = [((p, s),) for p in range(3) for s in (1, 2)]
        pairs = [((a, i), (b, j)) for a, b in ((0, 1), (1, 2), (0, 2)) for i in (1, 2) for j in (1, 2)]
        triples = [((0, i), (1, j), (2, k)) for i, j, k in
                   [(1, 1, 1), (1, 1, 2), (1, 2, 1), (2, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2)]]
        return tuple(singles + pairs + triples)
    out = []
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            for combo in itertools.product(*[range(1, st[p] + 1) for p in subset]):
                out.append(tuple(zip(subset, combo)))
    return tuple(out)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def frac_str(x: Fraction) -> str:
    x = _frac(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class BellInequality:
    """``sum(c * P(coordinate)) >= lower_bound`` (and ``<= upper_bound`` if set)."""

    name: str
    scenario: Scenario
    coordinates: tuple[Coordinate, ...]
    coefficients: tuple[Fraction, ...]
    lower_bound: Fraction = Fraction(0)
    upper_bound: Fraction | None = None

    def __post_init__(self):
        if len(self.coordinates) != len(self.coefficients):
            raise ValueError("coefficients must align with coordinates")
        if len(set(self.coordinates)) != len(self.coordinates):
            raise ValueError("duplicate coordinates")
        object.__setattr__(self, "coefficients", tuple(_frac(c) for c in self.coefficients))
        object.__setattr__(self, "lower_bound", _frac(self.lower_bound))
        if self.upper_bound is not None:
            object.__setattr__(self, "upper_bound", _frac(self.upper_bound))

    @property
    def dimension(self) -> int:
        return len(self.coordinates)

    def coefficient(self, coord: Coordinate) -> Fraction:
        try:
            return self.coefficients[self.coordinates.index(tuple(coord))]
        except ValueError:
            return Fraction(0)

    def terms(self) -> dict[Coordinate, Fraction]:
        return {c: v for c, v in zip(self.coordinates, self.coefficients) if v}

    def value(self, probabilities: Mapping[Coordinate, float] | Sequence[float]) -> float:
        """Left-hand side for a map (or aligned vector) of joint probabilities."""
        if isinstance(probabilities, Mapping):
            return float(sum(float(c) * probabilities[k] for k, c in self.terms().items()))
        vec = np.asarray(probabilities, dtype=np.float64)
        return float(np.dot([float(c) for c in self.coefficients], vec))

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "scenario": self.scenario.as_dict(),
            "form": "probability",
            "coefficients": [
                {"sites": [[self.scenario.labels[p], s] for p, s in coord], "value": frac_str(c)}
                for coord, c in zip(self.coordinates, self.coefficients)
            ],
            "lower_bound": frac_str(self.lower_bound),
        }
        if self.upper_bound is not None:
            out["upper_bound"] = frac_str(self.upper_bound)
        return out


@dataclass(frozen=True)
class SeparationInequality:
    """``sum(lhs) >= sum(rhs)``; each term is ``(coefficient, events)``."""

    name: str
    scenario: Scenario
    lhs: tuple[tuple[Fraction, tuple[Site, ...]], ...]
    rhs: tuple[tuple[Fraction, tuple[Site, ...]], ...] = ()

    def __post_init__(self):
        space = self.scenario.space()
        for side in ("lhs", "rhs"):
            terms = tuple((_frac(c), tuple((int(p), int(s)) for p, s in e)) for c, e in getattr(self, side))
            for _, e in terms:
                if not e:
                    raise ValueError("empty symmetric difference")
                for p, s in e:
                    space.bit(p, s)
            object.__setattr__(self, side, terms)

    def expression(self) -> ev.SeparationExpression:
        """``lhs - rhs`` as an expression; LHV-valid iff its minimum is >= 0."""
        return ev.SeparationExpression(
            tuple(self.lhs) + tuple((-c, e) for c, e in self.rhs))

    def terms(self):
        return [(c, e) for c, e in self.lhs] + [(-c, e) for c, e in self.rhs]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "scenario": self.scenario.as_dict(),
            "form": "separation",
            "coefficients": [
                {"sites": [[self.scenario.labels[p], s] for p, s in e], "value": frac_str(c)}
                for c, e in self.terms()
            ],
            "lower_bound": frac_str(Fraction(0)),
        }


@dataclass(frozen=True)
class CorrelationInequality:
    """``sum(c * E[settings]) >= lower_bound`` with ``E = 2 P(xor of all parties) - 1``.

    For ``k`` parties with +-1 outcomes (event = outcome +1) this
    correlator equals ``(-1)**(k+1)`` times the product of outcomes.
    """

    name: str
    scenario: Scenario
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]
    lower_bound: Fraction
    upper_bound: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((tuple(s), _frac(c)) for s, c in self.terms))
        object.__setattr__(self, "lower_bound", _frac(self.lower_bound))

    def expression(self) -> ev.SeparationExpression:
        """The left-hand side as a separation expression (for LHV enumeration)."""
        terms = tuple((2 * c, tuple(enumerate(s))) for s, c in self.terms)
        return ev.SeparationExpression(terms, -sum((c for _, c in self.terms), Fraction(0)))

    def lhv_extrema(self) -> tuple[Fraction, Fraction]:
        return ev.lhv_extrema(self.expression(), self.scenario.space())

    def label(self) -> str:
        parts = []
        for s, c in self.terms:
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append(("-" if c < 0 else "+") + mag + "E" + "".join(map(str, s)))
        return " ".join(parts).lstrip("+").strip() + f" >= {self.lower_bound}"

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "scenario": self.scenario.as_dict(),
            "form": "correlation",
            "coefficients": [
                {"sites": [[self.scenario.labels[p], k] for p, k in enumerate(s)], "value": frac_str(c)}
                for s, c in self.terms
            ],
            "lower_bound": frac_str(self.lower_bound),
        }
        if self.upper_bound is not None:
            out["upper_bound"] = frac_str(self.upper_bound)
        return out


@dataclass(frozen=True)
class CountInequality:
    """``sum(c * N[settings, outcomes]) >= bound`` over coincidence counts."""

    name: str
    scenario: Scenario
    terms: tuple[tuple[tuple[int, ...], str, int], ...]
    bound: int = 0

    def __post_init__(self):
        for s, o, _ in self.terms:
            if len(s) != self.scenario.parties or len(o) != self.scenario.parties:
                raise ValueError("count terms need one setting and outcome per party")
            if any(ch not in OUTCOMES for ch in o):
                raise ValueError(f"bad outcome string {o!r}")

    def value(self, counts: Mapping[tuple[tuple[int, ...], str], float]) -> float:
        """Sum of ``c * counts[(settings, outcomes)]``; missing entries count as 0."""
        return float(sum(c * counts.get((s, o), 0) for s, o, c in self.terms))

    def by_setting(self) -> dict[tuple[int, ...], list[tuple[str, int]]]:
        out: dict = {}
        for s, o, c in self.terms:
            out.setdefault(s, []).append((o, c))
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "scenario": self.scenario.as_dict(),
            "form": "count",
            "coefficients": [
                {"sites": [[self.scenario.labels[p], k] for p, k in enumerate(s)], "outcome": o,
                 "value": frac_str(Fraction(c))}
                for s, o, c in self.terms
            ],
            "lower_bound": frac_str(Fraction(self.bound)),
        }


def _xor_reduce(sites) -> tuple[Site, ...]:
    """Cancel repeated events (X xor X is empty) and sort by party, setting."""
    acc: set = set()
    for s in sites:
        acc ^= {tuple(s)}
    return tuple(sorted(acc))


def _bell_from_terms(name, scenario, terms: Mapping[Coordinate, Fraction], lower=0, upper=None):
    order = coordinate_order(scenario)
    extra = set(terms) - set(order)
    if extra:
        raise ValueError(f"coordinates outside the scenario: {sorted(extra)}")
    return BellInequality(name, scenario, order, tuple(_frac(terms.get(c, 0)) for c in order),
                          _frac(lower), None if upper is None else _frac(upper))


# --- named inequalities ---------------------------------------------------

def _tripartite_separation() -> SeparationInequality:
    one = Fraction(1)
    return SeparationInequality(
        "geometric_tripartite_ch", TRIPARTITE,
        lhs=((one, ((0, 1), (1, 2), (2, 2))), (one, ((0, 2), (1, 1), (2, 2))), (one, ((0, 2), (1, 2), (2, 1)))),
        rhs=((one, ((0, 1), (1, 1), (2, 1))),),
    )


def _bipartite_separation() -> SeparationInequality:
    one = Fraction(1)
    return SeparationInequality(
        "bipartite_ch", BIPARTITE,
        lhs=((one, ((0, 1), (1, 2))), (one, ((0, 2), (1, 1))), (one, ((0, 2), (1, 2)))),
        rhs=((one, ((0, 1), (1, 1))),),
    )


def _three_site() -> BellInequality:
    t = {}
    for pair in (((0, 1), (1, 1)), ((1, 1), (2, 1)), ((0, 1), (2, 1))):
        t[pair] = Fraction(1)
    trip = lambda i, j, k: ((0, i), (1, j), (2, k))  # noqa: E731
    for s in ((1, 2, 2), (2, 1, 2), (2, 2, 1)):
        t[trip(*s)] = Fraction(1)
    for s in ((1, 1, 2), (1, 2, 1), (2, 1, 1)):
        t[trip(*s)] = Fraction(-1)
    t[trip(1, 1, 1)] = Fraction(-2)
    return _bell_from_terms("three_site_ch", TRIPARTITE, t, 0)


def _full(labels: str, settings: str) -> tuple[Site, ...]:
    return tuple((LABELS.index(p), int(s)) for p, s in zip(labels, settings))


def _three_party_three_settings() -> SeparationInequality:
    sc = Scenario((3, 3, 3))
    lhs = [(1, _full("ABC", s)) for s in ("123", "333", "312", "222", "231")]
    return SeparationInequality("three_party_three_settings", sc, tuple(lhs), ((1, _full("ABC", "111")),))


def _four_party_three_settings() -> SeparationInequality:
    # The right-hand term is listed as A2 D2 B2 C2; order inside xor is immaterial.
    sc = Scenario((3, 3, 3, 3))
    lhs = [(1, _full("ABCD", s)) for s in ("1111", "1233", "3123", "3312", "2331")]
    return SeparationInequality("four_party_three_settings", sc, tuple(lhs), ((1, _full("ABCD", "2222")),))


APPENDIX_D_SUBSTITUTIONS = {
    4: ("1112", "1121", "1122", "1221", "1212", "1211", "2121", "2112", "2211"),
    5: ("11122", "11212", "11221", "12211", "12121", "12112", "21211", "21121", "22111"),
}


def appendix_d_events(n: int) -> dict[str, tuple[Site, ...]]:
    """The X, Y events of the matrix construction for ``n`` = 4 or 5 parties.

    ``X[i][j]`` are the substituted symmetric differences; ``Y[i]4`` xors
    row ``i``, ``Y4[j]`` xors column ``j`` and ``Y44`` xors the ``Y4j``.
    Repeated single-party events cancel.
    """
    if n not in APPENDIX_D_SUBSTITUTIONS:
        raise UnknownInequalityError(f"no matrix construction for {n} parties")
    labels = LABELS[:n]
    subs = APPENDIX_D_SUBSTITUTIONS[n]
    x = {(i, j): _full(labels, subs[3 * (i - 1) + (j - 1)]) for i in (1, 2, 3) for j in (1, 2, 3)}
    out = {f"X{i}{j}": _xor_reduce(v) for (i, j), v in x.items()}
    for i in (1, 2, 3):
        out[f"Y{i}4"] = _xor_reduce(itertools.chain(*(x[i, j] for j in (1, 2, 3))))
    for j in (1, 2, 3):
        out[f"Y4{j}"] = _xor_reduce(itertools.chain(*(x[i, j] for i in (1, 2, 3))))
    out["Y44"] = _xor_reduce(itertools.chain(*(out[f"Y4{j}"] for j in (1, 2, 3))))
    return out


def _appendix_d(n: int) -> SeparationInequality:
    e = appendix_d_events(n)
    lhs = [(1, e[f"X{i}{j}"]) for i in (1, 2, 3) for j in (1, 2, 3)] + [(1, e["Y44"])]
    rhs = [(1, e[f"Y{k}4"]) for k in (1, 2, 3)] + [(1, e[f"Y4{k}"]) for k in (1, 2, 3)]
    return SeparationInequality(f"appendix_d_{n}", Scenario((2,) * n), tuple(lhs), tuple(rhs))


def appendix_d_precondition(n: int) -> dict:
    """Check that ``Z44`` equals the xor of ``Z14, Z24, Z34`` on every point
    and that ``P(Z14) + P(Z24) + P(Z34) >= P(Z44)`` on every point mass."""
    space = Scenario((2,) * n).space()
    e = appendix_d_events(n)

    def event(sites):
        return ev.sym_diff_all(ev.elementary_event(space, p, s) for p, s in sites)

    def z(a, b, c):
        return (a & b) ^ (a & c) ^ (b & c)

    x = {k: event(v) for k, v in e.items() if k.startswith("X")}
    zs = [z(x[f"X{i}1"], x[f"X{i}2"], x[f"X{i}3"]) for i in (1, 2, 3)]
    y4 = [ev.sym_diff_all(x[f"X{i}{j}"] for i in (1, 2, 3)) for j in (1, 2, 3)]
    z44 = z(*y4)
    identity = z44 == ev.sym_diff_all(zs)
    ind = [zz.indicator().astype(np.int64) for zz in zs]
    inequality = bool(np.all(ind[0] + ind[1] + ind[2] >= z44.indicator().astype(np.int64)))
    return {"z44_is_xor": identity, "z_inequality": inequality}


_BELL = {"geometric_tripartite_ch", "three_site_ch", "bipartite_ch"}
_SEPARATION = {
    "geometric_tripartite_ch": _tripartite_separation,
    "bipartite_ch": _bipartite_separation,
    "three_party_three_settings": _three_party_three_settings,
    "four_party_three_settings": _four_party_three_settings,
    "appendix_d_4": lambda: _appendix_d(4),
    "appendix_d_5": lambda: _appendix_d(5),
}
NAMES = ("geometric_tripartite_ch", "three_site_ch", "bipartite_ch", "three_party_three_settings",
         "four_party_three_settings", "appendix_d_4", "appendix_d_5")


def make_separation(name: str) -> SeparationInequality:
    if name not in _SEPARATION:
        raise UnknownInequalityError(f"no separation form for {name!r}")
    return _SEPARATION[name]()


def make_named(name: str):
    """Catalog entry: probability form for the CH family, separation form otherwise."""
    if name == "three_site_ch":
        return _three_site()
    if name == "geometric_tripartite_ch":
        b = expand_separation(_tripartite_separation())
        return BellInequality(name, b.scenario, b.coordinates, b.coefficients, 0, 1)
    if name == "bipartite_ch":
        b = expand_separation(_bipartite_separation())
        return BellInequality(name, b.scenario, b.coordinates, b.coefficients, 0, 1)
    if name in _SEPARATION:
        return _SEPARATION[name]()
    raise UnknownInequalityError(f"unknown inequality {name!r}; known: {', '.join(NAMES)}")


def make_probability(name: str) -> BellInequality:
    """Probability form of any catalog entry (expanding separation forms)."""
    item = make_named(name)
    return item if isinstance(item, BellInequality) else expand_separation(item)


# --- converters -------------------------------------------------------------

def expand_separation(sep: SeparationInequality) -> BellInequality:
    """Expand each ``P(xor of k events)`` into joint probabilities.

    ``P(X1 xor ... xor Xk) = sum over nonempty subsets S of (-2)**(|S|-1) P(cap S)``.
    The collected vector is divided by the gcd of its coefficients, which
    leaves the direction and the zero bound unchanged.
    """
    acc: dict[Coordinate, Fraction] = {}
    for c, events in sep.terms():
        events = _xor_reduce(events)
        if len({p for p, _ in events}) != len(events):
            raise ValueError("a term uses two settings of the same party; no joint coordinate exists")
        for size in range(1, len(events) + 1):
            w = c * (-2) ** (size - 1)
            for subset in itertools.combinations(events, size):
                acc[subset] = acc.get(subset, Fraction(0)) + w
    acc = {k: v for k, v in acc.items() if v}
    nums = [v for v in acc.values()]
    g = _content(nums)
    if g:
        acc = {k: v / g for k, v in acc.items()}
    return _bell_from_terms(sep.name, sep.scenario, acc, 0)


def _content(values) -> Fraction:
    values = [Fraction(v) for v in values if v]
    if not values:
        return Fraction(0)
    num = reduce(math.gcd, (v.numerator for v in values))
    den = reduce(math.lcm, (v.denominator for v in values))
    return Fraction(num, den)


def to_correlation_form(sep: SeparationInequality) -> CorrelationInequality:
    """Substitute ``P(xor) = (1 + E) / 2`` in a full-arity separation inequality."""
    n = sep.scenario.parties
    coeffs: dict[tuple[int, ...], Fraction] = {}
    total = Fraction(0)
    for c, events in sep.terms():
        events = _xor_reduce(events)
        if sorted(p for p, _ in events) != list(range(n)):
            raise ValueError("correlation form needs one event per party in every term")
        key = tuple(s for _, s in events)
        coeffs[key] = coeffs.get(key, Fraction(0)) + c
        total += c
    # (sum c (1 + E)) / 2 >= 0  <=>  sum c E >= -sum c
    terms = tuple((k, v) for k, v in coeffs.items() if v)
    ci = CorrelationInequality(sep.name, sep.scenario, terms, -total)
    lo, hi = ci.lhv_extrema()
    return CorrelationInequality(sep.name, sep.scenario, terms, -total, hi)


def _eberhard_partners(n: int, coord: Coordinate) -> tuple[int, ...]:
    """Settings for the absent parties when a coordinate is lifted to full arity."""
    settings = dict(coord)
    if n == 2:
        if len(coord) == 1:
            (p, i), = coord
            settings[1 - p] = 3 - i
    else:
        if len(coord) == 1:
            (x, i), = coord
            settings[(x + 1) % 3] = i
            settings[(x + 2) % 3] = 3 - i
        elif len(coord) == 2:
            (_, i), (_, j) = coord
            missing = ({0, 1, 2} - {p for p, _ in coord}).pop()
            settings[missing] = 1 if i == j else 2
    return tuple(settings[p] for p in range(n))


def to_eberhard(ineq: BellInequality) -> CountInequality:
    """Rewrite a two- or three-party CH-type inequality over full-arity counts.

    Each ``P(X+)`` and ``P(X+, Y+)`` becomes a sum over the outcomes
    ``+``, ``-``, ``u`` of the absent parties, taken at fixed partner
    settings: for two parties ``X_i`` pairs with ``Y_(3-i)``; for three
    parties ``X_i`` pairs with ``Y_i, Z_(3-i)`` along the cycle ``A, B, C``
    and ``(X_i, Y_j)`` pairs with ``Z_1`` if ``i == j`` else ``Z_2``.
    """
    sc = ineq.scenario
    if sc.settings not in ((2, 2), (2, 2, 2)) or ineq.lower_bound != 0:
        raise UnknownInequalityError(
            "count form is defined for bound-0 CH inequalities with 2 or 3 parties and 2 settings")
    n = sc.parties
    acc: dict[tuple[tuple[int, ...], str], Fraction] = {}
    for coord, c in ineq.terms().items():
        settings = _eberhard_partners(n, coord)
        present = {p for p, _ in coord}
        absent = [p for p in range(n) if p not in present]
        for fill in itertools.product(OUTCOMES, repeat=len(absent)):
            o = ["+"] * n
            for p, ch in zip(absent, fill):
                o[p] = ch
            key = (settings, "".join(o))
            acc[key] = acc.get(key, Fraction(0)) + c
    if any(v.denominator != 1 for v in acc.values()):
        raise ValueError("count form needs integer coefficients")
    order = {ch: i for i, ch in enumerate(OUTCOMES)}
    terms = sorted(((s, o, int(v)) for (s, o), v in acc.items() if v),
                   key=lambda t: (t[0], [order[ch] for ch in t[1]]))
    return CountInequality(ineq.name, sc, tuple(terms), 0)


def reduce_party(ineq: BellInequality, party) -> BellInequality:
    """Drop every coordinate involving ``party`` (its events become empty)."""
    sc = ineq.scenario
    idx = sc.party_index(party)
    if sc.parties < 2:
        raise KeyError("cannot remove the only party")
    keep = [p for p in range(sc.parties) if p != idx]
    remap = {p: i for i, p in enumerate(keep)}
    new_sc = Scenario(tuple(sc.settings[p] for p in keep), tuple(sc.labels[p] for p in keep))
    terms = {}
    for coord, c in ineq.terms().items():
        if any(p == idx for p, _ in coord):
            continue
        terms[tuple((remap[p], s) for p, s in coord)] = c
    return _bell_from_terms(f"{ineq.name}-{sc.labels[idx]}", new_sc, terms,
                            ineq.lower_bound, ineq.upper_bound)


def to_json(item) -> str:
    return json.dumps(item.to_json(), indent=2, sort_keys=False, ensure_ascii=False) + "\n"
