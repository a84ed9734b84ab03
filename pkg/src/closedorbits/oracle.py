"""Brute-force cross-checks: invariance fuzzing, one-parameter degenerations and
an exhaustive sweep over the canonical seed grid.

Every suite returns a :class:`SuiteReport`; failures are data, never exceptions.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .canonical import NilpotentSeed, build_nilpotent, eta_signature, seed_length
from .classify import is_closed, predicted_stabilizer
from .groups import (
    EnhancedPoint,
    GroupDescriptor,
    act,
    compose,
    orbit_dim,
    random_group_element,
    random_point,
    twisting_element,
)
from .invariants import quotient_map
from .linalg import Mat
from .scalar import ZERO, as_scalar, format_scalar

STANDARD_KINDS = ("gl", "sp", "oodd", "oeven")


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, check: str, **data):
        self.failures.append({"check": check, **data})

    def merge(self, other: SuiteReport) -> SuiteReport:
        self.cases += other.cases
        self.failures.extend(other.failures)
        self.wall_time += other.wall_time
        return self

    def to_json(self) -> dict:
        fails = sorted(self.failures, key=lambda f: json.dumps(f, sort_keys=True))
        return {"name": self.name, "cases": self.cases, "passed": self.passed,
                "failures": fails, "wall_time": round(self.wall_time, 3)}


def point_to_json(p: EnhancedPoint) -> dict:
    out = {
        "group": p.group.kind,
        "rank": p.group.rank,
        "X": [[format_scalar(x) for x in row] for row in p.X.tolist()],
        "u": [format_scalar(x) for x in p.u],
    }
    if p.v is not None:
        out["v"] = [format_scalar(x) for x in p.v]
    return out


# ------------------------------------------------------------- invariance

def invariance_suite(group: GroupDescriptor, trials: int, seed: int = 0) -> SuiteReport:
    """Check quotient_map(e.p) == quotient_map(p) for random e of both signs."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rep = SuiteReport(f"invariance[{group.label()}]")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    tw = twisting_element(group)
    for trial in range(trials):
        e = random_group_element(group, rng)
        p = random_point(group, rng)
        base = quotient_map(p)
        for sign, elt in ((1, e), (-1, compose(group, tw, e))):
            rep.cases += 1
            moved = act(elt, p)
            if quotient_map(moved) != base:
                rep.fail("invariance", trial=trial, delta=sign, point=point_to_json(p),
                         g=[[format_scalar(x) for x in row] for row in elt.g.tolist()])
    rep.wall_time = time.perf_counter() - t0
    return rep


# ------------------------------------------------------------ degeneration

@dataclass(frozen=True)
class DegenerationWitness:
    """``lim_{t->0} lambda(t).p`` with ``lambda(t) = diag(t^e_0, ..., t^e_{m-1})``."""

    exponents: tuple
    limit: EnhancedPoint
    orbit_dim: int
    limit_orbit_dim: int

    def to_json(self) -> dict:
        return {"exponents": list(self.exponents), "limit": point_to_json(self.limit),
                "orbit_dim": self.orbit_dim, "limit_orbit_dim": self.limit_orbit_dim}


def torus_pairs(group: GroupDescriptor) -> tuple[list[int], list[tuple[int, int]]]:
    """Free coordinates of a diagonal torus compatible with the group.

    Returns ``(fixed, pairs)``: indices forced to exponent 0 and pairs ``(i, j)``
    that carry exponents ``(a, -a)``. GL has no pairing; every index is free and
    is reported as ``(i, None)``.
    """
    m = group.size
    if group.kind == "gl":
        return [], [(i, None) for i in range(m)]
    if group.kind == "gram":
        raise ValueError("degeneration probes need a descriptor of standard kind")
    B = group.form()
    fixed, pairs, seen = [], [], set()
    for i in range(m):
        if i in seen:
            continue
        partners = [j for j in range(m) if B[i, j]]
        if len(partners) != 1:
            raise ValueError("form is not monomial")
        j = partners[0]
        seen.update((i, j))
        if i == j:
            fixed.append(i)
        else:
            pairs.append((i, j))
    return fixed, pairs


def cocharacters(group: GroupDescriptor, bound: int) -> Iterable[tuple]:
    """Exponent vectors of all compatible diagonal cocharacters, zero excluded."""
    m = group.size
    _, pairs = torus_pairs(group)
    for free in itertools.product(range(-bound, bound + 1), repeat=len(pairs)):
        if not any(free):
            continue
        e = [0] * m
        for a, (i, j) in zip(free, pairs):
            e[i] = a
            if j is not None:
                e[j] = -a
        yield tuple(e)


def laurent_action(p: EnhancedPoint, e: Sequence[int]):
    """``lambda(t).p`` entrywise as ``(coefficient, exponent)`` Laurent monomials."""
    m = p.group.size
    X = [[(p.X[i, j], e[i] - e[j]) for j in range(m)] for i in range(m)]
    u = [(p.u[i], e[i]) for i in range(m)]
    v = [(p.v[j], -e[j]) for j in range(m)] if p.v is not None else None
    return X, u, v


def _limit_entry(term):
    c, k = term
    if not c:
        return ZERO
    if k < 0:
        raise _NoLimit
    return c if k == 0 else ZERO


class _NoLimit(Exception):
    pass


def laurent_limit(p: EnhancedPoint, e: Sequence[int]) -> EnhancedPoint | None:
    """``lim_{t->0} lambda(t).p`` or None when some entry has a pole at t = 0."""
    X, u, v = laurent_action(p, e)
    try:
        LX = Mat([[_limit_entry(t) for t in row] for row in X]) if X else Mat.zeros(0)
        Lu = tuple(_limit_entry(t) for t in u)
        Lv = tuple(_limit_entry(t) for t in v) if v is not None else None
    except _NoLimit:
        return None
    return EnhancedPoint(p.group, LX, Lu, Lv)


def degeneration_probe(p: EnhancedPoint, bound: int = 1) -> DegenerationWitness | None:
    """Search diagonal cocharacters for a limit with strictly smaller orbit.

    A hit proves the orbit of ``p`` is not closed. No hit proves nothing.
    """
    if p.group.kind == "gram":
        raise ValueError("degeneration probes need a descriptor of standard kind")
    if p.is_zero():
        return None
    here = orbit_dim(p)
    if here == 0:
        return None
    seen = {}
    for e in cocharacters(p.group, bound):
        lim = laurent_limit(p, e)
        if lim is None or lim == p:
            continue
        key = (lim.X, lim.u, lim.v)
        if key not in seen:
            seen[key] = orbit_dim(lim)
        if seen[key] < here:
            return DegenerationWitness(e, lim, here, seen[key])
    return None


# ------------------------------------------------------- seed-grid sweep

def grid_seeds(kind: str, n: int, grid: Sequence) -> list[NilpotentSeed]:
    """Every valid nilpotent seed of ``(kind, n)`` with coefficients from ``grid``."""
    grid = [as_scalar(g) for g in grid]
    out = []
    for k in range(n + 1):
        for coeffs in itertools.product(grid, repeat=seed_length(kind, k)):
            try:
                out.append(NilpotentSeed(kind, n, k, coeffs))
            except ValueError:
                continue
    return out


def direct_pairings(p: EnhancedPoint, top: int) -> tuple:
    """``<X^j u, u>`` (or ``v X^j u`` for GL) for j = 0..top, by plain loops."""
    m = p.group.size
    w = list(p.u)
    out = []
    B = None if p.group.kind == "gl" else p.group.form().tolist()
    left = list(p.v) if B is None else None
    for _ in range(top + 1):
        if B is None:
            out.append(sum((left[i] * w[i] for i in range(m)), ZERO))
        else:
            out.append(sum((w[i] * B[i][j] * p.u[j] for i in range(m) for j in range(m)), ZERO))
        w = [sum((p.X[i, j] * w[j] for j in range(m)), ZERO) for i in range(m)]
    return tuple(out)


def _orbit_data(seed: NilpotentSeed, p: EnhancedPoint) -> tuple:
    """Data that should separate closed nilpotent orbits, computed without the quotient map.

    GL: the seed's ``(k, y)``. Sp/O: ``(k, eta_j)`` over the index range that the
    family's signature covers.
    """
    if seed.kind == "gl":
        return (seed.k, seed.coeffs)
    n, k = seed.rank, seed.k
    vals = direct_pairings(p, 2 * n)
    if seed.kind == "sp":
        idx = range(1, 2 * k, 2)
    elif seed.kind == "oodd":
        idx = range(0, 2 * k + 1, 2) if (k or vals[0]) else ()
    else:
        idx = range(0, 2 * k - 1, 2)
    return (k, tuple(vals[j] for j in idx))


def classification_crosscheck(max_rank: int, grid: Sequence, *, kinds: Sequence[str] = STANDARD_KINDS,
                              probe_bound: int = 1) -> SuiteReport:
    """Closedness, stabilizers, orbit separation and probe soundness over the grid."""
    if max_rank > 4:
        raise ValueError("max_rank above 4 is outside the budget")
    rep = SuiteReport(f"crosscheck[rank<={max_rank}]")
    t0 = time.perf_counter()
    for kind in kinds:
        for n in range(1, max_rank + 1):
            by_data, by_quot = {}, {}
            for seed in grid_seeds(kind, n, grid):
                rep.cases += 1
                sj = seed.to_json()
                p = build_nilpotent(seed)
                report = is_closed(p)
                if not report.is_closed:
                    rep.fail("closed", seed=sj)
                sphere = kind == "oodd" and seed.k == 0 and bool(p.u[0])
                want = predicted_stabilizer(kind, n, seed.k, sphere=sphere).dim
                if report.lie_stabilizer_dim != want:
                    rep.fail("stabilizer", seed=sj, got=report.lie_stabilizer_dim, want=want)
                data = _orbit_data(seed, p)
                if kind != "gl" and eta_signature(p) != data:
                    rep.fail("signature", seed=sj)
                q = quotient_map(p).values()
                by_data.setdefault(data, set()).add(q)
                by_quot.setdefault(q, set()).add(data)
                if probe_bound > 0:
                    w = degeneration_probe(p, probe_bound)
                    if w is not None and report.is_closed:
                        rep.fail("probe_soundness", seed=sj, witness=w.to_json())
            for data, qs in by_data.items():
                if len(qs) > 1:
                    rep.fail("separation", kind=kind, rank=n, data=repr(data))
            for q, ds in by_quot.items():
                if len(ds) > 1:
                    rep.fail("separation", kind=kind, rank=n, invariants=[format_scalar(x) for x in q])
    rep.wall_time = time.perf_counter() - t0
    return rep


def run_checks(max_rank: int = 2, grid: Sequence = (-1, 1, 2), trials: int = 20, seed: int = 0) -> list[SuiteReport]:
    """What ``closedorbits check`` runs: invariance for every kind and rank, then the sweep."""
    reports = []
    for kind in STANDARD_KINDS:
        for n in range(1, max_rank + 1):
            reports.append(invariance_suite(GroupDescriptor(kind, n), trials, seed))
    reports.append(classification_crosscheck(max_rank, grid))
    return reports
