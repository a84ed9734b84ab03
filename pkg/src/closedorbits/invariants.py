"""Generators of the invariant ring of g x E, the quotient map, and the
Jacobian-rank independence test.

Generator order is fixed:

* GL_n:      tr_1..tr_n, mu_0..mu_{n-1}          (mu_j = v X^j u)
* Sp_2n:     tr_2, tr_4..tr_2n, eta_1, eta_3..eta_{2n-1}
* O_{2n+1}:  tr_2..tr_2n, eta_0, eta_2..eta_2n
* O_{2n}:    tr_2..tr_2n, eta_0, eta_2..eta_{2n-2}   (eta_j = <X^j u, u>)

A ``gram`` descriptor uses the list of the standard kind with the same form
type and dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

from .groups import EnhancedPoint, GroupDescriptor, lie_algebra_basis, standard_form
from .linalg import Mat, jet_eval, mat_rank
from .scalar import ZERO, format_scalar, parse_scalar


@dataclass(frozen=True)
class InvariantVector:
    kind: str
    rank: int
    traces: tuple
    pairings: tuple

    def values(self) -> tuple:
        return self.traces + self.pairings

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rank": self.rank,
            "traces": [format_scalar(x) for x in self.traces],
            "pairings": [format_scalar(x) for x in self.pairings],
        }

    @classmethod
    def from_json(cls, obj: dict) -> InvariantVector:
        iv = cls(
            obj["kind"].lower(),
            int(obj["rank"]),
            tuple(parse_scalar(x) for x in obj["traces"]),
            tuple(parse_scalar(x) for x in obj["pairings"]),
        )
        expected = generator_indices(iv.kind, iv.rank)
        if (len(iv.traces), len(iv.pairings)) != (len(expected[0]), len(expected[1])):
            raise ValueError(
                f"{iv.kind} rank {iv.rank} needs {len(expected[0])} traces and {len(expected[1])} pairings")
        return iv


def effective_kind(group: GroupDescriptor) -> tuple[str, int]:
    """Standard kind and rank whose generator list applies to ``group``."""
    if group.kind != "gram":
        return group.kind, group.rank
    m = group.size
    if not group.symmetric:
        return "sp", m // 2
    return ("oodd", (m - 1) // 2) if m % 2 else ("oeven", m // 2)


def generator_indices(kind: str, rank: int) -> tuple[list[int], list[int]]:
    """Exponents of the trace generators and of the pairing generators."""
    n = rank
    if kind == "gl":
        return list(range(1, n + 1)), list(range(n))
    traces = list(range(2, 2 * n + 1, 2))
    if kind == "sp":
        return traces, list(range(1, 2 * n, 2))
    if kind == "oodd":
        return traces, list(range(0, 2 * n + 1, 2))
    if kind == "oeven":
        return traces, list(range(0, 2 * n - 1, 2))
    raise ValueError(f"no generator list for kind {kind!r}")


def generator_names(group: GroupDescriptor) -> list[str]:
    kind, n = effective_kind(group)
    tr, pr = generator_indices(kind, n)
    pname = "mu" if kind == "gl" else "eta"
    return [f"tr_{i}" for i in tr] + [f"{pname}_{j}" for j in pr]


def evaluate_generators(group: GroupDescriptor, X: Mat, U: Mat, V: Mat | None = None) -> list:
    """All generators at ``(X, U[, V])``; U is m x 1, V is 1 x m.

    Works for any entry type with ring arithmetic, so it doubles as the map fed
    to :func:`~closedorbits.linalg.jet_eval`. Powers of X are shared.
    """
    kind, n = effective_kind(group)
    tr_idx, pr_idx = generator_indices(kind, n)
    top = max(tr_idx + pr_idx, default=0)
    pows = X.powers(top + 1) if X.rows else [X] * (top + 1)
    traces = [pows[i].trace() for i in tr_idx]
    if kind == "gl":
        pairings = [_scalar_of(V @ pows[j] @ U) for j in pr_idx]
    else:
        B = standard_form(group)
        BU = B @ U
        pairings = [_scalar_of((pows[j] @ U).T @ BU) for j in pr_idx]
    return traces + pairings


def _scalar_of(M: Mat):
    if M.rows == 0 or M.cols == 0:
        return ZERO
    return M[0, 0]


def _as_mats(p: EnhancedPoint) -> tuple[Mat, Mat, Mat | None]:
    m = p.group.size
    U = Mat._wrap([[x] for x in p.u], 1) if m else Mat.zeros(0, 1)
    V = Mat._wrap([list(p.v)], m) if p.v is not None else None
    return p.X, U, V


def quotient_map(p: EnhancedPoint) -> InvariantVector:
    """The value of the quotient map: every generator, in the fixed order."""
    kind, n = effective_kind(p.group)
    X, U, V = _as_mats(p)
    vals = evaluate_generators(p.group, X, U, V)
    ntr = len(generator_indices(kind, n)[0])
    return InvariantVector(kind, n, tuple(vals[:ntr]), tuple(vals[ntr:]))


def closed_orbit_equal(x: EnhancedPoint, y: EnhancedPoint) -> bool:
    """Whether two closed orbits coincide, decided by comparing invariants.

    Both orbits must already be known to be closed; the caller is responsible
    for that (see :func:`closedorbits.classify.is_closed`).
    """
    if x.group != y.group:
        raise ValueError("points belong to different groups")
    return quotient_map(x) == quotient_map(y)


def tangent_directions(group: GroupDescriptor) -> list[tuple[Mat, Mat, Mat | None]]:
    """A basis of the tangent space of g x E, as (dX, dU, dV) triples."""
    m = group.size
    zX = Mat.zeros(m)
    zU = Mat.zeros(m, 1)
    zV = Mat.zeros(1, m) if group.kind == "gl" else None
    dirs = [(Z, zU, zV) for Z in lie_algebra_basis(group)]
    units = [[1 if c == i else 0 for c in range(m)] for i in range(m)]
    dirs += [(zX, Mat.column(e), zV) for e in units]
    if group.kind == "gl":
        dirs += [(zX, zU, Mat.row(e)) for e in units]
    return dirs


def invariant_jacobian(p: EnhancedPoint) -> Mat:
    """Rows: generators; columns: derivatives along :func:`tangent_directions`."""
    X, U, V = _as_mats(p)
    base = [X, U] + ([V] if V is not None else [])

    def f(*mats):
        return evaluate_generators(p.group, *mats)

    columns = []
    for dX, dU, dV in tangent_directions(p.group):
        direction = [dX, dU] + ([dV] if dV is not None else [])
        _, deriv = jet_eval(f, base, direction)
        columns.append(deriv)
    if not columns:
        return Mat.zeros(0)
    return Mat.from_columns(columns)


def invariant_jacobian_rank(p: EnhancedPoint) -> int:
    J = invariant_jacobian(p)
    return mat_rank(J) if J.rows and J.cols else 0
