"""From intersection data to mu and the PSL(2, R) representation.

Intersection data is stored per isotopy class: ``N[j, k]`` is the
intersection number of the j-th class of A with the k-th class of B, and
``row_mult`` / ``col_mult`` count how many parallel copies of each class the
multicurves contain.  Every quantity that depends on the curves themselves
(the Gram matrix, the configuration graph) is computed on the expanded curve
system in which each class appears once per copy.
"""

from __future__ import annotations

import enum
import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError, MathPreconditionError


class NotPrimitive(MathPreconditionError):
    pass


class NoConvergence(MathPreconditionError):
    pass


class EmptySubset(InputError):
    pass


@dataclass(frozen=True, eq=False)
class IntersectionData:
    N: np.ndarray
    row_mult: np.ndarray = None  # type: ignore[assignment]
    col_mult: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        try:
            N = np.array(self.N, dtype=np.int64)
        except (TypeError, ValueError) as exc:
            raise InputError(f"intersection matrix is not an integer array: {exc}") from exc
        if N.ndim != 2 or N.shape[0] < 1 or N.shape[1] < 1:
            raise InputError("intersection matrix must be a nonempty 2-D array")
        if not np.array_equal(N, np.asarray(self.N, dtype=float)):
            raise InputError("intersection numbers must be integers")
        if (N < 0).any():
            raise InputError("intersection numbers must be nonnegative")
        n, m = N.shape
        rm = np.ones(n, dtype=np.int64) if self.row_mult is None else np.array(self.row_mult, dtype=np.int64)
        cm = np.ones(m, dtype=np.int64) if self.col_mult is None else np.array(self.col_mult, dtype=np.int64)
        if rm.shape != (n,) or cm.shape != (m,):
            raise InputError("multiplicity vectors must match the matrix shape")
        if (rm < 1).any() or (cm < 1).any():
            raise InputError("multiplicities must be positive integers")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "row_mult", rm)
        object.__setattr__(self, "col_mult", cm)

    @property
    def shape(self) -> tuple[int, int]:
        return self.N.shape  # type: ignore[return-value]

    def expanded(self) -> np.ndarray:
        """Intersection matrix of the full curve systems, copies included."""
        return np.repeat(np.repeat(self.N, self.row_mult, axis=0), self.col_mult, axis=1)

    def to_dict(self) -> dict:
        return {
            "N": self.N.tolist(),
            "row_mult": self.row_mult.tolist(),
            "col_mult": self.col_mult.tolist(),
        }

    @classmethod
    def from_dict(cls, obj) -> "IntersectionData":
        if not isinstance(obj, dict) or "N" not in obj:
            raise InputError('intersection data must be an object with an "N" field')
        return cls(obj["N"], obj.get("row_mult"), obj.get("col_mult"))

    @classmethod
    def load(cls, path) -> "IntersectionData":
        try:
            obj = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read intersection data {path}: {exc}") from exc
        return cls.from_dict(obj)


def gram(data: IntersectionData) -> np.ndarray:
    """Exact integer N N^t of the expanded intersection matrix."""
    E = data.expanded().astype(object)
    return np.array((E @ E.T).tolist(), dtype=np.int64)


def is_primitive(M) -> bool:
    """Whether some power of the nonnegative square matrix ``M`` is positive.

    Wielandt: a primitive n x n matrix has M^k > 0 for k = (n-1)^2 + 1, and
    positivity persists for higher powers, so checking that one power decides.
    """
    P = np.asarray(M) > 0
    n = P.shape[0]
    if P.ndim != 2 or P.shape[1] != n:
        raise InputError("matrix must be square")
    if (np.asarray(M) < 0).any():
        return False
    target = (n - 1) ** 2 + 1
    result = np.eye(n, dtype=bool)
    base = P.copy()
    k = target
    while k:
        if k & 1:
            result = (result.astype(np.int64) @ base.astype(np.int64)) > 0
        base = (base.astype(np.int64) @ base.astype(np.int64)) > 0
        k >>= 1
    return bool(result.all())


@dataclass(frozen=True)
class PFResult:
    mu: float
    vector: np.ndarray = field(repr=False)
    iterations: int
    residual: float


def perron_frobenius(M, tol: float = 1e-12, max_iter: int = 100_000) -> PFResult:
    """Perron-Frobenius eigenpair of a primitive matrix by power iteration.

    Starts from the all-ones vector; the positive cone is invariant, so every
    iterate stays positive.  Stops once ``||M v - mu v||_inf <= tol * max(1, mu)``.
    """
    if not is_primitive(M):
        raise NotPrimitive("matrix is not primitive")
    A = np.asarray(M, dtype=float)
    v = np.ones(A.shape[0]) / math.sqrt(A.shape[0])
    res = math.inf
    for it in range(1, max_iter + 1):
        y = A @ v
        mu = float(np.linalg.norm(y))
        res = float(np.max(np.abs(y - mu * v)))
        if res <= tol * max(1.0, mu):
            return PFResult(mu, v, it, res)
        v = y / mu
    raise NoConvergence(f"residual {res:.3e} after {max_iter} iterations")


def _bareiss_det(rows: list[list[int]]) -> int:
    # Fraction-free Gaussian elimination; exact for Python ints.
    a = [list(r) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_exact(M) -> int:
    rows = [[int(x) for x in r] for r in np.asarray(M).tolist()]
    return _bareiss_det(rows) if rows else 1


def mu_equals_four(M, mu_numeric: float) -> bool:
    """Decide mu = 4: exact ``det(M - 4I) = 0`` and a numeric sanity check."""
    A = np.asarray(M, dtype=np.int64) - 4 * np.eye(len(M), dtype=np.int64)
    return det_exact(A) == 0 and abs(mu_numeric - 4.0) <= 1e-6


@dataclass(frozen=True, eq=False)
class ThurstonRep:
    mu: float
    sqrt_mu: float
    mat_a: np.ndarray
    mat_b: np.ndarray
    mu_is_four: bool

    @classmethod
    def from_mu(cls, mu: float, mu_is_four: bool | None = None) -> "ThurstonRep":
        """Representation for a given mu (``mu_is_four`` defaults to ``mu == 4``)."""
        s = math.sqrt(mu)
        if mu_is_four is None:
            mu_is_four = mu == 4.0
        return cls(
            mu=float(mu),
            sqrt_mu=s,
            mat_a=np.array([[1.0, -s], [0.0, 1.0]]),
            mat_b=np.array([[1.0, 0.0], [s, 1.0]]),
            mu_is_four=bool(mu_is_four),
        )


def build_representation(data: IntersectionData) -> ThurstonRep:
    M = gram(data)
    pf = perron_frobenius(M)
    mu = pf.mu
    four = mu_equals_four(M, mu)
    if four:
        mu = 4.0
    return ThurstonRep.from_mu(mu, four)


# -- configuration graph and the Dynkin recognizer ---------------------------


@dataclass(frozen=True)
class ConfigGraph:
    """Bipartite multigraph on the curves of A and B.

    Vertices are ``(side, cls, copy)`` with ``side`` in ``{"A", "B"}``; edge
    multiplicities are intersection numbers.
    """

    vertices: tuple[tuple[str, int, int], ...]
    edges: dict = field(hash=False)

    def degree(self, v) -> int:
        return sum(mult for (x, y), mult in self.edges.items() if v in (x, y))


def config_graph(data: IntersectionData) -> ConfigGraph:
    a_side = [("A", j, c) for j, k in enumerate(data.row_mult) for c in range(int(k))]
    b_side = [("B", j, c) for j, k in enumerate(data.col_mult) for c in range(int(k))]
    edges = {}
    for u in a_side:
        for v in b_side:
            mult = int(data.N[u[1], v[1]])
            if mult:
                edges[(u, v)] = mult
    return ConfigGraph(tuple(a_side + b_side), edges)


class DynkinTag(str, enum.Enum):
    PATH_A = "A"
    FORK_D = "D"
    E6 = "E6"
    E7 = "E7"
    E8 = "E8"
    NOT_IN_FAMILY = "not_in_family"


@dataclass(frozen=True)
class DynkinType:
    tag: DynkinTag
    n: int | None = None

    def __str__(self) -> str:
        if self.tag in (DynkinTag.PATH_A, DynkinTag.FORK_D):
            return f"{self.tag.value}{self.n}"
        return self.tag.value


NOT_IN_FAMILY = DynkinType(DynkinTag.NOT_IN_FAMILY)


def dynkin_recognize(g: ConfigGraph) -> DynkinType:
    """Recognize the simply-laced Dynkin trees A_n, D_n, E6, E7, E8."""
    verts = list(g.vertices)
    n = len(verts)
    if any(mult > 1 for mult in g.edges.values()):
        return NOT_IN_FAMILY
    adj: dict = {v: [] for v in verts}
    for x, y in g.edges:
        adj[x].append(y)
        adj[y].append(x)
    # connected with n - 1 simple edges <=> tree
    seen = {verts[0]}
    queue = deque([verts[0]])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != n or len(g.edges) != n - 1:
        return NOT_IN_FAMILY

    degrees = Counter(len(adj[v]) for v in verts)
    if max(degrees) <= 2:
        return DynkinType(DynkinTag.PATH_A, n)
    if max(degrees) > 3 or degrees[3] != 1:
        return NOT_IN_FAMILY

    center = next(v for v in verts if len(adj[v]) == 3)
    arms = []
    for start in adj[center]:
        length, prev, cur = 1, center, start
        while len(adj[cur]) == 2:
            prev, cur = cur, next(w for w in adj[cur] if w != prev)
            length += 1
        arms.append(length)
    arms.sort()
    if arms[:2] == [1, 1]:
        return DynkinType(DynkinTag.FORK_D, n)
    return {
        (1, 2, 2): DynkinType(DynkinTag.E6, 6),
        (1, 2, 3): DynkinType(DynkinTag.E7, 7),
        (1, 2, 4): DynkinType(DynkinTag.E8, 8),
    }.get(tuple(arms), NOT_IN_FAMILY)


def leininger_is_free(data: IntersectionData) -> bool:
    """Leininger's criterion: <T_A, T_B> is free unless the graph is a Dynkin tree.

    Only meaningful for filling pairs, which this package does not verify.
    """
    return dynkin_recognize(config_graph(data)).tag is DynkinTag.NOT_IN_FAMILY


def suff_free_check(data: IntersectionData, a_subset=None, b_subset=None) -> bool:
    """Ping-pong sufficient condition for freeness on subsets A', B'.

    Requires ``n_a * i(a, [B']) >= 2`` for each class a in A' and
    ``m_b * i([A'], b) >= 2`` for each class b in B'.  Masks default to all
    classes.
    """
    n, m = data.shape
    a_mask = np.ones(n, dtype=bool) if a_subset is None else np.asarray(a_subset, dtype=bool)
    b_mask = np.ones(m, dtype=bool) if b_subset is None else np.asarray(b_subset, dtype=bool)
    if a_mask.shape != (n,) or b_mask.shape != (m,):
        raise InputError("subset masks must match the matrix shape")
    if not a_mask.any() or not b_mask.any():
        raise EmptySubset("subset masks must each select at least one class")
    sub = data.N[np.ix_(a_mask, b_mask)]
    rows_ok = (data.row_mult[a_mask] * sub.sum(axis=1) >= 2).all()
    cols_ok = (data.col_mult[b_mask] * sub.sum(axis=0) >= 2).all()
    return bool(rows_ok and cols_ok)
