"""Laplacian spectra of trees: Fiedler vectors, the type I/II structure of a
tree, and the extrema/diameter (FED) verdict.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceFailure, StructureViolation, TooSmall
from .jacobi import jacobi_eigh, jacobi_eigh_batch
from .tree import Tree, bfs_distances, diameter, leaves


class TreeType(str, enum.Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    DEGENERATE = "Degenerate"


class Policy(str, enum.Enum):
    """How trees whose lambda_2 is not simple are judged."""

    STRICT = "strict"
    PROJECTION = "projection"


class ExtremaRule(str, enum.Enum):
    """How ties among extremal Fiedler values are treated.

    SET: the argmin and argmax are vertex sets (ties within ``tol.zero``);
    FED holds iff every (min, max) pair sits at diameter distance.
    UNIQUE: any tie fails the verdict outright.
    """

    SET = "set"
    UNIQUE = "unique"


class Reason(str, enum.Enum):
    OK = "OK"
    MULTIPLE_MINIMA = "MultipleMinima"
    MULTIPLE_MAXIMA = "MultipleMaxima"
    DISTANCE_BELOW_DIAMETER = "DistanceBelowDiameter"
    DEGENERATE_EIGENSPACE = "DegenerateEigenspace"


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-8  # relative to max |phi|: zero entries and extremal ties
    mult: float = 1e-9  # absolute eigenvalue gap defining the lambda_2 cluster
    residual_per_vertex: float = 1e-11

    def residual(self, n: int) -> float:
        return self.residual_per_vertex * n


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # column i pairs with values[i]

    def residual(self, mat: np.ndarray) -> float:
        """max_i ||A v_i - lambda_i v_i||_inf"""
        return float(np.max(np.abs(mat @ self.vectors - self.vectors * self.values)))

    def orthogonality_error(self) -> float:
        k = self.vectors.shape[1]
        return float(np.max(np.abs(self.vectors.T @ self.vectors - np.eye(k))))


@dataclass(frozen=True)
class FedVerdict:
    satisfied: bool
    m: Optional[int]
    M: Optional[int]
    extrema_distance: Optional[int]
    diameter: int
    reason: Reason
    # "simple", "strict" or "projection": which branch produced the verdict
    path: str = "simple"

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "m": self.m,
            "M": self.M,
            "extrema_distance": self.extrema_distance,
            "diameter": self.diameter,
            "reason": self.reason.value,
            "path": self.path,
        }


@dataclass(frozen=True)
class FiedlerReport:
    lambda2: float
    multiplicity: int
    vector: tuple[float, ...]
    tree_type: TreeType
    characteristic: Optional[int | tuple[int, int]]
    zero_set: frozenset[int]
    argmin_set: frozenset[int]
    argmax_set: frozenset[int]
    fed: FedVerdict
    eigenvalues: tuple[float, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        char = self.characteristic
        return {
            "lambda2": self.lambda2,
            "multiplicity": self.multiplicity,
            "vector": list(self.vector),
            "tree_type": self.tree_type.value,
            "characteristic": list(char) if isinstance(char, tuple) else char,
            "zero_set": sorted(self.zero_set),
            "argmin_set": sorted(self.argmin_set),
            "argmax_set": sorted(self.argmax_set),
            "fed": self.fed.to_dict(),
        }


def laplacian(tree: Tree) -> np.ndarray:
    """Dense ``D - A`` with integer-valued float entries."""
    n = tree.n
    mat = np.zeros((n, n))
    for u, nbrs in enumerate(tree.adjacency):
        mat[u, u] = len(nbrs)
        for w in nbrs:
            mat[u, w - 1] = -1.0
    return mat


def laplacian_stack(parent_rows: np.ndarray) -> np.ndarray:
    """Laplacians for a ``(B, n)`` array of 0-based parent indices (root = -1)."""
    B, n = parent_rows.shape
    stack = np.zeros((B, n, n))
    b_idx, child = np.nonzero(parent_rows >= 0)
    par = parent_rows[b_idx, child]
    stack[b_idx, child, par] = -1.0
    stack[b_idx, par, child] = -1.0
    deg = np.zeros((B, n))
    np.add.at(deg, (b_idx, child), 1.0)
    np.add.at(deg, (b_idx, par), 1.0)
    idx = np.arange(n)
    stack[:, idx, idx] = deg
    return stack


def eigen_symmetric(mat: np.ndarray) -> EigenResult:
    """Full spectrum by cyclic Jacobi, validated against the residual bound."""
    mat = np.asarray(mat, dtype=float)
    values, vectors = jacobi_eigh(mat)
    result = EigenResult(values, vectors)
    n = mat.shape[0]
    if n and result.residual(mat) > 1e-11 * max(n, 1) * max(1.0, float(np.max(np.abs(mat)))):
        raise ConvergenceFailure("eigenpair residual above tolerance")
    return result


def algebraic_connectivity(tree: Tree) -> float:
    if tree.n < 2:
        raise TooSmall("algebraic connectivity needs at least 2 vertices")
    return float(eigen_symmetric(laplacian(tree)).values[1])


def _cluster_size(values: np.ndarray, tol: Tolerances) -> int:
    return int(np.count_nonzero(np.abs(values[1:] - values[1]) <= tol.mult))


def _normalise(phi: np.ndarray, tol: Tolerances) -> np.ndarray:
    phi = phi / np.linalg.norm(phi)
    big = np.abs(phi) > tol.zero * np.max(np.abs(phi))
    if phi[np.argmax(big)] < 0:
        phi = -phi
    return phi + 0.0  # no negative zeros


def _extremal_sets(y: np.ndarray, tol_zero: float) -> tuple[list[int], list[int]]:
    tol = tol_zero * np.max(np.abs(y))
    lo, hi = y.min(), y.max()
    return (
        [int(i) + 1 for i in np.flatnonzero(y <= lo + tol)],
        [int(i) + 1 for i in np.flatnonzero(y >= hi - tol)],
    )


def _min_pair_distance(tree: Tree, mins: Sequence[int], maxs: Sequence[int]) -> int:
    best = tree.n
    for a in mins:
        dist = bfs_distances(tree, a)
        best = min(best, min(dist[b - 1] for b in maxs))
    return best


def classify_tree_type(tree: Tree, phi, tol_zero: float = DEFAULT_TOL.zero):
    """Type I (characteristic vertex) or type II (characteristic edge).

    Returns ``(TreeType, vertex)`` or ``(TreeType, (p, q))`` with
    ``phi[p] > 0 > phi[q]``.  Raises StructureViolation when the vector
    does not have the shape the structure theorem requires.
    """
    phi = np.asarray(phi, dtype=float)
    cut = tol_zero * np.max(np.abs(phi))
    zero = {int(i) + 1 for i in np.flatnonzero(np.abs(phi) <= cut)}
    adj = tree.adjacency
    if zero:
        start = next(iter(zero))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj[u - 1]:
                if w in zero and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != zero:
            raise StructureViolation("zero set of the Fiedler vector is disconnected")
        boundary = [v for v in sorted(zero) if any(w not in zero for w in adj[v - 1])]
        if len(boundary) != 1:
            raise StructureViolation(
                f"expected one characteristic vertex, found {boundary}")
        return TreeType.TYPE_I, boundary[0]
    cuts = [
        (u, w) if phi[u - 1] > 0 else (w, u)
        for u, w in tree.edges()
        if phi[u - 1] * phi[w - 1] < 0
    ]
    if len(cuts) != 1:
        raise StructureViolation(f"expected one sign-change edge, found {cuts}")
    return TreeType.TYPE_II, cuts[0]


def _classify_with_retry(tree: Tree, phi: np.ndarray, tol: Tolerances):
    try:
        return classify_tree_type(tree, phi, tol.zero)
    except StructureViolation:
        return classify_tree_type(tree, phi, tol.zero * 10)


def _verdict_simple(tree: Tree, phi: np.ndarray, diam: int, tol: Tolerances,
                    extrema: ExtremaRule) -> FedVerdict:
    mins, maxs = _extremal_sets(phi, tol.zero)
    dist = _min_pair_distance(tree, mins, maxs)
    m, M = mins[0], maxs[0]
    if extrema is ExtremaRule.UNIQUE:
        if len(mins) > 1:
            return FedVerdict(False, m, M, dist, diam, Reason.MULTIPLE_MINIMA)
        if len(maxs) > 1:
            return FedVerdict(False, m, M, dist, diam, Reason.MULTIPLE_MAXIMA)
    if dist == diam:
        return FedVerdict(True, m, M, dist, diam, Reason.OK)
    return FedVerdict(False, m, M, dist, diam, Reason.DISTANCE_BELOW_DIAMETER)


def degenerate_fed_heuristic(tree: Tree, basis, tol: Tolerances = DEFAULT_TOL,
                             extrema: ExtremaRule = ExtremaRule.SET,
                             diam: Optional[int] = None) -> FedVerdict:
    """FED verdict for a multi-dimensional lambda_2 eigenspace.

    For each ordered pair of leaves ``(u, v)`` at diameter distance, project
    ``e_u - e_v`` onto the eigenspace spanned by the columns of ``basis``.
    The tree passes when some projection peaks at ``u`` and bottoms out at
    ``v`` (under the same tie rule as the simple case).
    """
    basis = np.asarray(basis, dtype=float)
    n = tree.n
    if diam is None:
        diam = diameter(tree)
    leaf_list = sorted(leaves(tree))
    for u in leaf_list:
        du = bfs_distances(tree, u)
        for v in leaf_list:
            if v == u or du[v - 1] != diam:
                continue
            x = np.zeros(n)
            x[u - 1] = 1.0
            x[v - 1] = -1.0
            y = basis @ (basis.T @ x)
            if np.max(np.abs(y)) == 0.0:
                continue
            mins, maxs = _extremal_sets(y, tol.zero)
            if extrema is ExtremaRule.UNIQUE:
                ok = mins == [v] and maxs == [u]
            else:
                ok = v in mins and u in maxs and _min_pair_distance(tree, mins, maxs) == diam
            if ok:
                return FedVerdict(True, v, u, diam, diam, Reason.OK, "projection")
    return FedVerdict(False, None, None, None, diam, Reason.DEGENERATE_EIGENSPACE, "projection")


def fed_from_spectrum(tree: Tree, values: np.ndarray, vectors: np.ndarray,
                      policy: Policy = Policy.PROJECTION, tol: Tolerances = DEFAULT_TOL,
                      extrema: ExtremaRule = ExtremaRule.SET) -> tuple[int, FedVerdict]:
    """FED verdict from a precomputed ascending spectrum; returns (multiplicity, verdict)."""
    diam = diameter(tree)
    mult = _cluster_size(values, tol)
    if mult > 1:
        if policy is Policy.STRICT:
            return mult, FedVerdict(False, None, None, None, diam,
                                    Reason.DEGENERATE_EIGENSPACE, "strict")
        return mult, degenerate_fed_heuristic(tree, vectors[:, 1:1 + mult], tol, extrema, diam)
    phi = _normalise(vectors[:, 1], tol)
    return 1, _verdict_simple(tree, phi, diam, tol, extrema)


def fiedler(tree: Tree, policy: Policy = Policy.PROJECTION, tol: Tolerances = DEFAULT_TOL,
            extrema: ExtremaRule = ExtremaRule.SET) -> FiedlerReport:
    if tree.n < 2:
        raise TooSmall("a Fiedler vector needs at least 2 vertices")
    eig = eigen_symmetric(laplacian(tree))
    return _report(tree, eig.values, eig.vectors, policy, tol, extrema)


def _report(tree, values, vectors, policy, tol, extrema) -> FiedlerReport:
    mult, verdict = fed_from_spectrum(tree, values, vectors, policy, tol, extrema)
    phi = _normalise(vectors[:, 1], tol)
    mins, maxs = _extremal_sets(phi, tol.zero)
    cut = tol.zero * np.max(np.abs(phi))
    zero = frozenset(int(i) + 1 for i in np.flatnonzero(np.abs(phi) <= cut))
    if mult > 1:
        tree_type, char = TreeType.DEGENERATE, None
    else:
        tree_type, char = _classify_with_retry(tree, phi, tol)
    return FiedlerReport(
        lambda2=float(values[1]),
        multiplicity=mult,
        vector=tuple(float(x) for x in phi),
        tree_type=tree_type,
        characteristic=char,
        zero_set=zero,
        argmin_set=frozenset(mins),
        argmax_set=frozenset(maxs),
        fed=verdict,
        eigenvalues=tuple(float(x) for x in values),
    )


def check_fed(tree: Tree, policy: Policy = Policy.PROJECTION, tol: Tolerances = DEFAULT_TOL,
              extrema: ExtremaRule = ExtremaRule.SET) -> FedVerdict:
    if tree.n < 2:
        raise TooSmall("FED needs at least 2 vertices")
    eig = eigen_symmetric(laplacian(tree))
    return fed_from_spectrum(tree, eig.values, eig.vectors, policy, tol, extrema)[1]


def spectra(trees: Sequence[Tree]) -> tuple[np.ndarray, np.ndarray]:
    """Batched Jacobi over trees that all have the same order."""
    if not trees:
        return np.empty((0, 0)), np.empty((0, 0, 0))
    stack = np.stack([laplacian(t) for t in trees])
    return jacobi_eigh_batch(stack)


__all__ = [
    "TreeType", "Policy", "ExtremaRule", "Reason", "Tolerances", "DEFAULT_TOL",
    "EigenResult", "FedVerdict", "FiedlerReport", "laplacian", "laplacian_stack",
    "eigen_symmetric", "algebraic_connectivity", "classify_tree_type",
    "degenerate_fed_heuristic", "fed_from_spectrum", "fiedler", "check_fed", "spectra",
]

