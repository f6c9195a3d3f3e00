import itertools
import random

import numpy as np
import pytest

from fforge.enumeration import decode, free_trees
from fforge.tree import from_edge_list

_CRITERIA: list[tuple[str, bool, str]] = []


def prufer_tree(seq, n):
    """Labelled tree from a Pruefer sequence (independent of the enumerator)."""
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(1, n + 1) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [w for w in range(1, n + 1) if degree[w] == 1]
    edges.append((u, v))
    return from_edge_list(n, edges)


def all_labelled_trees(n):
    if n == 1:
        yield from_edge_list(1, [])
        return
    if n == 2:
        yield from_edge_list(2, [(1, 2)])
        return
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        yield prufer_tree(seq, n)


def random_tree(rng: random.Random, n: int):
    if n <= 2:
        return from_edge_list(n, [(1, 2)] if n == 2 else [])
    return prufer_tree([rng.randint(1, n) for _ in range(n - 2)], n)


def numpy_fiedler(tree):
    """Reference eigenpair from LAPACK, independent of the Jacobi kernel."""
    from fforge.spectral import laplacian

    w, v = np.linalg.eigh(laplacian(tree))
    return w, v


@pytest.fixture(scope="session")
def small_trees():
    """Every free tree with 2 <= n <= 12 vertices, decoded."""
    return [decode(seq) for n in range(2, 13) for seq in free_trees(n)]


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion; a line per criterion is printed at the end."""
    name = request.node.get_closest_marker("criterion").args[0]

    def record(ok: bool, detail: str = ""):
        _CRITERIA.append((name, bool(ok), detail))
        assert ok, f"{name}: {detail}"

    return record


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
