"""Dense-matrix reference implementations used to cross-check the exact algebra.

Everything here is deliberately written against text labels and numpy
primitives only, so a bug in the package's symplectic bookkeeping cannot
propagate into the expected values.
"""

from functools import reduce

import numpy as np

SITE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def label_matrix(label: str) -> np.ndarray:
    """Dense matrix of a label, site 0 as the leftmost kron factor."""
    return reduce(np.kron, (SITE[c] for c in label))


def dense_sum(labels: dict[str, float]) -> np.ndarray:
    dim = 2 ** len(next(iter(labels)))
    out = np.zeros((dim, dim), dtype=complex)
    for lbl, c in labels.items():
        out += c * label_matrix(lbl)
    return out


def random_label(rng: np.random.Generator, n: int, nontrivial: bool = True) -> str:
    while True:
        lbl = "".join(rng.choice(list("IXYZ"), size=n))
        if not nontrivial or set(lbl) != {"I"}:
            return lbl


def power_norm(m: np.ndarray, iters: int = 300, seed: int = 0) -> float:
    """Spectral norm by power iteration on M^dagger M."""
    rng = np.random.default_rng(seed)
    g = m.conj().T @ m
    v = rng.standard_normal(g.shape[0]) + 1j * rng.standard_normal(g.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = g @ v
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            return 0.0
        v = w / lam
    return float(np.sqrt(lam))


def closure_dim(labels: list[str], tol: float = 1e-8) -> int:
    """Brute-force dimension of the Lie closure of i*(the given strings).

    Maintains an orthonormal basis of flattened matrices and keeps taking
    dense commutators until nothing new appears.
    """
    basis: list[np.ndarray] = []

    def add(m: np.ndarray) -> bool:
        v = m.reshape(-1).astype(complex)
        for b in basis:
            v = v - (b.conj() @ v) * b
        nv = np.linalg.norm(v)
        if nv > tol:
            basis.append(v / nv)
            return True
        return False

    mats: list[np.ndarray] = []
    frontier: list[np.ndarray] = []
    for lbl in labels:
        g = 1j * label_matrix(lbl)
        if add(g):
            frontier.append(g)
            mats.append(g)
    while frontier:
        fresh = []
        for a in frontier:
            for b in mats:
                c = a @ b - b @ a
                if add(c):
                    fresh.append(c)
        mats.extend(fresh)
        frontier = fresh
    return len(basis)
