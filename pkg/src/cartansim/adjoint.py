"""Array-compiled adjoint action of an ansatz on a closed string basis.

The analytic path in :mod:`zassenhaus` conjugates term by term through
dictionaries, which is fine for verification but too slow inside a line
search.  Here the same computation is compiled once per (ansatz, basis):

* the element being conjugated lives as a coefficient vector over a fixed
  string basis (normally the DLA basis, which is closed under every
  rotation the ansatz can apply);
* each single-string subfactor exp(i c w P) becomes a sparse planar
  rotation: for every basis string Q_a anticommuting with P we have
  bb(P, Q_a) = 2 s Q_b, and conjugation by the subfactor maps

      v[b] <- cos(2 phi) v[b] + dir * sin(2 phi) * s * v[a],  phi = c*w,

  with dir = +1 for the K^dag E K orientation (and the a<->b pairing a
  permutation of the anticommuting index set, so the scatter is exact);
* the gradient walks the factor sequence backwards, undoing rotations to
  recover intermediate states in O(dim) memory: with R(phi) = exp(phi A),
  d f / d phi = <A E_t, B_t> where E_t is the forward state after the
  rotation and B_t the cost vector pulled back through later rotations.

Everything here must agree with adjoint_K to round-off; the tests assert it.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionError, StructuralError
from .pauli import AlgebraElement, PauliString, bracket_strings
from .zassenhaus import Ansatz, _split


class CompiledAdjoint:
    """Rotation program for K^dag E K / K E K^dag over one string basis."""

    def __init__(self, ansatz: Ansatz, basis: Sequence[PauliString]):
        self.ansatz = ansatz
        self.basis = tuple(basis)
        self.n = self.basis[0].n if self.basis else ansatz.n
        self.index = {p: i for i, p in enumerate(self.basis)}
        if len(self.index) != len(self.basis):
            raise StructuralError("duplicate strings in adjoint basis")

        # one edge block per distinct generator string
        self._edges: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        edge_of: dict[PauliString, int] = {}

        sub_edge: list[int] = []   # edge-block id per subfactor
        sub_weight: list[float] = []
        sub_factor: list[int] = []
        for fi, factor in enumerate(ansatz.factors):
            for p, w in _split(factor):
                if p not in edge_of:
                    edge_of[p] = len(self._edges)
                    self._edges.append(self._compile_edges(p))
                sub_edge.append(edge_of[p])
                sub_weight.append(w)
                sub_factor.append(fi)
        self.sub_edge = np.asarray(sub_edge, dtype=np.intp)
        self.sub_weight = np.asarray(sub_weight, dtype=float)
        self.sub_factor = np.asarray(sub_factor, dtype=np.intp)

        # factor monomials, padded to fixed width for vector evaluation
        m = len(ansatz.factors)
        width = max((len(f.monomial) for f in ansatz.factors), default=1)
        width = max(width, 1)
        self.f_scale = np.array([f.scale for f in ansatz.factors], dtype=float)
        self.m_idx = np.zeros((m, width), dtype=np.intp)
        self.m_pow = np.zeros((m, width), dtype=float)
        for fi, f in enumerate(ansatz.factors):
            for s, (i, p) in enumerate(f.monomial):
                self.m_idx[fi, s] = i
                self.m_pow[fi, s] = p

    def _compile_edges(self, p: PauliString) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        qa, qb, sgn = [], [], []
        for i, q in enumerate(self.basis):
            hit = bracket_strings(p, q)
            if hit is None:
                continue
            c, r = hit
            j = self.index.get(r)
            if j is None:
                raise StructuralError(
                    f"basis is not closed: bb({p}, {q}) = {r} is outside it"
                )
            qa.append(i)
            qb.append(j)
            sgn.append(c / 2.0)
        return (
            np.asarray(qa, dtype=np.intp),
            np.asarray(qb, dtype=np.intp),
            np.asarray(sgn, dtype=float),
        )

    # -- vector <-> element -----------------------------------------------

    def vector(self, element: AlgebraElement) -> np.ndarray:
        v = np.zeros(len(self.basis))
        for p, c in element.items():
            i = self.index.get(p)
            if i is None:
                raise StructuralError(f"element term {p} is outside the adjoint basis")
            v[i] = c
        return v

    def element(self, v: np.ndarray) -> AlgebraElement:
        return AlgebraElement(self.n, {p: v[i] for i, p in enumerate(self.basis)})

    # -- evaluation ---------------------------------------------------------

    def _angles(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.ansatz.parameter_count,):
            raise DimensionError(
                f"theta has shape {theta.shape}, expected ({self.ansatz.parameter_count},)"
            )
        if not len(self.ansatz.factors):
            return np.zeros(0)
        tx = theta[self.m_idx]
        coeffs = self.f_scale * np.prod(np.power(tx, self.m_pow), axis=1)
        return coeffs[self.sub_factor] * self.sub_weight

    def conjugate(self, theta: np.ndarray, v: np.ndarray, side: str = "kdag_e_k") -> np.ndarray:
        """Apply the full rotation program to a coefficient vector."""
        phi = self._angles(theta)
        out = np.array(v, dtype=float, copy=True)
        if side == "kdag_e_k":
            order, direction = range(len(phi)), 1.0
        elif side == "k_e_kdag":
            order, direction = range(len(phi) - 1, -1, -1), -1.0
        else:
            raise StructuralError(f"unknown side {side!r}")
        c2 = np.cos(2 * phi)
        s2 = direction * np.sin(2 * phi)
        for t in order:
            qa, qb, sgn = self._edges[self.sub_edge[t]]
            va = out[qa]
            out[qb] = c2[t] * out[qb] + s2[t] * (sgn * va)
        return out

    def cost(self, theta: np.ndarray, v: np.ndarray, h: np.ndarray) -> float:
        """f = tr((K^dag V K) H) = 2^n <conjugated v, h>."""
        e = self.conjugate(theta, v, "kdag_e_k")
        return float(2**self.n * (e @ h))

    def cost_and_grad(self, theta: np.ndarray, v: np.ndarray, h: np.ndarray) -> tuple[float, np.ndarray]:
        """Cost and its exact gradient in one forward + one backward sweep."""
        theta = np.asarray(theta, dtype=float)
        phi = self._angles(theta)
        tcount = len(phi)
        scale = float(2**self.n)

        e = np.array(v, dtype=float, copy=True)
        c2 = np.cos(2 * phi)
        s2 = np.sin(2 * phi)
        for t in range(tcount):
            qa, qb, sgn = self._edges[self.sub_edge[t]]
            va = e[qa]
            e[qb] = c2[t] * e[qb] + s2[t] * (sgn * va)
        f = scale * float(e @ h)
        grad = np.zeros_like(theta)
        if tcount == 0 or theta.size == 0:
            return f, grad

        # backward sweep: recover E_{t-1} and pull h back, reading off
        # d f / d phi_t = 2^n * 2 * sum sgn * E_t[qa] * B_t[qb]
        b = np.array(h, dtype=float, copy=True)
        gsub = np.empty(tcount)
        for t in range(tcount - 1, -1, -1):
            qa, qb, sgn = self._edges[self.sub_edge[t]]
            gsub[t] = 2.0 * float(np.dot(sgn * e[qa], b[qb]))
            # inverse rotation on both running vectors
            va = e[qa]
            e[qb] = c2[t] * e[qb] - s2[t] * (sgn * va)
            wa = b[qa]
            b[qb] = c2[t] * b[qb] - s2[t] * (sgn * wa)
        gsub *= scale

        # d phi_t / d theta = w_t * d c_{factor(t)} / d theta; fold the
        # per-subfactor pieces into per-factor weights first
        gfac = np.bincount(
            self.sub_factor, weights=gsub * self.sub_weight, minlength=len(self.ansatz.factors)
        )
        tx = theta[self.m_idx]
        powed = np.power(tx, self.m_pow)
        width = self.m_idx.shape[1]
        for s in range(width):
            others = self.f_scale.copy()  # prod over the other slots (width <= 4)
            for s2_ in range(width):
                if s2_ != s:
                    others *= powed[:, s2_]
            pw = self.m_pow[:, s]
            with np.errstate(divide="ignore", invalid="ignore"):
                dphi = np.where(
                    pw > 0, pw * np.power(tx[:, s], np.maximum(pw - 1, 0.0)) * others, 0.0
                )
            np.add.at(grad, self.m_idx[:, s], gfac * dphi)
        return f, grad
