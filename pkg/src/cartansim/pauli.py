"""Exact algebra of n-qubit Pauli strings and real-weighted Pauli sums.

Conventions
-----------
A Pauli string on n sites is a pair of n-bit integers ``(x, z)``; bit k of
each word describes site k:

    (x_k, z_k) = (0, 0) -> I,  (1, 0) -> X,  (1, 1) -> Y,  (0, 1) -> Z

Site 0 is the *leftmost* character of a text label and the *least
significant* bit of the words.  Every string factors as

    P = i**y_count(P) * X^x Z^z

with ``y_count`` the number of Y sites, so products reduce to XOR on the
words plus an integer power of i tracked mod 4.  All string-level algebra is
exact; floating point enters only through coefficients.

A Hermitian operator is represented as a real-weighted sum ``E = sum c_P P``
(:class:`AlgebraElement`).  The anti-Hermitian element it stands for is
``i E``, and the bracket used throughout the package is the adapted one

    bb(A, B) = -i [A, B]

which maps real-weighted sums to real-weighted sums, keeping the Lie-algebra
side of the computation in real arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import DimensionError, PauliParseError, ResourceLimitError

#: Hard cap on the qubit count of a single string (bit-vector bookkeeping
#: stays cheap and every dense matrix stays addressable).
MAX_QUBITS = 12

#: Coefficients with magnitude below this are dropped from sums.
PRUNE_THRESHOLD = 1e-14

#: Default cap for dense-matrix conversion (2^12 x 2^12 is the largest
#: matrix the verification layer is willing to materialize).
DENSE_QUBIT_CAP = 12

_LETTERS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_BITS = {v: k for k, v in _LETTERS.items()}

_SITE_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, slots=True)
class PauliString:
    """A single Pauli string in symplectic (x, z) encoding.

    Attributes
    ----------
    n : int
        Number of sites, 1 <= n <= MAX_QUBITS.
    x, z : int
        Bit masks of X-type and Z-type support (bit k = site k).
    """

    n: int
    x: int
    z: int

    def __post_init__(self) -> None:
        if not 1 <= self.n <= MAX_QUBITS:
            raise DimensionError(f"qubit count must be in 1..{MAX_QUBITS}, got {self.n}")
        lim = 1 << self.n
        if not (0 <= self.x < lim and 0 <= self.z < lim):
            raise DimensionError(f"bit masks out of range for n={self.n}: x={self.x} z={self.z}")

    @property
    def label(self) -> str:
        return "".join(_LETTERS[(self.x >> k) & 1, (self.z >> k) & 1] for k in range(self.n))

    @property
    def y_count(self) -> int:
        """Number of sites carrying a Y factor."""
        return (self.x & self.z).bit_count()

    @property
    def weight(self) -> int:
        """Number of non-identity sites."""
        return (self.x | self.z).bit_count()

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def identity_string(n: int) -> PauliString:
    return PauliString(n, 0, 0)


def parse_label(label: str) -> PauliString:
    """Parse a text label like ``"XIYZ"`` (site 0 leftmost).

    Raises
    ------
    PauliParseError
        If the label is empty, too long, or has a non-IXYZ character;
        the message names the offending position.
    """
    if not label:
        raise PauliParseError("empty Pauli label")
    if len(label) > MAX_QUBITS:
        raise PauliParseError(f"label {label!r} longer than {MAX_QUBITS} sites")
    x = z = 0
    for k, ch in enumerate(label):
        try:
            xb, zb = _BITS[ch]
        except KeyError:
            raise PauliParseError(f"invalid character {ch!r} at position {k} in {label!r}") from None
        x |= xb << k
        z |= zb << k
    return PauliString(len(label), x, z)


def canonical_key(p: PauliString) -> tuple[int, int]:
    """Sort key for the package-wide canonical string order.

    Strings sort by (z word, x word) as unsigned integers; this puts plain-X
    strings first and plain-Z strings of high support last, and is the order
    used for DLA bases, subalgebra seeds, and parameter indexing.
    """
    return (p.z, p.x)


def sort_strings(strings: Iterable[PauliString]) -> list[PauliString]:
    return sorted(strings, key=canonical_key)


def _require_same_n(a, b) -> None:
    if a.n != b.n:
        raise DimensionError(f"mixed qubit counts: {a.n} vs {b.n}")


def pauli_mul(p: PauliString, q: PauliString) -> tuple[int, PauliString]:
    """Exact product ``P Q = i**rho * R``.

    Returns ``(rho, R)`` with ``rho`` an integer mod 4.  Follows from
    ``P = i**y(P) X^x Z^z`` and ``Z^z X^x = (-1)^{|z & x|} X^x Z^z``.
    """
    _require_same_n(p, q)
    r = PauliString(p.n, p.x ^ q.x, p.z ^ q.z)
    rho = (p.y_count + q.y_count - r.y_count + 2 * (p.z & q.x).bit_count()) % 4
    return rho, r


def commutes(p: PauliString, q: PauliString) -> bool:
    """True when the two strings commute (symplectic form is even)."""
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def bracket_strings(p: PauliString, q: PauliString) -> tuple[float, PauliString] | None:
    """Adapted bracket ``bb(P, Q) = -i(PQ - QP)`` of two strings.

    Returns ``None`` for commuting strings, else ``(c, R)`` with
    ``bb(P, Q) = c R`` and c = +/-2.  Anticommuting strings give
    ``PQ = i**rho R`` with rho odd, so ``-i(PQ - QP) = -2 i**(rho+1) R``.
    """
    if commutes(p, q):
        return None
    rho, r = pauli_mul(p, q)
    # rho is odd here; i**(rho+1) is -1 for rho=1 and +1 for rho=3
    return (2.0 if rho == 1 else -2.0), r


class AlgebraElement:
    """Real-weighted sum of Pauli strings on a fixed number of sites.

    Terms with |coefficient| < PRUNE_THRESHOLD are dropped on construction,
    so every arithmetic result is automatically pruned.  Instances should be
    treated as immutable.
    """

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms: Mapping[PauliString, float] | None = None):
        if not 1 <= n <= MAX_QUBITS:
            raise DimensionError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        self.n = n
        kept: dict[PauliString, float] = {}
        if terms:
            for p, c in terms.items():
                if p.n != n:
                    raise DimensionError(f"term {p} has {p.n} sites, element has {n}")
                c = float(c)
                if abs(c) >= PRUNE_THRESHOLD:
                    kept[p] = c
        self._terms = kept

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_label_dict(cls, labels: Mapping[str, float], n: int | None = None) -> "AlgebraElement":
        """Build from ``{"XX": 1.0, "ZI": 0.5, ...}``; labels must agree on length."""
        parsed = {parse_label(lbl): c for lbl, c in labels.items()}
        if n is None:
            if not parsed:
                raise DimensionError("cannot infer qubit count from an empty label dict")
            n = next(iter(parsed)).n
        return cls(n, parsed)

    @classmethod
    def from_string(cls, p: PauliString, coeff: float = 1.0) -> "AlgebraElement":
        return cls(p.n, {p: coeff})

    @classmethod
    def zero(cls, n: int) -> "AlgebraElement":
        return cls(n, {})

    @classmethod
    def from_records(cls, records: Iterable[Mapping], n: int | None = None) -> "AlgebraElement":
        """Inverse of to_records: a list of {label, coefficient} entries."""
        return cls.from_label_dict({r["label"]: r["coefficient"] for r in records}, n=n)

    def to_records(self) -> list[dict]:
        """Serialized form: one {label, coefficient} record per term, canonical order."""
        return [{"label": p.label, "coefficient": c} for p, c in self.sorted_terms()]

    # -- mapping access -------------------------------------------------------

    def items(self) -> Iterator[tuple[PauliString, float]]:
        return iter(self._terms.items())

    def sorted_terms(self) -> list[tuple[PauliString, float]]:
        """Terms in canonical (z, x) order."""
        return sorted(self._terms.items(), key=lambda it: canonical_key(it[0]))

    def coeff(self, p: PauliString) -> float:
        return self._terms.get(p, 0.0)

    def support(self) -> frozenset[PauliString]:
        return frozenset(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, p: PauliString) -> bool:
        return p in self._terms

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        _require_same_n(self, other)
        acc = dict(self._terms)
        for p, c in other._terms.items():
            acc[p] = acc.get(p, 0.0) + c
        return AlgebraElement(self.n, acc)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        _require_same_n(self, other)
        acc = dict(self._terms)
        for p, c in other._terms.items():
            acc[p] = acc.get(p, 0.0) - c
        return AlgebraElement(self.n, acc)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.n, {p: -c for p, c in self._terms.items()})

    def __mul__(self, scalar: float) -> "AlgebraElement":
        return AlgebraElement(self.n, {p: scalar * c for p, c in self._terms.items()})

    __rmul__ = __mul__

    def restricted(self, keep: Iterable[PauliString]) -> "AlgebraElement":
        """Projection onto the span of the given strings."""
        keep = set(keep)
        return AlgebraElement(self.n, {p: c for p, c in self._terms.items() if p in keep})

    def norm(self) -> float:
        """Normalized Frobenius-type norm sqrt(2^n * sum c_P^2)."""
        return float(np.sqrt(hs_inner(self, self)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def allclose(self, other: "AlgebraElement", tol: float = 1e-12) -> bool:
        _require_same_n(self, other)
        for p in self.support() | other.support():
            if abs(self.coeff(p) - other.coeff(p)) > tol:
                return False
        return True

    def __repr__(self) -> str:
        parts = [f"{c:+g}*{p}" for p, c in self.sorted_terms()[:6]]
        if len(self) > 6:
            parts.append("...")
        body = " ".join(parts) if parts else "0"
        return f"<AlgebraElement n={self.n}: {body}>"


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Adapted bracket ``bb(A, B) = -i[A, B]`` of two real-weighted sums."""
    _require_same_n(a, b)
    acc: dict[PauliString, float] = {}
    for p, cp in a.items():
        for q, cq in b.items():
            hit = bracket_strings(p, q)
            if hit is None:
                continue
            c, r = hit
            acc[r] = acc.get(r, 0.0) + cp * cq * c
    return AlgebraElement(a.n, acc)


def hs_inner(a: AlgebraElement, b: AlgebraElement) -> float:
    """Hilbert-Schmidt inner product ``tr(A B) = 2^n sum_P a_P b_P``."""
    _require_same_n(a, b)
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    s = 0.0
    for p, c in small.items():
        d = big.coeff(p)
        if d:
            s += c * d
    return float(2**a.n * s)


def string_dense(p: PauliString) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a single string (site 0 = leftmost kron factor)."""
    return reduce(np.kron, (_SITE_MATS[ch] for ch in p.label))


def to_dense(a: AlgebraElement, qubit_cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
    """Dense Hermitian matrix of a sum; refuses above ``qubit_cap`` qubits."""
    if a.n > qubit_cap:
        raise ResourceLimitError(f"dense conversion of {a.n} qubits exceeds cap {qubit_cap}")
    out = np.zeros((2**a.n, 2**a.n), dtype=complex)
    for p, c in a.items():
        out += c * string_dense(p)
    return out


def y_parity(p: PauliString) -> int:
    """1 for an odd number of Y sites, else 0.

    This is the grading of the involution theta(iP) = -(iP)^T: strings with
    odd Y-count are antisymmetric (theta-fixed, the `k` side), strings with
    even Y-count are symmetric (the `m` side).
    """
    return p.y_count & 1
