"""Dense verification: exact propagators, error curves, truncation scaling.

Everything here is the slow, trustworthy path: 2^n x 2^n matrices, Hermitian
eigendecompositions, and spectral norms.  It exists to check the algebraic
pipeline, not to compete with it.

Conventions: expm_hermitian(H, t) = e^{-iHt}; the truncated product uses the
evolution orientation A' = -it A so its error against e^{-is(A+B)} shrinks
at the advertised order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConfigError, NumericalError, ResourceLimitError, StructuralError
from .pauli import AlgebraElement, bracket, commutes, string_dense, to_dense

#: Largest matrix dimension the dense layer will touch (2^12).
DENSE_DIM_CAP = 4096


def _check_dim(dim: int) -> None:
    if dim > DENSE_DIM_CAP:
        raise ResourceLimitError(f"dense operation at dimension {dim} exceeds cap {DENSE_DIM_CAP}")


def expm_hermitian(h: AlgebraElement | np.ndarray, t: float) -> np.ndarray:
    """U(t) = e^{-iHt} through a Hermitian eigendecomposition.

    Accepts an AlgebraElement or an already-dense Hermitian matrix.
    """
    m = to_dense(h) if isinstance(h, AlgebraElement) else np.asarray(h)
    _check_dim(m.shape[0])
    lam, vec = np.linalg.eigh(m)
    if not np.all(np.isfinite(lam)):
        raise NumericalError("eigendecomposition returned non-finite eigenvalues")
    return (vec * np.exp(-1j * lam * t)) @ vec.conj().T


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value, via the top eigenvalue of M^dag M."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ConfigError(f"spectral_norm expects a square matrix, got shape {m.shape}")
    _check_dim(m.shape[0])
    ev = np.linalg.eigvalsh(m.conj().T @ m)
    top = float(ev[-1])
    return float(np.sqrt(max(top, 0.0)))


def exp_element(e: AlgebraElement, t: float) -> np.ndarray:
    """e^{-iEt} for a real-weighted sum, using closed forms when terms commute.

    For pairwise-commuting support the exponential factors exactly into
    prod_P (cos(c_P t) I - i sin(c_P t) P); otherwise falls back to the
    eigensolver path.
    """
    terms = e.sorted_terms()
    dim = 2**e.n
    _check_dim(dim)
    if all(commutes(p, q) for (p, _), (q, _) in combinations(terms, 2)):
        out = np.eye(dim, dtype=complex)
        for p, c in terms:
            out = out @ (np.cos(c * t) * np.eye(dim) - 1j * np.sin(c * t) * string_dense(p))
        return out
    return expm_hermitian(e, t)


def fixed_depth_evolution(k_c: np.ndarray, h0: AlgebraElement, t: float) -> np.ndarray:
    """U(t) = K_c^dag e^{-i h0 t} K_c with h0 on mutually commuting strings.

    The commutation requirement is what the Cartan subalgebra promises;
    violating it here means the caller's h0 is not actually diagonalizable
    this way, so it is rejected loudly.
    """
    terms = h0.sorted_terms()
    for (p, _), (q, _) in combinations(terms, 2):
        if not commutes(p, q):
            raise StructuralError(
                f"h0 support is not mutually commuting: {p.label} vs {q.label}"
            )
    core = exp_element(h0, t)
    return k_c.conj().T @ core @ k_c


@dataclass(frozen=True)
class ErrorCurve:
    """Spectral-norm distance between exact and fixed-depth evolution."""

    ts: np.ndarray
    errors: np.ndarray

    def rows(self) -> list[tuple[float, float]]:
        return [(float(t), float(e)) for t, e in zip(self.ts, self.errors)]

    @property
    def max_error(self) -> float:
        return float(np.max(self.errors)) if len(self.errors) else 0.0


def error_curve(
    h: AlgebraElement, k_c: np.ndarray, h0: AlgebraElement, t_grid: np.ndarray
) -> ErrorCurve:
    """|| e^{-iHt} - K_c^dag e^{-i h0 t} K_c ||_2 over a time grid."""
    m = to_dense(h)
    lam, vec = np.linalg.eigh(m)
    vecH = vec.conj().T
    # pre-build the commuting-core pieces once; per-t work is then O(dim^2)
    dim = m.shape[0]
    h0_terms = [(c, string_dense(p)) for p, c in h0.sorted_terms()]
    for (pi, _), (qi, _) in combinations(h0.sorted_terms(), 2):
        if not commutes(pi, qi):
            raise StructuralError(
                f"h0 support is not mutually commuting: {pi.label} vs {qi.label}"
            )
    kdag = k_c.conj().T
    ts = np.asarray(t_grid, dtype=float)
    errs = np.empty(len(ts))
    eye = np.eye(dim)
    for i, t in enumerate(ts):
        exact = (vec * np.exp(-1j * lam * t)) @ vecH
        core = np.eye(dim, dtype=complex)
        for c, pd in h0_terms:
            core = core @ (np.cos(c * t) * eye - 1j * np.sin(c * t) * pd)
        errs[i] = spectral_norm(exact - kdag @ core @ k_c)
    return ErrorCurve(ts, errs)


# ----------------------------------------------------------------- truncation

def _expm_antihermitian(w: np.ndarray) -> np.ndarray:
    """e^W for anti-Hermitian W (i.e. W = -iM with M Hermitian)."""
    return expm_hermitian(1j * w, 1.0)


def zassenhaus_product(
    a: AlgebraElement,
    b: AlgebraElement,
    order: int,
    scale: float,
    variant: str = "standard",
) -> np.ndarray:
    """Truncated product e^{A'}e^{B'} prod_k e^{W_k}, A' = -i*scale*A.

    W_k is assembled densely from the nested-commutator table of
    :func:`cartansim.zassenhaus.truncation_coefficients`; folding ``scale``
    into A' and B' first makes every W_k scale-homogeneous automatically.
    """
    from .zassenhaus import truncation_coefficients

    if order not in (1, 2, 3, 4):
        raise ConfigError(f"product order must be 1..4, got {order}")
    if a.n > 6 or b.n > 6:
        raise ResourceLimitError("truncated products are limited to n <= 6")
    ap = -1j * scale * to_dense(a)
    bp = -1j * scale * to_dense(b)
    out = _expm_antihermitian(ap) @ _expm_antihermitian(bp)
    sides = {"A": ap, "B": bp}
    for k in range(2, order + 1):
        w = np.zeros_like(ap)
        for shape, coeff in truncation_coefficients(k, variant).items():
            nest = sides[shape[-1]]
            for letter in reversed(shape[:-1]):
                m = sides[letter]
                nest = m @ nest - nest @ m
            w = w + coeff * nest
        out = out @ _expm_antihermitian(w)
    return out


DEFAULT_S_GRID = tuple(np.geomspace(1e-3, 1e-1, 7))

#: Errors at or below this are machine-precision floor; fitting a slope
#: through them is meaningless.
SATURATION_FLOOR = 1e-14


@dataclass(frozen=True)
class SlopeReport:
    """Log-log fit of truncation error against the step scale."""

    order: int
    slope: float | None
    intercept: float | None
    points: tuple[tuple[float, float], ...]  # (s, error) rows
    saturated: bool

    def to_record(self) -> dict:
        return {
            "order": self.order,
            "slope": self.slope,
            "intercept": self.intercept,
            "points": [list(row) for row in self.points],
            "saturated": self.saturated,
        }


def truncation_slope(
    a: AlgebraElement,
    b: AlgebraElement,
    order: int,
    s_grid=DEFAULT_S_GRID,
    variant: str = "standard",
) -> SlopeReport:
    """Fitted scaling exponent of ||e^{-is(A+B)} - product(s)|| vs s.

    Expected slope is order + 1.  Grids that sit entirely at the numerical
    floor come back flagged ``saturated`` with no slope.
    """
    s_vals = [float(s) for s in s_grid]
    if len(s_vals) < 5:
        raise ConfigError("slope fits need at least 5 grid points")
    total = a + b
    rows = []
    for s in s_vals:
        err = spectral_norm(expm_hermitian(total, s) - zassenhaus_product(a, b, order, s, variant))
        rows.append((s, float(err)))
    usable = [(s, e) for s, e in rows if e > SATURATION_FLOOR]
    if len(usable) < 3:
        return SlopeReport(order, None, None, tuple(rows), True)
    logs = np.log([s for s, _ in usable])
    loge = np.log([e for _, e in usable])
    slope, intercept = np.polyfit(logs, loge, 1)
    return SlopeReport(order, float(slope), float(intercept), tuple(rows), False)


def trotter_step(
    parts: tuple[AlgebraElement, AlgebraElement],
    t: float,
    m: int,
    corrected: bool = False,
) -> np.ndarray:
    """m-step Trotterization of e^{-i(A+B)t}, optionally Zassenhaus-corrected.

    Uncorrected: (e^{-iAt/m} e^{-iBt/m})^m.  Corrected appends the
    second-order factor exp(i (t/m)^2 bb(A,B) / 2) to every step, which
    cancels the leading commutator error exactly.
    """
    if m < 1:
        raise ConfigError(f"step count must be >= 1, got {m}")
    a, b = parts
    if a.n > 6 or b.n > 6:
        raise ResourceLimitError("trotter stepping is limited to n <= 6")
    dt = t / m
    step = expm_hermitian(a, dt) @ expm_hermitian(b, dt)
    if corrected:
        c = bracket(a, b)
        if not c.is_zero():
            step = step @ exp_element(c, -(dt * dt) / 2.0)
    return np.linalg.matrix_power(step, m)


@dataclass(frozen=True)
class TrotterSweep:
    """Error vs step count at fixed t, with log-log slopes in 1/m."""

    t: float
    ms: tuple[int, ...]
    uncorrected: tuple[float, ...]
    corrected: tuple[float, ...]
    slope_uncorrected: float
    slope_corrected: float

    def to_record(self) -> dict:
        return {
            "t": self.t,
            "ms": list(self.ms),
            "uncorrected": list(self.uncorrected),
            "corrected": list(self.corrected),
            "slope_uncorrected": self.slope_uncorrected,
            "slope_corrected": self.slope_corrected,
        }


def trotter_sweep(
    a: AlgebraElement,
    b: AlgebraElement,
    t: float = 0.5,
    ms: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64),
) -> TrotterSweep:
    """Compare corrected vs uncorrected stepping over a range of m."""
    exact = expm_hermitian(a + b, t)
    un, co = [], []
    for m in ms:
        un.append(spectral_norm(exact - trotter_step((a, b), t, m, corrected=False)))
        co.append(spectral_norm(exact - trotter_step((a, b), t, m, corrected=True)))

    def fit(errs):
        pairs = [(m, e) for m, e in zip(ms, errs) if e > SATURATION_FLOOR]
        if len(pairs) < 3:
            return 0.0
        x = np.log([1.0 / m for m, _ in pairs])
        y = np.log([e for _, e in pairs])
        return float(np.polyfit(x, y, 1)[0])

    return TrotterSweep(
        t,
        tuple(int(m) for m in ms),
        tuple(float(e) for e in un),
        tuple(float(e) for e in co),
        slope_uncorrected=fit(un),
        slope_corrected=fit(co),
    )
