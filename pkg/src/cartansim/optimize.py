"""Trace cost, gradients, BFGS minimizer, and h0 extraction.

The decomposition searches for theta minimizing

    f(theta) = tr(K(theta)^dag v K(theta) H)

where v = sum_i gamma^i h_i is a fixed element of the abelian subalgebra
with decreasing transcendental-ratio coefficients.  At a regular minimum
K H K^dag lands in span(h); the part left outside is reported as a
Frobenius residual, never silently dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .adjoint import CompiledAdjoint
from .errors import ConfigError, NumericalError, StagnationError, StructuralError
from .lie import generate_dla
from .pauli import AlgebraElement, PauliString, hs_inner, sort_strings
from .zassenhaus import Ansatz, adjoint_K


@dataclass(frozen=True)
class TargetV:
    """The target element v = sum_i gamma_i h_i with gamma_i = (1/pi)^i."""

    element: AlgebraElement
    h_basis: tuple[PauliString, ...]
    gammas: tuple[float, ...]


def make_target_v(h_basis: Sequence[PauliString]) -> TargetV:
    """Attach coefficients (1/pi)^i, i = 1..|h|, in canonical order.

    Distinct powers of 1/pi have pairwise irrational ratios, which is what
    makes the minimizer of f single out a genuine diagonalization; the
    decreasing magnitudes keep v bounded for large bases.
    """
    if not h_basis:
        raise StructuralError("empty h basis; cannot build the target element")
    ordered = tuple(sort_strings(h_basis))
    gammas = tuple(float(np.pi ** -(i + 1)) for i in range(len(ordered)))
    element = AlgebraElement(ordered[0].n, dict(zip(ordered, gammas)))
    return TargetV(element, ordered, gammas)


@dataclass(frozen=True)
class OptimizerOptions:
    grad_mode: str = "analytic"  # "analytic" | "fd"
    fd_step: float = 1e-6
    tol_grad_inf: float = 1e-10
    max_iters: int = 5000
    armijo_c1: float = 1e-4
    backtrack_rho: float = 0.5
    wolfe_c2: float = 0.9
    line_search: str = "armijo"  # "armijo" | "wolfe"
    seed: int = 7
    init_scale: float = 0.01
    multi_start: int = 1

    def __post_init__(self) -> None:
        if self.grad_mode not in ("analytic", "fd"):
            raise ConfigError(f"grad_mode must be 'analytic' or 'fd', got {self.grad_mode!r}")
        if self.line_search not in ("armijo", "wolfe"):
            raise ConfigError(f"line_search must be 'armijo' or 'wolfe', got {self.line_search!r}")
        if not 0 < self.armijo_c1 < self.wolfe_c2 < 1:
            raise ConfigError("need 0 < armijo_c1 < wolfe_c2 < 1")
        if not 0 < self.backtrack_rho < 1:
            raise ConfigError("need 0 < backtrack_rho < 1")
        if self.fd_step <= 0:
            raise ConfigError("fd_step must be positive")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")
        if self.multi_start < 1:
            raise ConfigError("multi_start must be at least 1")


@dataclass
class OptimizationResult:
    theta_star: np.ndarray
    cost_trace: list[tuple[int, float, float]]  # (iteration, f, grad inf-norm)
    converged: bool
    h0: AlgebraElement | None = None
    residual_fro: float | None = None

    @property
    def iterations(self) -> int:
        return self.cost_trace[-1][0]

    @property
    def final_cost(self) -> float:
        return self.cost_trace[-1][1]

    @property
    def final_grad_inf(self) -> float:
        return self.cost_trace[-1][2]


def initial_theta(parameter_count: int, options: OptimizerOptions) -> np.ndarray:
    """Seeded uniform draw in [-init_scale, init_scale].

    theta = 0 can sit exactly on a stationary point of f, so a small
    deterministic perturbation is used instead of the origin.
    """
    rng = np.random.default_rng(options.seed)
    return rng.uniform(-options.init_scale, options.init_scale, size=parameter_count)


def cost(ansatz: Ansatz, theta: np.ndarray, v: TargetV | AlgebraElement, h: AlgebraElement) -> float:
    """Reference trace cost through the analytic adjoint path."""
    ve = v.element if isinstance(v, TargetV) else v
    return hs_inner(adjoint_K(ansatz, theta, ve, side="kdag_e_k"), h)


def _closure_basis(ansatz: Ansatz, *elements: AlgebraElement):
    seeds = list(ansatz.k_basis)
    for e in elements:
        seeds.extend(p for p, _ in e.items())
    return generate_dla(sort_strings(set(seeds))).strings


def fd_gradient(cost_fn: Callable[[np.ndarray], float], theta: np.ndarray, step: float) -> np.ndarray:
    """Central finite differences, one coordinate at a time."""
    theta = np.asarray(theta, dtype=float)
    g = np.zeros_like(theta)
    for i in range(theta.size):
        up = theta.copy()
        up[i] += step
        dn = theta.copy()
        dn[i] -= step
        g[i] = (cost_fn(up) - cost_fn(dn)) / (2 * step)
    return g


def gradient(
    ansatz: Ansatz,
    theta: np.ndarray,
    v: TargetV | AlgebraElement,
    h: AlgebraElement,
    options: OptimizerOptions | None = None,
) -> np.ndarray:
    """Gradient of the trace cost, analytic by default.

    The analytic path compiles the adjoint over the bracket closure of
    (k-basis, v, H) and differentiates each factor's rotation angle in
    closed form; the fd path takes central differences of the reference
    cost.  Both agree to ~1e-6 by the acceptance gradient check.
    """
    options = options or OptimizerOptions()
    ve = v.element if isinstance(v, TargetV) else v
    if options.grad_mode == "fd":
        return fd_gradient(lambda th: cost(ansatz, th, ve, h), np.asarray(theta, float), options.fd_step)
    engine = CompiledAdjoint(ansatz, _closure_basis(ansatz, ve, h))
    return engine.cost_and_grad(np.asarray(theta, float), engine.vector(ve), engine.vector(h))[1]


def make_cost_functions(
    ansatz: Ansatz,
    basis: Sequence[PauliString],
    v: TargetV,
    h: AlgebraElement,
    options: OptimizerOptions,
) -> tuple[Callable[[np.ndarray], float], Callable[[np.ndarray], np.ndarray], CompiledAdjoint]:
    """Engine-backed cost/grad closures over a fixed closed basis."""
    engine = CompiledAdjoint(ansatz, basis)
    v_vec = engine.vector(v.element)
    h_vec = engine.vector(h)

    def cost_fn(theta: np.ndarray) -> float:
        return engine.cost(theta, v_vec, h_vec)

    if options.grad_mode == "fd":
        def grad_fn(theta: np.ndarray) -> np.ndarray:
            return fd_gradient(cost_fn, theta, options.fd_step)
    else:
        def grad_fn(theta: np.ndarray) -> np.ndarray:
            return engine.cost_and_grad(theta, v_vec, h_vec)[1]

    return cost_fn, grad_fn, engine


_MAX_BACKTRACKS = 60
_STEP_CAP = 2.0  # trial-direction length cap (trust-region-style safeguard)


def _line_search(cost_fn, theta, f, g, p, options) -> tuple[float, np.ndarray, float] | None:
    """Armijo backtracking; returns (alpha, theta_new, f_new) or None.

    The sufficient-decrease test is evaluated on the computed float values,
    so once improvements shrink below the resolution of f the accepted steps
    go flat (f_new == f) rather than failing outright; an accepted step never
    increases f either way.  The caller watches for such below-resolution
    runs and hands the terminal approach over to the gradient-norm polish.
    """
    slope = float(g @ p)
    alpha = 1.0
    for _ in range(_MAX_BACKTRACKS):
        theta_new = theta + alpha * p
        f_new = cost_fn(theta_new)
        if np.isfinite(f_new) and f_new <= f + options.armijo_c1 * alpha * slope:
            return alpha, theta_new, f_new
        alpha *= options.backtrack_rho
    return None


def _fd_hessian(grad_fn, theta, step):
    """Symmetrized central differences of the gradient."""
    m = theta.size
    h = np.empty((m, m))
    for i in range(m):
        e = np.zeros(m)
        e[i] = step
        h[:, i] = (np.asarray(grad_fn(theta + e), float) - np.asarray(grad_fn(theta - e), float)) / (2.0 * step)
    return 0.5 * (h + h.T)


def _newton_polish(cost_fn, grad_fn, theta, f, g, options):
    """One terminal-phase step accepted on gradient-norm decrease.

    Near a stationary point the cost goes flat at double resolution while the
    analytically computed gradient still carries signal, so the last stretch
    down to tol_grad_inf is driven by ||grad|| instead of f.  The step solves
    the stationarity system grad = 0 with a Levenberg-Marquardt direction
    under a differenced Hessian (a descent direction of ||grad||^2 whatever
    the curvature signs), falling back to the plain ||grad||^2 gradient; the
    cost is only allowed to wobble by rounding, never to genuinely rise.
    """
    hess = _fd_hessian(grad_fn, theta, 1e-6)
    if not np.all(np.isfinite(hess)):
        return None
    lam, vec = np.linalg.eigh(hess)
    mu = (1e-8 * max(1.0, float(np.max(np.abs(lam), initial=0.0)))) ** 2
    d_lm = -(vec @ ((lam / (lam * lam + mu)) * (vec.T @ g)))
    gnorm = float(np.linalg.norm(g))
    f_slack = f + 1e-12 * (1.0 + abs(f))
    for p in (d_lm, -(hess @ g)):
        alpha = 1.0
        for _ in range(30):
            theta_new = theta + alpha * p
            f_new = cost_fn(theta_new)
            if np.isfinite(f_new) and f_new <= f_slack:
                g_new = np.asarray(grad_fn(theta_new), dtype=float)
                if np.all(np.isfinite(g_new)) and float(np.linalg.norm(g_new)) <= 0.99 * gnorm:
                    return theta_new, float(f_new), g_new
            alpha *= options.backtrack_rho
    return None


def _wolfe_search(cost_fn, grad_fn, theta, f, g, p, options):
    hit = _line_search(cost_fn, theta, f, g, p, options)
    if hit is None:
        return None
    alpha, theta_new, f_new = hit
    slope = float(g @ p)
    for _ in range(_MAX_BACKTRACKS):
        g_new = grad_fn(theta_new)
        if float(g_new @ p) >= options.wolfe_c2 * slope:
            return alpha, theta_new, f_new
        # curvature too negative: the step is still deep in the descent,
        # try a longer one as long as Armijo keeps holding
        alpha_try = alpha / options.backtrack_rho
        theta_try = theta + alpha_try * p
        f_try = cost_fn(theta_try)
        if not (np.isfinite(f_try) and f_try <= f + options.armijo_c1 * alpha_try * slope):
            return alpha, theta_new, f_new
        alpha, theta_new, f_new = alpha_try, theta_try, f_try
    return alpha, theta_new, f_new


def bfgs_minimize(
    cost_fn: Callable[[np.ndarray], float],
    grad_fn: Callable[[np.ndarray], np.ndarray],
    theta0: np.ndarray,
    options: OptimizerOptions | None = None,
) -> OptimizationResult:
    """BFGS with inverse-Hessian updates and backtracking line search.

    Terminates on inf-norm(grad) < tol_grad_inf or max_iters.  The inverse
    Hessian starts at the identity and is rebuilt from the identity whenever
    a direction stops being a descent direction or the line search fails;
    the rank-two update is skipped when the curvature product s.y <= 1e-12.

    When the cost reaches its floating-point floor (no direction yields a
    resolvable decrease) the iteration switches to steps accepted on
    gradient-norm decrease, which is what carries ginf the last few decades
    down to tol_grad_inf.  The recorded trace holds the best cost seen so
    far, so it stays non-increasing through that phase; polish steps can
    move f only within rounding slack of the floor.

    Raises NumericalError on non-finite values (carrying the iteration) and
    StagnationError when neither the cost nor the gradient norm can be
    decreased any further.
    """
    options = options or OptimizerOptions()
    theta = np.array(theta0, dtype=float, copy=True)
    dim = theta.size

    f = float(cost_fn(theta))
    g = np.asarray(grad_fn(theta), dtype=float)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        err = NumericalError("non-finite cost or gradient at iteration 0")
        err.iteration = 0
        raise err
    ginf = float(np.max(np.abs(g))) if dim else 0.0
    f_best = f
    trace: list[tuple[int, float, float]] = [(0, f, ginf)]
    hinv = np.eye(dim)

    it = 0
    tiny_run = 0  # consecutive iterations whose cost decrease was below resolution
    polish_gap = 1  # iterations to wait before re-attempting a failed polish
    polish_failures = 0  # failed polishes since the last genuine decrease
    last_polish = -(10**9)
    while ginf >= options.tol_grad_inf and it < options.max_iters:
        it += 1
        stepped = False

        if tiny_run >= 3 and polish_failures < 5 and it - last_polish >= polish_gap:
            # the cost has flattened out at its floating-point floor; drive
            # the gradient down directly instead of grinding ulp by ulp
            last_polish = it
            polish = _newton_polish(cost_fn, grad_fn, theta, f, g, options)
            if polish is not None:
                theta_new, f_new, g_new = polish
                polish_gap = 1
                stepped = True
            else:
                # Hessian builds are the expensive part; back off, and give
                # up on this flat stretch after a few misses
                polish_failures += 1
                polish_gap = min(polish_gap * 2, 64)

        if not stepped:
            p = -hinv @ g
            is_sd = False
            if float(g @ p) >= 0.0:  # numerical loss of descent; restart metric
                hinv = np.eye(dim)
                p = -g
                is_sd = True
            pn = float(np.linalg.norm(p))
            if _STEP_CAP is not None and pn > _STEP_CAP:
                # cap the trial direction so no single step can fling the
                # iterate into the steep large-angle basins, whose curvature
                # outgrows what float-resolution theta steps can resolve;
                # backtracking still shortens the step further as needed
                p = p * (_STEP_CAP / pn)

            if options.line_search == "wolfe":
                step = _wolfe_search(cost_fn, grad_fn, theta, f, g, p, options)
            else:
                step = _line_search(cost_fn, theta, f, g, p, options)
            if step is None and not is_sd:
                hinv = np.eye(dim)
                p = -g
                step = _line_search(cost_fn, theta, f, g, p, options)

            if step is not None:
                _, theta_new, f_new = step
                g_new = np.asarray(grad_fn(theta_new), dtype=float)
                if not np.isfinite(f_new) or not np.all(np.isfinite(g_new)):
                    err = NumericalError(f"non-finite cost or gradient at iteration {it}")
                    err.iteration = it
                    raise err
            else:
                polish = _newton_polish(cost_fn, grad_fn, theta, f, g, options)
                if polish is None:
                    err = StagnationError(
                        f"line search failed after {_MAX_BACKTRACKS} backtracks and the "
                        f"gradient norm cannot be decreased either, at iteration {it}"
                    )
                    err.theta = theta
                    err.iteration = it
                    err.trace = trace
                    raise err
                theta_new, f_new, g_new = polish

        if f - f_new <= 1e-12 * (1.0 + abs(f)):
            tiny_run += 1
        else:
            tiny_run = 0
            polish_gap = 1
            polish_failures = 0

        s = theta_new - theta
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12:
            rho = 1.0 / sy
            sh = np.outer(s, y @ hinv)  # s (y^T Hinv)
            hinv = hinv - rho * (sh + sh.T) + rho * rho * float(y @ hinv @ y) * np.outer(s, s) + rho * np.outer(s, s)

        theta, f, g = theta_new, f_new, g_new
        ginf = float(np.max(np.abs(g))) if dim else 0.0
        f_best = min(f_best, f)
        trace.append((it, f_best, ginf))

    return OptimizationResult(
        theta_star=theta,
        cost_trace=trace,
        converged=bool(ginf < options.tol_grad_inf),
    )


def optimize_theta(
    cost_fn: Callable[[np.ndarray], float],
    grad_fn: Callable[[np.ndarray], np.ndarray],
    parameter_count: int,
    options: OptimizerOptions | None = None,
) -> OptimizationResult:
    """Run bfgs_minimize from options.multi_start seeded draws; keep the best.

    Start i draws its initial point with seed options.seed + i, so a single
    start is exactly bfgs_minimize from initial_theta.  The winner is the
    run with the lowest final cost; among runs whose costs agree within
    float resolution of the lowest, converged ones win, since a tied cost
    with the gradient driven below tolerance is the same minimum resolved
    better.  A start that stalls out is dropped unless every start does,
    in which case the first error propagates.
    """
    options = options or OptimizerOptions()
    results: list[OptimizationResult] = []
    first_error: Exception | None = None
    for start in range(options.multi_start):
        opts_i = options if start == 0 else _with_seed(options, options.seed + start)
        theta0 = initial_theta(parameter_count, opts_i)
        try:
            results.append(bfgs_minimize(cost_fn, grad_fn, theta0, opts_i))
        except (NumericalError, StagnationError) as err:
            if first_error is None:
                first_error = err
    if not results:
        assert first_error is not None
        raise first_error
    f_low = min(r.final_cost for r in results)
    slack = 1e-9 * (1.0 + abs(f_low))
    tied = [r for r in results if r.final_cost <= f_low + slack]
    converged = [r for r in tied if r.converged]
    pool = converged or tied
    return min(pool, key=lambda r: r.final_cost)


def _with_seed(options: OptimizerOptions, seed: int) -> OptimizerOptions:
    fields = {k: getattr(options, k) for k in options.__dataclass_fields__}
    fields["seed"] = seed
    return OptimizerOptions(**fields)


def extract_h0(
    ansatz: Ansatz,
    theta_star: np.ndarray,
    h: AlgebraElement,
    h_basis: Sequence[PauliString],
    engine: CompiledAdjoint | None = None,
) -> tuple[AlgebraElement, float]:
    """h0 = projection of K H K^dag onto span(h), plus the leftover norm.

    The residual is the Frobenius norm of the component outside span(h);
    by trace orthogonality ||E||^2 = ||h0||^2 + residual^2 exactly.
    """
    if engine is not None:
        e = engine.element(engine.conjugate(theta_star, engine.vector(h), side="k_e_kdag"))
    else:
        e = adjoint_K(ansatz, theta_star, h, side="k_e_kdag")
    h0 = e.restricted(h_basis)
    residual = (e - h0).norm()
    return h0, float(residual)


def normalized_cost(f: float, v: TargetV, h: AlgebraElement) -> float:
    """f divided by ||v||_fro * ||H||_fro (the scale-free trace overlap)."""
    denom = v.element.norm() * h.norm()
    if denom == 0.0:
        raise StructuralError("cannot normalize cost: zero-norm v or H")
    return f / denom
