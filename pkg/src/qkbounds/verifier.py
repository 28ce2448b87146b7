"""Numerical certification of the closed-form bounds at desk scale.

Builds diagonal state and observable matrices from spectra, samples
Haar-random unitaries, and runs monotone gradient ascent of the yield
J(U) = Tr(U P U^dag Theta) over the unitary group. A certificate holds when
optimization attains the closed-form maximum (and minimum, via ascent on the
negated observable) and no evaluated unitary ever exceeds it.

The ascent direction is G = [Theta, U P U^dag], which is anti-Hermitian, so
the update exp(eta * G) U stays exactly unitary up to roundoff; the yield's
derivative along it at eta = 0 equals the squared Frobenius norm of G, hence
the direction ascends until a critical manifold is reached.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NotHermitian, NotUnitary, ValidationError
from .spectra import CompositeSpectra

UNITARITY_TOL = 1e-10
HERMITICITY_TOL = 1e-10

# Converged optima must match the closed form this tightly.
ATTAIN_TOL = 1e-6
# No evaluated yield may exceed the closed form by more than this.
EXCEED_TOL = 1e-9

# Steps between QR re-orthonormalizations of the iterate.
REORTHO_EVERY = 50

# Stagnation forecast: once the yield gains less than STALL_J_GAIN
# (relative) per window, the run only chases the gradient tolerance. The
# measured per-window gradient decay then predicts the iterations still
# needed; runs that cannot get there within max_iter stop early, reported
# as not converged.
STALL_WINDOW = 40
STALL_J_GAIN = 1e-9


@dataclass(frozen=True)
class HermitianPair:
    """State and observable matrices entering the yield functional.

    Both are Hermitian; by construction from spectra they are diagonal,
    which loses no generality because the bounds depend on eigenvalues only.
    """

    p_mat: np.ndarray
    theta_mat: np.ndarray

    def __post_init__(self):
        if self.p_mat.shape != self.theta_mat.shape or self.p_mat.shape[0] != self.p_mat.shape[1]:
            raise NotHermitian(f"matrix shapes {self.p_mat.shape} and {self.theta_mat.shape} unusable")
        for name, a in (("state", self.p_mat), ("observable", self.theta_mat)):
            if np.linalg.norm(a - a.conj().T) > HERMITICITY_TOL:
                raise NotHermitian(f"{name} matrix is not Hermitian")
        if abs(np.trace(self.p_mat).real - 1.0) > 1e-10:
            raise NotHermitian(f"state matrix trace {np.trace(self.p_mat)!r} != 1")

    @property
    def dim(self) -> int:
        return self.p_mat.shape[0]

    @classmethod
    def from_composite(cls, c: CompositeSpectra) -> "HermitianPair":
        return cls(
            np.diag(np.asarray(c.big_p.values, dtype=complex)),
            np.diag(np.asarray(c.big_theta, dtype=complex)),
        )

    @classmethod
    def from_matrices(cls, p: np.ndarray, theta: np.ndarray) -> "HermitianPair":
        """Accept full Hermitian inputs by diagonalizing both."""
        return cls(
            np.diag(np.asarray(hermitian_eigenvalues(p), dtype=complex)),
            np.diag(np.asarray(hermitian_eigenvalues(theta), dtype=complex)),
        )

    def closed_form_bounds(self) -> tuple[float, float]:
        """Kinematic bounds from the eigenvalue multisets."""
        p = hermitian_eigenvalues(self.p_mat)
        t = hermitian_eigenvalues(self.theta_mat)
        return float(np.dot(p, t)), float(np.dot(p[::-1], t))


@dataclass
class AscentTrace:
    """Iterate history of one gradient ascent run."""

    yields: list[float]
    grad_norms: list[float]
    converged: bool
    final_yield: float
    iterations: int
    seed: int


@dataclass(frozen=True)
class AscentConfig:
    """Step-size and stopping controls for the ascent loop.

    A step of None means 0.1 / ||Theta||_F, chosen at run time. The step is
    the first trial size of the backtracking line search; after an
    iteration accepts its first trial, the next iteration opens at twice
    the accepted size (capped at 256x the base), which keeps iteration
    counts flat as the dimension grows.
    """

    step: Optional[float] = None
    shrink: float = 0.5
    grad_tol: float = 1e-8
    max_iter: int = 5000
    grow: float = 2.0
    max_step_factor: float = 256.0


@dataclass
class CertificateReport:
    """Outcome of a multi-restart bound certification."""

    attained_max: float
    attained_min: float
    certificate: bool
    kin_max: float
    kin_min: float
    violation: bool
    restarts: int
    seed: int
    converged_runs: int
    total_runs: int
    traces: list[AscentTrace] = field(default_factory=list, repr=False)


def yield_of(u: np.ndarray, hp: HermitianPair) -> float:
    """Evaluate the control yield at a unitary.

    Checks unitarity to 1e-10 in Frobenius norm and that the trace's
    imaginary part is negligible before discarding it.
    """
    n = hp.dim
    if u.shape != (n, n):
        raise NotUnitary(f"shape {u.shape} does not match dimension {n}")
    if np.linalg.norm(u.conj().T @ u - np.eye(n)) > UNITARITY_TOL:
        raise NotUnitary("matrix fails the unitarity residual check")
    val = np.trace(u @ hp.p_mat @ u.conj().T @ hp.theta_mat)
    if abs(val.imag) > 1e-10:
        raise NotUnitary(f"yield has imaginary residue {val.imag!r}")
    return float(val.real)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary.

    QR of a complex standard-normal matrix, with the triangular factor's
    diagonal phases folded into Q so the distribution is exactly invariant.
    """
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def jacobi_eigh(a: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps the strict upper triangle, annihilating each entry with a
    complex plane rotation, until the off-diagonal Frobenius norm falls
    below tol times the input norm. Returns eigenvalues ascending and the
    matching eigenvector columns.
    """
    if np.linalg.norm(a - a.conj().T) > HERMITICITY_TOL:
        raise NotHermitian("matrix fails the Hermitian symmetry check")
    n = a.shape[0]
    w = a.astype(complex).copy()
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v

    def off_norm() -> float:
        return math.sqrt(sum(abs(w[i, j]) ** 2 for i in range(n) for j in range(i + 1, n)) * 2.0)

    for _ in range(60):  # sweeps; quadratic convergence makes this generous
        if off_norm() <= tol * scale:
            break
        for p in range(n):
            for q in range(p + 1, n):
                apq = w[p, q]
                if abs(apq) <= tol * scale / (n * n):
                    continue
                # phase that makes the pivot real, then a real rotation
                phase = apq / abs(apq)
                app, aqq = w[p, p].real, w[q, q].real
                tau = (aqq - app) / (2.0 * abs(apq))
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                # column transform: [col_p, col_q] <- [c*col_p - conj(s*phase)*col_q, s*phase*col_p + c*col_q]
                col_p = w[:, p].copy()
                col_q = w[:, q].copy()
                w[:, p] = c * col_p - np.conj(phase) * s * col_q
                w[:, q] = phase * s * col_p + c * col_q
                row_p = w[p, :].copy()
                row_q = w[q, :].copy()
                w[p, :] = c * row_p - phase * s * row_q
                w[q, :] = np.conj(phase) * s * row_p + c * row_q
                w[p, q] = 0.0
                w[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - np.conj(phase) * s * vq
                v[:, q] = phase * s * vp + c * vq
    vals = np.real(np.diagonal(w))
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def hermitian_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Sorted (nondecreasing) eigenvalues of a Hermitian matrix."""
    vals, _ = jacobi_eigh(np.asarray(a, dtype=complex))
    return vals


def _expm_minus_identity(w: np.ndarray, v: np.ndarray, eta: float) -> np.ndarray:
    """exp(eta * g) - I from the eigendecomposition w, v of 1j * g.

    The unitary step exp(eta g) is applied as I plus this matrix; numpy's
    eigh is used in this hot path instead of the Jacobi routine purely for
    speed. Formed without ever representing exp(eta * g) itself, so the
    entries keep full relative accuracy when eta * g is tiny. This is what
    lets the line search resolve yield increases far below one ulp of the
    yield.
    """
    x = -eta * w
    diag = -2.0 * np.sin(x / 2.0) ** 2 + 1j * np.sin(x)  # exp(i x) - 1, stable
    return (v * diag) @ v.conj().T


def riemannian_ascent(
    hp: HermitianPair,
    start: np.ndarray,
    cfg: AscentConfig | None = None,
    seed: int = 0,
) -> AscentTrace:
    """Monotone gradient ascent of the yield over the unitary group.

    Moves along exp(eta * [Theta, U P U^dag]) U with backtracking: eta is
    halved until the yield does not decrease. The yield change of a trial
    step is evaluated in cancellation-free form (from exp(eta G) - I), so
    steps are judged and the running yield accumulated at full relative
    accuracy even when the change is far below one ulp of the yield itself.
    Converges when the gradient's Frobenius norm falls below cfg.grad_tol;
    hitting max_iter returns a trace with converged False rather than
    raising.
    """
    cfg = cfg or AscentConfig()
    n = hp.dim
    u = np.array(start, dtype=complex)
    if np.linalg.norm(u.conj().T @ u - np.eye(n)) > UNITARITY_TOL:
        raise NotUnitary("start matrix fails the unitarity residual check")
    theta = hp.theta_mat
    eta0 = cfg.step if cfg.step is not None else 0.1 / max(np.linalg.norm(theta), 1e-30)

    # P and Theta are diagonal whenever built from spectra; exploit that in
    # the hot loop but keep the general path for full Hermitian inputs
    theta_diag = np.ascontiguousarray(np.diagonal(theta))
    diag_theta = not np.any(theta - np.diag(theta_diag))

    def _grad(mat: np.ndarray) -> np.ndarray:
        if diag_theta:
            return (theta_diag[:, None] - theta_diag[None, :]) * mat
        return theta @ mat - mat @ theta

    def _trace_with_theta(mat: np.ndarray) -> float:
        if diag_theta:
            return float(np.dot(np.diagonal(mat).real, theta_diag.real))
        return float(np.einsum("ij,ji->", mat, theta).real)

    a = u @ hp.p_mat @ u.conj().T
    j = _trace_with_theta(a)
    yields = [j]
    grad_norms: list[float] = []
    converged = False
    iterations = 0
    eta_open = eta0
    # stagnation watch: near-degenerate spectra make the gradient decay
    # arbitrarily slowly although the yield converged long ago; forecast
    # whether the tolerance is reachable within budget and stop if not
    ref_j, ref_gn, ref_it = j, math.inf, 0

    for it in range(cfg.max_iter):
        g = _grad(a)
        gn = float(np.linalg.norm(g))
        grad_norms.append(gn)
        if gn < cfg.grad_tol:
            converged = True
            break
        if it - ref_it >= STALL_WINDOW:
            if j - ref_j <= STALL_J_GAIN * (1.0 + abs(j)):
                decay = gn / ref_gn
                if decay >= 1.0:
                    break
                forecast = STALL_WINDOW * math.log(gn / cfg.grad_tol) / -math.log(decay)
                if it + forecast > cfg.max_iter:
                    break
            ref_j, ref_gn, ref_it = j, gn, it
        w, v = np.linalg.eigh(1j * g)
        eta = eta_open
        first_trial = True
        stepped = False
        while eta > 1e-18:
            f = _expm_minus_identity(w, v, eta)
            fa = f @ a
            # A(eta) - A = F A + A F^dag + F A F^dag exactly, F = exp(eta G) - I
            delta_a = fa + fa.conj().T + fa @ f.conj().T
            delta_j = _trace_with_theta(delta_a)
            if delta_j >= 0.0:
                u = u + f @ u
                a = a + delta_a
                j = j + delta_j
                stepped = True
                break
            eta *= cfg.shrink
            first_trial = False
        if not stepped:
            break  # descent direction lost to roundoff; gradient check decides
        if first_trial:
            eta_open = min(cfg.grow * eta, cfg.max_step_factor * eta0)
        else:
            eta_open = eta
        iterations = it + 1
        yields.append(j)
        if iterations % REORTHO_EVERY == 0:
            q, r = np.linalg.qr(u)
            d = np.diagonal(r)
            u = q * (d / np.abs(d))
            a = u @ hp.p_mat @ u.conj().T
    else:
        grad_norms.append(float(np.linalg.norm(_grad(a))))

    return AscentTrace(
        yields=yields,
        grad_norms=grad_norms,
        converged=converged,
        final_yield=j,
        iterations=iterations,
        seed=seed,
    )


def _thread_count() -> int:
    raw = os.environ.get("QKB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def certify_bounds(
    hp: HermitianPair,
    restarts: int = 32,
    rng_seed: int = 0,
    cfg: AscentConfig | None = None,
    keep_traces: bool = False,
) -> CertificateReport:
    """Certify the closed-form bounds by multi-restart ascent and descent.

    Runs ascent from the identity, the reversal permutation, and `restarts`
    Haar starts, and descent (ascent on the negated observable) from the
    same starts. For spectra-built diagonal inputs the identity start sits
    exactly on the upper bound and the reversal start exactly on the lower
    one, so the certificate checks the optimizer against exact anchors
    while the random starts probe for violations and saddle statistics.
    The certificate holds when the best yields match the closed forms
    within 1e-6 and nothing ever exceeds them by more than 1e-9; an
    exceedance also sets the violation flag, since it would falsify the
    closed form. Restart k draws its start from a child generator keyed by
    (seed, k), so results are independent of execution order and thread
    count.
    """
    if restarts < 1:
        raise ValidationError(f"restarts {restarts} must be >= 1")
    kin_max, kin_min = hp.closed_form_bounds()
    n = hp.dim
    neg = HermitianPair(hp.p_mat, -hp.theta_mat)

    starts: list[tuple[int, np.ndarray]] = [
        (-1, np.eye(n, dtype=complex)),
        (-2, np.fliplr(np.eye(n)).astype(complex)),
    ]
    for k in range(restarts):
        starts.append((k, haar_unitary(n, np.random.default_rng([rng_seed, k]))))

    def run_pair(item: tuple[int, np.ndarray]):
        k, u0 = item
        up = riemannian_ascent(hp, u0, cfg, seed=k)
        down = riemannian_ascent(neg, u0, cfg, seed=k)
        return up, down

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_pair, starts))
    else:
        results = [run_pair(s) for s in starts]

    attained_max = -math.inf
    attained_min = math.inf
    violation = False
    converged_runs = 0
    traces: list[AscentTrace] = []
    for up, down in results:
        converged_runs += int(up.converged) + int(down.converged)
        attained_max = max(attained_max, up.final_yield)
        attained_min = min(attained_min, -down.final_yield)
        j_seen = list(up.yields) + [-y for y in down.yields]
        if max(j_seen) > kin_max + EXCEED_TOL or min(j_seen) < kin_min - EXCEED_TOL:
            violation = True
        if keep_traces:
            traces.extend([up, down])

    certificate = (
        not violation
        and kin_max - ATTAIN_TOL <= attained_max <= kin_max + EXCEED_TOL
        and kin_min - EXCEED_TOL <= attained_min <= kin_min + ATTAIN_TOL
    )
    return CertificateReport(
        attained_max=attained_max,
        attained_min=attained_min,
        certificate=certificate,
        kin_max=kin_max,
        kin_min=kin_min,
        violation=violation,
        restarts=restarts,
        seed=rng_seed,
        converged_runs=converged_runs,
        total_runs=len(results) * 2,
        traces=traces,
    )
