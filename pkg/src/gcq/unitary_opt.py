"""Shared search engine over the unitary group.

Objectives are maximized by moving along skew-Hermitian directions mapped
back to the group through the exponential retraction. When the objective
supplies a gradient the direction is the Riemannian ascent direction;
otherwise (and whenever the gradient stalls) seeded random skew directions
are tried. The step is halved on non-improvement and the search stops on a
stall of `stall_limit` consecutive rejected proposals, on `max_iters`
accepted steps, or when `target` is reached.

Restart r draws its start from haar_unitary(m, seed + r) after any caller
supplied structured starts, so results are deterministic and the best-of
reduction over restarts can only improve when restarts increase.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import ValidationError


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the decomposition searches.

    max_m is the largest decomposition size swept (defaults to d**2 at the
    call site); tol is both the convergence target on residual-style
    objectives and the improvement threshold; seed feeds all restarts.
    """

    restarts: int = 16
    max_m: int = None
    tol: float = 1e-10
    max_iters: int = 1000
    seed: int = 0
    stall_limit: int = 200

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValidationError("tol must be positive")


@dataclass
class SearchResult:
    unitary: np.ndarray
    value: float
    trace: list = field(default_factory=list)


def _expm_skew_factory(direction):
    """Return step -> expm(step * direction) for a skew-Hermitian direction."""
    herm = -1j * direction
    herm = (herm + herm.conj().T) / 2.0
    w, v = np.linalg.eigh(herm)

    def apply(step, mat):
        phases = np.exp(1j * step * w)
        return (v * phases) @ (v.conj().T @ mat)

    return apply


def _random_skew(rng, m):
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return z - z.conj().T


def _ascend(fun, u0, rng, max_iters, stall_limit, target, improve_tol):
    u = u0
    value, egrad = fun(u)
    step = 0.25
    stall = 0
    accepted = 0
    use_gradient = True
    while accepted < max_iters and stall < stall_limit:
        if target is not None and value >= target:
            break
        direction = None
        if use_gradient and egrad is not None:
            direction = egrad @ u.conj().T
            direction = direction - direction.conj().T
            nrm = np.linalg.norm(direction)
            if not np.isfinite(nrm) or nrm < 1e-300:
                direction = None
        if direction is None:
            direction = _random_skew(rng, u.shape[0])
            nrm = np.linalg.norm(direction)
        direction = direction / nrm
        retract = _expm_skew_factory(direction)
        improved = False
        trial_step = step
        while trial_step > 1e-16:
            cand = retract(trial_step, u)
            cval, cgrad = fun(cand)
            if cval > value + improve_tol * max(1.0, abs(value)):
                u, value, egrad = cand, cval, cgrad
                step = min(trial_step * 1.5, 1.0)
                improved = True
                accepted += 1
                stall = 0
                use_gradient = True
                break
            trial_step *= 0.5
            stall += 1
            if stall >= stall_limit:
                break
        if not improved:
            # gradient direction exhausted; alternate with random kicks
            use_gradient = not use_gradient
            step = max(step, 1e-3)
    return u, value


def search_unitary(fun, m, *, seed, restarts, max_iters=1000, stall_limit=200,
                   target=None, starts=(), improve_tol=1e-15):
    """Maximize fun over m x m unitaries with deterministic restarts.

    fun(U) must return (value, egrad) where egrad is the derivative of the
    value with respect to conj(U) (or None to force random directions).
    Returns a SearchResult with the best unitary, its value and the
    per-restart best values; ties keep the earliest restart.
    """
    best_u = None
    best_val = -np.inf
    trace = []
    starts = list(starts)
    total = len(starts) + restarts
    for r in range(total):
        if r < len(starts):
            u0 = np.asarray(starts[r], dtype=np.complex128)
        else:
            u0 = numkit.haar_unitary(m, seed + (r - len(starts)))
        rng = np.random.default_rng((int(seed) % (1 << 63)) * 1000003 + 17 * r + 1)
        u, val = _ascend(fun, u0, rng, max_iters, stall_limit, target, improve_tol)
        trace.append(float(val))
        if val > best_val:
            best_val = float(val)
            best_u = u
        if target is not None and best_val >= target:
            break
    return SearchResult(unitary=best_u, value=best_val, trace=trace)


def flat_starts(m):
    """Structured flat-modulus starting points: DFT and, when m is a power
    of two, the Sylvester Hadamard; both normalized to unitaries."""
    out = []
    grid = np.arange(m)
    out.append(np.exp(2j * np.pi * np.outer(grid, grid) / m) / np.sqrt(m))
    if m >= 2 and (m & (m - 1)) == 0:
        h = np.array([[1.0]])
        while h.shape[0] < m:
            h = np.block([[h, h], [h, -h]])
        out.append(h.astype(np.complex128) / np.sqrt(m))
    return out
