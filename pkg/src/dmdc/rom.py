"""Reduced-order realizations: simulation, frequency response, spectra.

A fitted model becomes an (A, B, C) triple with the projection basis as
the output map, so identified and generating systems can be compared
through simulation or MIMO frequency-response singular values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DivergenceError, InvalidInputError, ShapeError, SingularFrequencyError
from .linalg import as_matrix

DEFAULT_FREQ_COUNT = 200
DEFAULT_FREQ_MIN = 1e-3
SINGULAR_FREQ_TOL = 1e-12


@dataclass(frozen=True)
class StateSpaceRealization:
    """Discrete-time (A, B, C) triple with no feedthrough term."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        b = as_matrix(self.b, "b", allow_zero_cols=True)
        c = as_matrix(self.c, "c")
        if a.shape[0] != a.shape[1]:
            raise ShapeError(f"a must be square, got {a.shape}")
        r = a.shape[0]
        if b.shape[0] != r:
            raise ShapeError(f"b has {b.shape[0]} rows, expected {r}")
        if c.shape[1] != r:
            raise ShapeError(f"c has {c.shape[1]} columns, expected {r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def order(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class FrequencyResponseCurve:
    """Per-frequency singular values of the transfer matrix.

    ``sigmas`` has one row per grid frequency, each sorted non-increasing,
    with min(n_outputs, n_inputs) columns.
    """

    omegas: np.ndarray
    sigmas: np.ndarray


def realize(model, c_override=None) -> StateSpaceRealization:
    """Build an (A, B, C) realization from a fitted model.

    C defaults to the model's projection basis, lifting reduced states
    back to measurement space. Plain DMD models get a zero-width B.
    """
    b = getattr(model, "b_tilde", None)
    if b is None:
        b = np.zeros((model.a_tilde.shape[0], 0))
    if c_override is not None:
        c = as_matrix(c_override, "c_override")
        if c.shape[1] != model.a_tilde.shape[0]:
            raise ShapeError(
                f"c_override has {c.shape[1]} columns, expected "
                f"{model.a_tilde.shape[0]}"
            )
    else:
        c = model.basis
    return StateSpaceRealization(a=model.a_tilde, b=b, c=c, dt=model.dt)


def simulate(ss: StateSpaceRealization, x0, u_seq=None, horizon=None) -> np.ndarray:
    """Iterate the realization and return the output trajectory.

    Starting from reduced state ``x0``, applies one input column per step
    and records the output of each post-step state; the result is
    n_outputs x horizon. For autonomous systems pass ``horizon`` instead
    of inputs (or a 0-row ``u_seq``).
    """
    x = np.asarray(x0, dtype=np.float64).reshape(-1)
    if x.shape[0] != ss.order:
        raise ShapeError(f"x0 has length {x.shape[0]}, expected {ss.order}")
    if u_seq is None:
        if horizon is None:
            raise InvalidInputError("need u_seq or horizon")
        u = np.zeros((ss.n_inputs, int(horizon)))
    else:
        u = as_matrix(u_seq, "u_seq", allow_zero_rows=True)
        if u.shape[0] != ss.n_inputs and not (u.shape[0] == 0 == ss.n_inputs):
            raise ShapeError(
                f"u_seq has {u.shape[0]} rows, expected {ss.n_inputs}"
            )
    steps = u.shape[1]
    if steps < 1:
        raise InvalidInputError("horizon must be at least 1")
    out = np.empty((ss.n_outputs, steps))
    for k in range(steps):
        x = ss.a @ x + ss.b @ u[:, k]
        if not np.all(np.isfinite(x)):
            raise DivergenceError(step=k + 1)
        out[:, k] = ss.c @ x
    return out


def transfer_singular_values(ss: StateSpaceRealization, omega: float) -> np.ndarray:
    """Singular values of C (e^{i omega} I - A)^{-1} B at one frequency."""
    if ss.n_inputs < 1:
        raise InvalidInputError("frequency response needs at least one input")
    z = np.exp(1j * float(omega))
    eigs = np.linalg.eigvals(ss.a)
    if np.min(np.abs(z - eigs)) <= SINGULAR_FREQ_TOL:
        raise SingularFrequencyError(omega=float(omega))
    resolvent = np.linalg.solve(
        z * np.eye(ss.order) - ss.a, ss.b.astype(np.complex128)
    )
    return np.linalg.svd(ss.c @ resolvent, compute_uv=False)


def default_frequency_grid(
    count: int = DEFAULT_FREQ_COUNT, lo: float = DEFAULT_FREQ_MIN, hi: float = np.pi
) -> np.ndarray:
    """Logarithmically spaced grid in (0, pi] rad/sample."""
    return np.logspace(np.log10(lo), np.log10(hi), count)


def frequency_response(
    ss: StateSpaceRealization, omegas=None
) -> FrequencyResponseCurve:
    """Singular-value frequency response over a grid in (0, pi] rad/sample.

    Raises SingularFrequencyError if any grid point hits an eigenvalue of
    A on the unit circle within 1e-12.
    """
    if omegas is None:
        omegas = default_frequency_grid()
    w = np.asarray(omegas, dtype=np.float64).reshape(-1)
    if w.size == 0 or np.any(w <= 0.0) or np.any(w > np.pi + 1e-12):
        raise InvalidInputError("frequencies must lie in (0, pi]")
    sigmas = np.empty((w.size, min(ss.n_outputs, ss.n_inputs)))
    for i, omega in enumerate(w):
        sigmas[i] = transfer_singular_values(ss, omega)
    return FrequencyResponseCurve(omegas=w, sigmas=sigmas)


def match_eigenvalues(eigs_a, eigs_b) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-cost pairing of two equally sized spectra.

    Returns (perm, dists): ``eigs_b[perm[i]]`` is matched to ``eigs_a[i]``
    and ``dists[i]`` is their absolute difference. The assignment
    minimizes the total matched distance.
    """
    a = np.asarray(eigs_a, dtype=np.complex128).reshape(-1)
    b = np.asarray(eigs_b, dtype=np.complex128).reshape(-1)
    if a.size != b.size:
        raise ShapeError(f"spectra differ in size: {a.size} vs {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(a.size, dtype=int)
    perm[rows] = cols
    return perm, cost[rows, cols][np.argsort(rows)]


def spectral_distance(eigs_a, eigs_b) -> float:
    """Largest matched eigenvalue gap under the minimum-cost pairing."""
    _, dists = match_eigenvalues(eigs_a, eigs_b)
    return float(np.max(dists)) if dists.size else 0.0


def mode_cosine_similarities(modes_a, modes_b) -> np.ndarray:
    """Columnwise |<a_i, b_i>| / (|a_i| |b_i|) for two mode matrices."""
    a = np.asarray(modes_a, dtype=np.complex128)
    b = np.asarray(modes_b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ShapeError(f"mode matrices differ in shape: {a.shape} vs {b.shape}")
    num = np.abs(np.sum(np.conj(a) * b, axis=0))
    den = np.linalg.norm(a, axis=0) * np.linalg.norm(b, axis=0)
    return num / np.where(den == 0.0, 1.0, den)
