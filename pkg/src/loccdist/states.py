"""Bipartite pure states and their Schmidt structure.

Convention: a pure state of an ``Na x Nb`` system is stored as the complex
matrix ``C`` of shape ``(Na, Nb)`` whose entry ``(x, y)`` multiplies
``|x>_A |y>_B``.  Local maps then act by matrix multiplication: ``(U (x) V)``
sends ``C`` to ``U @ C @ V.T``, an Alice-side projector ``P`` sends ``C`` to
``P @ C``, and a Bob-side projector sends it to ``C @ P.T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionFailure, NotUnitary, ShapeMismatch, ZeroState

#: default absolute tolerance for orthogonality / normalization checks
DEFAULT_TOL = 1e-9

#: a singular value counts toward the Schmidt rank iff it exceeds
#: ``RANK_CUTOFF`` times the largest singular value
RANK_CUTOFF = 1e-9


def _complex_matrix(amplitudes) -> np.ndarray:
    mat = np.asarray(amplitudes, dtype=np.complex128)
    if mat.ndim != 2:
        raise ShapeMismatch(f"amplitudes must be a matrix, got ndim={mat.ndim}")
    return mat


def _frozen(mat: np.ndarray) -> np.ndarray:
    out = np.array(mat, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Unit-norm pure state on an ``dim_a x dim_b`` bipartite space.

    ``normalization`` records the Frobenius norm of the raw input the state
    was built from (1.0 if the input was already normalized).  Instances are
    immutable; the amplitude array is stored read-only.
    """

    dim_a: int
    dim_b: int
    amplitudes: np.ndarray
    name: str | None = None
    normalization: float = 1.0

    def __post_init__(self):
        if self.dim_a < 1 or self.dim_b < 1:
            raise ShapeMismatch("local dimensions must be positive")
        mat = _complex_matrix(self.amplitudes)
        if mat.shape != (self.dim_a, self.dim_b):
            raise ShapeMismatch(
                f"amplitude shape {mat.shape} != declared ({self.dim_a}, {self.dim_b})"
            )
        object.__setattr__(self, "amplitudes", _frozen(mat))

    @property
    def dims(self) -> tuple[int, int]:
        return (self.dim_a, self.dim_b)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self):
        tag = self.name or "?"
        return f"BipartiteState({tag}, {self.dim_a}x{self.dim_b})"


def make_state(dim_a, dim_b, amplitudes, name=None) -> BipartiteState:
    """Build a normalized state, recording the applied normalization factor.

    Raises ``ZeroState`` for an all-zero matrix and ``ShapeMismatch`` when the
    matrix does not have shape ``(dim_a, dim_b)``.
    """
    mat = _complex_matrix(amplitudes)
    if mat.shape != (dim_a, dim_b):
        raise ShapeMismatch(f"amplitude shape {mat.shape} != declared ({dim_a}, {dim_b})")
    norm = float(np.linalg.norm(mat))
    if norm < 1e-12:
        raise ZeroState("cannot normalize an all-zero amplitude matrix")
    return BipartiteState(dim_a, dim_b, mat / norm, name=name, normalization=norm)


def product_state(dim_a, dim_b, alice_vector, bob_vector, name=None) -> BipartiteState:
    """State ``|a>|b>`` from local vectors; sides are normalized jointly."""
    a = np.asarray(alice_vector, dtype=np.complex128).reshape(-1)
    b = np.asarray(bob_vector, dtype=np.complex128).reshape(-1)
    if a.shape != (dim_a,) or b.shape != (dim_b,):
        raise ShapeMismatch("local vector lengths do not match the declared dimensions")
    return make_state(dim_a, dim_b, np.outer(a, b), name=name)


def inner_product(s: BipartiteState, t: BipartiteState) -> complex:
    """Hermitian inner product ``<s|t>`` (conjugates the first argument)."""
    if s.dims != t.dims:
        raise ShapeMismatch(f"dimension mismatch: {s.dims} vs {t.dims}")
    return complex(np.vdot(s.amplitudes, t.amplitudes))


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """Schmidt form of a bipartite pure state.

    ``weights`` are the squared retained singular values in descending order
    and sum to 1.  ``alice_vectors`` / ``bob_vectors`` hold the corresponding
    orthonormal local vectors as rows, so the amplitude matrix equals
    ``sum_i sqrt(w_i) * outer(alice_vectors[i], bob_vectors[i])``.
    """

    weights: tuple[float, ...]
    alice_vectors: np.ndarray  # (l, dim_a)
    bob_vectors: np.ndarray  # (l, dim_b)

    def __post_init__(self):
        object.__setattr__(self, "alice_vectors", _frozen(self.alice_vectors))
        object.__setattr__(self, "bob_vectors", _frozen(self.bob_vectors))

    @property
    def schmidt_number(self) -> int:
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        """Amplitude matrix rebuilt from the decomposition."""
        coeff = np.sqrt(np.asarray(self.weights))
        return np.einsum("i,ia,ib->ab", coeff, self.alice_vectors, self.bob_vectors)


def schmidt_decompose(s: BipartiteState) -> SchmidtDecomposition:
    """SVD-based Schmidt decomposition; keeps singular values above the rank cutoff."""
    try:
        u, sig, vh = np.linalg.svd(s.amplitudes)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - numpy rarely fails here
        raise DecompositionFailure(str(exc)) from exc
    keep = sig > RANK_CUTOFF * sig[0]
    rank = int(np.count_nonzero(keep))
    weights = tuple(float(x) for x in sig[:rank] ** 2)
    return SchmidtDecomposition(weights, u[:, :rank].T, vh[:rank, :])


def schmidt_number(s: BipartiteState) -> int:
    """Schmidt rank of the state (1 = product state)."""
    return schmidt_decompose(s).schmidt_number


def assert_unitary(u: np.ndarray, dim: int, tol: float = DEFAULT_TOL, what="matrix") -> np.ndarray:
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (dim, dim):
        raise NotUnitary(f"{what} has shape {u.shape}, expected ({dim}, {dim})")
    dev = np.abs(u.conj().T @ u - np.eye(dim)).max()
    if dev > tol:
        raise NotUnitary(f"{what} is not unitary (deviation {dev:.3g})")
    return u


def apply_local_unitary(s: BipartiteState, u_a, u_b, tol: float = DEFAULT_TOL) -> BipartiteState:
    """Apply ``U_A (x) U_B``; the result keeps the state's name."""
    ua = assert_unitary(u_a, s.dim_a, tol, "u_a")
    ub = assert_unitary(u_b, s.dim_b, tol, "u_b")
    return BipartiteState(s.dim_a, s.dim_b, ua @ s.amplitudes @ ub.T, name=s.name)
