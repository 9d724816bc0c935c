"""Finite-dimensional state-vector engine.

States are unit vectors, observables are projector-valued measures
(lists of (eigenvalue, projector) pairs with orthogonal projectors
summing to the identity), measurement follows the Born rule

    prob(i) = <psi| P_i |psi> = ||P_i psi||^2

and a registered outcome replaces the state by the renormalized
projection P_i|psi> / ||P_i psi||. Everything is immutable and pure;
all spaces are finite-dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12    # unit-norm and degenerate-branch tolerance
STRUCT_TOL = 1e-10  # projector/unitary structure tolerance

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _readonly(values, shape_kind: str) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if shape_kind == "vector" and arr.ndim != 1:
        raise ValueError(f"expected a 1-d amplitude vector, got shape {arr.shape}")
    if shape_kind == "matrix" and (arr.ndim != 2 or arr.shape[0] != arr.shape[1]):
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector of complex amplitudes."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _readonly(self.amplitudes, "vector")
        if amps.size < 1:
            raise ValueError("state must have dimension >= 1")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector norm {norm} is not 1 within {NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, values) -> "StateVector":
        """Scale an arbitrary nonzero vector to unit norm."""
        arr = np.asarray(values, dtype=complex)
        norm = np.linalg.norm(arr)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(arr / norm)


@dataclass(frozen=True, eq=False)
class Pvm:
    """Projective observable: (eigenvalue, projector) branches.

    Projectors must be Hermitian, idempotent, mutually orthogonal and
    complete; eigenvalues must be pairwise distinct.
    """

    branches: tuple

    def __post_init__(self):
        branches = tuple(
            (float(value), _readonly(proj, "matrix")) for value, proj in self.branches
        )
        if not branches:
            raise ValueError("observable needs at least one branch")
        dim = branches[0][1].shape[0]
        total = np.zeros((dim, dim), dtype=complex)
        for value, proj in branches:
            if proj.shape[0] != dim:
                raise ValueError("all projectors must share one dimension")
            if np.max(np.abs(proj - proj.conj().T)) > STRUCT_TOL:
                raise ValueError(f"projector for eigenvalue {value} is not Hermitian")
            if np.max(np.abs(proj @ proj - proj)) > STRUCT_TOL:
                raise ValueError(f"projector for eigenvalue {value} is not idempotent")
            total += proj
        for i, (_, pi) in enumerate(branches):
            for _, pj in branches[i + 1 :]:
                if np.max(np.abs(pi @ pj)) > STRUCT_TOL:
                    raise ValueError("projectors of distinct branches must be orthogonal")
        if np.max(np.abs(total - np.eye(dim))) > STRUCT_TOL:
            raise ValueError("projectors must sum to the identity")
        values = [value for value, _ in branches]
        if len(set(values)) != len(values):
            raise ValueError("eigenvalues must be pairwise distinct")
        object.__setattr__(self, "branches", branches)

    @property
    def dimension(self) -> int:
        return self.branches[0][1].shape[0]

    def eigenvalues(self) -> tuple:
        return tuple(value for value, _ in self.branches)


@dataclass(frozen=True, eq=False)
class UnitaryOp:
    matrix: np.ndarray

    def __post_init__(self):
        mat = _readonly(self.matrix, "matrix")
        dim = mat.shape[0]
        if np.max(np.abs(mat.conj().T @ mat - np.eye(dim))) > STRUCT_TOL:
            raise ValueError("matrix is not unitary")
        object.__setattr__(self, "matrix", mat)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Outcome table (eigenvalue, probability) of one projective measurement."""

    outcomes: tuple

    def __post_init__(self):
        outcomes = tuple((float(v), float(p)) for v, p in self.outcomes)
        probs = np.array([p for _, p in outcomes])
        if np.any(probs < -NORM_TOL):
            raise ValueError("negative branch probability")
        if abs(probs.sum() - 1.0) > STRUCT_TOL:
            raise ValueError(f"branch probabilities sum to {probs.sum()}, not 1")
        object.__setattr__(self, "outcomes", outcomes)

    def probability(self, eigenvalue: float) -> float:
        for value, prob in self.outcomes:
            if value == eigenvalue:
                return prob
        raise KeyError(f"no branch with eigenvalue {eigenvalue}")


def basis_state(dimension: int, index: int) -> StateVector:
    amps = np.zeros(dimension, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Composite state; the index of `a` varies slowest (row-major)."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def amplitude(phi: StateVector, psi: StateVector) -> complex:
    """<phi|psi>, conjugating phi."""
    if phi.dimension != psi.dimension:
        raise ValueError(f"dimension mismatch: {phi.dimension} vs {psi.dimension}")
    return complex(np.vdot(phi.amplitudes, psi.amplitudes))


def _check_dims(obs: Pvm, psi: StateVector) -> None:
    if obs.dimension != psi.dimension:
        raise ValueError(
            f"observable dimension {obs.dimension} does not match state dimension {psi.dimension}"
        )


def measure_probabilities(obs: Pvm, psi: StateVector) -> MeasurementRecord:
    _check_dims(obs, psi)
    outcomes = []
    for value, proj in obs.branches:
        projected = proj @ psi.amplitudes
        outcomes.append((value, float(np.real(np.vdot(psi.amplitudes, projected)))))
    return MeasurementRecord(tuple(outcomes))


def collapse(obs: Pvm, branch_index: int, psi: StateVector) -> StateVector:
    """Renormalized projection onto the given branch."""
    _check_dims(obs, psi)
    _, proj = obs.branches[branch_index]
    projected = proj @ psi.amplitudes
    prob = float(np.real(np.vdot(projected, projected)))
    if prob <= NORM_TOL:
        raise ValueError(
            f"branch {branch_index} has probability {prob}; collapse onto an impossible outcome"
        )
    return StateVector(projected / np.sqrt(prob))


def apply_unitary(u: UnitaryOp, psi: StateVector) -> StateVector:
    if u.dimension != psi.dimension:
        raise ValueError(f"dimension mismatch: {u.dimension} vs {psi.dimension}")
    return StateVector(u.matrix @ psi.amplitudes)


def _sample_with_rng(obs: Pvm, psi: StateVector, rng: np.random.Generator):
    record = measure_probabilities(obs, psi)
    probs = np.clip([p for _, p in record.outcomes], 0.0, None)
    cumulative = np.cumsum(probs)
    index = int(np.searchsorted(cumulative, rng.random(), side="right"))
    index = min(index, len(probs) - 1)
    return index, collapse(obs, index, psi)


def sample_outcome(obs: Pvm, psi: StateVector, seed: int):
    """Draw one Born-distributed outcome; same seed, same outcome.

    Returns (branch index, collapsed state).
    """
    return _sample_with_rng(obs, psi, np.random.default_rng(seed))


def spin_pvm(axis) -> Pvm:
    """Spin observable along a unit 3-vector: projectors (I +- n.sigma)/2."""
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,):
        raise ValueError("axis must be a 3-vector")
    if abs(np.linalg.norm(n) - 1.0) > STRUCT_TOL:
        raise ValueError(f"axis must be unit length, got |axis| = {np.linalg.norm(n)}")
    n_sigma = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    eye = np.eye(2, dtype=complex)
    return Pvm(((+1.0, (eye + n_sigma) / 2), (-1.0, (eye - n_sigma) / 2)))


def embed_pvm(obs: Pvm, site: int, n_sites: int, site_dim: int = 2) -> Pvm:
    """Lift a single-site observable to site `site` of an n-site register."""
    if not 0 <= site < n_sites:
        raise ValueError(f"site {site} outside register of {n_sites} sites")
    if obs.dimension != site_dim:
        raise ValueError("observable dimension does not match the site dimension")
    before = np.eye(site_dim**site, dtype=complex)
    after = np.eye(site_dim ** (n_sites - site - 1), dtype=complex)
    branches = tuple(
        (value, np.kron(np.kron(before, proj), after)) for value, proj in obs.branches
    )
    return Pvm(branches)
