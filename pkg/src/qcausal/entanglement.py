"""Entangled-pair experiments at desk scale.

Builds the maximally correlated two-spin state, evaluates spin-spin
correlations and CHSH sums, enumerates deterministic local-hidden-variable
strategies exhaustively, simulates sequential measurement of both wings,
and runs a minimal two-qubit which-path / erasure model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantum import (
    StateVector,
    UnitaryOp,
    _sample_with_rng,
    apply_unitary,
    basis_state,
    collapse,
    embed_pvm,
    measure_probabilities,
    spin_pvm,
    tensor,
)

AXIS_TOL = 1e-10


def xz_axis(angle_rad: float) -> np.ndarray:
    """Unit vector in the x-z plane, angle measured from +z."""
    return np.array([math.sin(angle_rad), 0.0, math.cos(angle_rad)])


def _check_axis(axis) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > AXIS_TOL:
        raise ValueError(f"not a unit 3-vector: {axis}")
    return n


@dataclass(frozen=True)
class CorrelationSetting:
    axis_a: np.ndarray
    axis_b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "axis_a", _check_axis(self.axis_a))
        object.__setattr__(self, "axis_b", _check_axis(self.axis_b))


@dataclass(frozen=True)
class LhvStrategy:
    """Deterministic pre-assignment: (side, setting) -> outcome in {+1, -1}."""

    responses: dict

    def __post_init__(self):
        expected = {(side, setting) for side in "AB" for setting in (0, 1)}
        if set(self.responses) != expected:
            raise ValueError("strategy must assign all four (side, setting) pairs")
        if any(v not in (+1, -1) for v in self.responses.values()):
            raise ValueError("outcomes must be +1 or -1")


@dataclass(frozen=True)
class EraserConfig:
    marking: bool
    erasure: bool
    phase_samples: int = 16

    def __post_init__(self):
        if self.phase_samples < 8:
            raise ValueError("phase_samples must be >= 8")


def bell_phi_plus() -> StateVector:
    """(1/sqrt2)(|uu> + |dd>) in basis order uu, ud, du, dd."""
    amp = 1.0 / math.sqrt(2.0)
    return StateVector(np.array([amp, 0.0, 0.0, amp], dtype=complex))


def ghz(n: int) -> StateVector:
    """(1/sqrt2)(|u...u> + |d...d>) on n spins."""
    if n < 2:
        raise ValueError("need at least 2 sites")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return StateVector(amps)


def site_count(psi: StateVector) -> int:
    n = psi.dimension.bit_length() - 1
    if 2**n != psi.dimension:
        raise ValueError(f"dimension {psi.dimension} is not a register of spin-1/2 sites")
    return n


def joint_spin_probabilities(
    psi: StateVector, axis_a, axis_b, site_a: int = 0, site_b: int = 1
) -> np.ndarray:
    """2x2 table of joint outcome probabilities.

    Row index 0/1 is outcome +1/-1 at site_a, column likewise at site_b.
    """
    n = site_count(psi)
    if site_a == site_b or not (0 <= site_a < n and 0 <= site_b < n):
        raise ValueError(f"invalid sites ({site_a}, {site_b}) for {n}-site state")
    pvm_a = embed_pvm(spin_pvm(axis_a), site_a, n)
    pvm_b = embed_pvm(spin_pvm(axis_b), site_b, n)
    probs = np.empty((2, 2))
    for i, (_, pa) in enumerate(pvm_a.branches):
        projected = pa @ psi.amplitudes
        for j, (_, pb) in enumerate(pvm_b.branches):
            probs[i, j] = float(np.real(np.vdot(projected, pb @ projected)))
    return probs


def correlation(
    psi: StateVector, setting: CorrelationSetting, site_a: int = 0, site_b: int = 1
) -> float:
    """E = sum_ab a*b*prob(a, b) over the joint spin measurement."""
    probs = joint_spin_probabilities(psi, setting.axis_a, setting.axis_b, site_a, site_b)
    signs = np.array([+1.0, -1.0])
    return float(signs @ probs @ signs)


def chsh(psi: StateVector, a0, a1, b0, b1, signs=(1, 1, 1, -1)) -> float:
    """Four-setting correlation sum.

    Default sign convention is S = E(a0,b0) + E(a0,b1) + E(a1,b0) - E(a1,b1);
    any of the equivalent conventions can be selected via `signs` (applied to
    E(a0,b0), E(a0,b1), E(a1,b0), E(a1,b1) in that order).
    """
    if site_count(psi) != 2:
        raise ValueError("CHSH needs a two-site state")
    terms = [
        correlation(psi, CorrelationSetting(a, b))
        for a in (a0, a1)
        for b in (b0, b1)
    ]
    return float(sum(s * t for s, t in zip(signs, terms)))


def _xz_correlation_matrix(psi: StateVector) -> np.ndarray:
    """2x2 matrix T with E(alpha, beta) = [sin a, cos a] T [sin b, cos b]^T."""
    axes = (xz_axis(math.pi / 2), xz_axis(0.0))  # x then z
    t = np.empty((2, 2))
    for i, axis_a in enumerate(axes):
        for j, axis_b in enumerate(axes):
            t[i, j] = correlation(psi, CorrelationSetting(axis_a, axis_b))
    return t


@dataclass(frozen=True)
class ChshSettings:
    a0_deg: float
    a1_deg: float
    b0_deg: float
    b1_deg: float

    def axes(self):
        return tuple(
            xz_axis(math.radians(t)) for t in (self.a0_deg, self.a1_deg, self.b0_deg, self.b1_deg)
        )


def maximize_chsh(psi: StateVector, grid_step_degrees: float):
    """Best CHSH sum over x-z-plane axes on a regular angle grid.

    For fixed detector-A angles the two b-terms separate, so the search is
    O(G^3) instead of O(G^4). Refining the grid only enlarges the candidate
    set, so the optimum never decreases.
    """
    if not 0 < grid_step_degrees <= 5:
        raise ValueError("grid step must be positive and at most 5 degrees")
    if site_count(psi) != 2:
        raise ValueError("CHSH search needs a two-site state")
    angles = np.arange(0.0, 360.0, grid_step_degrees)
    rad = np.radians(angles)
    basis = np.stack([np.sin(rad), np.cos(rad)])
    table = basis.T @ _xz_correlation_matrix(psi) @ basis  # E(alpha_i, beta_j)

    best = -math.inf
    best_idx = None
    for i0 in range(angles.size):
        sums = table[i0][None, :] + table  # [a1, b] -> E(a0,b) + E(a1,b)
        diffs = table[i0][None, :] - table  # [a1, b] -> E(a0,b) - E(a1,b)
        b0_best = sums.max(axis=1)
        b1_best = diffs.max(axis=1)
        totals = b0_best + b1_best
        i1 = int(np.argmax(totals))
        if totals[i1] > best:
            best = float(totals[i1])
            best_idx = (i0, i1, int(np.argmax(sums[i1])), int(np.argmax(diffs[i1])))
    settings = ChshSettings(*(float(angles[i]) for i in best_idx))
    return settings, best


def lhv_chsh_value(strategy: LhvStrategy) -> int:
    r = strategy.responses
    return (
        r[("A", 0)] * r[("B", 0)]
        + r[("A", 0)] * r[("B", 1)]
        + r[("A", 1)] * r[("B", 0)]
        - r[("A", 1)] * r[("B", 1)]
    )


def enumerate_lhv_strategies():
    """All 16 deterministic strategies with their CHSH values."""
    out = []
    for ra0 in (+1, -1):
        for ra1 in (+1, -1):
            for rb0 in (+1, -1):
                for rb1 in (+1, -1):
                    strategy = LhvStrategy(
                        {("A", 0): ra0, ("A", 1): ra1, ("B", 0): rb0, ("B", 1): rb1}
                    )
                    out.append((strategy, lhv_chsh_value(strategy)))
    return out


def lhv_max_chsh() -> float:
    # Shared randomness only mixes deterministic strategies, so the maximum
    # over all local hidden variable models is attained at one of these 16
    # vertices (convexity).
    return float(max(value for _, value in enumerate_lhv_strategies()))


def epr_consistency(axis, trials: int, seed: int, axis_b=None) -> float:
    """Fraction of agreeing outcome pairs under sequential measurement.

    Measures site 0 of the correlated pair, collapses, then measures site 1;
    `axis_b` defaults to the same axis on both wings.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pvm_a = embed_pvm(spin_pvm(axis), 0, 2)
    pvm_b = embed_pvm(spin_pvm(axis if axis_b is None else axis_b), 1, 2)
    psi = bell_phi_plus()
    rng = np.random.default_rng(seed)
    agreements = 0
    for _ in range(trials):
        idx_a, collapsed = _sample_with_rng(pvm_a, psi, rng)
        idx_b, _ = _sample_with_rng(pvm_b, collapsed, rng)
        agreements += idx_a == idx_b
    return agreements / trials


_CNOT = UnitaryOp(
    np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=complex,
    )
)


def eraser_curve(cfg: EraserConfig):
    """Detection probability of the path interference port per phase.

    Path qubit starts in (|0> + e^{i phi}|1>)/sqrt2; marking copies the path
    onto a marker qubit; erasure measures the marker in the +/- basis and
    keeps the + runs. Returns (phases, probabilities).
    """
    if cfg.erasure and not cfg.marking:
        raise ValueError("nothing to erase: erasure requires marking")
    path_port = embed_pvm(spin_pvm((1.0, 0.0, 0.0)), 0, 2)
    marker_port = embed_pvm(spin_pvm((1.0, 0.0, 0.0)), 1, 2)
    phases = 2.0 * math.pi * np.arange(cfg.phase_samples) / cfg.phase_samples
    probs = np.empty(cfg.phase_samples)
    for k, phi in enumerate(phases):
        path = StateVector(np.array([1.0, np.exp(1j * phi)]) / math.sqrt(2.0))
        psi = tensor(path, basis_state(2, 0))
        if cfg.marking:
            psi = apply_unitary(_CNOT, psi)
        if cfg.erasure:
            psi = collapse(marker_port, 0, psi)
        probs[k] = measure_probabilities(path_port, psi).probability(+1.0)
    return phases, probs


def eraser_visibility(cfg: EraserConfig) -> float:
    """(max - min)/(max + min) of the detection curve."""
    _, probs = eraser_curve(cfg)
    hi, lo = float(probs.max()), float(probs.min())
    return (hi - lo) / (hi + lo)
