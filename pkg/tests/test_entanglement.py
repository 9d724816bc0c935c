import math

import numpy as np
import pytest

from qcausal.entanglement import (
    CorrelationSetting,
    EraserConfig,
    LhvStrategy,
    bell_phi_plus,
    chsh,
    correlation,
    enumerate_lhv_strategies,
    epr_consistency,
    eraser_curve,
    eraser_visibility,
    ghz,
    joint_spin_probabilities,
    lhv_chsh_value,
    lhv_max_chsh,
    maximize_chsh,
    xz_axis,
)
from qcausal.quantum import PAULI_X, PAULI_Y, PAULI_Z, amplitude, basis_state

Z_AXIS = (0.0, 0.0, 1.0)
X_AXIS = (1.0, 0.0, 0.0)


def spin_expectation(psi, axis_a, axis_b):
    """Independent route: <psi|(n_a.sigma) x (n_b.sigma)|psi>."""
    paulis = (PAULI_X, PAULI_Y, PAULI_Z)
    op_a = sum(c * p for c, p in zip(axis_a, paulis))
    op_b = sum(c * p for c, p in zip(axis_b, paulis))
    amps = psi.amplitudes
    return float(np.real(np.vdot(amps, np.kron(op_a, op_b) @ amps)))


def test_bell_state_amplitudes_and_norm():
    phi = bell_phi_plus()
    assert abs(np.linalg.norm(phi.amplitudes) - 1.0) <= 1e-12
    assert np.allclose(phi.amplitudes, [1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)], atol=1e-15)
    assert amplitude(basis_state(4, 1), phi) == 0.0


def test_bell_state_zz_distribution():
    # both up or both down, each with probability 1/2
    joint = joint_spin_probabilities(bell_phi_plus(), Z_AXIS, Z_AXIS)
    assert abs(joint[0, 0] - 0.5) <= 1e-12
    assert abs(joint[1, 1] - 0.5) <= 1e-12
    assert joint[0, 1] <= 1e-15 and joint[1, 0] <= 1e-15


def test_ghz_two_sites_is_bell_state():
    assert np.array_equal(ghz(2).amplitudes, bell_phi_plus().amplitudes)


def test_ghz_three_sites_all_z_outcomes():
    psi = ghz(3)
    assert abs(np.linalg.norm(psi.amplitudes) - 1.0) <= 1e-12
    probs = np.abs(psi.amplitudes) ** 2
    assert abs(probs[0] - 0.5) <= 1e-12          # uuu
    assert abs(probs[-1] - 0.5) <= 1e-12         # ddd
    assert probs[1:-1].max() == 0.0


def test_ghz_rejects_single_site():
    with pytest.raises(ValueError):
        ghz(1)


def test_correlation_same_axis_is_perfect():
    value = correlation(bell_phi_plus(), CorrelationSetting(Z_AXIS, Z_AXIS))
    assert abs(value - 1.0) <= 1e-12


def test_correlation_orthogonal_axes_vanishes():
    value = correlation(bell_phi_plus(), CorrelationSetting(Z_AXIS, X_AXIS))
    assert abs(value) <= 1e-12


def test_correlation_matches_independent_expectation():
    rng = np.random.default_rng(31)
    phi = bell_phi_plus()
    for _ in range(40):
        a = rng.normal(size=3)
        a /= np.linalg.norm(a)
        b = rng.normal(size=3)
        b /= np.linalg.norm(b)
        engine = correlation(phi, CorrelationSetting(a, b))
        assert abs(engine - spin_expectation(phi, a, b)) <= 1e-10
        assert abs(engine) <= 1.0 + 1e-12


def test_correlation_xz_plane_is_cosine():
    phi = bell_phi_plus()
    for alpha_deg in range(0, 360, 7):
        for beta_deg in range(0, 360, 11):
            alpha, beta = math.radians(alpha_deg), math.radians(beta_deg)
            value = correlation(phi, CorrelationSetting(xz_axis(alpha), xz_axis(beta)))
            assert abs(value - math.cos(alpha - beta)) <= 1e-10


def test_correlation_symmetry_under_swap():
    phi = bell_phi_plus()
    a, b = xz_axis(0.3), xz_axis(1.1)
    direct = correlation(phi, CorrelationSetting(a, b))
    swapped_setting = correlation(phi, CorrelationSetting(b, a))
    swapped_sites = correlation(phi, CorrelationSetting(b, a), site_a=1, site_b=0)
    assert abs(direct - swapped_setting) <= 1e-12
    assert abs(direct - swapped_sites) <= 1e-12


def test_correlation_rejects_bad_sites():
    with pytest.raises(ValueError):
        correlation(bell_phi_plus(), CorrelationSetting(Z_AXIS, Z_AXIS), site_a=0, site_b=0)
    with pytest.raises(ValueError):
        correlation(bell_phi_plus(), CorrelationSetting(Z_AXIS, Z_AXIS), site_a=0, site_b=2)


def test_chsh_spec_sign_convention_hits_quantum_optimum():
    value = chsh(
        bell_phi_plus(),
        xz_axis(0.0),
        xz_axis(math.pi / 2),
        xz_axis(math.pi / 4),
        xz_axis(3 * math.pi / 4),
        signs=(1, -1, 1, 1),
    )
    assert abs(value - 2 * math.sqrt(2)) <= 1e-10


def test_chsh_default_convention_hits_quantum_optimum():
    value = chsh(
        bell_phi_plus(),
        xz_axis(0.0),
        xz_axis(math.pi / 2),
        xz_axis(math.pi / 4),
        xz_axis(-math.pi / 4),
    )
    assert abs(value - 2 * math.sqrt(2)) <= 1e-10


def test_chsh_equal_settings_bounded_by_two():
    axis = xz_axis(0.7)
    value = chsh(bell_phi_plus(), axis, axis, axis, axis)
    assert abs(value) <= 2.0 + 1e-12


def test_maximize_chsh_product_state_classical_bound():
    product = basis_state(4, 0)  # |uu>
    for step in (5.0, 2.5):
        _, best = maximize_chsh(product, step)
        assert best <= 2.0 + 1e-9


def test_maximize_chsh_refinement_monotone():
    for amps in ([1, 0, 0, 1], [0.8, 0, 0, 0.6]):
        psi = bell_phi_plus() if amps == [1, 0, 0, 1] else _normalized(amps)
        coarse = maximize_chsh(psi, 5.0)[1]
        medium = maximize_chsh(psi, 2.5)[1]
        fine = maximize_chsh(psi, 1.0)[1]
        assert coarse <= medium + 1e-12 <= fine + 2e-12


def _normalized(amps):
    from qcausal.quantum import StateVector

    return StateVector.normalized(amps)


def test_maximize_chsh_settings_reproduce_value():
    settings, best = maximize_chsh(bell_phi_plus(), 5.0)
    a0, a1, b0, b1 = settings.axes()
    assert abs(chsh(bell_phi_plus(), a0, a1, b0, b1) - best) <= 1e-10


def test_maximize_chsh_rejects_coarse_grid():
    with pytest.raises(ValueError):
        maximize_chsh(bell_phi_plus(), 6.0)


def test_chsh_requires_two_site_state():
    axes = (xz_axis(0.0),) * 4
    with pytest.raises(ValueError, match="two-site"):
        chsh(ghz(3), *axes)
    with pytest.raises(ValueError, match="two-site"):
        maximize_chsh(ghz(3), 5.0)


def test_lhv_enumeration():
    strategies = enumerate_lhv_strategies()
    values = [v for _, v in strategies]
    assert len(strategies) == 16
    assert lhv_max_chsh() == 2.0
    assert max(values) == 2
    assert min(values) == -2


def test_lhv_strategy_validation():
    with pytest.raises(ValueError):
        LhvStrategy({("A", 0): 1})
    with pytest.raises(ValueError):
        LhvStrategy({("A", 0): 1, ("A", 1): 1, ("B", 0): 1, ("B", 1): 0})
    strategy = LhvStrategy({("A", 0): 1, ("A", 1): 1, ("B", 0): 1, ("B", 1): -1})
    assert lhv_chsh_value(strategy) == 2


def test_epr_agreement_exact_on_matching_axes():
    assert epr_consistency(Z_AXIS, 500, seed=3) == 1.0
    assert epr_consistency(X_AXIS, 500, seed=3) == 1.0


def test_epr_orthogonal_axes_agreement_half():
    rate = epr_consistency(Z_AXIS, 100_000, seed=13, axis_b=X_AXIS)
    assert abs(rate - 0.5) <= 0.01


def test_epr_rejects_zero_trials():
    with pytest.raises(ValueError):
        epr_consistency(Z_AXIS, 0, seed=1)


def test_no_signaling_marginals_subgrid():
    phi = bell_phi_plus()
    for alpha_deg in range(0, 360, 45):
        margins = []
        for beta_deg in range(0, 360, 15):
            joint = joint_spin_probabilities(
                phi, xz_axis(math.radians(alpha_deg)), xz_axis(math.radians(beta_deg))
            )
            margins.append(joint[0, 0] + joint[0, 1])
        assert max(margins) - min(margins) <= 1e-10


def test_eraser_visibilities():
    assert abs(eraser_visibility(EraserConfig(False, False)) - 1.0) <= 1e-12
    assert abs(eraser_visibility(EraserConfig(True, False)) - 0.0) <= 1e-12
    assert abs(eraser_visibility(EraserConfig(True, True)) - 1.0) <= 1e-12


def test_eraser_curve_shape_and_fringe():
    phases, probs = eraser_curve(EraserConfig(False, False, phase_samples=32))
    assert phases.shape == probs.shape == (32,)
    assert np.allclose(probs, np.cos(phases / 2) ** 2, atol=1e-12)


def test_eraser_marked_curve_is_flat():
    _, probs = eraser_curve(EraserConfig(True, False))
    assert np.allclose(probs, 0.5, atol=1e-12)


def test_eraser_rejects_erasure_without_marking():
    with pytest.raises(ValueError, match="nothing to erase"):
        eraser_visibility(EraserConfig(False, True))


def test_eraser_rejects_few_samples():
    with pytest.raises(ValueError):
        EraserConfig(False, False, phase_samples=4)


def test_ghz_single_site_collapse_forces_unanimity():
    from qcausal.quantum import collapse, embed_pvm, measure_probabilities, spin_pvm

    psi = ghz(3)
    z = spin_pvm(Z_AXIS)
    for site in range(3):
        for branch in (0, 1):
            collapsed = collapse(embed_pvm(z, site, 3), branch, psi)
            for other in range(3):
                if other == site:
                    continue
                record = measure_probabilities(embed_pvm(z, other, 3), collapsed)
                assert abs(record.outcomes[branch][1] - 1.0) <= 1e-12
