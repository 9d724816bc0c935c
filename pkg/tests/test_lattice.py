import math

import numpy as np
import pytest

from qcausal.fixtures import load_golden
from qcausal.lattice import (
    LatticeSpec,
    canonical_check,
    commutation_graph,
    commutator_table,
    cone_profile,
    dispersion,
    pauli_jordan,
)

SPEC64 = LatticeSpec(64, 1.0, 16)


def test_spec_validation():
    with pytest.raises(ValueError):
        LatticeSpec(4, 1.0, 8)
    with pytest.raises(ValueError):
        LatticeSpec(8, 0.0, 8)
    with pytest.raises(ValueError):
        LatticeSpec(8, 1.0, 1)
    with pytest.raises(ValueError):
        LatticeSpec(8, 1.0, 8, time_step=0.0)


def test_dispersion_endpoints_and_symmetry():
    assert dispersion(SPEC64, 0) == 1.0
    assert abs(dispersion(SPEC64, 32) - math.sqrt(5.0)) <= 1e-12
    for n in range(1, 32):
        assert abs(dispersion(SPEC64, n) - dispersion(SPEC64, 64 - n)) <= 1e-12
    with pytest.raises(ValueError):
        dispersion(SPEC64, 64)


def test_equal_time_commutator_vanishes():
    assert pauli_jordan(SPEC64, 0, 0.0) == 0.0
    for dx in range(64):
        assert abs(pauli_jordan(SPEC64, dx, 0.0)) <= 1e-12


def test_commutator_matches_golden_oracle():
    golden = load_golden()
    assert golden["status"] == "VERIFIED"
    section = golden["commutator64"]
    spec = LatticeSpec(section["sites"], section["mass"], 8)
    for dx, dt, expected in section["values"]:
        assert abs(pauli_jordan(spec, dx, float(dt)) - expected) <= 1e-12


def test_commutator_antisymmetry_and_periodicity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        dx = int(rng.integers(0, 64))
        dt = float(rng.uniform(-8, 8))
        forward = pauli_jordan(SPEC64, dx, dt)
        assert abs(forward + pauli_jordan(SPEC64, -dx, -dt)) <= 1e-12
        assert pauli_jordan(SPEC64, dx + 64, dt) == forward


def test_canonical_check_is_kronecker_delta():
    for dx in range(65):
        expected = 1.0 if dx % 64 == 0 else 0.0
        assert abs(canonical_check(SPEC64, dx) - expected) <= 1e-12


def test_commutator_table_invariants():
    spec = LatticeSpec(16, 0.5, 6)
    table = commutator_table(spec)
    assert table.value(0, 0.0) == 0.0
    assert len(table.values) == 16 * 11
    for (dx, dt), value in table.values.items():
        assert abs(value + table.values[((-dx) % 16, -dt)]) <= 1e-12
    assert table.value(5 + 16, 2.0) == table.value(5, 2.0)


def test_commutator_table_threads_match_serial():
    spec = LatticeSpec(16, 0.5, 6)
    assert commutator_table(spec, threads=4).values == commutator_table(spec).values


def test_commutation_graph_equal_time_edges():
    g = commutation_graph(LatticeSpec(8, 1.0, 3), eps=1e-10)
    for t in range(3):
        for x1 in range(8):
            for x2 in range(x1 + 1, 8):
                assert g.adjacency[t * 8 + x1, t * 8 + x2]


def test_commutation_graph_adjacent_time_non_edge():
    g = commutation_graph(LatticeSpec(64, 1.0, 2), eps=1e-3)
    i = g.labels.index("x0t0")
    j = g.labels.index("x0t1")
    assert not g.adjacency[i, j]  # |D(0, 1)| ~ 0.58 >> eps


def test_commutation_graph_warns_when_complete():
    with pytest.warns(UserWarning, match="complete"):
        commutation_graph(LatticeSpec(8, 1.0, 2), eps=100.0)


def test_cone_profile_matches_golden():
    golden = load_golden()
    for key in ("cone128", "containment64"):
        section = golden[key]
        spec = LatticeSpec(section["sites"], section["mass"], section["timeSteps"])
        profile = cone_profile(spec, section["eps"])
        assert [[int(dt), e] for dt, e in profile.per_time_extent] == section["extents"]
        assert abs(profile.fitted_speed - section["fittedSpeed"]) <= 1e-9
        assert profile.broadening() == section["broadening"]


def test_cone_profile_extents_nearly_monotone():
    for spec in (LatticeSpec(128, 0.1, 32), LatticeSpec(64, 1.0, 16)):
        extents = cone_profile(spec, 1e-3).extents()
        for previous, current in zip(extents, extents[1:]):
            assert current >= previous - 2


def test_cone_containment_within_broadened_cone():
    golden = load_golden()["containment64"]
    spec = LatticeSpec(golden["sites"], golden["mass"], golden["timeSteps"])
    width = golden["broadening"]
    for j in range(1, (spec.time_steps + 1) // 2):
        for dx in range(spec.sites // 2 + 1):
            if abs(pauli_jordan(spec, dx, float(j))) >= golden["eps"]:
                assert dx <= j + width


def test_equal_time_extent_is_zero():
    # nothing non-commuting at equal time for any eps above rounding noise
    mags = [abs(pauli_jordan(SPEC64, dx, 0.0)) for dx in range(33)]
    assert max(mags) < 1e-12


def test_heavier_mass_never_beats_light_cone_speed():
    masses = (0.05, 0.1, 0.2, 0.4, 0.8)
    speeds = {
        m: cone_profile(LatticeSpec(128, m, 32), 1e-3).fitted_speed
        for m in masses + (1.6,)
    }
    light_speed = speeds[0.05]
    for m in masses:
        assert speeds[2 * m] <= light_speed * 1.10


def test_cone_profile_errors():
    with pytest.raises(ValueError, match="no cone"):
        cone_profile(LatticeSpec(64, 1.0, 16), eps=50.0)
    with pytest.raises(ValueError, match="8 time steps"):
        cone_profile(LatticeSpec(64, 1.0, 6), eps=1e-3)
