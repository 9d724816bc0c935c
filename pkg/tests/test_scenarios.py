import json
from pathlib import Path

import pytest

from qcausal.cli import main
from qcausal.scenarios import (
    Scenario,
    ScenarioError,
    parse_scenario,
    run_scenario,
)

REPO_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = REPO_ROOT / "scenarios"


def test_parse_minimal_bell():
    s = parse_scenario("kind = bell\naxis = z\n")
    assert s.kind == "bell"
    assert s.parameters["axis"] == (0.0, 0.0, 1.0)
    assert s.parameters["trials"] == 2000  # default echoed
    assert s.seed is None and s.output_path is None


def test_parse_cone_schema_echo():
    s = parse_scenario("kind = cone\nsites = 128\nmass = 0.1\ntimeSteps = 32\neps = 1e-3\n")
    assert s.kind == "cone"
    assert s.parameters["sites"] == 128
    assert s.parameters["mass"] == 0.1
    assert s.parameters["timeSteps"] == 32
    assert s.parameters["eps"] == 1e-3


def test_parse_comments_seed_and_output_path():
    s = parse_scenario("# full line\nkind = bell # trailing\naxis = x\nseed = 9\noutputPath = run1\n")
    assert s.parameters["axis"] == (1.0, 0.0, 0.0)
    assert s.seed == 9 and s.output_path == "run1"


@pytest.mark.parametrize(
    "text,message",
    [
        ("kind = warp\n", "unknown kind"),
        ("axis = z\n", "missing required key 'kind'"),
        ("kind = bell\naxis = z\nwarp = 1\n", "unknown keys"),
        ("kind = bell\n", "missing required key"),
        ("kind = bell\naxis = z\naxis = x\n", "duplicate"),
        ("kind = bell\naxis = z\ntrials = soon\n", "expected an integer"),
        ("kind = bell\naxis = 1,1,0\n", "not unit length"),
        ("kind = bell\naxis\n", "expected key = value"),
        ("kind = eraser\nmarking = maybe\nerasure = false\n", "true/false"),
        ("kind = chsh\na0Deg = 0\na1Deg = 0\nb0Deg = 0\nb1Deg = 0\nsigns = ++\n", "four"),
        ("kind = order\nevents = e1 1.0\n", "event record"),
    ],
)
def test_parse_rejections(text, message):
    with pytest.raises(ScenarioError, match=message):
        parse_scenario(text)


def test_parse_events_records():
    s = parse_scenario(
        "kind = order\nevents = e1 1.0 -0.99 @g; e2 1.0 0.99 @g; e3 1.5 1.2 @g\n"
    )
    events = s.parameters["events"]
    assert [e.id for e in events] == ["e1", "e2", "e3"]
    assert events[0].x == (-0.99,) and events[0].group == "g"
    assert s.parameters["policy"] == "all"


def test_unknown_key_runs_no_physics(tmp_path):
    # strict validation happens before dispatch
    with pytest.raises(ScenarioError):
        parse_scenario("kind = lhv\ngridStepDegrees = 1\nturbo = yes\n")


PASS_FAIL = {
    "bell": (
        "kind = bell\naxis = z\ntrials = 300\n",
        "kind = bell\naxis = z\ntrials = 300\nexpectedAgreement = 0.75\n",
    ),
    "epr": (
        "kind = epr\naxisA = z\naxisB = x\ntrials = 2000\ntolerance = 0.05\n",
        "kind = epr\naxisA = z\naxisB = x\ntrials = 2000\ntolerance = 0.01\nexpectedAgreement = 0.9\n",
    ),
    "chsh": (
        "kind = chsh\na0Deg = 0\na1Deg = 90\nb0Deg = 45\nb1Deg = 315\nminS = 2.8\n",
        "kind = chsh\na0Deg = 0\na1Deg = 90\nb0Deg = 45\nb1Deg = 315\nminS = 2.9\n",
    ),
    "lhv": (
        "kind = lhv\ngridStepDegrees = 5\n",
        "kind = lhv\ngridStepDegrees = 5\nminQuantum = 2.8285\n",
    ),
    "eraser": (
        "kind = eraser\nmarking = true\nerasure = false\n",
        "kind = eraser\nmarking = true\nerasure = false\nexpectedVisibility = 0.5\n",
    ),
    "cone": (
        "kind = cone\nsites = 128\nmass = 0.1\ntimeSteps = 32\n",
        "kind = cone\nsites = 128\nmass = 0.1\ntimeSteps = 32\nexpectedSpeed = 3\n",
    ),
    "topology": (
        "kind = topology\nsource = chain\nexpectDiscrete = true\n",
        "kind = topology\nsource = chain\nexpectDiscrete = false\n",
    ),
    "order": (
        "kind = order\nevents = e1 1.0 -0.99 @g; e2 1.0 0.99 @g; e3 1.5 1.2 @g\n"
        "witnessPair = e1 e3\nexpectAdmissible = 3\nexpectStrengthened = true\n",
        "kind = order\nevents = a 0 0; b 0 5\nwitnessPair = a b\n",
    ),
}


@pytest.mark.parametrize("kind", sorted(PASS_FAIL))
def test_exit_codes_per_kind(tmp_path, kind):
    passing, failing = PASS_FAIL[kind]
    good = tmp_path / "good.scn"
    good.write_text(passing)
    bad = tmp_path / "bad.scn"
    bad.write_text(failing)
    assert main(["run", str(good), "--out", str(tmp_path / "good_out")]) == 0
    assert main(["run", str(bad), "--out", str(tmp_path / "bad_out")]) == 2


def test_exit_code_validation_error(tmp_path, capsys):
    broken = tmp_path / "broken.scn"
    broken.write_text("kind = warp\n")
    assert main(["run", str(broken), "--out", str(tmp_path)]) == 1
    assert "unknown kind" in capsys.readouterr().err


def test_exit_code_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "nope.scn"), "--out", str(tmp_path)]) == 1


def test_shipped_scenarios_all_pass(tmp_path):
    scenario_files = sorted(SCENARIO_DIR.glob("*.scn"))
    assert len(scenario_files) >= 8
    for path in scenario_files:
        assert main(["run", str(path), "--out", str(tmp_path / path.stem)]) == 0, path.name


def test_csv_headers_and_artifacts(tmp_path):
    run_scenario(
        parse_scenario("kind = cone\nsites = 64\nmass = 1.0\ntimeSteps = 16\nexpectedSpeed = 1.18\nspeedTolerance = 0.05\n"),
        tmp_path,
    )
    commutators = (tmp_path / "cone_commutators.csv").read_text().splitlines()
    assert commutators[0] == "dx,dt,D"
    cone = (tmp_path / "cone_cone.csv").read_text().splitlines()
    assert cone[0] == "dt,extent"
    assert cone[1] == "1.0,2"

    run_scenario(parse_scenario("kind = eraser\nmarking = false\nerasure = false\n"), tmp_path)
    curve = (tmp_path / "eraser_curve.csv").read_text().splitlines()
    assert curve[0] == "phi,probability"
    assert len(curve) == 17


def test_output_path_prefixes_artifacts(tmp_path):
    scenario = parse_scenario(
        "kind = eraser\nmarking = false\nerasure = false\noutputPath = fringe\n"
    )
    report = run_scenario(scenario, tmp_path)
    assert report.artifacts == ["fringe_curve.csv"]
    assert (tmp_path / "fringe_curve.csv").exists()


def test_eps_override_changes_cone(tmp_path):
    scenario = parse_scenario("kind = cone\nsites = 64\nmass = 1.0\ntimeSteps = 16\n")
    default = run_scenario(scenario, tmp_path / "a")
    overridden = run_scenario(scenario, tmp_path / "b", eps_override=0.01)
    assert overridden.metrics["maxExtent"] < default.metrics["maxExtent"]
    assert overridden.inputs_echo["eps"] == 0.01


def test_threads_do_not_change_bytes(tmp_path):
    scenario = parse_scenario("kind = cone\nsites = 32\nmass = 0.5\ntimeSteps = 12\n")
    run_scenario(scenario, tmp_path / "a", threads=1)
    run_scenario(scenario, tmp_path / "b", threads=4)
    for name in ("cone_commutators.csv", "cone_cone.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_same_seed_reruns_byte_identical(tmp_path):
    texts = [
        "kind = bell\naxis = x\ntrials = 400\nseed = 21\n",
        "kind = order\nevents = e1 1.0 -0.99 @g; e2 1.0 0.99 @g; e3 1.5 1.2 @g\n",
    ]
    for text in texts:
        scenario = parse_scenario(text)
        first = run_scenario(scenario, tmp_path / "a")
        second = run_scenario(scenario, tmp_path / "b")
        assert json.dumps(first.to_json_dict(), sort_keys=True) == json.dumps(
            second.to_json_dict(), sort_keys=True
        )
        for artifact in first.artifacts:
            assert (tmp_path / "a" / artifact).read_bytes() == (
                tmp_path / "b" / artifact
            ).read_bytes()


def test_different_seed_changes_sampled_metric(tmp_path):
    scenario = parse_scenario("kind = epr\naxisA = z\naxisB = x\ntrials = 500\ntolerance = 0.2\n")
    first = run_scenario(scenario, tmp_path, seed_override=1)
    second = run_scenario(scenario, tmp_path, seed_override=2)
    assert first.metrics["agreementRate"] != second.metrics["agreementRate"]


def test_order_artifacts_adjacency_and_hasse(tmp_path):
    scenario = parse_scenario(
        "kind = order\nevents = e1 1.0 -0.99 @g; e2 1.0 0.99 @g; e3 1.5 1.2 @g\n"
    )
    report = run_scenario(scenario, tmp_path)
    adjacency = json.loads((tmp_path / "order_classical.json").read_text())
    assert adjacency == {"e1": [], "e2": ["e3"], "e3": []}
    assert (tmp_path / "order_classical_hasse.txt").read_text() == "e2 < e3\n"
    summary = json.loads((tmp_path / "order_summary.json").read_text())
    assert summary["orientationCount"] == 4
    assert summary["admissibleCount"] == 3
    assert summary["comparability"]["e1,e3"] == "all"
    assert f"order_quantum_000.json" in report.artifacts


def test_topology_artifact_stable_keys(tmp_path):
    scenario = parse_scenario("kind = topology\nsource = complete\ncompleteSize = 3\n")
    run_scenario(scenario, tmp_path)
    payload = json.loads((tmp_path / "topology_topology.json").read_text())
    for key in ("points", "cliques", "openSetCount", "flags"):
        assert key in payload
    assert payload["openSetCount"] == 2


def test_topology_file_source_relative_to_scenario(tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("a b\nb c\n")
    scenario_file = tmp_path / "topo.scn"
    scenario_file.write_text("kind = topology\nsource = file\nfile = g.txt\n")
    assert main(["run", str(scenario_file), "--out", str(tmp_path / "out")]) == 0
    payload = json.loads((tmp_path / "out" / "topology_topology.json").read_text())
    assert payload["cliques"] == [["a", "b"], ["b", "c"]]


def test_earliest_first_policy(tmp_path):
    scenario = parse_scenario(
        "kind = order\nevents = e1 1.0 -0.99 @g; e2 1.0 0.99 @g; e3 1.5 1.2 @g\n"
        "policy = earliest-first\nwitnessPair = e1 e3\n"
    )
    report = run_scenario(scenario, tmp_path)
    assert report.metrics["orientationCount"] == 2  # tie on e1/e2 branched
    assert report.verdicts["witnessComparable"] is True


def test_run_report_requires_metrics():
    from qcausal.scenarios import RunReport

    with pytest.raises(ValueError):
        RunReport("bell", {}, {}, {}, [])


def test_scenario_resource_error_exit_code(tmp_path):
    crowd = "; ".join(f"e{i} 0 {10.0 * i} @g" for i in range(7))
    scenario_file = tmp_path / "crowd.scn"
    scenario_file.write_text(f"kind = order\nevents = {crowd}\n")
    assert main(["run", str(scenario_file), "--out", str(tmp_path / "out")]) == 1
