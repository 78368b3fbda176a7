import json
from pathlib import Path

import pytest

from councilnet.errors import (
    DisconnectedTopology,
    ParseError,
    UnknownNode,
    ValidationError,
)
from councilnet.phase2 import verify_partition
from councilnet.sim import (
    audit_dump,
    audit_secrecy,
    compromise,
    initialize,
    load_scenario,
    run,
    scenario_from_dict,
    step,
)
from councilnet.topologies import random_connected

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

STATIC_SEVEN = {
    "seed": 7,
    "rounds": 10,
    "field_prime": 13,
    "nodes": [{"nid": n} for n in range(1, 8)],
    "edges": [[1, 2], [1, 3], [1, 5], [3, 5], [4, 5], [4, 6], [4, 7], [6, 7]],
}


def mobile_scenario(walkers=("2",), rounds=4):
    nodes = [
        {"nid": 1, "pos": [0.0, 0.0]},
        {"nid": 2, "pos": [0.8, 0.0]},
        {"nid": 3, "pos": [0.4, 0.6]},
        {"nid": 4, "pos": [0.5, -0.8]},
        {"nid": 5, "pos": [1.45, -0.8]},
        {"nid": 6, "pos": [2.35, -0.8]},
    ]
    if "2" in walkers:
        nodes[1].update(waypoints=[[1.45, 0.1]], speed=3.0)
    if "3" in walkers:
        nodes[2].update(waypoints=[[2.9, -0.1]], speed=3.0)
    return scenario_from_dict({"seed": 3, "rounds": rounds, "radius": 1.0, "nodes": nodes})


class TestLoadScenario:
    def test_minimal_single_node(self, tmp_path):
        path = tmp_path / "one.json"
        path.write_text(json.dumps({"nodes": [{"nid": 1, "pos": [0, 0]}], "radius": 1.0}))
        sc = load_scenario(path)
        assert sc.rounds == 0
        assert sc.gateway_threshold == 0.5
        assert sc.field_prime == 2**61 - 1

    def test_duplicate_nids_rejected(self, tmp_path):
        path = tmp_path / "dup.json"
        path.write_text(
            json.dumps({"radius": 1.0, "nodes": [{"nid": 1, "pos": [0, 0]}, {"nid": 1, "pos": [1, 0]}]})
        )
        with pytest.raises(ValidationError):
            load_scenario(path)

    def test_fixture_file_uses_edge_list_mode(self):
        sc = load_scenario(SCENARIOS / "two_cluster_seven.json")
        assert len(sc.nodes) == 7
        assert sc.static
        assert len(sc.edges) == 8

    def test_missing_file_is_a_parse_error(self, tmp_path):
        with pytest.raises(ParseError):
            load_scenario(tmp_path / "nope.json")

    def test_bad_json_reports_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{\n  'nodes': []\n}")
        with pytest.raises(ParseError) as err:
            load_scenario(path)
        assert "line" in str(err.value)

    def test_adversary_must_reference_known_nodes(self):
        data = dict(STATIC_SEVEN, adversary={"compromise_round": 1, "nodes": [99]})
        with pytest.raises(ValidationError):
            scenario_from_dict(data)

    def test_negative_speed_rejected(self):
        data = {
            "radius": 1.0,
            "nodes": [{"nid": 1, "pos": [0, 0], "speed": -1.0}],
        }
        with pytest.raises(ValidationError):
            scenario_from_dict(data)

    def test_prime_must_exceed_node_ids(self):
        data = dict(STATIC_SEVEN, field_prime=7)
        with pytest.raises(ValidationError):
            scenario_from_dict(data)

    def test_composite_prime_rejected(self):
        data = dict(STATIC_SEVEN, field_prime=15)
        with pytest.raises(ValidationError):
            scenario_from_dict(data)


class TestInitialize:
    def test_two_cluster_fixture(self):
        state = initialize(scenario_from_dict(STATIC_SEVEN))
        by_cid = {c.cluster_id: c for c in state.partition.clusters}
        assert set(by_cid) == {1, 6}
        ledger1 = state.share_ledger[1]
        ledger6 = state.share_ledger[6]
        assert (len(ledger1.shares), ledger1.k) == (3, 2)
        assert (len(ledger6.shares), ledger6.k) == (1, 1)

    def test_single_node(self):
        state = initialize(
            scenario_from_dict({"radius": 1.0, "rounds": 0, "nodes": [{"nid": 1, "pos": [0, 0]}]})
        )
        assert len(state.partition.clusters) == 1
        only = state.share_ledger[1]
        assert (len(only.shares), only.k) == (1, 1)

    def test_hundred_node_random_scenario_is_clean(self):
        t = random_connected(100, seed=5)
        nodes = [{"nid": n, "pos": list(t.positions[n])} for n in sorted(t.nodes)]
        sc = scenario_from_dict({"radius": t.radius, "rounds": 0, "nodes": nodes})
        state = initialize(sc)
        assert verify_partition(state.topology, state.partition) == []

    def test_disconnected_initial_topology_rejected(self):
        sc = scenario_from_dict(
            {
                "radius": 1.0,
                "nodes": [{"nid": 1, "pos": [0, 0]}, {"nid": 2, "pos": [9, 9]}],
            }
        )
        with pytest.raises(DisconnectedTopology):
            initialize(sc)


class TestStep:
    def test_static_scenario_never_changes(self):
        sc = scenario_from_dict(STATIC_SEVEN)
        state = initialize(sc)
        first = state.partition
        for _ in range(sc.rounds):
            step(state)
        assert state.partition == first
        assert sum(r.reforms for r in state.metrics) == 0
        assert sum(r.updates for r in state.metrics) == 0
        assert [r.cluster_count for r in state.metrics] == [2] * 10

    def test_two_departing_heads_force_reform(self):
        state = initialize(mobile_scenario(walkers=("2", "3")))
        for _ in range(4):
            step(state)
        per_round = [(r.updates, r.reforms) for r in state.metrics]
        assert per_round[0] == (0, 0)  # first miss recorded, nothing departed yet
        assert per_round[1] == (0, 1)  # two of three heads out -> re-formation
        assert state.violations == []

    def test_single_departing_head_is_local_update(self):
        state = initialize(mobile_scenario(walkers=("2",)))
        for _ in range(4):
            step(state)
        per_round = [(r.updates, r.reforms) for r in state.metrics]
        assert per_round[1] == (1, 0)
        assert sum(r.reforms for r in state.metrics) == 0
        # the departed head joined the neighbouring council and got a share
        assert 2 in state.partition.cluster(5).council.heads
        assert 2 in state.share_ledger[5].shares
        assert state.violations == []

    def test_hello_round_counts(self):
        sc = scenario_from_dict(dict(STATIC_SEVEN, hello_interval_rounds=3, rounds=6))
        state = initialize(sc)
        for _ in range(6):
            step(state)
        assert [r.hellos for r in state.metrics] == [7, 0, 0, 7, 0, 0]

    def test_refresh_interval_bumps_epochs(self):
        sc = scenario_from_dict(dict(STATIC_SEVEN, refresh_interval_rounds=4))
        state = initialize(sc)
        for _ in range(sc.rounds):
            step(state)
        assert state.share_ledger[1].epoch == 2  # rounds 4 and 8

    def test_maintenance_decisions_are_logged(self):
        state = initialize(mobile_scenario(walkers=("2",)))
        for _ in range(4):
            step(state)
        actions = [(entry[1], entry[2]) for entry in state.decision_log]
        assert (1, "local_update") in actions

    def test_update_and_reform_counts_bounded_by_hello_rounds(self):
        for walkers in (("2",), ("2", "3")):
            state = initialize(mobile_scenario(walkers=walkers, rounds=6))
            hello_rounds = 0
            while state.round < state.scenario.rounds and not state.halted:
                if state.round % state.scenario.hello_interval_rounds == 0:
                    hello_rounds += 1
                step(state)
            total = sum(r.updates + r.reforms for r in state.metrics)
            assert total <= hello_rounds

    def test_stranded_node_halts_with_partial_report(self):
        # the only companion walks out of radio range entirely: re-formation
        # cannot run on a disconnected topology, so the run stops early
        sc = scenario_from_dict(
            {
                "seed": 1,
                "rounds": 6,
                "radius": 1.0,
                "nodes": [
                    {"nid": 1, "pos": [0.0, 0.0]},
                    {"nid": 2, "pos": [0.5, 0.0], "waypoints": [[9.0, 0.0]], "speed": 10.0},
                ],
            }
        )
        state = initialize(sc)
        while state.round < sc.rounds and not state.halted:
            step(state)
        assert state.halted
        assert len(state.metrics) < sc.rounds
        assert any("re-formation failed" in v for v in state.violations)


class TestCompromiseAndAudit:
    def test_empty_compromise_changes_nothing(self):
        state = initialize(scenario_from_dict(STATIC_SEVEN))
        before = dict(state.adversary_shares)
        compromise(state, set())
        assert state.adversary_shares == before
        assert state.compromised == set()

    def test_single_head_below_threshold(self):
        state = initialize(scenario_from_dict(STATIC_SEVEN))
        compromise(state, {1})
        audit = audit_secrecy(state)
        entry = {e.cluster_id: e for e in audit.entries}[1]
        assert entry.compromised_head_count == 1
        assert not entry.breached
        assert entry.consistent_secrets == 13  # every candidate secret remains possible
        assert audit.ok

    def test_two_heads_reach_threshold(self):
        state = initialize(scenario_from_dict(STATIC_SEVEN))
        compromise(state, {1, 3})
        entry = {e.cluster_id: e for e in audit_secrecy(state).entries}[1]
        assert entry.breached
        assert entry.consistent_secrets == 1

    def test_refresh_outruns_a_stale_share(self):
        sc = scenario_from_dict(dict(STATIC_SEVEN, refresh_interval_rounds=2, rounds=2))
        state = initialize(sc)
        compromise(state, {1})
        step(state)
        step(state)  # refresh at round 2: epoch moves on, node 1 keeps leaking
        entry = {e.cluster_id: e for e in audit_secrecy(state).entries}[1]
        assert entry.compromised_head_count == 1
        assert not entry.breached

    def test_unknown_node_rejected(self):
        state = initialize(scenario_from_dict(STATIC_SEVEN))
        with pytest.raises(UnknownNode):
            compromise(state, {42})

    def test_scheduled_compromise_fires(self):
        sc = scenario_from_dict(
            dict(STATIC_SEVEN, adversary={"compromise_round": 3, "nodes": [1, 3]})
        )
        state = initialize(sc)
        for _ in range(sc.rounds):
            step(state)
        assert state.compromised == {1, 3}
        assert [r.secrecy_ok for r in state.metrics] == [True] * 10


class TestRun:
    def test_static_fixture_ten_rounds(self, tmp_path):
        out = tmp_path / "metrics.csv"
        report = run(SCENARIOS / "two_cluster_seven.json", out)
        lines = out.read_text().splitlines()
        assert len(lines) == 11  # header + 10 rows
        assert lines[0] == (
            "round,cluster_count,mean_council,min_council,max_council,"
            "updates,reforms,hellos,secrecy_ok"
        )
        assert all(line.split(",")[1] == "2" for line in lines[1:])
        assert report.ok

    def test_zero_rounds_gives_header_only(self, tmp_path):
        path = tmp_path / "sc.json"
        path.write_text(json.dumps(dict(STATIC_SEVEN, rounds=0)))
        out = tmp_path / "metrics.csv"
        run(path, out)
        assert out.read_text().splitlines() == [
            "round,cluster_count,mean_council,min_council,max_council,"
            "updates,reforms,hellos,secrecy_ok"
        ]

    def test_seed_never_changes_a_static_partition(self, tmp_path):
        rows = {}
        for seed in (1, 2):
            path = tmp_path / f"sc{seed}.json"
            path.write_text(json.dumps(dict(STATIC_SEVEN, seed=seed)))
            out = tmp_path / f"m{seed}.csv"
            run(path, out)
            rows[seed] = out.read_text()
        assert rows[1] == rows[2]

    def test_mobile_demo_fixture_runs_clean(self, tmp_path):
        report = run(SCENARIOS / "mobile_demo.json", tmp_path / "m.csv")
        assert report.ok
        assert sum(r.updates for r in report.rows) >= 1

    def test_state_dump_round_trips_through_audit(self, tmp_path):
        sc_path = tmp_path / "sc.json"
        sc_path.write_text(
            json.dumps(dict(STATIC_SEVEN, adversary={"compromise_round": 2, "nodes": [1]}))
        )
        dump_path = tmp_path / "state.json"
        run(sc_path, tmp_path / "m.csv", state_out=dump_path)
        payload = json.loads(dump_path.read_text())
        shares = payload["clusters"][0]["shares"]
        assert all(len(entry) == 5 for entry in shares)  # (x, y, k, epoch, p)
        result = audit_dump(payload)
        assert result.ok
        entry = {e.cluster_id: e for e in result.entries}[1]
        assert entry.compromised_head_count == 1
        assert not entry.breached
