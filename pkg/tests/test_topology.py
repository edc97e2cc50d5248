import json
import math
import random
import types

import numpy as np
import pytest

from cbhrp.errors import ConfigError
from cbhrp.topology import (
    DEAD,
    NetworkConfig,
    Node,
    assign_clusters,
    export_topology,
    generate_topology,
    import_topology,
    representative_intra_distance,
)


def test_single_node():
    cfg = NetworkConfig(n=1, k=1, m=1)
    (node,) = generate_topology(cfg, 123)
    assert 0 <= node.x <= cfg.network_diameter and 0 <= node.y <= cfg.network_diameter
    assert node.residual_energy == cfg.e_init


def test_generation_is_deterministic():
    cfg = NetworkConfig()
    a = generate_topology(cfg, 99)
    b = generate_topology(cfg, 99)
    assert [(n.x, n.y) for n in a] == [(n.x, n.y) for n in b]
    assert [(n.x, n.y) for n in a] != [(n.x, n.y) for n in generate_topology(cfg, 100)]


def test_uniform_placement_mean():
    cfg = NetworkConfig(n=1000, k=50, m=2, network_diameter=100)
    nodes = generate_topology(cfg, 42)
    xs = np.array([n.x for n in nodes])
    ys = np.array([n.y for n in nodes])
    assert abs(xs.mean() - 50) < 5 and abs(ys.mean() - 50) < 5
    # independent generator gives a comparable sample mean
    rng = random.Random(42)
    ref = sum(rng.uniform(0, 100) for _ in range(1000)) / 1000
    assert abs(xs.mean() - ref) < 5
    assert xs.min() >= 0 and xs.max() <= 100


def test_one_cluster_takes_everyone():
    nodes = generate_topology(NetworkConfig(n=20, k=1, m=1), 1)
    assert (assign_clusters(nodes, [(10, 10)]) == 0).all()


def test_tie_goes_to_lower_cluster_id():
    # origin is 4 m from heads 2 and 5, farther from the rest
    heads = [(50, 50), (60, 60), (0, 4), (70, 70), (80, 80), (4, 0)]
    assert assign_clusters(np.array([[0.0, 0.0]]), heads)[0] == 2
    assert assign_clusters(np.array([[0.0, 0.0]]), heads[::-1])[0] == 0


def test_corners_brute_force():
    heads = [(0, 0), (100, 0), (0, 100), (100, 100)]
    rng = np.random.default_rng(5)
    pts = rng.uniform(0, 100, size=(200, 2))
    labels = assign_clusters(pts, heads)
    for (x, y), lab in zip(pts, labels):
        dists = [math.dist((x, y), h) for h in heads]
        assert lab == dists.index(min(dists))
    assert assign_clusters(np.array([[40.0, 45.0]]), heads)[0] == 0


def test_partition_and_dead_nodes():
    nodes = generate_topology(NetworkConfig(n=50, k=5, m=1), 3)
    nodes[7].role = DEAD
    labels = assign_clusters(nodes, [(20, 20), (80, 80), (20, 80)])
    assert labels[7] == -1
    live = np.delete(labels, 7)
    assert ((live >= 0) & (live < 3)).all()


def test_needs_a_head():
    with pytest.raises(ValueError):
        assign_clusters(np.zeros((3, 2)), [])


def test_representative_distance():
    assert representative_intra_distance(NetworkConfig(network_diameter=100, k=50)) == pytest.approx(
        100 / math.sqrt(100 * math.pi), rel=1e-12
    )
    assert representative_intra_distance(NetworkConfig(network_diameter=100, k=50)) == pytest.approx(5.642, abs=1e-3)
    assert representative_intra_distance(types.SimpleNamespace(network_diameter=0, k=5)) == 0
    assert representative_intra_distance(types.SimpleNamespace(network_diameter=100, k=1e12)) < 1e-4


def test_overrides_take_precedence():
    cfg = NetworkConfig(d_intra=25, d_adv=30)
    assert (cfg.intra_distance, cfg.adv_distance) == (25, 30)


@pytest.mark.parametrize(
    "kwargs, fields",
    [
        ({"n": 0}, {"n"}),
        ({"k": 0}, {"k"}),
        ({"m": 30}, {"m", "n", "k"}),
        ({"l": 0}, {"l"}),
        ({"r_b": -1}, {"r_b"}),
        ({"d_bs": -5}, {"d_bs"}),
        ({"e_init": 0}, {"e_init"}),
        ({"eq9_exponent": 3}, {"eq9_exponent"}),
    ],
)
def test_config_validation(kwargs, fields):
    with pytest.raises(ConfigError) as err:
        NetworkConfig(**kwargs)
    assert set(err.value.fields) == fields


def test_uniformity_check():
    NetworkConfig(n=1000, k=50, m=2).check_uniform()
    with pytest.raises(ConfigError):
        NetworkConfig(n=1000, k=30, m=1).check_uniform()
    with pytest.raises(ConfigError):
        NetworkConfig(n=1000, k=50, m=8).check_uniform()


def test_topology_json_roundtrip(tmp_path):
    cfg = NetworkConfig(n=10, k=2, m=1)
    nodes = generate_topology(cfg, 5)
    path = tmp_path / "topo.json"
    doc = export_topology(cfg, 5, nodes, path)
    assert set(doc) == {"seed", "config", "nodes"}
    assert json.loads(path.read_text())["nodes"][3] == {"id": 3, "x": nodes[3].x, "y": nodes[3].y}
    cfg2, seed, nodes2 = import_topology(path)
    assert cfg2 == cfg and seed == 5
    assert [(n.x, n.y) for n in nodes2] == [(n.x, n.y) for n in nodes]


def test_node_position():
    assert Node(1, 2.0, 3.0, 0.5).position == (2.0, 3.0)
