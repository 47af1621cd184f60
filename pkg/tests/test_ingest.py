import io
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperlap import FlowConfig, assemble, build_hypergraph, gradient, neumann_flow
from hyperlap.dynamics import TRACE_COLUMNS
from hyperlap.errors import (
    EmptyInputError,
    HypergraphError,
    MalformedLineError,
    ParseError,
    SchemaVersionMismatchError,
    UnknownLeaderError,
)
from hyperlap.ingest import (
    ArcList,
    build_follower_star,
    build_pairwise,
    extract_subnetwork,
    hypergraph_from_dict,
    hypergraph_to_dict,
    is_weakly_connected,
    load_hyperarc_state,
    load_hypergraph,
    load_trace,
    load_vertex_state,
    parse_edge_list,
    save_hyperarc_state,
    save_hypergraph,
    save_trace,
    save_vertex_state,
)
from hyperlap.synthetic import random_instance, two_leader_network


def arcs_as_labels(h):
    return {
        (tuple(h.labels[v] for v in a.out_set), tuple(h.labels[v] for v in a.in_set))
        for a in h.hyperarcs
    }


def test_parse_basic():
    arcs = parse_edge_list("1 2\n3 2\n")
    assert arcs.pairs() == [("1", "2"), ("3", "2")]
    assert arcs.n_labels == 3


def test_parse_cleaning():
    arcs = parse_edge_list("1 1\n1 2\n1 2\n")
    assert arcs.pairs() == [("1", "2")]
    assert arcs.self_loops_removed == 1
    assert arcs.duplicates_removed == 1
    # self-loop labels that never appear elsewhere are not registered
    assert parse_edge_list("7 7\n1 2\n").labels == ["1", "2"]


def test_parse_malformed_line_number():
    with pytest.raises(MalformedLineError) as info:
        parse_edge_list("1 2 3\n")
    assert info.value.line_number == 1
    with pytest.raises(MalformedLineError) as info:
        parse_edge_list("# header\n1 2\n\n4\n")
    assert info.value.line_number == 4


def test_parse_empty():
    with pytest.raises(EmptyInputError):
        parse_edge_list("# nothing\n\n")
    with pytest.raises(EmptyInputError):
        parse_edge_list("5 5\n")


def test_parse_options():
    text = "% comment\n1 2\n3 4\n5 6\n"
    assert parse_edge_list(text, max_lines=3).pairs() == [("1", "2"), ("3", "4")]
    assert parse_edge_list(io.StringIO("1 2\n"), reverse_pairs=True).pairs() == [("2", "1")]
    assert parse_edge_list("a\tb\r\n").pairs() == [("a", "b")]


@given(st.text(alphabet="12 ab#\n\t", max_size=80))
def test_parser_is_total(text):
    try:
        arcs = parse_edge_list(text)
    except HypergraphError:
        return
    assert arcs.n_arcs > 0
    assert all(a != b for a, b in arcs.pairs())
    assert len(set(arcs.pairs())) == arcs.n_arcs


def test_follower_star_examples():
    h = build_follower_star(parse_edge_list("1 2\n3 2\n"))
    assert arcs_as_labels(h) == {(("2",), ("1", "3"))}
    h = build_follower_star(parse_edge_list("1 2\n2 1\n"))
    assert arcs_as_labels(h) == {(("2",), ("1",)), (("1",), ("2",))}


def test_follower_star_bijection_and_counts():
    arcs = two_leader_network(n_followers=20, n_bridges=5, seed=3)
    h = build_follower_star(arcs)
    listed = {(h.labels[a.in_set[i]], h.labels[a.out_set[0]])
              for a in h.hyperarcs for i in range(len(a.in_set))}
    assert listed == set(arcs.pairs())
    assert h.n_hyperarcs == int(np.count_nonzero(arcs.follower_counts()))
    assert h.n_hyperarcs <= arcs.n_arcs


def test_pairwise_examples():
    h = build_pairwise(parse_edge_list("1 2\n3 2\n"))
    assert arcs_as_labels(h) == {(("1",), ("2",)), (("3",), ("2",))}
    arcs = two_leader_network(n_followers=10, n_bridges=3)
    h = build_pairwise(arcs)
    assert h.n_hyperarcs == arcs.n_arcs
    f = np.random.default_rng(0).standard_normal(h.n_vertices)
    g = gradient(assemble(h), f)
    expected = [f[a.in_set[0]] - f[a.out_set[0]] for a in h.hyperarcs]
    np.testing.assert_array_equal(g, expected)


def test_extract_subnetwork():
    arcs = parse_edge_list("1 2\n3 2\n4 3\n9 8\n")
    sub = extract_subnetwork(arcs, "auto")
    assert sub.labels[0] == "2"
    assert set(sub.labels) == {"1", "2", "3", "4"}
    assert is_weakly_connected(sub)
    small = extract_subnetwork(arcs, "3", max_vertices=2)
    assert small.n_labels == 2 and "3" in small.labels
    assert is_weakly_connected(small)
    with pytest.raises(UnknownLeaderError):
        extract_subnetwork(arcs, "nobody")


def test_extract_subnetwork_random():
    rng = np.random.default_rng(1)
    pairs = [(str(a), str(b)) for a, b in rng.integers(0, 300, (600, 2))]
    arcs = ArcList.from_pairs(pairs)
    for limit in (1, 10, 50, None):
        sub = extract_subnetwork(arcs, "auto", limit)
        assert is_weakly_connected(sub)
        assert limit is None or sub.n_labels <= limit
        assert set(sub.pairs()) <= set(arcs.pairs())


def test_hypergraph_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    for _ in range(5):
        h, _ = random_instance(rng, 12, 30, mode="random", reversals=3)
        path = tmp_path / "h.json"
        save_hypergraph(h, path)
        back = load_hypergraph(path)
        assert back.same_structure(h)
        for k in ("w_I", "w_G", "W_I", "W_G"):
            assert getattr(back, k).tobytes() == getattr(h, k).tobytes()


def test_hypergraph_load_errors(tmp_path):
    h = build_hypergraph(2, [([0], [1])])
    doc = hypergraph_to_dict(h)
    with pytest.raises(SchemaVersionMismatchError):
        hypergraph_from_dict(dict(doc, version=99))
    with pytest.raises(ParseError) as info:
        hypergraph_from_dict(dict(doc, W_G="x"))
    assert info.value.location == "$.W_G"
    bad = dict(doc, hyperarcs=[{"out": ["0"], "in": ["zz"]}])
    with pytest.raises(ParseError) as info:
        hypergraph_from_dict(bad)
    assert info.value.location == "$.hyperarcs[0]"
    path = tmp_path / "broken.json"
    path.write_text('{"schema": \n  oops}')
    with pytest.raises(ParseError) as info:
        load_hypergraph(path)
    assert info.value.location.endswith(":2:3")
    path.write_text(json.dumps(dict(doc, w_I=[1.0, -1.0])))
    with pytest.raises(HypergraphError):
        load_hypergraph(path)


def test_state_round_trips(tmp_path, oh1):
    rng = np.random.default_rng(3)
    f = rng.standard_normal(4) * 10.0 ** rng.integers(-300, 300, 4)
    save_vertex_state(oh1, f, tmp_path / "f.csv")
    assert load_vertex_state(oh1, tmp_path / "f.csv").tobytes() == f.tobytes()
    F = np.array([np.pi, -1e-310])
    save_hyperarc_state(oh1, F, tmp_path / "F.csv")
    assert load_hyperarc_state(oh1, tmp_path / "F.csv").tobytes() == F.tobytes()
    assert (tmp_path / "F.csv").read_text().splitlines()[1].startswith("0,0,1 2,")


def test_state_load_errors(tmp_path, oh1):
    p = tmp_path / "f.csv"
    p.write_text("label,value\n0,1\n1,2\n2,3\n")
    with pytest.raises(ParseError):
        load_vertex_state(oh1, p)
    p.write_text("label,value\n0,1\n1,x\n")
    with pytest.raises(ParseError) as info:
        load_vertex_state(oh1, p)
    assert info.value.location.endswith(":3")
    p.write_text("name,value\n")
    with pytest.raises(ParseError):
        load_vertex_state(oh1, p)


def test_trace_round_trip(tmp_path, oh1):
    res = neumann_flow(assemble(oh1), np.array([1.0, 2.0, 3.0, 4.0]), FlowConfig(record_every=1))
    path = tmp_path / "t.csv"
    save_trace(res.trace, path)
    assert path.read_text().splitlines()[0] == ",".join(TRACE_COLUMNS)
    assert TRACE_COLUMNS == ("iteration", "relative_change", "energy", "weighted_mean", "rayleigh_quotient")
    assert load_trace(path) == res.trace
