import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcstats.stablegraph import (
    Edge,
    GraphValidationError,
    MulticurveSyntaxError,
    StableGraph,
    Vertex,
    automorphism_count,
    canonical_form,
    enumerate_stable_graphs,
    format_multicurve,
    from_canonical,
    graph_constants,
    one_handle_count,
    parse_multicurve,
)
from mcstats.wpvolume import ResourceLimitError


def load(data_dir, name):
    return parse_multicurve((data_dir / name).read_text())


def test_example_files_parse(data_dir):
    g = load(data_dir, "g2_loop_and_torus.mc")
    assert (g.genus, g.k, g.d) == (2, 2, 3)
    assert [e.id for e in g.edge_order()] == ["x1", "x2"]
    assert g.half_edges("P") == [0, 0, 1]
    assert g.half_edges("T") == [1]


@pytest.mark.parametrize(
    "name,one_handles,sym",
    [
        ("g2_loop_and_torus.mc", 1, 1),
        ("g3_separating.mc", 1, 1),
        ("pants_g2_theta.mc", 0, 12),
        ("pants_g2_dumbbell.mc", 0, 2),
        ("g3_loop_and_genus2.mc", 0, 1),
        ("g3_torus_chain.mc", 2, 2),
    ],
)
def test_constants(data_dir, name, one_handles, sym):
    c = graph_constants(load(data_dir, name))
    assert c.one_handles == one_handles
    assert c.sym_plus == c.sym == sym
    assert not c.overridden


def test_two_one_handles_swap():
    g = StableGraph([Vertex("a", 1), Vertex("b", 1)], [Edge("e", ("a", "b"))])
    assert one_handle_count(g) == 2
    assert automorphism_count(g) == 2


def test_overrides_respected():
    text = "genus 2\nvertex P genus 0\nvertex Q genus 0\n" + "".join(
        f"edge x{i} P Q\n" for i in (1, 2, 3)
    ) + "override sym_plus 6\noverride sym 3\n"
    c = graph_constants(parse_multicurve(text))
    assert (c.sym_plus, c.sym, c.overridden) == (6, 3, True)


def test_weights_parsed_and_formatted():
    text = "genus 2\nvertex P genus 0\nvertex T genus 1\nedge a P P weight 3\nedge b P T\n"
    g = parse_multicurve(text)
    assert g.weights == (3, 1)
    assert parse_multicurve(format_multicurve(g)) == g


def test_natural_edge_order():
    vs = [Vertex("v", 0), Vertex("w", 0)]
    es = [Edge("e10", ("v", "w")), Edge("e2", ("v", "w")), Edge("e1", ("v", "w"))]
    g = StableGraph(vs, es)
    assert [e.id for e in g.edge_order()] == ["e1", "e2", "e10"]


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("genus 2\nvertex P genus zero\n", 2),
        ("genus 2\nvertex P genus 0\nedge a P\n", 3),
        ("genus 2\ngenus 3\n", 2),
        ("genus 2\nfrobnicate\n", 2),
        ("# c\n\ngenus 2\noverride sym 2\noverride sym 3\n", 5),
    ],
)
def test_syntax_errors_are_line_numbered(text, lineno):
    with pytest.raises(MulticurveSyntaxError) as info:
        parse_multicurve(text)
    assert info.value.lineno == lineno
    assert f"line {lineno}" in str(info.value)


@pytest.mark.parametrize(
    "text,match",
    [
        ("genus 2\nvertex P genus 0\nvertex P genus 1\nedge a P P\n", "duplicate"),
        ("genus 2\nvertex P genus 0\nedge a P Q\n", "unknown"),
        ("genus 2\nvertex P genus 0\nvertex T genus 1\nedge a P T\n", "unstable"),
        ("genus 3\nvertex P genus 0\nvertex T genus 1\nedge a P P\nedge b P T\n", "genus"),
        ("genus 2\nvertex A genus 1\nvertex B genus 1\nedge a A B\nvertex C genus 0\n", "disconnected"),
        ("genus 2\nvertex P genus 0\nvertex T genus 1\nedge a P P weight 0\nedge b P T\n", "weight"),
    ],
)
def test_validation_errors(text, match):
    with pytest.raises((GraphValidationError, MulticurveSyntaxError), match=match):
        parse_multicurve(text)


def test_genus_one_surface_rejected():
    with pytest.raises(GraphValidationError):
        StableGraph([Vertex("a", 0)], [Edge("e", ("a", "a"))])


# -- enumeration ------------------------------------------------------------------


@pytest.mark.parametrize(
    "g,k,count",
    [(2, 1, 2), (2, 2, 2), (2, 3, 2), (3, 1, 2), (3, 2, 5), (3, 3, 9), (3, 4, 12), (3, 5, 8), (3, 6, 5)],
)
def test_enumeration_counts(g, k, count):
    graphs = enumerate_stable_graphs(g, k)
    assert len(graphs) == count
    keys = [canonical_form(x) for x in graphs]
    assert len(set(keys)) == count
    assert all(x.genus == g and x.k == k for x in graphs)


def test_enumeration_with_weights():
    # two unweighted graphs with two curves; weights in {1,2} up to symmetry
    graphs = enumerate_stable_graphs(2, 2, weights=2)
    assert len(graphs) == 7


def test_enumeration_cap():
    with pytest.raises(ResourceLimitError):
        enumerate_stable_graphs(3, 4, max_graphs=5)


def test_enumeration_is_deterministic():
    a = [canonical_form(x) for x in enumerate_stable_graphs(3, 3)]
    b = [canonical_form(x) for x in enumerate_stable_graphs(3, 3)]
    assert a == b


def _relabel_randomly(g: StableGraph, rnd: random.Random) -> StableGraph:
    vnames = [v.id for v in g.vertices]
    new = [f"n{i}" for i in range(len(vnames))]
    rnd.shuffle(new)
    enames = [e.id for e in g.edges]
    newe = [f"c{i}" for i in range(len(enames))]
    rnd.shuffle(newe)
    h = g.relabeled(dict(zip(vnames, new)), dict(zip(enames, newe)))
    # also shuffle the declaration order and flip edge ends
    vs = list(h.vertices)
    es = [Edge(e.id, e.ends[::-1] if rnd.random() < 0.5 else e.ends, e.weight) for e in h.edges]
    rnd.shuffle(vs)
    rnd.shuffle(es)
    return StableGraph(vs, es)


ALL_G3 = [x for k in range(1, 7) for x in enumerate_stable_graphs(3, k)]


@given(st.integers(0, len(ALL_G3) - 1), st.integers(0, 2**32))
@settings(max_examples=60)
def test_canonical_form_invariant_under_relabeling(i, seed):
    g = ALL_G3[i]
    h = _relabel_randomly(g, random.Random(seed))
    assert canonical_form(h) == canonical_form(g)
    assert automorphism_count(h) == automorphism_count(g)


def test_from_canonical_roundtrip():
    for g in ALL_G3:
        key = canonical_form(g)
        assert canonical_form(from_canonical(key)) == key


def test_automorphism_counts_of_genus3_pants():
    # the five genus-3 pants graphs; a trivalent graph's automorphisms
    # counted with parallel edges, loop flips excluded
    counts = sorted(automorphism_count(g) for g in enumerate_stable_graphs(3, 6))
    assert len(counts) == 5
    assert all(c >= 1 for c in counts)
    # K_4 has 24 vertex automorphisms and no parallel edges
    k4 = [g for g in enumerate_stable_graphs(3, 6) if len(g.vertices) == 4 and not any(e.is_loop for e in g.edges)
          and len({tuple(sorted(e.ends)) for e in g.edges}) == 6]
    assert len(k4) == 1
    assert automorphism_count(k4[0]) == 24
