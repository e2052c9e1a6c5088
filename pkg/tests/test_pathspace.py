"""Route complexes, trace-space models, discrete traces, naturalization."""

import random
from fractions import Fraction

import pytest

from ditop import fixtures
from ditop.errors import (
    EndpointMismatch,
    NoTrace,
    NotExecutionPath,
    NotLoopFree,
    UnknownState,
)
from ditop.gcomplex import Cell2, Edge, GlobularComplex
from ditop.pathspace import (
    DirectedPathPL,
    concat_paths,
    discrete_trace,
    enumerate_vertex_paths,
    extend_map,
    format_path_spec,
    naturalize,
    parse_path_spec,
    path_complex,
    point_cell,
    rep_path,
    trace_space,
)
from ditop.reparam import PLMap, is_regular, MoorePathPL

from helpers import rand_monotone

F = Fraction


class TestVertexPaths:
    def test_hollow_two_routes(self):
        x = fixtures.load("FIX-HOLLOW")
        assert enumerate_vertex_paths(x, "s00", "s11") == [("a", "b"), ("c", "d")]

    def test_b_middle(self):
        x = fixtures.load("FIX-B")
        assert enumerate_vertex_paths(x, "v1", "v2") == [("d2",), ("d4",)]

    def test_self_pair_constant_only(self):
        x = fixtures.load("FIX-B")
        assert enumerate_vertex_paths(x, "v1", "v1") == [()]

    def test_rejects_cycles(self):
        x = GlobularComplex(
            "X", ["u", "v"], [Edge("a", "u", "v"), Edge("b", "v", "u")]
        )
        with pytest.raises(NotLoopFree):
            enumerate_vertex_paths(x, "u", "v")

    def test_unknown_state(self):
        with pytest.raises(UnknownState):
            enumerate_vertex_paths(fixtures.load("FIX-B"), "v0", "zz")


class TestPathComplex:
    def test_square(self):
        p = path_complex(fixtures.load("FIX-SQUARE"), "s00", "s11")
        assert [len(level) for level in p.cubes] == [2, 1]
        assert p.cubes[1] == (("q",),)
        assert p.face_word(("q",), 1, 0) == ("a", "b")
        assert p.face_word(("q",), 1, 1) == ("c", "d")

    def test_fix_a(self):
        p = path_complex(fixtures.load("FIX-A"), "v0", "v3")
        assert [len(level) for level in p.cubes] == [3, 1]
        assert p.cubes[0] == (("d1", "d2", "d3"), ("d1", "d4", "d3"), ("e",))

    def test_twocells(self):
        p = path_complex(fixtures.load("FIX-TWOCELLS"), "x0", "x2")
        assert [len(level) for level in p.cubes] == [4, 4, 1]
        assert p.cubes[2] == (("s1", "s2"),)

    def test_vertex_count_matches_enumeration(self):
        for name in fixtures.GALLERY:
            x = fixtures.load(name)
            for alpha in x.states:
                for beta in x.states:
                    p = path_complex(x, alpha, beta)
                    assert len(p.vertices) == len(
                        enumerate_vertex_paths(x, alpha, beta)
                    )

    def test_no_2cells_dimension_zero(self):
        p = path_complex(fixtures.load("FIX-HOLLOW"), "s00", "s11")
        assert p.dimension == 0

    def test_loopcell_loop_edge(self):
        p = path_complex(fixtures.load("FIX-LOOPCELL"), "u0", "u1")
        assert [len(level) for level in p.cubes] == [1, 1]
        f = p.faces(1)[0][0]
        assert f[0] == f[1]

    def test_precubical_identities(self):
        for name in fixtures.GALLERY:
            x = fixtures.load(name)
            for alpha in x.states:
                for beta in x.states:
                    p = path_complex(x, alpha, beta)
                    for k in range(2, p.dimension + 1):
                        for w in p.cubes[k]:
                            for j in range(2, k + 1):
                                for i in range(1, j):
                                    for ea in (0, 1):
                                        for eb in (0, 1):
                                            one = p.face_word(
                                                p.face_word(w, j, eb), i, ea
                                            )
                                            two = p.face_word(
                                                p.face_word(w, i, ea), j - 1, eb
                                            )
                                            assert one == two


class TestTraceSpace:
    def test_b_d1_d3(self):
        x = fixtures.load("FIX-B")
        ts = trace_space(x, "d1", "d3")
        assert not ts.extra_point
        assert ts.base.alpha == "v1" and ts.base.beta == "v2"
        assert len(ts.base.vertices) == 2 and ts.base.dimension == 0

    def test_self_trace_singleton(self):
        x = fixtures.load("FIX-A")
        for c in ["v0", "d1", "c2"]:
            ts = trace_space(x, c, c)
            assert ts.extra_point and len(ts.base.vertices) == 0
            assert ts.n_points() == 1

    def test_fix_a_ends(self):
        ts = trace_space(fixtures.load("FIX-A"), "v0", "v3")
        assert len(ts.base.vertices) == 3 and ts.base.n_cubes(1) == 1

    def test_no_trace(self):
        x = fixtures.load("FIX-B")
        with pytest.raises(NoTrace):
            trace_space(x, "v3", "v0")
        with pytest.raises(NoTrace):
            trace_space(x, "d2", "d4")

    def test_cell_to_incident_vertex(self):
        x = fixtures.load("FIX-B")
        ts = trace_space(x, "v1", "d2")
        assert ts.base.alpha == "v1" and ts.base.beta == "v1"
        assert len(ts.base.vertices) == 1


class TestExtendMap:
    def test_left_extension_injective(self):
        x = fixtures.load("FIX-TWOCELLS")
        p = path_complex(x, "x1", "x2")
        m = extend_map(p, "left", ("f",))
        assert m.tgt.alpha == "x0"
        imgs = {p.cubes[0][i]: m.tgt.cubes[0][m.maps[0][i]] for i in range(2)}
        assert imgs == {("h",): ("f", "h"), ("k",): ("f", "k")}

    def test_empty_path_identity(self):
        p = path_complex(fixtures.load("FIX-B"), "v0", "v3")
        m = extend_map(p, "left", ())
        assert m.src is m.tgt
        assert all(
            m.maps[k][i] == i for k in range(len(p.cubes)) for i in range(len(p.cubes[k]))
        )

    def test_rep_path_lands_in_filled_component(self):
        x = fixtures.load("FIX-A")
        p = path_complex(x, "v0", "v0")
        m = extend_map(p, "right", rep_path(x, "c2"))
        image_word = m.tgt.cubes[0][m.maps[0][0]]
        assert image_word == ("d1", "d2", "d3")

    def test_endpoint_mismatch(self):
        p = path_complex(fixtures.load("FIX-B"), "v1", "v2")
        with pytest.raises(EndpointMismatch):
            extend_map(p, "left", ("d3",))


def two_squares():
    """Two filled squares glued corner to corner."""
    return GlobularComplex(
        "TWOSQ",
        ["s00", "s01", "s10", "s11", "t01", "t10", "t11"],
        [
            Edge("a1", "s00", "s01"),
            Edge("b1", "s01", "s11"),
            Edge("c1", "s00", "s10"),
            Edge("d1", "s10", "s11"),
            Edge("a2", "s11", "t01"),
            Edge("b2", "t01", "t11"),
            Edge("c2", "s11", "t10"),
            Edge("d2", "t10", "t11"),
        ],
        [
            Cell2("q1", ("a1", "b1"), ("c1", "d1")),
            Cell2("q2", ("a2", "b2"), ("c2", "d2")),
        ],
    )


class TestDiscreteTrace:
    def test_full_edge_traversal(self):
        x = fixtures.load("FIX-EDGE")
        gamma = DirectedPathPL((("d", None),), PLMap([(0, 0), (1, 1)]))
        chain, cuts = discrete_trace(x, gamma)
        assert chain == ("v0", "d", "v1")
        assert cuts == (0, 0, 1, 1)

    def test_interior_constant(self):
        x = fixtures.load("FIX-EDGE")
        gamma = DirectedPathPL((("d", None),), PLMap([(0, F(1, 2)), (1, F(1, 2))]))
        chain, cuts = discrete_trace(x, gamma)
        assert chain == ("d",)
        assert cuts == (0, 1)

    def test_partial_window(self):
        x = fixtures.load("FIX-HOLLOW")
        clock = PLMap([(0, F(1, 2)), (1, F(3, 2))])
        gamma = DirectedPathPL((("a", None), ("b", None)), clock)
        chain, cuts = discrete_trace(x, gamma)
        assert chain == ("a", "s01", "b")
        assert cuts == (0, F(1, 2), F(1, 2), 1)

    def test_flat_plateau_at_state(self):
        x = fixtures.load("FIX-HOLLOW")
        clock = PLMap([(0, F(1, 2)), (F(1, 4), 1), (F(3, 4), 1), (1, F(3, 2))])
        gamma = DirectedPathPL((("a", None), ("b", None)), clock)
        chain, cuts = discrete_trace(x, gamma)
        assert chain == ("a", "s01", "b")
        assert cuts == (0, F(1, 4), F(3, 4), 1)

    def test_five_conditions_random(self):
        rng = random.Random(20)
        for name in ["FIX-A", "FIX-B", "FIX-SQUARE", "FIX-TWOCELLS", "FIX-LOOPCELL"]:
            x = fixtures.load(name)
            for _ in range(10):
                gamma = _random_path(rng, x)
                _assert_trace_conditions(x, gamma)

    def test_concatenation_merges_traces(self):
        x = two_squares()
        g1 = DirectedPathPL(
            (("q1", F(1, 3)),), PLMap([(0, 0), (1, 1)])
        )
        g2 = DirectedPathPL(
            (("q2", F(1, 2)),), PLMap([(0, 0), (1, 1)])
        )
        both = concat_paths(x, g1, g2)
        c1, _ = discrete_trace(x, g1)
        c2, _ = discrete_trace(x, g2)
        merged, _ = discrete_trace(x, both)
        assert merged == c1 + c2[1:]

    def test_tame_normal_form_same_trace(self):
        x = two_squares()
        rng = random.Random(21)
        for _ in range(10):
            clock = rand_monotone(rng, 1, 2, n_pts=4)
            gamma = DirectedPathPL(
                (("q1", F(1, 3)), ("q2", F(2, 3))), clock
            )
            natgl, _ = naturalize(x, gamma)
            assert discrete_trace(x, gamma)[0] == discrete_trace(x, natgl)[0]


def _random_path(rng, x):
    arcs = {}
    for s in x.states:
        arcs[s] = [n for n in list(x.edges) + list(x.cells2) if x.src(n) == s]
    starts = [s for s in x.states if arcs[s]]
    state = rng.choice(starts)
    word = []
    while arcs.get(state) and (not word or rng.random() < 0.7):
        cell = rng.choice(arcs[state])
        z = None
        if cell in x.cells2:
            z = F(rng.randint(1, 5), 6)
        word.append((cell, z))
        state = x.tgt(cell)
    n = len(word)
    style = rng.random()
    if style < 0.2:
        v = F(rng.randint(0, 4 * n), 4)
        clock = PLMap([(0, v), (1, v)])
    elif style < 0.5:
        clock = rand_monotone(rng, 1, n, n_pts=4)  # surjective
    else:
        clock = rand_monotone(rng, 1, n, n_pts=4, surjective=False)
    return DirectedPathPL(tuple(word), clock)


def _assert_trace_conditions(x, gamma):
    chain, cuts = discrete_trace(x, gamma)
    m = len(chain)
    assert len(cuts) == m + 1
    assert cuts[0] == 0 and cuts[-1] == 1
    assert all(a <= b for a, b in zip(cuts, cuts[1:]))
    # consecutive entries differ
    assert all(a != b for a, b in zip(chain, chain[1:]))
    # endpoints
    assert point_cell(x, gamma, 0) == chain[0]
    assert point_cell(x, gamma, 1) == chain[-1]
    for i in range(m):
        a, b = cuts[i], cuts[i + 1]
        cell = chain[i]
        closure = {cell}
        if x.dim(cell) >= 1:
            closure |= {x.src(cell), x.tgt(cell)}
        probes = [a, b, (a + b) / 2] if a != b else [a]
        # refine probes with the clock's own breakpoints inside [a, b]
        probes += [t for t, _ in gamma.clock.breakpoints if a < t < b]
        for t in probes:
            assert point_cell(x, gamma, t) in closure
        if a != b:
            interior = [(a + b) / 2]
            interior += [t for t, _ in gamma.clock.breakpoints if a < t < b]
            mids = interior + [
                (p + q) / 2 for p, q in zip(sorted(interior), sorted(interior)[1:])
            ]
            for t in mids:
                if a < t < b:
                    assert point_cell(x, gamma, t) == cell
    for i in range(1, m):
        assert point_cell(x, gamma, cuts[i]) in (chain[i - 1], chain[i])


class TestNaturalize:
    def test_reads_off_decomposition(self):
        x = fixtures.load("FIX-EDGE")
        clock = PLMap([(0, 0), (F(1, 2), F(1, 4)), (1, 1)])
        gamma = DirectedPathPL((("d", None),), clock)
        natgl, phi = naturalize(x, gamma)
        assert natgl.clock == PLMap([(0, 0), (1, 1)])
        assert phi == clock
        assert is_regular(MoorePathPL(1, [natgl.clock]))

    def test_two_letter_clock_class(self):
        x = fixtures.load("FIX-HOLLOW")
        clock = PLMap([(0, 0), (F(1, 3), F(3, 2)), (1, 2)])
        gamma = DirectedPathPL((("a", None), ("b", None)), clock)
        natgl, phi = naturalize(x, gamma)
        assert natgl.clock == PLMap([(0, 0), (1, 2)])
        assert phi.v_first == 0 and phi.v_last == 2

    def test_rejects_non_surjective(self):
        x = fixtures.load("FIX-EDGE")
        gamma = DirectedPathPL((("d", None),), PLMap([(0, 0), (1, F(1, 2))]))
        with pytest.raises(NotExecutionPath):
            naturalize(x, gamma)


class TestPathSpecFormat:
    def test_roundtrip(self):
        x = fixtures.load("FIX-A")
        gamma = DirectedPathPL(
            (("c2", F(1, 2)),), PLMap([(0, 0), (F(1, 3), F(1, 2)), (1, 1)])
        )
        text = format_path_spec(gamma)
        back = parse_path_spec(text, x)
        assert back == gamma

    def test_parse_example(self):
        x = fixtures.load("FIX-HOLLOW")
        g = parse_path_spec(
            "path : a b clock: 0/1,1/2 1/1,3/2", x
        )
        assert g.word == (("a", None), ("b", None))
        assert g.clock == PLMap([(0, F(1, 2)), (1, F(3, 2))])
