"""Smith normal form, chain complexes, homology, induced maps."""

import random
from fractions import Fraction

from ditop import fixtures
from ditop.algtop import (
    FgAbGroup,
    FinSetMap,
    GroupHom,
    chain_complex,
    homology,
    homology_basis,
    induced,
    mat_identity,
    mat_mul,
    pi0,
    smith_normal_form,
    solve_integer,
)
from ditop.gcomplex import subdivide_2cell, subdivide_edge
from ditop.pathspace import extend_map, path_complex, rep_path


def det(m):
    """Exact determinant by fraction-free elimination (test oracle)."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    sign = 1
    for i in range(n):
        piv = next((r for r in range(i, n) if a[r][i]), None)
        if piv is None:
            return 0
        if piv != i:
            a[i], a[piv] = a[piv], a[i]
            sign = -sign
        for r in range(i + 1, n):
            factor = a[r][i] / a[i][i]
            for c in range(i, n):
                a[r][c] -= factor * a[i][c]
    out = Fraction(sign)
    for i in range(n):
        out *= a[i][i]
    assert out.denominator == 1
    return int(out)


def gcd_all(values):
    from math import gcd

    g = 0
    for v in values:
        g = gcd(g, abs(v))
    return g


class TestSNF:
    def test_gcd_of_minors_oracle(self):
        m = [[2, 4], [6, 8]]
        d, u, v = smith_normal_form(m)
        assert mat_mul(mat_mul(u, m), v) == d
        d1, d2 = d[0][0], d[1][1]
        assert d1 == gcd_all([2, 4, 6, 8]) == 2
        assert d1 * d2 == abs(det(m)) == 8

    def test_identity(self):
        m = mat_identity(3)
        d, u, v = smith_normal_form(m)
        assert d == mat_identity(3)

    def test_zero(self):
        m = [[0, 0], [0, 0], [0, 0]]
        d, u, v = smith_normal_form(m)
        assert d == m
        assert mat_mul(mat_mul(u, m), v) == d

    def test_random_roundtrip(self):
        rng = random.Random(30)
        for _ in range(200):
            rows = rng.randint(1, 5)
            cols = rng.randint(1, 5)
            m = [[rng.randint(-9, 9) for _ in range(cols)] for _ in range(rows)]
            d, u, v = smith_normal_form(m)
            assert mat_mul(mat_mul(u, m), v) == d
            assert abs(det(u)) == 1 and abs(det(v)) == 1
            diag = [d[i][i] for i in range(min(rows, cols))]
            for i in range(rows):
                for j in range(cols):
                    if i != j:
                        assert d[i][j] == 0
            nz = [x for x in diag if x]
            assert diag[: len(nz)] == nz  # zeros trail
            for a, b in zip(nz, nz[1:]):
                assert b % a == 0
            assert all(x >= 0 for x in diag)

    def test_solver(self):
        m = [[2, 0], [0, 3]]
        assert solve_integer(m, [4, 9]) == [2, 3]
        assert solve_integer(m, [1, 0]) is None


class TestChainComplex:
    def test_square_boundary(self):
        p = path_complex(fixtures.load("FIX-SQUARE"), "s00", "s11")
        cx = chain_complex(p)
        assert cx.ranks == (2, 1)
        assert cx.boundary(1) == [[-1], [1]]

    def test_zero_dimensional(self):
        p = path_complex(fixtures.load("FIX-HOLLOW"), "s00", "s11")
        cx = chain_complex(p)
        assert cx.ranks == (2,)
        assert cx.boundary(1) == [[], []]

    def test_loopcell_cancels(self):
        p = path_complex(fixtures.load("FIX-LOOPCELL"), "u0", "u1")
        cx = chain_complex(p)
        assert cx.boundary(1) == [[0]]

    def test_dd_zero_everywhere(self):
        for name in fixtures.GALLERY:
            x = fixtures.load(name)
            for a in x.states:
                for b in x.states:
                    chain_complex(path_complex(x, a, b))  # raises if dd != 0


class TestHomology:
    def test_fix_b_two_components(self):
        p = path_complex(fixtures.load("FIX-B"), "v0", "v3")
        assert homology(p, 0) == FgAbGroup(2)

    def test_square_contractible(self):
        p = path_complex(fixtures.load("FIX-SQUARE"), "s00", "s11")
        assert homology(p, 0) == FgAbGroup(1)
        assert homology(p, 1) == FgAbGroup(0)

    def test_loopcell_circle(self):
        p = path_complex(fixtures.load("FIX-LOOPCELL"), "u0", "u1")
        assert homology(p, 0) == FgAbGroup(1)
        assert homology(p, 1) == FgAbGroup(1)

    def test_twocells(self):
        p = path_complex(fixtures.load("FIX-TWOCELLS"), "x0", "x2")
        assert homology(p, 0) == FgAbGroup(1)
        assert homology(p, 1) == FgAbGroup(0)

    def test_h0_rank_equals_pi0(self):
        for name in fixtures.GALLERY:
            x = fixtures.load(name)
            for a in x.states:
                for b in x.states:
                    p = path_complex(x, a, b)
                    assert homology(p, 0).rank == pi0(p).n_classes
                    assert homology(p, 0).torsion == ()

    def test_generator_cycles_classify_to_identity(self):
        p = path_complex(fixtures.load("FIX-LOOPCELL"), "u0", "u1")
        basis = homology_basis(p, 1)
        for i in range(basis.group.n_gens):
            z = basis.generator_cycle(i)
            cls = basis.class_of_cycle(z)
            assert cls == [1 if j == i else 0 for j in range(basis.group.n_gens)]


class TestPi0:
    def test_fix_a_components(self):
        p = path_complex(fixtures.load("FIX-A"), "v0", "v3")
        part = pi0(p)
        assert part.n_classes == 2
        by_word = dict(zip(p.vertices, part.classes))
        assert by_word[("d1", "d2", "d3")] == by_word[("e",)] == 0
        assert by_word[("d1", "d4", "d3")] == 1

    def test_square_connected(self):
        p = path_complex(fixtures.load("FIX-SQUARE"), "s00", "s11")
        assert pi0(p).n_classes == 1

    def test_empty(self):
        p = path_complex(fixtures.load("FIX-B"), "v3", "v0")
        assert pi0(p).n_classes == 0


class TestInduced:
    def test_identity(self):
        from ditop.pathspace import CubicalMap

        p = path_complex(fixtures.load("FIX-TWOCELLS"), "x0", "x2")
        ident = CubicalMap.identity(p)
        assert induced(ident, "pi0") == FinSetMap.identity(1)
        assert induced(ident, 1) == GroupHom.identity(homology(p, 1))

    def test_extension_picks_filled_component(self):
        x = fixtures.load("FIX-A")
        p = path_complex(x, "v0", "v0")
        m = extend_map(p, "right", rep_path(x, "c2"))
        comp = induced(m, "pi0")
        assert comp.images == (0,)  # the component containing d1.d2.d3 and e

    def test_left_extension_h0(self):
        x = fixtures.load("FIX-TWOCELLS")
        p = path_complex(x, "x1", "x2")
        m = extend_map(p, "left", ("f",))
        hom = induced(m, 0)
        assert hom.matrix == ((1,),)

    def test_functorial_composition(self):
        x = fixtures.load("FIX-TWOCELLS")
        p = path_complex(x, "x1", "x2")
        m1 = extend_map(p, "left", ("f",))
        m2 = extend_map(m1.tgt, "right", ())
        from ditop.pathspace import CubicalMap

        comp = CubicalMap(p, m1.tgt, lambda w: ("f",) + w)
        assert induced(comp, "pi0") == induced(m2, "pi0").compose(induced(m1, "pi0"))
        assert induced(comp, 0) == induced(m2, 0).compose(induced(m1, 0))

    def test_rep_choice_invariance(self):
        # extending by the lower or the upper route of any 2-cell induces
        # the same maps on components and homology
        for name in fixtures.GALLERY:
            x = fixtures.load(name)
            for cname, cell in x.cells2.items():
                src = x.src(cname)
                tgt = x.tgt(cname)
                for beta in x.states:
                    try:
                        p = path_complex(x, tgt, beta)
                    except Exception:
                        continue
                    if not p.vertices:
                        continue
                    lo = extend_map(p, "left", cell.lower)
                    up = extend_map(p, "left", cell.upper)
                    assert induced(lo, "pi0") == induced(up, "pi0")
                    for k in (0, 1):
                        assert induced(lo, k) == induced(up, k)


class TestSubdivisionInvariance:
    def test_homology_stable_under_both_splits(self):
        for name in fixtures.GALLERY:
            x = fixtures.load(name)
            variants = []
            for e in x.edges:
                variants.append(subdivide_edge(x, e))
            for c in x.cells2:
                variants.append(subdivide_2cell(x, c, 2))
            for y, ref in variants:
                back = {s: ref[s] for s in y.states}
                for a in x.states:
                    for b in x.states:
                        p = path_complex(x, a, b)
                        a2 = next(s for s in y.states if back[s] == a and s in x.states)
                        b2 = next(s for s in y.states if back[s] == b and s in x.states)
                        q = path_complex(y, a2, b2)
                        for k in (0, 1):
                            assert homology(p, k) == homology(q, k), (
                                name,
                                a,
                                b,
                                k,
                            )


class TestGroupHom:
    def test_surjectivity_and_iso(self):
        g = FgAbGroup(1, (2,))
        h = GroupHom.make(g, g, [[1, 0], [0, 1]])
        assert h.is_iso()
        flip = GroupHom.make(g, g, [[1, 1], [0, 1]])
        assert flip.is_iso()
        assert flip.inverse().compose(flip) == GroupHom.identity(g)
        not_onto = GroupHom.make(g, g, [[0, 0], [0, 2]])
        assert not not_onto.is_surjective()

    def test_free_rank_two(self):
        g = FgAbGroup(2)
        m = GroupHom.make(g, g, [[2, 1], [1, 1]])
        assert m.is_iso()
        assert m.inverse().matrix == ((1, -1), (-1, 2))
        n = GroupHom.make(g, g, [[2, 0], [0, 1]])
        assert not n.is_iso()

    def test_torsion_reduction(self):
        g = FgAbGroup(0, (3,))
        h = GroupHom.make(g, g, [[4]])
        assert h.matrix == ((1,),)
