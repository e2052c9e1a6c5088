"""Valuations of trace-space models and isomorphism candidates."""

import pytest

from ditop import fixtures
from ditop.algtop import FgAbGroup
from ditop.errors import NotFunctorial
from ditop.pathspace import trace_space
from ditop.values import (
    Valuation,
    Value,
    ValueMap,
    iso_candidates,
    parse_valuation,
    space_map_by_words,
    space_map_collapse,
    space_map_same_base,
)


class TestValuation:
    def test_parse(self):
        assert parse_valuation("pi0").label == "pi0"
        assert parse_valuation("hom:2").maxdeg == 2
        with pytest.raises(ValueError):
            parse_valuation("rainbow")

    def test_pi0_counts_extra_point(self):
        x = fixtures.load("FIX-A")
        val = Valuation("pi0")
        assert val.value(trace_space(x, "c2", "c2")).components == 1
        assert val.value(trace_space(x, "v0", "v3")).components == 2

    def test_hom_groups(self):
        x = fixtures.load("FIX-LOOPCELL")
        val = Valuation("hom", 1)
        v = val.value(trace_space(x, "u0", "u1"))
        assert v.groups == (FgAbGroup(1), FgAbGroup(1))
        assert v.describe() == "H0 = Z^1, H1 = Z^1"

    def test_describe_pi0(self):
        assert Value(1).describe() == "1 component"
        assert Value(2).describe() == "2 components"


class TestSpaceMaps:
    def test_same_base_identity(self):
        x = fixtures.load("FIX-B")
        ts = trace_space(x, "v0", "v3")
        sm = space_map_same_base(ts, ts)
        m = Valuation("hom", 1).map(sm)
        assert m == ValueMap.identity(m.src)

    def test_collapse(self):
        x = fixtures.load("FIX-A")
        big = trace_space(x, "v0", "v3")
        point = trace_space(x, "c2", "c2")
        m = Valuation("pi0").map(space_map_collapse(big, point))
        assert m.tgt.components == 1
        assert m.comp.images == (0, 0)

    def test_word_map_degenerate_needs_even_collapse(self):
        # collapsing only one side of a filled track is not a chain map
        x = fixtures.load("FIX-A")
        ts = trace_space(x, "v0", "v3")

        def bad(w):
            # send the filled track to nothing but keep its faces apart
            return tuple(c for c in w if c != "c2") or ("e",)

        sm = space_map_by_words(ts, ts, bad)
        with pytest.raises(NotFunctorial):
            Valuation("hom", 1).map(sm)


class TestIsoCandidates:
    def test_size_mismatch_exact_empty(self):
        cands, complete = iso_candidates(Value(1), Value(2))
        assert cands == [] and complete

    def test_bijections_complete(self):
        cands, complete = iso_candidates(Value(2), Value(2))
        assert complete and len(cands) == 2
        assert all(c.is_iso() for c in cands)

    def test_single_free_generator(self):
        a = Value(1, (FgAbGroup(1), FgAbGroup(1)))
        cands, complete = iso_candidates(a, a)
        assert complete and len(cands) == 2  # identity and negation on H1
        mats = {c.homs[0].matrix for c in cands}
        assert mats == {((1,),), ((-1,),)}

    def test_rank_two_incomplete(self):
        a = Value(1, (FgAbGroup(1), FgAbGroup(2)))
        cands, complete = iso_candidates(a, a)
        assert not complete
        assert len(cands) == 8  # signed permutations of two free generators
        assert all(c.is_iso() for c in cands)

    def test_single_torsion_complete(self):
        a = Value(1, (FgAbGroup(1), FgAbGroup(0, (5,))))
        cands, complete = iso_candidates(a, a)
        assert complete and len(cands) == 4  # units mod 5

    def test_group_mismatch(self):
        a = Value(1, (FgAbGroup(1), FgAbGroup(1)))
        b = Value(1, (FgAbGroup(1), FgAbGroup(0)))
        cands, complete = iso_candidates(a, b)
        assert cands == [] and complete
