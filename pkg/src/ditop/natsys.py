"""Natural systems of valued trace spaces over a globular complex.

The cells of a loop-free complex form a one-step face order whose chains
are the discrete traces.  Chains are the objects of a factorization
poset: there is (at most one) morphism from a chain to any chain
containing it as a contiguous block, generated by one-cell extensions on
either side.  A natural system assigns to each chain the valuation of
the trace-space model between its first and last cell, and to each
extension the induced map; the rules per extension shape are:

* prepending the initial state of a positive-dimensional head cell glues
  the canonical traversal route of that cell on the left (symmetrically
  on the right);
* prepending a positive-dimensional cell whose final state is the
  current head vertex changes nothing (the reduced endpoints agree), so
  the component is the literal identity;
* extending a one-cell chain maps its isolated self-trace point to the
  constant route at the shared reduced endpoint.

The module also builds the two comparison morphisms the tool checks:
the map induced by a cellular collapse, and the map from the
center-representative restriction of the continuous system onto the
discrete one.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import CapExceeded, NotFunctorial
from .gcomplex import CellularMap, GlobularComplex, is_chain, require_loop_free
from .pathspace import (
    DEFAULT_CAP,
    DirectedPathPL,
    TraceSpaceValue,
    check_path,
    discrete_trace,
    extend_map,
    path_complex,
    point_cell,
    rep_path,
    trace_space,
)
from .values import (
    SpaceMap,
    Valuation,
    Value,
    ValueMap,
    space_map_by_words,
    space_map_collapse,
    space_map_from_cubical,
    space_map_point_to,
    space_map_same_base,
)

Chain = tuple[str, ...]


# -- the discrete trace category ----------------------------------------------


@dataclass(frozen=True)
class TraceCategoryD:
    """Objects are the cells, morphisms the chains of the face order."""

    complex: GlobularComplex
    chains: tuple[Chain, ...]

    def identity(self, cell: str) -> Chain:
        return (cell,)

    def compose(self, first: Chain, second: Chain) -> Chain:
        """Concatenation with the shared endpoint cell written once."""
        if first[-1] != second[0]:
            raise NotFunctorial(
                f"chains {first} and {second} do not share an endpoint cell"
            )
        return first + second[1:]

    def morphisms_between(self, c: str, d: str) -> list[Chain]:
        return [t for t in self.chains if t[0] == c and t[-1] == d]


def trace_category(x: GlobularComplex, cap=DEFAULT_CAP) -> TraceCategoryD:
    """Enumerate every chain of the one-step face order."""
    x.require_computable()
    require_loop_free(x)
    succ: dict[str, list[str]] = {}
    for a, b in x.order_arcs():
        succ.setdefault(a, []).append(b)
    chains: list[Chain] = []
    for cell in x.all_cells():
        stack = [(cell,)]
        while stack:
            t = stack.pop()
            chains.append(t)
            if len(chains) > cap:
                raise CapExceeded(f"more than {cap} discrete traces")
            for nxt in succ.get(t[-1], ()):
                stack.append(t + (nxt,))
    chains.sort(key=lambda t: (len(t), t))
    return TraceCategoryD(x, tuple(chains))


def _is_subchain(a: Chain, b: Chain) -> bool:
    """a occurs in b as a contiguous block (unique if so: entries distinct)."""
    if len(a) > len(b):
        return False
    try:
        at = b.index(a[0])
    except ValueError:
        return False
    return b[at : at + len(a)] == a


class FactCat:
    """Factorization poset of a trace category.

    Objects are chains; hom(a, b) holds when b extends a on both sides,
    i.e. b = u * a * v with shared endpoint cells.  Every morphism is a
    composite of one-cell extensions.
    """

    def __init__(self, chains):
        self.objects: tuple[Chain, ...] = tuple(chains)
        self._index = {t: i for i, t in enumerate(self.objects)}
        self._targets: dict[Chain, tuple[Chain, ...]] = {}
        self._gens: dict[Chain, tuple[Chain, ...]] = {}

    def __contains__(self, t: Chain) -> bool:
        return t in self._index

    def hom(self, a: Chain, b: Chain) -> bool:
        return _is_subchain(a, b)

    def extension_pair(self, a: Chain, b: Chain) -> tuple[Chain, Chain]:
        """The chains (u, v) with b = u * a * v."""
        at = b.index(a[0])
        return b[: at + 1], b[at + len(a) - 1 :]

    def targets_from(self, a: Chain) -> tuple[Chain, ...]:
        if a not in self._targets:
            self._targets[a] = tuple(
                b for b in self.objects if _is_subchain(a, b)
            )
        return self._targets[a]

    def gens_from(self, a: Chain) -> tuple[Chain, ...]:
        if a not in self._gens:
            self._gens[a] = tuple(
                b
                for b in self.targets_from(a)
                if len(b) == len(a) + 1
            )
        return self._gens[a]

    def generators(self):
        for a in self.objects:
            for b in self.gens_from(a):
                yield a, b


def factorization_category(tc: TraceCategoryD) -> FactCat:
    return FactCat(tc.chains)


class RelabeledIndex:
    """The same poset with objects wrapped one-to-one."""

    def __init__(self, base: FactCat, wrap: Callable, unwrap: Callable):
        self.base = base
        self.wrap = wrap
        self.unwrap = unwrap
        self.objects = tuple(wrap(o) for o in base.objects)

    def __contains__(self, t) -> bool:
        return self.unwrap(t) in self.base

    def hom(self, a, b) -> bool:
        return self.base.hom(self.unwrap(a), self.unwrap(b))

    def extension_pair(self, a, b):
        return self.base.extension_pair(self.unwrap(a), self.unwrap(b))

    def targets_from(self, a):
        return tuple(self.wrap(t) for t in self.base.targets_from(self.unwrap(a)))

    def gens_from(self, a):
        return tuple(self.wrap(t) for t in self.base.gens_from(self.unwrap(a)))

    def generators(self):
        for a, b in self.base.generators():
            yield self.wrap(a), self.wrap(b)


# -- diagrams -------------------------------------------------------------------


@dataclass
class Diagram:
    """A functor from a factorization poset into valued spaces."""

    label: str
    index: FactCat | RelabeledIndex
    valuation: Valuation
    spaces: dict
    values: dict
    maps: dict  # (src_obj, tgt_obj) -> ValueMap, for every hom pair

    def value(self, obj) -> Value:
        return self.values[obj]

    def map(self, a, b) -> ValueMap:
        return self.maps[(a, b)]

    def morphisms(self):
        return self.maps.keys()


@dataclass
class DiagramMap:
    """Index functor together with per-object components."""

    src: Diagram
    tgt: Diagram
    obj_map: dict
    components: dict  # obj -> ValueMap from src.value(obj) to tgt.value(obj_map[obj])

    def check_functorial(self):
        for a, b in self.src.maps:
            fa, fb = self.obj_map[a], self.obj_map[b]
            if not self.tgt.index.hom(fa, fb):
                raise NotFunctorial(
                    f"image of {a} -> {b} is not a morphism: {fa} !-> {fb}"
                )

    def naturality_failures(self):
        """Objects and morphisms whose naturality square fails."""
        out = []
        for (a, b) in self.src.maps:
            fa, fb = self.obj_map[a], self.obj_map[b]
            left = self.components[b].compose(self.src.map(a, b))
            right = self.tgt.map(fa, fb).compose(self.components[a])
            if left != right:
                out.append((a, b))
        return out


# -- the discrete natural system ------------------------------------------------


class _SystemBuilder:
    def __init__(self, x: GlobularComplex, valuation: Valuation, cap: int, jobs: int):
        self.x = x
        self.valuation = valuation
        self.cap = cap
        self.jobs = max(1, jobs)
        self.tc = trace_category(x, cap)
        self.index = factorization_category(self.tc)
        self._space_by_pair: dict[tuple[str, str], TraceSpaceValue] = {}

    def space(self, t: Chain) -> TraceSpaceValue:
        key = (t[0], t[-1])
        if key not in self._space_by_pair:
            self._space_by_pair[key] = trace_space(self.x, key[0], key[1], self.cap)
        return self._space_by_pair[key]

    # -- one-cell extensions ------------------------------------------------

    def gen_space_map(self, a: Chain, b: Chain) -> SpaceMap:
        u, v = self.index.extension_pair(a, b)
        if len(u) == 2:
            return self._one_step(a, (u[0],) + a, left=True)
        if len(v) == 2:
            return self._one_step(a, a + (v[1],), left=False)
        raise NotFunctorial(f"{a} -> {b} is not a one-cell extension")

    def _one_step(self, t: Chain, t2: Chain, left: bool) -> SpaceMap:
        x = self.x
        src = self.space(t)
        tgt = self.space(t2)
        new = t2[0] if left else t2[-1]
        anchor = t[0] if left else t[-1]
        if x.dim(anchor) >= 1:
            # the new cell is the initial (final) state of the anchor cell
            if len(t) == 1:
                empty_idx = tgt.base.index[()][1]
                return space_map_point_to(src, tgt, empty_idx)
            side = "left" if left else "right"
            cubical = extend_map(src.base, side, rep_path(x, anchor), self.cap)
            if cubical.tgt is not tgt.base:
                raise NotFunctorial("extension lands in an unexpected complex")
            return space_map_from_cubical(src, tgt, cubical)
        # the anchor is a vertex, the new cell has positive dimension
        if left:
            assert new != t[-1], "extension would close a cycle"
        else:
            assert new != t[0], "extension would close a cycle"
        if len(t) == 1:
            empty_idx = tgt.base.index[()][1]
            return space_map_point_to(src, tgt, empty_idx)
        if src.base is not tgt.base:
            raise NotFunctorial("reduced endpoints changed under a silent extension")
        return space_map_same_base(src, tgt)

    # -- assembly ------------------------------------------------------------

    def build(self, label: str) -> Diagram:
        objects = self.index.objects
        if self.jobs > 1:
            pairs = sorted({(t[0], t[-1]) for t in objects})
            with ThreadPoolExecutor(self.jobs) as pool:
                for pair, space in zip(
                    pairs,
                    pool.map(lambda p: trace_space(self.x, p[0], p[1], self.cap), pairs),
                ):
                    self._space_by_pair[pair] = space
        spaces = {t: self.space(t) for t in objects}
        values = {t: self.valuation.value(spaces[t]) for t in objects}
        gen_maps: dict[tuple[Chain, Chain], ValueMap] = {}
        for a, b in self.index.generators():
            gen_maps[(a, b)] = self.valuation.map(self.gen_space_map(a, b))
        maps: dict[tuple[Chain, Chain], ValueMap] = {}
        for t in objects:
            known = {t: ValueMap.identity(values[t])}
            frontier = [t]
            while frontier:
                u = frontier.pop()
                for w in self.index.gens_from(u):
                    m = gen_maps[(u, w)].compose(known[u])
                    if w in known:
                        if known[w] != m:
                            raise NotFunctorial(
                                f"extension square at {t}: routes to {w} disagree"
                            )
                    else:
                        known[w] = m
                        frontier.append(w)
            for w, m in known.items():
                maps[(t, w)] = m
        return Diagram(label, self.index, self.valuation, spaces, values, maps)


def natural_system(
    x: GlobularComplex,
    valuation: Valuation,
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
    label: Optional[str] = None,
) -> Diagram:
    """The discrete natural system of x under the given valuation."""
    builder = _SystemBuilder(x, valuation, cap, jobs)
    return builder.build(label or f"NTd({x.name})")


def format_chain(t: Chain) -> str:
    return "[" + ",".join(t) + "]"


def diagram_export(d: Diagram) -> str:
    """Canonical text listing: objects, values, generator images."""
    lines = []
    for t in d.index.objects:
        lines.append(f"object {format_chain(t)}")
    for t in d.index.objects:
        lines.append(f"value {format_chain(t)} : {d.values[t].describe()}")
    for a, b in d.index.generators():
        u, v = d.index.extension_pair(a, b)
        ext = f"L:{b[0]}" if len(u) == 2 else f"R:{b[-1]}"
        lines.append(
            f"gen {format_chain(a)} --{ext}--> {format_chain(b)} : "
            f"{d.maps[(a, b)].describe()}"
        )
    return "\n".join(lines) + "\n"


# -- value of a directed path, two ways ------------------------------------------


@dataclass(frozen=True)
class PathValueReport:
    start_cell: str
    end_cell: str
    chain: Chain
    direct: Value
    via_trace: Value

    @property
    def consistent(self) -> bool:
        return self.direct == self.via_trace


def nt_value_of_path(
    x: GlobularComplex, gamma: DirectedPathPL, valuation: Valuation, cap=DEFAULT_CAP
) -> PathValueReport:
    """Value at a directed path computed by endpoint reduction and by
    its discrete trace; the two must agree."""
    check_path(x, gamma)
    c0 = point_cell(x, gamma, 0)
    c1 = point_cell(x, gamma, 1)
    if c0 == c1:
        direct_space = trace_space(x, c0, c0, cap)
    else:
        a = c0 if x.dim(c0) == 0 else x.tgt(c0)
        b = c1 if x.dim(c1) == 0 else x.src(c1)
        direct_space = TraceSpaceValue(path_complex(x, a, b, cap), extra_point=False)
    chain, _ = discrete_trace(x, gamma)
    via_space = trace_space(x, chain[0], chain[-1], cap)
    return PathValueReport(
        c0,
        c1,
        chain,
        valuation.value(direct_space),
        valuation.value(via_space),
    )


# -- maps induced by cellular collapses -------------------------------------------


def _trim_interior(y: GlobularComplex, chain: Chain) -> Chain:
    """Drop bounding vertices: the interior of a cell misses them."""
    out = chain
    if len(out) > 1 and y.dim(out[0]) == 0:
        out = out[1:]
    if len(out) > 1 and y.dim(out[-1]) == 0:
        out = out[:-1]
    return out


def map_chain_through(m: CellularMap, x: GlobularComplex, y: GlobularComplex, t: Chain) -> Chain:
    """Image of a chain: replace cells by image chains, glue, normalize."""
    pieces = []
    for cell in t:
        img = m.image_chain(cell)
        if x.dim(cell) >= 1:
            img = _trim_interior(y, img)
        pieces.append(img)
    out = list(pieces[0])
    for p in pieces[1:]:
        if out[-1] == p[0]:
            out.extend(p[1:])
        elif y.below(out[-1], p[0]):
            out.extend(p)
        else:
            raise NotFunctorial(
                f"image pieces {out[-1]} and {p[0]} do not meet in the face order"
            )
    if not is_chain(y, tuple(out)):
        raise NotFunctorial(f"image of {t} is not a chain: {out}")
    return tuple(out)


def _spell_edges(y: GlobularComplex, chain: Chain) -> Chain:
    """The edge route a chain traverses; filled cells go by their lower route."""
    out: list[str] = []
    for cell in chain:
        d = y.dim(cell)
        if d == 1:
            out.append(cell)
        elif d == 2:
            out.extend(rep_path(y, cell))
    return tuple(out)


def _letter_image(m: CellularMap, x, y, letter: str) -> Chain:
    """Target letters replacing one source letter inside a route word."""
    img = m.image_chain(letter)
    if x.dim(letter) == 1:
        return _spell_edges(y, img)
    squares = [c for c in img if y.dim(c) == 2]
    if len(squares) > 1:
        raise NotFunctorial(
            f"image of square {letter} contains several squares; unsupported"
        )
    if not squares:
        return _spell_edges(y, img)
    at = img.index(squares[0])
    return _spell_edges(y, img[:at]) + (squares[0],) + _spell_edges(y, img[at + 1 :])


def crush_component(
    m: CellularMap,
    x: GlobularComplex,
    y: GlobularComplex,
    t: Chain,
    t2: Chain,
    src: TraceSpaceValue,
    tgt: TraceSpaceValue,
) -> SpaceMap:
    if tgt.n_points() == 1 and tgt.base.dimension == 0:
        return space_map_collapse(src, tgt)
    # affixes translate between the reduced endpoints on both sides
    suffix: Chain = ()
    if x.dim(t[0]) >= 1:
        g0 = _trim_interior(y, m.image_chain(t[0]))
        if y.dim(g0[0]) >= 1:
            suffix = _spell_edges(y, g0[1:])
    prefix: Chain = ()
    if x.dim(t[-1]) >= 1:
        gn = _trim_interior(y, m.image_chain(t[-1]))
        if y.dim(gn[-1]) >= 1:
            prefix = _spell_edges(y, gn[:-1])

    def word_fn(w):
        out = list(suffix)
        for letter in w:
            out.extend(_letter_image(m, x, y, letter))
        out.extend(prefix)
        return tuple(out)

    extra_word = None
    if src.extra_point:
        middle = _trim_interior(y, m.image_chain(t[0]))
        extra_word = _spell_edges(y, middle[1:-1])
    return space_map_by_words(src, tgt, word_fn, extra_word)


def crush_induced_map(
    m: CellularMap,
    x: GlobularComplex,
    y: GlobularComplex,
    valuation: Valuation,
    cap: int = DEFAULT_CAP,
) -> DiagramMap:
    """The map of natural systems induced by a cellular collapse."""
    src = natural_system(x, valuation, cap)
    tgt = natural_system(y, valuation, cap)
    obj_map = {t: map_chain_through(m, x, y, t) for t in src.index.objects}
    for t, t2 in obj_map.items():
        if t2 not in tgt.index:
            raise NotFunctorial(f"image chain {t2} is not a trace of {y.name}")
    components = {}
    for t in src.index.objects:
        t2 = obj_map[t]
        sm = crush_component(m, x, y, t, t2, src.spaces[t], tgt.spaces[t2])
        components[t] = valuation.map(sm)
    dm = DiagramMap(src, tgt, obj_map, components)
    dm.check_functorial()
    return dm


# -- comparison with the continuous system ----------------------------------------


def dt_comparison(
    x: GlobularComplex, valuation: Valuation, cap: int = DEFAULT_CAP
) -> DiagramMap:
    """From the center-representative restriction of the continuous
    system onto the discrete one.

    Each discrete trace has a canonical representative trace running
    through the centers of its cells; the values and extension actions
    of the continuous system at these representatives reduce to exactly
    the discrete data, so the comparison components are identities and
    the index functor is the bijection that forgets the representative.
    """
    tgt = natural_system(x, valuation, cap)

    def wrap(t):
        return ("ct",) + t

    def unwrap(t):
        return t[1:]

    index = RelabeledIndex(tgt.index, wrap, unwrap)
    src = Diagram(
        f"NT({x.name})|reps",
        index,
        valuation,
        {wrap(t): s for t, s in tgt.spaces.items()},
        {wrap(t): v for t, v in tgt.values.items()},
        {(wrap(a), wrap(b)): m for (a, b), m in tgt.maps.items()},
    )
    obj_map = {wrap(t): t for t in tgt.index.objects}
    components = {
        wrap(t): ValueMap.identity(tgt.values[t]) for t in tgt.index.objects
    }
    return DiagramMap(src, tgt, obj_map, components)


# -- coarsening along a refinement -------------------------------------------------


def coarsening_map(
    fine: GlobularComplex,
    coarse: GlobularComplex,
    refinement: dict[str, str],
    valuation: Valuation,
    cap: int = DEFAULT_CAP,
) -> DiagramMap:
    """The open map of natural systems collapsing a subdivision.

    ``refinement`` sends every cell of the fine complex to the coarse
    cell it lies in, as produced by the subdivision operations.
    """
    src = natural_system(fine, valuation, cap, label=f"NTd({fine.name}|fine)")
    tgt = natural_system(coarse, valuation, cap, label=f"NTd({coarse.name})")

    def chain_image(t: Chain) -> Chain:
        out = []
        for cell in t:
            img = refinement[cell]
            if not out or out[-1] != img:
                out.append(img)
        return tuple(out)

    obj_map = {t: chain_image(t) for t in src.index.objects}
    for t, t2 in obj_map.items():
        if t2 not in tgt.index:
            raise NotFunctorial(f"coarsened chain {t2} is not a trace")

    def group_image(img: str, letters: list[str]) -> Chain:
        """One traversal of the coarse cell a run of fine letters lies in."""
        d = coarse.dim(img)
        if d == 1:
            return (img,)
        if d == 2:
            if any(fine.dim(le) == 2 for le in letters):
                return (img,)
            return rep_path(coarse, img)
        raise NotFunctorial(f"route letters {letters} collapse to a state")

    components = {}
    for t in src.index.objects:
        t2 = obj_map[t]
        v_src = src.spaces[t]
        v_tgt = tgt.spaces[t2]
        if v_tgt.n_points() == 1 and v_tgt.base.dimension == 0:
            components[t] = valuation.map(space_map_collapse(v_src, v_tgt))
            continue
        # route letters still inside the image chain's end cells are
        # absorbed into the reduced endpoints on the coarse side
        head = t2[0] if coarse.dim(t2[0]) >= 1 else None
        tail = t2[-1] if coarse.dim(t2[-1]) >= 1 else None

        def word_fn(w, head=head, tail=tail):
            dropped = list(w)
            while dropped and head is not None and refinement[dropped[0]] == head:
                dropped.pop(0)
            while dropped and tail is not None and refinement[dropped[-1]] == tail:
                dropped.pop()
            out: list[str] = []
            group: list[str] = []
            group_img = None
            for letter in dropped + [None]:
                img = refinement[letter] if letter is not None else None
                if img != group_img and group:
                    out.extend(group_image(group_img, group))
                    group = []
                group_img = img
                if letter is not None:
                    group.append(letter)
            return tuple(out)

        components[t] = valuation.map(space_map_by_words(v_src, v_tgt, word_fn))
    dm = DiagramMap(src, tgt, obj_map, components)
    dm.check_functorial()
    return dm


def identity_diagram_map(d: Diagram) -> DiagramMap:
    return DiagramMap(
        d,
        d,
        {t: t for t in d.index.objects},
        {t: ValueMap.identity(d.values[t]) for t in d.index.objects},
    )


def refinement_span(
    fine: GlobularComplex,
    coarse: GlobularComplex,
    refinement: dict[str, str],
    valuation: Valuation,
    cap: int = DEFAULT_CAP,
):
    """A span from the fine system onto the coarse and onto itself."""
    p = coarsening_map(fine, coarse, refinement, valuation, cap)
    q = identity_diagram_map(p.src)
    return p, q
