"""Open maps and bisimulations of valued diagrams.

A diagram map is open when its index functor is surjective on objects,
every morphism out of an image object lifts through the functor, and all
components are isomorphisms forming a natural transformation.  Two
diagrams are bisimilar when some set of iso-linked object pairs covers
both sides and completes extension squares both ways; ``bisimilar``
searches for one by deleting violating triples from the full candidate
set until stable (a greatest-fixpoint computation).

Candidate isomorphisms come from the valuation layer; when their
enumeration is incomplete (free rank two or beyond, composite torsion) a
failed search reports "unknown" instead of "no".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import NotFunctorial, NotOpen
from .natsys import Diagram, DiagramMap, format_chain
from .values import Value, ValueMap, iso_candidates


def _fmt(obj) -> str:
    if isinstance(obj, tuple):
        return format_chain(obj)
    return str(obj)


# -- open maps ----------------------------------------------------------------


@dataclass(frozen=True)
class OpenFailure:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass(frozen=True)
class OpenCheck:
    ok: bool
    failures: tuple[OpenFailure, ...]

    def report(self) -> str:
        if self.ok:
            return "OPEN"
        return "NOT OPEN\n" + "\n".join(str(f) for f in self.failures)


def check_open(dm: DiagramMap, max_failures: int = 10) -> OpenCheck:
    """Object surjectivity, morphism lifting, iso components, naturality."""
    failures: list[OpenFailure] = []
    try:
        dm.check_functorial()
    except NotFunctorial as err:
        return OpenCheck(False, (OpenFailure("not-functorial", str(err)),))
    hit = set(dm.obj_map.values())
    for j in dm.tgt.index.objects:
        if j not in hit:
            failures.append(
                OpenFailure("not-surjective", f"object {_fmt(j)} has no preimage")
            )
            if len(failures) >= max_failures:
                return OpenCheck(False, tuple(failures))
    for i in dm.src.index.objects:
        fi = dm.obj_map[i]
        lift_targets = {dm.obj_map[i0] for i0 in dm.src.index.targets_from(i)}
        for j2 in dm.tgt.index.targets_from(fi):
            if j2 not in lift_targets:
                failures.append(
                    OpenFailure(
                        "no-lift",
                        f"morphism {_fmt(fi)} -> {_fmt(j2)} has no lift at {_fmt(i)}",
                    )
                )
                if len(failures) >= max_failures:
                    return OpenCheck(False, tuple(failures))
    for i in dm.src.index.objects:
        mu = dm.components[i]
        if not mu.is_iso():
            failures.append(
                OpenFailure(
                    "component-not-iso",
                    f"witness {_fmt(i)} -> {_fmt(dm.obj_map[i])}: "
                    f"{mu.src.describe()} vs {mu.tgt.describe()}",
                )
            )
            if len(failures) >= max_failures:
                return OpenCheck(False, tuple(failures))
    for a, b in dm.naturality_failures():
        failures.append(
            OpenFailure(
                "not-natural", f"square at {_fmt(a)} -> {_fmt(b)} does not commute"
            )
        )
        if len(failures) >= max_failures:
            break
    return OpenCheck(not failures, tuple(failures))


def check_open_up_to_homotopy(dm: DiagramMap, max_failures: int = 10) -> OpenCheck:
    """Openness of an already-valuated diagram map.

    The diagrams carry valued spaces, so this is ``check_open`` with
    certificates phrased as invariant mismatches.
    """
    return check_open(dm, max_failures)


# -- bisimulations -------------------------------------------------------------


@dataclass(frozen=True)
class Bisimulation:
    triples: tuple[tuple[object, ValueMap, object], ...]

    def report(self) -> str:
        return "\n".join(
            f"triple {_fmt(i)} ~ {_fmt(j)} via {eta.describe()}"
            for i, eta, j in self.triples
        )


def _is_simple(v: Value) -> bool:
    """At most one element and no homology generators: maps INTO such a
    value are all equal (and so are maps out of an empty one)."""
    return v.components <= 1 and all(g.n_gens == 0 for g in v.groups[1:])


def _square_commutes(f_map, g_map, eta, eta2, src_empty, tgt_simple) -> bool:
    if src_empty or tgt_simple:
        return True
    return g_map.compose(eta) == eta2.compose(f_map)


def verify_bisimulation(r, f: Diagram, g: Diagram):
    """Exhaustive check of the coverage and square-completion clauses.

    Returns (True, None) or (False, description of the first violation).
    """
    triples = tuple(r.triples) if isinstance(r, Bisimulation) else tuple(r)
    covered_i = {i for i, _, _ in triples}
    covered_j = {j for _, _, j in triples}
    for i in f.index.objects:
        if i not in covered_i:
            return False, f"clause 1: object {_fmt(i)} of the left diagram uncovered"
    for j in g.index.objects:
        if j not in covered_j:
            return False, f"clause 1: object {_fmt(j)} of the right diagram uncovered"
    by_i: dict = {}
    by_j: dict = {}
    for t in triples:
        by_i.setdefault(t[0], []).append(t)
        by_j.setdefault(t[2], []).append(t)
    empty_f = {i: f.value(i).components == 0 for i in f.index.objects}
    simple_g = {j: _is_simple(g.value(j)) for j in g.index.objects}
    for i, eta, j in triples:
        for i2 in f.index.targets_from(i):
            ok = False
            for (ii, eta2, j2) in by_i.get(i2, ()):
                if not g.index.hom(j, j2):
                    continue
                if _square_commutes(
                    f.map(i, i2), g.map(j, j2), eta, eta2, empty_f[i], simple_g[j2]
                ):
                    ok = True
                    break
            if not ok:
                return (
                    False,
                    f"clause 2 (forth): {_fmt(i)} ~ {_fmt(j)} stuck along "
                    f"{_fmt(i)} -> {_fmt(i2)}",
                )
        for j2 in g.index.targets_from(j):
            ok = False
            for (i2, eta2, jj) in by_j.get(j2, ()):
                if not f.index.hom(i, i2):
                    continue
                if _square_commutes(
                    f.map(i, i2), g.map(j, j2), eta, eta2, empty_f[i], simple_g[j2]
                ):
                    ok = True
                    break
            if not ok:
                return (
                    False,
                    f"clause 2 (back): {_fmt(i)} ~ {_fmt(j)} stuck along "
                    f"{_fmt(j)} -> {_fmt(j2)}",
                )
    return True, None


@dataclass(frozen=True)
class BisimResult:
    verdict: str  # yes | no | unknown
    exact: bool
    bisimulation: Optional[Bisimulation]
    refutation: tuple[str, ...]

    def report(self) -> str:
        lines = [f"BISIMILAR {self.verdict}" + ("" if self.exact else " (incomplete)")]
        if self.bisimulation is not None:
            lines.append(self.bisimulation.report())
        lines.extend(self.refutation)
        return "\n".join(lines)


def bisimilar(f: Diagram, g: Diagram, max_trace: int = 50) -> BisimResult:
    """Greatest-fixpoint search for a bisimulation between two diagrams.

    Seeds every iso candidate between every object pair, then deletes
    triples whose forth or back condition fails along some one-step
    extension until stable.  Square conditions for composite extensions
    follow by pasting, so generators suffice; the returned relation is
    re-verified against all morphisms.
    """
    exact = True
    triples: list[tuple] = []
    pair_candidates: dict = {}
    for i in f.index.objects:
        for j in g.index.objects:
            cands, complete = iso_candidates(f.value(i), g.value(j))
            exact = exact and complete
            if cands:
                pair_candidates[(i, j)] = cands
                triples.extend((i, eta, j) for eta in cands)
    empty_f = {i: f.value(i).components == 0 for i in f.index.objects}
    simple_g = {j: _is_simple(g.value(j)) for j in g.index.objects}
    alive = set(range(len(triples)))
    by_i: dict = {}
    for idx, (i, _, j) in enumerate(triples):
        by_i.setdefault(i, []).append(idx)
    by_j: dict = {}
    for idx, (i, _, j) in enumerate(triples):
        by_j.setdefault(j, []).append(idx)
    trace: list[str] = []

    def forth_ok(idx) -> bool:
        i, eta, j = triples[idx]
        for i2 in f.index.gens_from(i):
            f_map = f.map(i, i2)
            found = False
            for idx2 in by_i.get(i2, ()):
                if idx2 not in alive:
                    continue
                _, eta2, j2 = triples[idx2]
                if not g.index.hom(j, j2):
                    continue
                if _square_commutes(
                    f_map, g.map(j, j2), eta, eta2, empty_f[i], simple_g[j2]
                ):
                    found = True
                    break
            if not found:
                if len(trace) < max_trace:
                    trace.append(
                        f"drop {_fmt(i)} ~ {_fmt(j)}: forth fails along "
                        f"{_fmt(i)} -> {_fmt(i2)}"
                    )
                return False
        return True

    def back_ok(idx) -> bool:
        i, eta, j = triples[idx]
        for j2 in g.index.gens_from(j):
            g_map = g.map(j, j2)
            found = False
            for idx2 in by_j.get(j2, ()):
                if idx2 not in alive:
                    continue
                i2, eta2, _ = triples[idx2]
                if not f.index.hom(i, i2):
                    continue
                if _square_commutes(
                    f.map(i, i2), g_map, eta, eta2, empty_f[i], simple_g[j2]
                ):
                    found = True
                    break
            if not found:
                if len(trace) < max_trace:
                    trace.append(
                        f"drop {_fmt(i)} ~ {_fmt(j)}: back fails along "
                        f"{_fmt(j)} -> {_fmt(j2)}"
                    )
                return False
        return True

    changed = True
    while changed:
        changed = False
        for idx in sorted(alive):
            if not (forth_ok(idx) and back_ok(idx)):
                alive.discard(idx)
                changed = True

    covered_i = {triples[idx][0] for idx in alive}
    covered_j = {triples[idx][2] for idx in alive}
    missing = [
        f"uncovered left object {_fmt(i)}"
        for i in f.index.objects
        if i not in covered_i
    ] + [
        f"uncovered right object {_fmt(j)}"
        for j in g.index.objects
        if j not in covered_j
    ]
    if not missing:
        surviving = Bisimulation(tuple(triples[idx] for idx in sorted(alive)))
        ok, why = verify_bisimulation(surviving, f, g)
        if not ok:
            raise NotFunctorial(f"fixpoint produced an invalid relation: {why}")
        return BisimResult("yes", exact, surviving, ())
    refutation = tuple(missing[:max_trace]) + tuple(trace)
    verdict = "no" if exact else "unknown"
    return BisimResult(verdict, exact, None, refutation)


def span_to_bisimulation(p: DiagramMap, q: DiagramMap) -> Bisimulation:
    """The relation induced by a span of open maps out of one diagram."""
    if p.src is not q.src:
        raise ValueError("span legs must share their source diagram")
    for name, leg in (("left", p), ("right", q)):
        chk = check_open(leg)
        if not chk.ok:
            raise NotOpen(f"{name} leg is not open: {chk.failures[0]}")
    seen = {}
    for k in p.src.index.objects:
        i = p.obj_map[k]
        j = q.obj_map[k]
        eta = q.components[k].compose(p.components[k].inverse())
        seen.setdefault((i, j), eta)
    bis = Bisimulation(tuple((i, eta, j) for (i, j), eta in seen.items()))
    ok, why = verify_bisimulation(bis, p.tgt, q.tgt)
    if not ok:
        raise NotOpen(f"span relation fails verification: {why}")
    return bis
