"""Shift commuting maps between ultragraph shifts and their checkers.

A map is presented either by a partition into classes keyed by target
symbols (schema classes enable exact symbolic analysis, oracle classes
fall back to bounded sampling) or by a first-coordinate rule applied along
the shift orbit.  Evaluation resolves finite and eventually periodic
inputs exactly, because their shift orbits are eventually periodic.

The checkers implement the conditions characterizing continuous shift
commuting maps: openness of edge-symbol classes, the excluded-set
conditions at finite points, the orbit condition at points with infinite
constant image, the finite extension-edge sets, and the length-preserving
combination.  Every verdict carries its bounds; "fails" always carries a
concrete, re-checkable witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .definable import PcSchema, LitAtom, RepAtom, VarAtom, match_schema
from .graphs import DEFAULT_CLOSURE_CAP, EdgeRef, MinimalEmitter, Ultragraph
from .intsets import AffineIndexMap, IDENTITY_MAP, INFINITE, IndexSet, SymbolicSet
from .paths import Block
from .points import (
    PointError,
    Cylinder,
    FinitePoint,
    GeneratorPoint,
    PeriodicPoint,
    Point,
    RepeatFamily,
    ConvergenceBounds,
    block_witness,
    check_convergence,
    coordinate,
    cylinder_contains,
    length,
    shift,
    shift_n,
    validate_point,
)
from .verdicts import FAILS, HOLDS, NOT_APPLICABLE, UNKNOWN, Verdict


class MapError(ValueError):
    pass


class PartitionError(MapError):
    """A point matched no class or several; carries all matches."""

    def __init__(self, x, matches):
        self.point = x
        self.matches = matches
        what = "no class" if not matches else f"classes {matches}"
        super().__init__(f"{what} matched {x}")


class SchemaClass:
    """A class given by schemas and cylinders.

    With ``symbol`` fixed it assigns that one target symbol.  With
    ``family`` it covers the symbols ``family[index_map(param)]`` for the
    parameter running over ``index_domain``; every body schema must then
    use the parameter."""

    def __init__(self, body, symbol=None, family: str | None = None,
                 index_domain: IndexSet | None = None,
                 index_map: AffineIndexMap = IDENTITY_MAP,
                 label: str = ""):
        if (symbol is None) == (family is None):
            raise MapError("exactly one of symbol or family is required")
        if family is not None:
            if index_domain is None:
                raise MapError("family classes need an index domain")
            for s in body:
                if isinstance(s, PcSchema) and s.param_domain is None:
                    raise MapError(
                        "family class schemas must use the free parameter")
        self.body = tuple(body)
        self.symbol = symbol
        self.family = family
        self.index_domain = index_domain
        self.index_map = index_map
        self.label = label or (str(symbol) if symbol is not None
                               else f"{family}[...]")

    def is_emitter_class(self) -> bool:
        return isinstance(self.symbol, MinimalEmitter)

    def symbols_for(self, g_source: Ultragraph, x: Point,
                    max_rep: int = 64) -> list:
        out = []
        for item in self.body:
            if isinstance(item, Cylinder):
                if cylinder_contains(g_source, item, x):
                    out.append(self.symbol)
            else:
                m = match_schema(item, x, max_rep)
                if m is None:
                    continue
                if self.symbol is not None:
                    out.append(self.symbol)
                elif m.param is not None and self.index_domain.contains(m.param):
                    out.append(EdgeRef(self.family,
                                       self.index_map.apply(m.param)))
        uniq = []
        for s in out:
            if s not in uniq:
                uniq.append(s)
        return uniq

    def covers_symbol(self, sym) -> IndexSet | None:
        """For a family class, the parameter values mapping to ``sym``;
        for a fixed class, a truthy empty marker when the symbol matches."""
        if self.symbol is not None:
            return IndexSet.all() if sym == self.symbol else None
        if not isinstance(sym, EdgeRef) or sym.family != self.family:
            return None
        j = self.index_map.solve(sym.index)
        if j is None or not self.index_domain.contains(j):
            return None
        return IndexSet.of(j)

    def __str__(self) -> str:
        return f"class {self.label}"


class OracleClass:
    """A class given by a pure membership predicate, fixed target symbol."""

    def __init__(self, symbol, member, label: str = ""):
        self.symbol = symbol
        self.member = member
        self.body = ()
        self.family = None
        self.label = label or str(symbol)

    def is_emitter_class(self) -> bool:
        return isinstance(self.symbol, MinimalEmitter)

    def symbols_for(self, g_source, x, max_rep: int = 64):
        return [self.symbol] if self.member(x) else []

    def covers_symbol(self, sym):
        return IndexSet.all() if sym == self.symbol else None

    def __str__(self) -> str:
        return f"oracle class {self.label}"


class MapPresentation:
    """A shift commuting map defined coordinatewise by a partition."""

    def __init__(self, source: Ultragraph, target: Ultragraph, classes,
                 label: str = "map"):
        self.source = source
        self.target = target
        self.classes = tuple(classes)
        self.label = label

    def symbol_at(self, x: Point, max_rep: int = 64):
        found = []
        for c in self.classes:
            for sym in c.symbols_for(self.source, x, max_rep):
                found.append((c, sym))
        if len(found) != 1:
            raise PartitionError(x, [str(c) for c, _ in found])
        return found[0][1]

    def __str__(self) -> str:
        return self.label


class RuleMap:
    """A shift commuting map given by a first-coordinate rule."""

    def __init__(self, source: Ultragraph, target: Ultragraph, rule,
                 label: str = "rule map"):
        self.source = source
        self.target = target
        self.rule = rule
        self.classes = ()
        self.label = label

    def symbol_at(self, x: Point, max_rep: int = 64):
        return self.rule(x)

    def __str__(self) -> str:
        return self.label


def class_membership_oracle(phi, sym):
    """The set of points the map sends to ``sym`` first, as a predicate."""
    def member(x: Point) -> bool:
        try:
            return phi.symbol_at(x) == sym
        except PartitionError:
            return False
    return member


def _try_point(g: Ultragraph, syms: tuple, bound: int = 8):
    """A valid point carrying the given symbols at position 1, or None."""
    w = block_witness(g, Block(tuple(syms)), bound)
    if w is None:
        return None
    problems = [p for p in validate_point(g, w)
                if not p.startswith("unknown:")]
    return None if problems else w


# -- evaluation ----------------------------------------------------------------


@dataclass
class EvalResult:
    prefix: tuple
    resolved: Point | None
    note: str = ""

    def coordinate(self, n: int):
        if self.resolved is not None:
            return coordinate(self.resolved, n)
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        raise MapError(f"output only known to depth {len(self.prefix)}: "
                       f"{self.note}")


def _orbit_closure_depth(x: Point) -> int | None:
    """Iterations after which the shift orbit provably closes."""
    if isinstance(x, FinitePoint):
        return len(x.path) + 2
    if isinstance(x, PeriodicPoint):
        return len(x.preamble) + len(x.cycle) + 1
    return None


def eval_map(phi, x: Point, depth: int | None = None,
             cap: int = DEFAULT_CLOSURE_CAP) -> EvalResult:
    """Apply the map along the shift orbit of x.

    Finite and eventually periodic inputs resolve exactly: their orbits
    reach a fixed point or close a cycle, so the output is a finite point
    (when an emitter symbol appears, which must then persist) or an
    eventually periodic point.  The default depth is the exact orbit
    closure depth; generator inputs yield a depth-bounded prefix only."""
    if depth is None:
        depth = _orbit_closure_depth(x) or 48
    else:
        need = _orbit_closure_depth(x)
        if need is not None and depth < need:
            depth = need
    syms: list = []
    seen: dict = {}
    cur = x
    emitter_at: int | None = None
    closes: tuple | None = None
    for i in range(depth):
        if not isinstance(cur, GeneratorPoint):
            if cur in seen:
                closes = (seen[cur], i)
                break
            seen[cur] = i
        sym = phi.symbol_at(cur)
        if isinstance(sym, MinimalEmitter) and emitter_at is None:
            emitter_at = i
        syms.append(sym)
        cur = shift(cur)
    if closes is None and not isinstance(x, GeneratorPoint):
        raise MapError(f"orbit of {x} did not close within depth {depth}")
    if emitter_at is not None:
        tail = syms[emitter_at]
        # once the orbit closes, checking the computed symbols checks all
        if any(syms[j] != tail for j in range(emitter_at, len(syms))):
            raise MapError(
                f"emitter symbol {tail} at coordinate {emitter_at + 1} does "
                f"not persist: the class is not shift invariant on {x}")
        out = FinitePoint(tuple(syms[:emitter_at]), tail)
        _check_output(phi.target, out, cap)
        if length(x) != INFINITE and length(x) < emitter_at:
            raise MapError("image is longer than a finite input whose tail "
                           "maps to a length-zero point")
        note = "resolved finite" if closes is not None else \
            f"resolved finite (persistence checked to depth {len(syms)})"
        return EvalResult(tuple(syms), out, note)
    if closes is not None:
        m, p = closes[0], closes[1] - closes[0]
        out = PeriodicPoint(tuple(syms[:m]), tuple(syms[m:m + p]))
        _check_output(phi.target, out, cap)
        return EvalResult(tuple(syms), out, "resolved periodic")
    return EvalResult(tuple(syms), None,
                      f"generator input evaluated to depth {len(syms)}")


def _check_output(h: Ultragraph, out: Point, cap: int) -> None:
    problems = [p for p in validate_point(h, out, cap)
                if not p.startswith("unknown:")]
    if problems:
        raise MapError(f"image {out} is not a point of the target shift: "
                       + "; ".join(problems))


def eval_resolved(phi, x: Point, depth: int | None = None) -> Point:
    res = eval_map(phi, x, depth)
    if res.resolved is None:
        raise MapError(f"image of {x} did not resolve: {res.note}")
    return res.resolved


# -- partition validation -------------------------------------------------------


def validate_partition(phi, samples, depth: int = 8) -> Verdict:
    """Sampled check that the classes are pairwise disjoint and covering,
    and that emitter classes are invariant along the shift orbit."""
    if not phi.classes:
        return Verdict("partition", NOT_APPLICABLE,
                       "rule maps have no explicit classes")
    for x in samples:
        try:
            sym = phi.symbol_at(x)
        except PartitionError as err:
            return Verdict("partition", FAILS, str(err), x)
        if isinstance(sym, MinimalEmitter):
            cur = x
            for i in range(depth):
                cur = shift(cur)
                try:
                    again = phi.symbol_at(cur)
                except PartitionError as err:
                    return Verdict("partition", FAILS, str(err), cur)
                if again != sym:
                    return Verdict(
                        "partition", FAILS,
                        f"class of {sym} is not shift invariant", x)
    return Verdict("partition", HOLDS, f"{len(samples)} samples",
                   bounds={"samples": len(samples), "depth": depth})


# -- commutation and periods ------------------------------------------------------


def check_commuting(phi, samples, depth: int = 16) -> Verdict:
    """Compare the image of the shifted point with the shifted image.

    ``phi`` may be a presentation (evaluated along the orbit) or a raw
    point-to-point callable; partition-presented maps commute by
    construction, so for them this is a self-test."""
    bounds = {"samples": len(samples), "depth": depth}
    raw = callable(phi) and not hasattr(phi, "symbol_at")
    for x in samples:
        if raw:
            lhs_at = lambda i: coordinate(phi(shift(x)), i)  # noqa: E731
            rhs_at = lambda i: coordinate(phi(x), i + 1)  # noqa: E731
        else:
            img_s = eval_map(phi, shift(x), depth + 2)
            img = eval_map(phi, x, depth + 2)
            lhs_at, rhs_at = img_s.coordinate, (
                lambda i, _img=img: _img.coordinate(i + 1))
        for i in range(1, depth + 1):
            if lhs_at(i) != rhs_at(i):
                return Verdict(
                    "commuting", FAILS,
                    f"coordinate {i} of the image of the shift differs "
                    f"from coordinate {i + 1} of the image", (x, i), bounds)
    return Verdict("commuting", HOLDS, "images commute with the shift on "
                   "all samples", bounds=bounds)


def check_left_shift_identity(phi, samples, depth: int = 12) -> Verdict:
    """Coordinates 2..n of the image equal coordinates 1..n-1 of the image
    of the shifted point."""
    bounds = {"samples": len(samples), "depth": depth}
    for x in samples:
        full = eval_map(phi, x, depth + 2)
        shifted = eval_map(phi, shift(x), depth + 2)
        for i in range(2, depth):
            if full.coordinate(i) != shifted.coordinate(i - 1):
                return Verdict("left-shift-identity", FAILS,
                               f"coordinate {i}", (x, i), bounds)
    return Verdict("left-shift-identity", HOLDS, bounds=bounds)


def check_period_preservation(phi, x: Point, depth: int = 32) -> Verdict:
    """A point with shift period p maps to a point with period p."""
    if isinstance(x, GeneratorPoint):
        return Verdict("period-preservation", UNKNOWN,
                       "generator periodicity cannot be resolved", x)
    if isinstance(x, PeriodicPoint):
        if x.preamble:
            raise MapError("period preservation needs an exactly periodic point")
        p = len(x.cycle)
    elif length(x) == 0:
        p = 1
    else:
        raise MapError("finite points of positive length are not periodic")
    y = eval_resolved(phi, x, depth)
    ok = shift_n(y, p) == y
    return Verdict("period-preservation", HOLDS if ok else FAILS,
                   f"input period {p}", (x, y),
                   bounds={"depth": depth})


# -- first-extension analysis ------------------------------------------------------


@dataclass
class EdgeConstraint:
    """First-extension edges leading into a class, as a symbolic set.

    ``kind`` records the approximation direction: "over" sets contain every
    true extension edge (exact when the flag is set), "under" sets were
    found by sampling and may miss edges."""

    edges: SymbolicSet
    exact: bool
    kind: str = "over"


def _schema_first_edges(g: Ultragraph, s: PcSchema, prefix: tuple,
                        param_restrict: IndexSet | None,
                        max_rep: int = 16) -> EdgeConstraint | None:
    """Edges e for which some point with the given path prefix then e can
    match the schema."""
    n = len(prefix)
    dom = s.param_domain
    if param_restrict is not None and dom is not None:
        dom = dom.intersect(param_restrict)
        if dom.is_empty():
            return None
    if s.anchor > n + 1:
        # the window only constrains deeper coordinates; any first edge
        # might admit a matching continuation
        return EdgeConstraint(g.all_edges(), False)
    result = SymbolicSet.empty()
    exact = True
    split = next((i for i, a in enumerate(s.atoms)
                  if isinstance(a, RepAtom)), None)
    alignments = []
    if split is None:
        alignments.append(list(s.atoms))
    else:
        # expand the repetition as far as the window interacts with
        # positions 1..n+1; longer repetitions repeat the same pivot
        for m in range(1, n + 3 - s.anchor):
            atoms = list(s.atoms[:split])
            atoms += [LitAtom(s.atoms[split].symbol)] * m
            atoms += list(s.atoms[split + 1:])
            alignments.append(atoms)
    for atoms in alignments:
        got = _aligned_first_edges(g, s, atoms, prefix, dom)
        if got is None:
            continue
        edges, ex = got
        result = result.union(edges)
        exact = exact and ex
    if result.is_empty() and exact:
        return None
    return EdgeConstraint(result, exact)


def _aligned_first_edges(g: Ultragraph, s: PcSchema, atoms: list,
                         prefix: tuple, dom: IndexSet | None):
    n = len(prefix)
    start = s.anchor
    end = start + len(atoms) - 1
    if end < n + 1:
        # schema satisfied inside the prefix: any extension edge works
        ok, dom2 = _prefix_consistent(g, atoms, start, prefix, dom)
        if not ok:
            return None
        return g.all_edges(), True
    if start > n + 1:
        # constrains only deeper coordinates: any first edge might work
        return g.all_edges(), False
    ok, dom2 = _prefix_consistent(g, atoms[:n + 1 - start], start, prefix, dom)
    if not ok:
        return None
    pivot = atoms[n + 1 - start]
    exact = end == n + 1
    if isinstance(pivot, LitAtom):
        if not isinstance(pivot.symbol, EdgeRef):
            return None
        e = pivot.symbol
        return SymbolicSet.singleton(e.family, e.index), exact
    if isinstance(pivot, VarAtom):
        base = dom2 if dom2 is not None else IndexSet.all()
        idxs = pivot.map.image(base).intersect(
            g.edge_domain(pivot.family) if pivot.family in g.edge_families
            else IndexSet.empty())
        if idxs.is_empty():
            return None
        return SymbolicSet.of((pivot.family, idxs)), exact
    raise MapError("repetitions are expanded before alignment")


def _prefix_consistent(g: Ultragraph, atoms, start: int, prefix: tuple,
                       dom: IndexSet | None):
    """Whether the pattern atoms lying inside the prefix agree with it;
    narrows the parameter domain along the way."""
    for i, atom in enumerate(atoms):
        pos = start + i
        if pos > len(prefix):
            break
        sym = prefix[pos - 1]
        if isinstance(atom, LitAtom):
            if atom.symbol != sym:
                return False, dom
        elif isinstance(atom, VarAtom):
            if not isinstance(sym, EdgeRef) or sym.family != atom.family:
                return False, dom
            j = atom.map.solve(sym.index)
            if j is None:
                if atom.map.apply(0) != sym.index:
                    return False, dom
                continue
            if dom is not None:
                if not dom.contains(j):
                    return False, dom
                dom = IndexSet.of(j)
        else:
            return False, dom
    return True, dom


def _cylinder_first_edges(g: Ultragraph, D: Cylinder, prefix: tuple):
    n = len(prefix)
    base = D.base.edges
    if len(base) > n + 1:
        if tuple(base[:n]) != tuple(prefix):
            return None
        e = base[n]
        return SymbolicSet.singleton(e.family, e.index), False
    if tuple(base) != tuple(prefix[:len(base)]):
        return None
    if len(base) <= n:
        # the membership constraint falls at or before the prefix end
        if len(base) < n:
            probe = prefix[len(base)]
        else:
            probe = None
        if probe is not None:
            if D.excluded.contains(probe.family, probe.index) or \
                    not g.source_in(probe, D.base.terminal):
                return None
            return g.all_edges(), True
        allowed = g.epsilon(D.base.terminal).difference(D.excluded)
        return allowed, True
    return None


def first_edges_into_class(phi, cls, prefix: tuple,
                           param_restrict: IndexSet | None = None,
                           sample_bound: int = 8,
                           tries: int = 24) -> EdgeConstraint:
    """First-extension edges that can lead into the class after ``prefix``.

    Symbolic and mostly exact for schema classes; sampled (and flagged
    inexact) for oracle classes."""
    g = phi.source
    if isinstance(cls, OracleClass):
        found = []
        eps = g.all_edges()
        for fam, idx in eps.sample(tries):
            e = EdgeRef(fam, idx)
            w = _try_point(g, tuple(prefix) + (e,), sample_bound)
            if w is not None and cls.member(w):
                found.append((fam, IndexSet.of(idx)))
        return EdgeConstraint(SymbolicSet.of(*found), False, "under")
    total = SymbolicSet.empty()
    exact = True
    for item in cls.body:
        if isinstance(item, Cylinder):
            got = _cylinder_first_edges(g, item, prefix)
            if got is None:
                continue
            edges, ex = got
        else:
            got = _schema_first_edges(g, item, prefix, param_restrict)
            if got is None:
                continue
            edges, ex = got.edges, got.exact
        total = total.union(edges)
        exact = exact and ex
    if prefix:
        # only edges continuing the path are real extensions; sinkless
        # graphs then always admit a completion, keeping exactness
        total = total.intersect(g.successor_edges(prefix[-1]))
    return EdgeConstraint(total, exact)


# -- good/bad symbol bookkeeping -----------------------------------------------


@dataclass
class SymbolSet:
    """A set of target symbols: a symbolic edge set plus emitters."""

    edges: SymbolicSet
    emitters: tuple = ()

    def contains(self, sym) -> bool:
        if isinstance(sym, MinimalEmitter):
            return any(sym == m for m in self.emitters)
        return self.edges.contains(sym.family, sym.index)


def _bad_symbol_params(cls, good: SymbolSet) -> IndexSet | None:
    """For a family class: parameter values whose symbol is outside
    ``good``; for fixed classes: the full line when the symbol is bad."""
    if cls.symbol is not None:
        return None if good.contains(cls.symbol) else IndexSet.all()
    fam_part = good.edges.part(cls.family)
    bad_idx = cls.index_domain.difference(
        cls.index_map.preimage(fam_part, IndexSet.all()))
    return None if bad_idx.is_empty() else bad_idx


def escaping_edges(phi, prefix: tuple, tail: MinimalEmitter,
                   good: SymbolSet, tries: int = 24) -> EdgeConstraint:
    """Extension edges after (prefix, tail) whose continuations can map to
    a first symbol outside ``good``.

    Over-approximated symbolically through the classes when available;
    under-approximated by direct sampling for rule maps."""
    g = phi.source
    eps = g.epsilon(tail.vertices)
    if not phi.classes:
        found = SymbolicSet.empty()
        for fam, idx in eps.sample(tries):
            e = EdgeRef(fam, idx)
            got = _witness_through_edge(phi, prefix, e, good, tries=4)
            if got is not None:
                found = found.union(SymbolicSet.singleton(fam, idx))
        return EdgeConstraint(found, False, "under")
    total = SymbolicSet.empty()
    exact = True
    kind = "over"
    for cls in phi.classes:
        bad_params = _bad_symbol_params(cls, good)
        if bad_params is None:
            continue
        restrict = None if cls.symbol is not None else bad_params
        got = first_edges_into_class(phi, cls, prefix, restrict, tries=tries)
        total = total.union(got.edges)
        exact = exact and got.exact
        if got.kind == "under":
            # a sampled class may hide escapes, so the union is no longer
            # a certified cover
            exact = False
            kind = "mixed"
    return EdgeConstraint(total.intersect(eps), exact, kind)


def _witness_through_edge(phi, prefix: tuple, e: EdgeRef, good: SymbolSet,
                          tries: int = 12):
    """A concrete point through ``prefix + e`` whose first image symbol is
    bad, verified by direct evaluation."""
    g = phi.source
    w = _try_point(g, tuple(prefix) + (e,), 8)
    cands = [w] if w is not None else []
    succ = g.successor_edges(e)
    for fam, idx in succ.sample(tries):
        w2 = _try_point(g, tuple(prefix) + (e, EdgeRef(fam, idx)), 8)
        if w2 is not None:
            cands.append(w2)
    for cand in cands:
        try:
            sym = phi.symbol_at(cand)
        except (PartitionError, MapError):
            continue
        if not good.contains(sym):
            return cand, sym
    return None


# -- theorem-condition checkers ---------------------------------------------------


def check_csc_item_i(phi) -> Verdict:
    """Certify that every edge-symbol class is a union of generalized
    cylinders.

    Accepted per body element: anchored at the first coordinate with an
    edge-only pattern (each instance is then a full cylinder over its
    path), an explicit cylinder, or an emitter-ended pattern whose sibling
    schemas cover all but finitely many extension edges (the finite
    remainder becoming the excluded set).  Oracle-presented edge classes
    give 'unknown'."""
    g = phi.source
    if not phi.classes:
        return Verdict("csc-item-i", UNKNOWN, "no explicit classes")
    status, detail = HOLDS, []
    for cls in phi.classes:
        if cls.is_emitter_class():
            continue
        if isinstance(cls, OracleClass):
            status = UNKNOWN if status == HOLDS else status
            detail.append(f"{cls}: oracle-presented, cannot certify")
            continue
        for item in cls.body:
            if isinstance(item, Cylinder):
                continue
            ok, why = _certify_schema_open(g, cls, item)
            if ok:
                continue
            return Verdict("csc-item-i", FAILS,
                           f"{cls}: {why}", item)
    return Verdict("csc-item-i", status, "; ".join(detail) or
                   "every class body certified as a union of cylinders")


def _certify_schema_open(g: Ultragraph, cls, s: PcSchema):
    if not s.atoms:
        return True, "empty"
    if s.anchor != 1:
        return False, ("anchored past the first coordinate, not certifiable "
                       "as a union of cylinders")
    kinds = list(s.atoms)
    emitter_lits = [i for i, a in enumerate(kinds)
                    if isinstance(a, LitAtom) and
                    isinstance(a.symbol, MinimalEmitter)]
    if not emitter_lits:
        return True, "edge-only anchored pattern"
    first = emitter_lits[0]
    # a trailing constant run of one emitter pins the same set as a single
    # trailing emitter symbol
    run_ok = emitter_lits == list(range(first, len(kinds))) and \
        len({kinds[i].symbol for i in emitter_lits}) == 1
    if not run_ok:
        return False, "emitter symbols must form one trailing run"
    B = kinds[first].symbol
    prefix = kinds[:first]
    if any(not isinstance(a, (LitAtom, VarAtom)) for a in prefix):
        return False, "repetitions before an emitter are not certifiable"
    eps = g.epsilon(B.vertices)
    covered = SymbolicSet.empty()
    for sib in cls.body:
        if not isinstance(sib, PcSchema) or sib.anchor != 1:
            continue
        if len(sib.atoms) != len(prefix) + 1 or \
                tuple(sib.atoms[:len(prefix)]) != tuple(prefix):
            continue
        last = sib.atoms[-1]
        if isinstance(last, LitAtom) and isinstance(last.symbol, EdgeRef):
            covered = covered.union(SymbolicSet.singleton(
                last.symbol.family, last.symbol.index))
        elif isinstance(last, VarAtom) and sib.param_domain is not None:
            covered = covered.union(SymbolicSet.of(
                (last.family, last.map.image(sib.param_domain))))
    missing = eps.difference(covered)
    if missing.is_finite():
        return True, ("emitter-ended pattern with sibling coverage; "
                      f"excluded set {missing}")
    return False, (f"emitter-ended pattern leaves infinitely many extension "
                   f"edges uncovered ({missing})")


def check_genchl_iia(phi, x_bar: FinitePoint, tries: int = 24,
                     depth: int = 48) -> Verdict:
    """At a finite point with length-zero image, all but finitely many
    extension edges must keep the image inside the basic neighborhood of
    the image tail.  Returns the minimal certified excluded set."""
    h = phi.target
    img = eval_resolved(phi, x_bar, depth)
    if length(img) != 0:
        return Verdict("genchl-iia", NOT_APPLICABLE,
                       f"image has length {length(img)}")
    B = img.tail
    good = SymbolSet(h.epsilon(B.vertices), (B,))
    bad = escaping_edges(phi, x_bar.path, x_bar.tail, good, tries)
    bounds = {"tries": tries, "depth": depth}
    if bad.kind == "under":
        if bad.edges.is_empty():
            return Verdict("genchl-iia", HOLDS,
                           "no sampled extension escapes; bounded evidence "
                           "only", SymbolicSet.empty(), bounds)
        return Verdict("genchl-iia", UNKNOWN,
                       "sampled escapes found; finiteness undecidable for "
                       "a rule-presented map", bad.edges, bounds)
    if bad.edges.is_finite():
        note = {"over": "over-approximate", "mixed":
                "oracle classes sampled; bounded evidence only"}[bad.kind]
        if bad.exact:
            note = "exact"
        return Verdict("genchl-iia", HOLDS,
                       f"finite escape set; {note}", bad.edges, bounds,
                       exact=bad.exact)
    verified = _verify_infinite_escape(phi, x_bar.path, bad.edges, good)
    if verified:
        return Verdict("genchl-iia", FAILS,
                       "infinitely many extension edges escape the image "
                       "neighborhood", verified, bounds)
    return Verdict("genchl-iia", UNKNOWN,
                   "symbolic escape set is infinite but no concrete witness "
                   "was confirmed", bad.edges, bounds)


def _verify_infinite_escape(phi, prefix, bad_edges: SymbolicSet,
                            good: SymbolSet, count: int = 3):
    found = []
    for fam, idx in bad_edges.sample(count + 4):
        got = _witness_through_edge(phi, prefix, EdgeRef(fam, idx), good)
        if got is not None:
            found.append(got)
        if len(found) >= count:
            return {"escaping-family": bad_edges, "examples": found}
    return None


def check_csc_item_ii(phi, x_bar: FinitePoint, F: SymbolicSet,
                      tries: int = 24, depth: int = 48) -> Verdict:
    """At a finite point with finite image (beta, B), for the target
    neighborhood excluding F there must be a finite source excluded set
    F' with the image of the shifted cylinder inside it."""
    h = phi.target
    img = eval_resolved(phi, x_bar, depth)
    if length(img) == INFINITE:
        return Verdict("csc-item-ii", NOT_APPLICABLE, "image is infinite")
    l = int(length(img))
    B = img.tail
    shifted = shift_n(x_bar, l)
    good = SymbolSet(h.epsilon(B.vertices).difference(F), (B,))
    bad = escaping_edges(phi, shifted.path, x_bar.tail, good, tries)
    bounds = {"tries": tries, "depth": depth, "F": str(F)}
    if bad.kind == "under":
        if bad.edges.is_empty():
            return Verdict("csc-item-ii", HOLDS,
                           "no sampled escape; bounded evidence only",
                           SymbolicSet.empty(), bounds)
        return Verdict("csc-item-ii", UNKNOWN,
                       "sampled escapes; finiteness undecidable for a "
                       "rule-presented map", bad.edges, bounds)
    if bad.edges.is_finite():
        note = {"over": "over-approximate", "mixed":
                "oracle classes sampled; bounded evidence only"}[bad.kind]
        if bad.exact:
            note = "exact"
        return Verdict("csc-item-ii", HOLDS,
                       f"image containment with F' = {bad.edges}; {note}",
                       bad.edges, bounds, exact=bad.exact)
    verified = _verify_infinite_escape(phi, shifted.path, bad.edges, good)
    if verified:
        return Verdict("csc-item-ii", FAILS,
                       "every finite excluded set admits an escaping point",
                       verified, bounds)
    return Verdict("csc-item-ii", UNKNOWN, "unconfirmed infinite escape set",
                   bad.edges, bounds)


def compute_A_x(phi, x_bar: FinitePoint, x: Point, tries: int = 24,
                depth: int = 48):
    """Extension edges after x_bar's path that can produce the same first
    image symbol as x.  Returns (symbolic edge set, finite flag, exact
    flag)."""
    g = phi.source
    n = len(x_bar.path)
    for i in range(n):
        if coordinate(x, i + 1) != x_bar.path[i]:
            raise MapError("x must extend the path of x_bar")
    c = eval_map(phi, x, depth).prefix[0]
    if isinstance(c, MinimalEmitter):
        raise MapError("the first image symbol must be an edge")
    eps = g.epsilon(x_bar.tail.vertices)
    total = SymbolicSet.empty()
    exact = bool(phi.classes)
    for cls in phi.classes:
        params = cls.covers_symbol(c)
        if params is None:
            continue
        restrict = None if cls.symbol is not None else params
        got = first_edges_into_class(phi, cls, x_bar.path, restrict,
                                     tries=tries)
        total = total.union(got.edges)
        exact = exact and got.exact
    if not phi.classes:
        # rule maps: sampled under-approximation
        for fam, idx in eps.sample(tries):
            e = EdgeRef(fam, idx)
            w = _try_point(g, tuple(x_bar.path) + (e,), 8)
            if w is None:
                continue
            try:
                if phi.symbol_at(w) == c:
                    total = total.union(SymbolicSet.singleton(fam, idx))
            except (PartitionError, MapError):
                pass
        exact = False
    result = total.intersect(eps)
    return result, result.is_finite(), exact


def check_genchl_iib(phi, x_bar: FinitePoint, samples_through: int = 6,
                     tries: int = 24) -> Verdict:
    """The extension-edge sets A_x must be finite for every extension whose
    first image symbol is an edge emitted by the image tail."""
    g, h = phi.source, phi.target
    img = eval_resolved(phi, x_bar)
    if length(img) != 0:
        return Verdict("genchl-iib", NOT_APPLICABLE, "image not length zero")
    B = img.tail
    eps_B = h.epsilon(B.vertices)
    checked = 0
    for fam, idx in g.epsilon(x_bar.tail.vertices).sample(samples_through):
        e = EdgeRef(fam, idx)
        w = _try_point(g, tuple(x_bar.path) + (e,), 8)
        if w is None:
            continue
        try:
            c = phi.symbol_at(w)
        except (PartitionError, MapError):
            continue
        if isinstance(c, MinimalEmitter) or not eps_B.contains(c.family, c.index):
            continue
        a_x, finite, _exact = compute_A_x(phi, x_bar, w, tries)
        checked += 1
        if not finite:
            return Verdict("genchl-iib", FAILS,
                           f"A_x infinite for extension {e} (symbol {c})",
                           (w, a_x), {"tries": tries})
    return Verdict("genchl-iib", HOLDS,
                   f"finite extension sets at {checked} sampled extensions",
                   bounds={"sampled": checked, "tries": tries})


def check_csc_item_iii(phi, A: MinimalEmitter, M: int = 4,
                       tries: int = 16,
                       cap: int = DEFAULT_CLOSURE_CAP) -> Verdict:
    """At a zero-length point with infinite constant image (d d d ...),
    some cylinder at the point must stay inside the class of d for M
    shifts."""
    g = phi.source
    x0 = FinitePoint((), A)
    img = eval_map(phi, x0, 8)
    d_sym = img.prefix[0]
    bounds = {"M": M, "tries": tries}
    if isinstance(d_sym, MinimalEmitter):
        return Verdict("csc-item-iii", NOT_APPLICABLE,
                       "the image of the zero-length point has length zero",
                       bounds=bounds)
    cov, cov_exact = _sure_first_symbol_coverage(phi, d_sym)
    emitters, _ = g.minimal_infinite_emitters(cap)
    zero_ok = {}
    for m in emitters:
        try:
            zero_ok[m] = phi.symbol_at(FinitePoint((), m)) == d_sym
        except (PartitionError, MapError):
            zero_ok[m] = False
    # tails inside A sit in every cylinder at A regardless of F
    for m in emitters:
        if m.vertices.subset_of(A.vertices) and not zero_ok[m]:
            return Verdict("csc-item-iii", FAILS,
                           f"the tail point of {m} stays in every cylinder "
                           f"but leaves the class of {d_sym}",
                           FinitePoint((), m), bounds)
    F = SymbolicSet.empty()
    eps_A = g.epsilon(A.vertices)
    frontier = eps_A.difference(cov)
    if not frontier.is_empty():
        if not frontier.is_finite():
            got = _iii_escape_witness(phi, A, frontier, d_sym, 0,
                                      tries=tries)
            if got:
                return Verdict("csc-item-iii", FAILS,
                               "infinitely many first edges leave the class "
                               "and cannot all be excluded", got, bounds)
            return Verdict("csc-item-iii", UNKNOWN,
                           "first-step coverage gap is infinite but "
                           "unconfirmed", frontier, bounds)
        F = frontier
    reach = eps_A.difference(F)
    for i in range(1, M + 1):
        vertices = g.ranges_union(reach)
        for m in emitters:
            if m.vertices.subset_of(vertices) and not zero_ok[m]:
                return Verdict("csc-item-iii", FAILS,
                               f"a reachable tail point of {m} leaves the "
                               f"class of {d_sym} at step {i}",
                               FinitePoint((), m), bounds)
        reach = g.epsilon(vertices)
        gap = reach.difference(cov)
        if gap.is_empty():
            continue
        got = _iii_escape_witness(phi, A, gap, d_sym, i, F, tries)
        if got:
            return Verdict("csc-item-iii", FAILS,
                           f"the shifted cylinder leaves the class of "
                           f"{d_sym} at step {i}", got, bounds)
        return Verdict("csc-item-iii", UNKNOWN,
                       f"coverage gap at step {i} unconfirmed", gap, bounds)
    note = "exact coverage" if cov_exact else "coverage certified up to bounds"
    return Verdict("csc-item-iii", HOLDS,
                   f"cylinder with excluded set {F} stays in the class for "
                   f"{M} shifts; {note}", F, bounds, exact=cov_exact)


def _sure_first_symbol_coverage(phi, d_sym):
    """Source edges e such that every point starting with e is certified to
    carry first image symbol d_sym."""
    g = phi.source
    cov = SymbolicSet.empty()
    exact = True
    for cls in phi.classes:
        params = cls.covers_symbol(d_sym)
        if params is None:
            continue
        if isinstance(cls, OracleClass):
            exact = False
            continue
        for item in cls.body:
            if isinstance(item, Cylinder):
                if len(item.base.edges) == 0:
                    cov = cov.union(g.epsilon(item.base.terminal)
                                    .difference(item.excluded))
                elif len(item.base.edges) == 1:
                    e = item.base.edges[0]
                    cov = cov.union(SymbolicSet.singleton(e.family, e.index))
                continue
            if item.anchor != 1 or len(item.atoms) != 1:
                continue
            a = item.atoms[0]
            if isinstance(a, LitAtom) and isinstance(a.symbol, EdgeRef):
                cov = cov.union(SymbolicSet.singleton(
                    a.symbol.family, a.symbol.index))
            elif isinstance(a, VarAtom):
                dom = item.param_domain
                if cls.symbol is None:
                    dom = dom.intersect(params)
                cov = cov.union(SymbolicSet.of(
                    (a.family, a.map.image(dom))))
    return cov, exact


def _iii_escape_witness(phi, A: MinimalEmitter, gap: SymbolicSet, d_sym,
                        step: int, F: SymbolicSet = SymbolicSet.empty(),
                        tries: int = 6):
    """A point of the cylinder whose i-th shift provably leaves the class."""
    g = phi.source
    for fam, idx in gap.sample(max(tries // 2, 4)):
        bad_edge = EdgeRef(fam, idx)
        # build x in the cylinder whose (step)-th shift starts with bad_edge
        if step == 0:
            w = _try_point(g, (bad_edge,), 8)
            starts = [w] if w is not None else []
        else:
            starts = _backward_paths(g, bad_edge, step,
                                     g.epsilon(A.vertices).difference(F))
        for x in starts:
            try:
                sym = phi.symbol_at(shift_n(x, step))
            except (PartitionError, MapError):
                continue
            if sym != d_sym:
                return {"point": x, "step": step, "symbol": sym}
    return None


def _backward_paths(g: Ultragraph, target: EdgeRef, steps: int,
                    first_allowed: SymbolicSet, width: int = 6):
    """Points x with x_{steps+1} = target whose first edge is allowed."""
    partial = [[target]]
    for _ in range(steps):
        grown = []
        for p in partial:
            vf, vi = g.source(p[0])
            preds = g.epsilon(SymbolicSet.singleton(vf, vi))
            for fam, idx in preds.sample(width):
                grown.append([EdgeRef(fam, idx)] + p)
        partial = grown
    out = []
    for p in partial:
        if not first_allowed.contains(p[0].family, p[0].index):
            continue
        w = _try_point(g, tuple(p), 8)
        if w is not None:
            out.append(w)
    return out


def check_length_preserving(phi, samples, tries: int = 24,
                            cap: int = DEFAULT_CLOSURE_CAP) -> Verdict:
    """Length preservation: the emitter classes must contain exactly the
    zero-length points, edge classes must be open, and the excluded-set
    and finite-extension conditions must hold at zero-length points."""
    g = phi.source
    src_emitters, _ = g.minimal_infinite_emitters(cap)
    bounds = {"samples": len(samples), "tries": tries}
    for m in src_emitters:
        x0 = FinitePoint((), m)
        sym = phi.symbol_at(x0)
        if not isinstance(sym, MinimalEmitter):
            return Verdict("length-preserving", FAILS,
                           f"zero-length point maps to edge symbol {sym}",
                           x0, bounds)
    for x in samples:
        if length(x) == 0:
            continue
        try:
            sym = phi.symbol_at(x)
        except (PartitionError, MapError, PointError):
            continue
        if isinstance(sym, MinimalEmitter):
            return Verdict(
                "length-preserving", FAILS,
                f"point of length {length(x)} lies in the class of the "
                f"length-zero image symbol {sym}", x, bounds)
    sub = check_csc_item_i(phi)
    if sub.status == FAILS:
        return Verdict("length-preserving", FAILS,
                       f"edge classes not open: {sub.detail}", sub.witness,
                       bounds)
    worst_status = HOLDS if sub.status == HOLDS else UNKNOWN
    for m in src_emitters:
        x0 = FinitePoint((), m)
        a = check_genchl_iia(phi, x0, tries)
        b = check_genchl_iib(phi, x0, tries=tries)
        for v in (a, b):
            if v.status == FAILS:
                return Verdict("length-preserving", FAILS,
                               f"{v.check} fails at {x0}: {v.detail}",
                               v.witness, bounds)
            if v.status == UNKNOWN:
                worst_status = UNKNOWN
    return Verdict("length-preserving", worst_status,
                   "emitter classes carry exactly the zero-length points; "
                   "extension conditions hold", bounds=bounds)


# -- direct topological probing ---------------------------------------------------


@dataclass
class ProbeBounds:
    n_max: int = 16
    depth: int = 24
    index_bound: int = 8
    conv: ConvergenceBounds = field(default_factory=ConvergenceBounds)

    def as_dict(self):
        return {"n_max": self.n_max, "depth": self.depth,
                "index_bound": self.index_bound, **self.conv.as_dict()}


def probe_continuity(phi, x: Point, bounds: ProbeBounds | None = None,
                     rng: random.Random | None = None,
                     strategies=None) -> Verdict:
    """Drive sequences converging to x through the map and test whether the
    images converge to the image of x.  A failure produces the witness
    sequence, the stuck image symbols, and the separating excluded set.

    ``strategies`` optionally replaces the built-in approach strategies
    with (label, sequence) pairs, where a sequence is a RepeatFamily or a
    callable n -> point."""
    bounds = bounds or ProbeBounds()
    rng = rng or random.Random(0)
    g = phi.source
    try:
        target = eval_resolved(phi, x, bounds.depth)
    except MapError as err:
        return Verdict("probe-continuity", UNKNOWN, str(err), x)
    worst = HOLDS
    notes = []
    if strategies is None:
        strategies = _approach_strategies(g, x, bounds, rng)
    for label, seq in strategies:
        inward = check_convergence(g, seq, x, bounds.conv)
        if inward.status != "holds":
            continue  # the strategy did not produce a convergent sequence

        # orbits grow with the sequence index, so give evaluation headroom
        eval_depth = bounds.depth + 2 * bounds.conv.n_max + 8

        def images(n, _seq=seq):
            return eval_resolved(phi, _seq.at(n) if isinstance(
                _seq, RepeatFamily) else _seq(n), eval_depth)

        outward = check_convergence(phi.target, images, target, bounds.conv)
        if outward.status == "counterexample":
            terms = [seq.at(n) if isinstance(seq, RepeatFamily) else seq(n)
                     for n in (1, 2, 3)]
            return Verdict(
                "probe-continuity", FAILS,
                f"strategy '{label}': inputs converge to {x} but images "
                f"do not converge to {target} ({outward.detail})",
                {"strategy": label, "terms": terms,
                 "images": [eval_resolved(phi, t, bounds.depth)
                            for t in terms],
                 "target": target, "stuck": outward.witness},
                bounds.as_dict())
        if outward.status == "unknown":
            worst = UNKNOWN
            notes.append(f"{label}: undecided")
        else:
            notes.append(f"{label}: images converge"
                         + (" (exact)" if outward.exact else ""))
    if not notes:
        return Verdict("probe-continuity", UNKNOWN,
                       "no convergent approach strategy applies at this point",
                       x, bounds.as_dict())
    return Verdict("probe-continuity", worst, "; ".join(notes), None,
                   bounds.as_dict())


def _approach_strategies(g: Ultragraph, x: Point, bounds: ProbeBounds,
                         rng: random.Random):
    out = [("constant", lambda n: x)]
    if length(x) == INFINITE:
        out.extend(_swerve_strategies(g, x, bounds))
        out.extend(_truncate_strategy(g, x, bounds))
    else:
        out.extend(_escape_strategy(g, x, bounds))
    return out


def _swerve_strategies(g, x, bounds: ProbeBounds):
    """Keep growing prefixes of x, then continue differently."""
    out = []
    if isinstance(x, PeriodicPoint) and not x.preamble:
        cyc = x.cycle
        nxt = g.successor_edges(cyc[-1])
        taken = 0
        for fam, idx in nxt.sample(6):
            e2 = EdgeRef(fam, idx)
            if e2 == cyc[0]:
                continue
            w = _try_point(g, cyc + (e2,), bounds.index_bound)
            if w is None:
                continue
            tail = shift_n(w, len(cyc))
            if isinstance(tail, GeneratorPoint):
                continue
            out.append((f"swerve to {e2} after whole cycles",
                        RepeatFamily(cyc, tail)))
            taken += 1
            if taken >= 2:
                break
        return out

    def seq(n):
        edges = tuple(coordinate(x, i) for i in range(1, n + 1))
        last = edges[-1]
        for fam, idx in g.successor_edges(last).sample(6):
            e2 = EdgeRef(fam, idx)
            if e2 == coordinate(x, n + 1):
                continue
            w = _try_point(g, edges + (e2,), bounds.index_bound)
            if w is not None:
                return w
        return x
    return [("swerve after a growing prefix", seq)]


def _truncate_strategy(g, x, bounds: ProbeBounds):
    def seq(n):
        edges = tuple(coordinate(x, i) for i in range(1, n + 1))
        tails, _ = g.minimal_emitters_in(g.range_of(edges[-1]))
        if tails:
            return FinitePoint(edges, tails[0])
        return x
    probe = seq(1)
    if isinstance(probe, FinitePoint):
        return [("truncate to finite points", seq)]
    return []


def _escape_strategy(g, x: FinitePoint, bounds: ProbeBounds):
    eps = g.epsilon(x.tail.vertices)
    edges = [EdgeRef(f, k) for f, k in eps.sample(bounds.n_max + 4)]
    if not edges:
        return []

    def seq(n):
        e = edges[min(n - 1, len(edges) - 1)]
        w = _try_point(g, tuple(x.path) + (e,), bounds.index_bound)
        return w if w is not None else x
    return [("extend past the tail with escaping edges", seq)]
