"""The symbolic first-extension-edge engine against brute force.

For random schema classes and random path prefixes, the set of edges e
admitting a continuation prefix+e+... inside the class is enumerated by
brute force over bounded witnesses and compared with the symbolic result:
equal when the engine reports exact, superset otherwise (the symbolic side
over-approximates for holds-soundness).
"""

import random

from ultrashift.codes import MapPresentation, SchemaClass, first_edges_into_class
from ultrashift.corpus import d, f, graph_a_source, graph_d_target
from ultrashift.definable import LitAtom, PcSchema, RepAtom, VarAtom, match_schema
from ultrashift.graphs import EdgeRef
from ultrashift.intsets import IndexSet, SymbolicSet, shift_map
from ultrashift.paths import Block
from ultrashift.points import block_witness, validate_point
from ultrashift import sampling

GA = graph_a_source()
HD = graph_d_target()
BOUND = 7


def random_schema(g, rng: random.Random) -> PcSchema:
    fams = list(g.edge_families)
    atoms = []
    has_var = False
    for _ in range(rng.randint(1, 3)):
        kind = rng.random()
        fam = rng.choice(fams)
        if kind < 0.45:
            idx = rng.choice(g.edge_domain(fam).sample(5))
            atoms.append(LitAtom(EdgeRef(fam, idx)))
        elif kind < 0.8 and not has_var:
            m = rng.choice([shift_map(0), shift_map(1), shift_map(-1)])
            atoms.append(VarAtom(fam, m))
            has_var = True
        else:
            idx = rng.choice(g.edge_domain(fam).sample(3))
            atoms.append(LitAtom(EdgeRef(fam, idx)))
    if rng.random() < 0.3:
        fam = rng.choice(fams)
        idx = rng.choice(g.edge_domain(fam).sample(3))
        atoms.insert(rng.randint(0, len(atoms)), RepAtom(EdgeRef(fam, idx)))
    dom = None
    if has_var:
        a = rng.randint(-3, 3)
        dom = rng.choice([IndexSet.at_least(a), IndexSet.at_most(a),
                          IndexSet.between(a, a + 4)])
    anchor = rng.randint(1, 3)
    return PcSchema(anchor, tuple(atoms), dom)


def brute_first_edges(g, schema: PcSchema, prefix: tuple) -> set:
    """Edges e with a witnessed continuation prefix+e+... matching the
    schema, enumerated over bounded extensions."""
    found = set()
    for fam, iset in g.all_edges().entries:
        for idx in iset.intersect(IndexSet.between(-BOUND, BOUND)).members():
            e = EdgeRef(fam, idx)
            base = tuple(prefix) + (e,)
            cands = []
            w = block_witness(g, Block(base), BOUND)
            if w is not None:
                cands.append(w)
            for fam2, iset2 in g.all_edges().entries:
                for idx2 in iset2.intersect(
                        IndexSet.between(-BOUND, BOUND)).members():
                    w2 = block_witness(g, Block(base + (EdgeRef(fam2, idx2),)),
                                       BOUND)
                    if w2 is not None:
                        cands.append(w2)
            tails, _ = g.minimal_emitters_in(g.range_of(e))
            from ultrashift.points import FinitePoint

            cands.extend(FinitePoint(base, m) for m in tails)
            for cand in cands:
                if validate_point(g, cand):
                    continue
                if match_schema(schema, cand) is not None:
                    found.add((e.family, e.index))
                    break
    return found


def test_symbolic_first_edges_cover_brute_force():
    rng = random.Random(99)
    checked = exact_hits = 0
    for g in (GA, HD):
        for _ in range(60):
            schema = random_schema(g, rng)
            walk = sampling.random_walk(g, rng, rng.randint(1, 3), BOUND)
            for prefix in ((), tuple(walk)):
                cls = SchemaClass([schema], symbol=EdgeRef(
                    next(iter(g.edge_families)), g.all_edges().sample(1)[0][1]))
                phi = MapPresentation(g, g, [cls])
                got = first_edges_into_class(phi, cls, prefix)
                brute = brute_first_edges(g, schema, prefix)
                symbolic = {(fam, k) for fam, iset in got.edges.entries
                            for k in iset.intersect(
                                IndexSet.between(-BOUND, BOUND)).members()}
                assert brute <= symbolic, (g.name, schema, prefix,
                                           brute - symbolic)
                checked += 1
                if got.exact:
                    exact_hits += 1
                    assert brute == symbolic, (g.name, schema, prefix,
                                               symbolic - brute)
    assert checked >= 200 and exact_hits >= 30


def test_family_class_restriction_prunes_edges():
    # restricting the class parameter restricts the admissible first edges
    cls = SchemaClass(
        [PcSchema(1, (VarAtom("f"),), IndexSet.at_least(1))],
        family="e", index_domain=IndexSet.at_least(1))
    phi = MapPresentation(GA, graph_a_source(), [cls])
    full = first_edges_into_class(phi, cls, ())
    pruned = first_edges_into_class(phi, cls, (),
                                    param_restrict=IndexSet.of(4))
    assert full.edges == SymbolicSet.of(("f", IndexSet.at_least(1)))
    assert pruned.edges == SymbolicSet.singleton("f", 4)
    assert full.exact and pruned.exact
