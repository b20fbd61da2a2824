"""Points of an ultragraph shift space, the shift map, and its topology.

A point is either finite (an edge path followed by a constant minimal
infinite emitter tail, including bare zero-length tails) or infinite.
Infinite points come in two presentations: eventually periodic, which is
canonical and supports exact equality, and generator-backed, which is only
inspectable up to a declared depth.  Verdicts touching a generator point
are therefore always depth-qualified.

The topology is generated by the cylinders ``D(y, F)``: points extending
the ultrapath ``y`` whose next symbol avoids the finite edge set ``F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .graphs import (
    DEFAULT_CLOSURE_CAP,
    EdgeRef,
    MinimalEmitter,
    Ultragraph,
)
from .intsets import INFINITE, IndexSet, SymbolicSet
from .paths import Ultrapath, check_concat_compatible, edges_adjacent


class PointError(ValueError):
    pass


class DepthExceeded(PointError):
    """A generator point was asked beyond its declared depth."""


@dataclass(frozen=True)
class FinitePoint:
    """A finite path followed by the constant tail ``tail tail ...``."""

    path: tuple = ()
    tail: MinimalEmitter = None

    def __str__(self) -> str:
        inner = " ".join(str(e) for e in self.path)
        sep = " " if inner else ""
        return f"({inner}{sep}{self.tail} ...)"


def _primitive(cycle: tuple) -> tuple:
    for p in range(1, len(cycle) + 1):
        if len(cycle) % p == 0 and cycle == cycle[:p] * (len(cycle) // p):
            return cycle[:p]
    return cycle


@dataclass(frozen=True)
class PeriodicPoint:
    """An eventually periodic infinite point, kept in canonical form:
    primitive cycle, preamble as short as possible."""

    preamble: tuple = ()
    cycle: tuple = ()

    def __post_init__(self):
        if not self.cycle:
            raise PointError("cycle must be nonempty")
        cycle = _primitive(tuple(self.cycle))
        pre = tuple(self.preamble)
        while pre and pre[-1] == cycle[-1]:
            pre = pre[:-1]
            cycle = cycle[-1:] + cycle[:-1]
        object.__setattr__(self, "preamble", pre)
        object.__setattr__(self, "cycle", cycle)

    def __str__(self) -> str:
        pre = " ".join(str(e) for e in self.preamble)
        cyc = " ".join(str(e) for e in self.cycle)
        sep = " " if pre else ""
        return f"({pre}{sep}({cyc})* ...)"


class GeneratorPoint:
    """An infinite point given by a coordinate function, valid up to a
    declared depth.  The function must be pure; identity is the only
    notion of equality."""

    def __init__(self, fn: Callable[[int], EdgeRef], depth: int,
                 label: str = "generator"):
        self.fn = fn
        self.depth = depth
        self.label = label

    def __str__(self) -> str:
        return f"<{self.label} to depth {self.depth}>"


Point = FinitePoint | PeriodicPoint | GeneratorPoint


def length(x: Point):
    if isinstance(x, FinitePoint):
        return len(x.path)
    return INFINITE


def coordinate(x: Point, n: int):
    """The n-th symbol of x, 1-based: an EdgeRef, or the tail emitter."""
    if n < 1:
        raise PointError("coordinates are 1-based")
    if isinstance(x, FinitePoint):
        return x.path[n - 1] if n <= len(x.path) else x.tail
    if isinstance(x, PeriodicPoint):
        m = len(x.preamble)
        if n <= m:
            return x.preamble[n - 1]
        return x.cycle[(n - m - 1) % len(x.cycle)]
    if n > x.depth:
        raise DepthExceeded(f"{x} queried at {n}")
    return x.fn(n)


def shift(x: Point) -> Point:
    """Drop the first coordinate; zero-length points are fixed."""
    if isinstance(x, FinitePoint):
        return FinitePoint(x.path[1:], x.tail) if x.path else x
    if isinstance(x, PeriodicPoint):
        if x.preamble:
            return PeriodicPoint(x.preamble[1:], x.cycle)
        return PeriodicPoint((), x.cycle[1:] + x.cycle[:1])
    fn = x.fn
    return GeneratorPoint(lambda i: fn(i + 1), x.depth - 1,
                          f"shift of {x.label}")


def shift_n(x: Point, n: int) -> Point:
    for _ in range(n):
        x = shift(x)
    return x


def agree_to(x: Point, y: Point, depth: int) -> bool:
    """Coordinatewise agreement up to ``depth`` (lengths must allow it)."""
    for i in range(1, depth + 1):
        if coordinate(x, i) != coordinate(y, i):
            return False
    return True


def points_equal(x: Point, y: Point, depth: int = 64) -> bool:
    """Exact for finite and eventually periodic points; depth-bounded when
    a generator is involved."""
    if isinstance(x, GeneratorPoint) or isinstance(y, GeneratorPoint):
        if x is y:
            return True
        if length(x) != length(y):
            return False
        d = min(depth, *(p.depth for p in (x, y)
                         if isinstance(p, GeneratorPoint)))
        return agree_to(x, y, d)
    return x == y


def validate_point(g: Ultragraph, x: Point,
                   cap: int = DEFAULT_CLOSURE_CAP) -> list[str]:
    """Problems with x as a point of the shift space of g; entries starting
    with 'unknown:' are warnings from unsaturated closures."""
    problems: list[str] = []
    emitters, complete = g.minimal_infinite_emitters(cap)
    if isinstance(x, FinitePoint):
        for prev, nxt in zip(x.path, x.path[1:]):
            if not edges_adjacent(g, prev, nxt):
                problems.append(f"{prev} does not connect to {nxt}")
        if x.tail is None:
            problems.append("finite points need a tail emitter")
            return problems
        pool = emitters if not x.path else g.minimal_emitters_in(
            g.range_of(x.path[-1]), cap)[0]
        if not any(m == x.tail for m in pool):
            if complete:
                problems.append(f"{x.tail} is not a legal tail here")
            else:
                problems.append(f"unknown: cannot certify tail {x.tail}")
        return problems
    if isinstance(x, PeriodicPoint):
        seq = list(x.preamble) + list(x.cycle)
        wrapped = seq + [x.cycle[0]]
        for prev, nxt in zip(wrapped, wrapped[1:]):
            if not edges_adjacent(g, prev, nxt):
                problems.append(f"{prev} does not connect to {nxt}")
        return problems
    for i in range(1, x.depth):
        if not edges_adjacent(g, x.fn(i), x.fn(i + 1)):
            problems.append(f"adjacency fails at {i}")
    problems.append(f"unknown: generator checked to depth {x.depth} only")
    return problems


# -- concatenation and prefixes ---------------------------------------------


def concat(g: Ultragraph, x: Ultrapath, y):
    """Concatenate an ultrapath with an ultrapath or a point."""
    check_concat_compatible(g, x, y)
    if isinstance(y, Ultrapath):
        if not x.edges:
            return y
        return Ultrapath(x.edges, y.terminal) if not y.edges else \
            Ultrapath(x.edges + y.edges, y.terminal)
    if not x.edges:
        return y
    if isinstance(y, FinitePoint):
        return FinitePoint(x.edges + y.path, y.tail)
    if isinstance(y, PeriodicPoint):
        return PeriodicPoint(x.edges + y.preamble, y.cycle)
    fn, k = y.fn, len(x.edges)
    pre = x.edges
    return GeneratorPoint(
        lambda i: pre[i - 1] if i <= k else fn(i - k),
        y.depth + k, f"{'.'.join(str(e) for e in pre)}+{y.label}")


def is_prefix(g: Ultragraph, y: Ultrapath, x):
    """Whether the ultrapath y is an initial segment of x (an ultrapath or
    point).  Returns (bool, remainder) with remainder z satisfying
    x = concat(y, z) when the answer is True."""
    n = len(y.edges)
    xlen = len(x.edges) if isinstance(x, Ultrapath) else length(x)
    if xlen < n:
        return False, None
    for i in range(n):
        xi = x.edges[i] if isinstance(x, Ultrapath) else coordinate(x, i + 1)
        if xi != y.edges[i]:
            return False, None
    term = y.terminal
    if isinstance(x, Ultrapath):
        if xlen == n:
            ok = x.terminal.subset_of(term)
            return (ok, Ultrapath((), x.terminal)) if ok else (False, None)
        nxt = x.edges[n]
        ok = g.source_in(nxt, term)
        return (ok, Ultrapath(x.edges[n:], x.terminal)) if ok else (False, None)
    if xlen == n:
        ok = x.tail.vertices.subset_of(term)
        return (ok, FinitePoint((), x.tail)) if ok else (False, None)
    nxt = coordinate(x, n + 1)
    ok = g.source_in(nxt, term)
    return (ok, shift_n(x, n)) if ok else (False, None)


# -- cylinders ----------------------------------------------------------------


@dataclass(frozen=True)
class Cylinder:
    """Generalized cylinder D(base, excluded): points with the base as
    prefix whose next symbol is not an excluded edge."""

    base: Ultrapath
    excluded: SymbolicSet = SymbolicSet.empty()

    def __str__(self) -> str:
        if self.excluded.is_empty():
            return f"D{self.base}"
        return f"D({self.base}, minus {self.excluded})"


def validate_cylinder(g: Ultragraph, D: Cylinder) -> list[str]:
    problems = []
    if not D.excluded.is_finite():
        problems.append("excluded set must be finite")
    eps = g.epsilon(D.base.terminal)
    if not D.excluded.subset_of(eps):
        problems.append("excluded edges must be emitted by the terminal set")
    return problems


def cylinder_contains(g: Ultragraph, D: Cylinder, x: Point) -> bool:
    ok, _ = is_prefix(g, D.base, x)
    if not ok:
        return False
    nxt = coordinate(x, len(D.base.edges) + 1)
    if isinstance(nxt, MinimalEmitter):
        return True  # excluded sets contain edges only
    return not D.excluded.contains(nxt.family, nxt.index)


def shift_cylinder(D: Cylinder) -> Cylinder:
    """The shift image: valid only for positive-length bases, where the
    shift acts by dropping the first base edge and keeping exclusions."""
    if not D.base.edges:
        raise PointError("the shift image of a zero-length cylinder is not "
                         "a cylinder in general")
    return Cylinder(Ultrapath(D.base.edges[1:], D.base.terminal), D.excluded)


def neighborhood_basis(g: Ultragraph, x: Point, depth: int | None = None,
                       excluded: SymbolicSet | None = None) -> Cylinder:
    """The basis element at x: for infinite x, the cylinder over its first
    ``depth`` edges; for finite x, the cylinder over the whole path with
    the given finite excluded set."""
    if length(x) == INFINITE:
        if not depth or depth < 1:
            raise PointError("infinite points need a positive depth")
        edges = tuple(coordinate(x, i) for i in range(1, depth + 1))
        return Cylinder(Ultrapath(edges, g.range_of(edges[-1])))
    if depth is not None:
        raise PointError("finite points take an excluded set, not a depth")
    F = excluded if excluded is not None else SymbolicSet.empty()
    D = Cylinder(Ultrapath(x.path, x.tail.vertices), F)
    problems = validate_cylinder(g, D)
    if problems:
        raise PointError("; ".join(problems))
    return D


# -- convergence --------------------------------------------------------------


@dataclass
class ConvergenceBounds:
    m_max: int = 8
    n_max: int = 32
    f_list: tuple = ()  # finite excluded edge sets for the finite-target case

    def as_dict(self) -> dict:
        return {"m_max": self.m_max, "n_max": self.n_max,
                "f_list": [str(F) for F in self.f_list]}


@dataclass
class ConvergenceVerdict:
    status: str  # "holds" | "counterexample" | "unknown"
    detail: str
    exact: bool = False
    witness: object = None

    def __bool__(self) -> bool:
        return self.status == "holds"


@dataclass(frozen=True)
class RepeatFamily:
    """The sequence x^n = block^n followed by a fixed tail point.

    The agreement depth against any fixed target is affine in n for this
    family, so convergence verdicts on it can be certified exactly."""

    block: tuple
    tail: Point
    label: str = "repeat family"

    def at(self, n: int) -> Point:
        pre = self.block * n
        if isinstance(self.tail, FinitePoint):
            return FinitePoint(pre + self.tail.path, self.tail.tail)
        if isinstance(self.tail, PeriodicPoint):
            return PeriodicPoint(pre + self.tail.preamble, self.tail.cycle)
        raise PointError("repeat families need finite or periodic tails")


def _agreement_depth(x: Point, target: Point, limit: int) -> int:
    d = 0
    for i in range(1, limit + 1):
        if length(x) < i or length(target) < i:
            break
        if coordinate(x, i) != coordinate(target, i):
            break
        d = i
    return d


def check_convergence(g: Ultragraph, seq, target: Point,
                      bounds: ConvergenceBounds | None = None) -> ConvergenceVerdict:
    """Bounded check that seq(n) converges to target.

    For an infinite target the condition per M is eventual prefix agreement
    to depth M; for a finite target (path, A) the condition per finite F is
    that eventually either the term equals the target or it extends the
    target's path by an edge in eps(A) outside F.  ``seq`` is a callable or
    a RepeatFamily; repeat families get exact certificates.
    """
    bounds = bounds or ConvergenceBounds()
    at = seq.at if isinstance(seq, RepeatFamily) else seq
    terms = {}

    def term(n):
        if n not in terms:
            terms[n] = at(n)
        return terms[n]

    conditions = []
    if length(target) == INFINITE:
        for M in range(1, bounds.m_max + 1):
            conditions.append((f"prefix agreement to depth {M}",
                               _infinite_case_condition(target, M)))
    else:
        f_list = bounds.f_list or _default_f_list(g, target)
        for F in f_list:
            conditions.append((f"escape outside F={F}",
                               _finite_case_condition(g, target, F)))

    worst = "holds"
    detail_bits = []
    witness = None
    exact = isinstance(seq, RepeatFamily)
    half = bounds.n_max // 2
    for name, cond in conditions:
        outcomes = [cond(term(n)) for n in range(1, bounds.n_max + 1)]
        if not any(outcomes[half:]):
            # the whole tail of the window fails: divergence up to bounds
            worst = "counterexample"
            witness = (bounds.n_max, term(bounds.n_max), name)
            detail_bits.append(f"{name}: fails for every large sampled n")
            exact = exact and _stable(outcomes, half)
            break
        last_fail = max((i for i, ok in enumerate(outcomes) if not ok),
                        default=-1)
        if last_fail == len(outcomes) - 1:
            if worst == "holds":
                worst = "unknown"
            detail_bits.append(f"{name}: still failing at n={bounds.n_max}")
            exact = False
        else:
            detail_bits.append(f"{name}: satisfied for n>{last_fail + 1}")
            exact = exact and _stable(outcomes, half)
    return ConvergenceVerdict(worst, "; ".join(detail_bits), exact, witness)


def _stable(outcomes: list, half: int) -> bool:
    tail = outcomes[half:]
    return all(o == tail[0] for o in tail)


def _infinite_case_condition(target: Point, M: int):
    def cond(xn: Point) -> bool:
        if length(xn) < M:
            return False
        return all(coordinate(xn, i) == coordinate(target, i)
                   for i in range(1, M + 1))
    return cond


def _finite_case_condition(g: Ultragraph, target: FinitePoint, F: SymbolicSet):
    k = len(target.path)

    def cond(xn: Point) -> bool:
        if isinstance(xn, (FinitePoint, PeriodicPoint)) and xn == target:
            return True
        if length(xn) <= k:
            return False
        if any(coordinate(xn, i) != target.path[i - 1]
               for i in range(1, k + 1)):
            return False
        nxt = coordinate(xn, k + 1)
        if isinstance(nxt, MinimalEmitter):
            return False
        return (g.source_in(nxt, target.tail.vertices)
                and not F.contains(nxt.family, nxt.index))
    return cond


def _default_f_list(g: Ultragraph, target: FinitePoint):
    eps = g.epsilon(target.tail.vertices)
    frontier = [EdgeRef(f, k) for f, k in eps.sample(4)]
    out = [SymbolicSet.empty()]
    for t in range(1, len(frontier) + 1):
        out.append(SymbolicSet.of(*((e.family, IndexSet.of(e.index))
                                    for e in frontier[:t])))
    return tuple(out)


# -- witnesses for blocks ------------------------------------------------------


def block_witness(g: Ultragraph, block, index_bound: int = 8,
                  steps: int = 24) -> Point | None:
    """A point carrying the block at position 1, built constructively:
    either the block already ends in an emitter tail, or the trailing edge
    is extended until an edge repeats (periodic closure) or an emitter tail
    becomes available."""
    syms = list(block.symbols)
    emitter_at = next((i for i, s in enumerate(syms)
                       if isinstance(s, MinimalEmitter)), None)
    if emitter_at is not None:
        return FinitePoint(tuple(syms[:emitter_at]), syms[emitter_at])
    path = list(syms)
    seen = {}
    for step in range(steps):
        last = path[-1]
        if last in seen and seen[last] < len(path) - 1:
            i = seen[last]
            return PeriodicPoint(tuple(path[:i]), tuple(path[i:-1]))
        seen[last] = len(path) - 1
        rng = g.range_of(last)
        tails, _ = g.minimal_emitters_in(rng)
        nxt = g.epsilon(rng)
        cands = [EdgeRef(f, k) for f, k in nxt.sample(index_bound)]
        if not cands:
            if tails:
                return FinitePoint(tuple(path), tails[0])
            return None
        path.append(cands[0])
    return None
