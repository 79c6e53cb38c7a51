"""Principal congruences and chain depth through fundamental translations.

A fundamental translation fixes all arguments of one operation but one
with constants.  The pairs {g(a), g(b)} over composed translations g,
organized by how many translations were composed, form a layered graph on
unordered element pairs: layer 0 is {a,b}, layer d+1 holds unseen images
of layer-d pairs.  The reflexive-symmetric-transitive closure of all
reached pairs is the principal congruence Cg(a,b); a pair (c,d) lies in
it iff c and d are joined by a path of reached pairs, and the least M
such that some path uses only pairs of depth <= M is the chain depth of
(c,d) (a minimax path weight).

Pairs {x,x} are recorded but never expanded: they cannot witness a
nontrivial chain edge.  Enumeration order is canonical (operation order,
position ascending, constants lexicographic), so layers, witnesses and
reports are reproducible.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .algebra import (
    Budget,
    DEFAULT_BUDGET,
    Congruence,
    DisjointSets,
    FiniteAlgebra,
    TranslationStep,
)
from .subpower import Subpower, translation_maps


@dataclass(eq=False)
class TranslationSystem:
    """Deduped unary translation maps with canonical witnesses."""

    universe: int
    maps: list[tuple[int, ...]]
    steps: list[TranslationStep]


def _generic_translation_maps(alg: FiniteAlgebra, symbols: set[str] | None,
                              budget: Budget
                              ) -> tuple[list[tuple[int, ...]], list[TranslationStep]]:
    size = alg.size
    universe = range(size)
    maps: dict[tuple[int, ...], TranslationStep] = {}
    work = 0
    for op in alg.ops:
        if op.arity == 0 or (symbols is not None and op.symbol not in symbols):
            continue
        k = op.arity
        for pos in range(k):
            others = [p for p in range(k) if p != pos]
            dead = [i for i, p in enumerate(others) if p in op.absorbing]
            for consts in product(universe, repeat=k - 1):
                work += 1
                if work % 2048 == 0:
                    budget.check_time()
                    budget.check_signatures(work)
                if alg.zero is not None and any(consts[i] == alg.zero for i in dead):
                    continue  # image is constantly zero; cannot move any pair
                args = list(consts[:pos]) + [0] + list(consts[pos:])
                row = []
                for x in universe:
                    args[pos] = x
                    row.append(op.func(*args))
                key = tuple(row)
                if key not in maps:
                    maps[key] = TranslationStep(op.symbol, pos, consts)
    return list(maps.keys()), list(maps.values())


def translation_system(target: FiniteAlgebra | Subpower,
                       symbols: Iterable[str] | None = None,
                       budget: Budget = DEFAULT_BUDGET) -> TranslationSystem:
    wanted = None if symbols is None else set(symbols)
    if isinstance(target, Subpower):
        maps, steps = translation_maps(target, wanted, budget)
        return TranslationSystem(target.size, maps, steps)
    maps, steps = _generic_translation_maps(target, wanted, budget)
    return TranslationSystem(target.size, maps, steps)


def _key(x: int, y: int) -> tuple[int, int]:
    return (x, y) if x <= y else (y, x)


def _pair_bfs(maps: Sequence[tuple[int, ...]],
              seeds: Sequence[tuple[int, int]],
              cap: int | None,
              budget: Budget) -> dict[tuple[int, int], int]:
    depth: dict[tuple[int, int], int] = {}
    frontier: list[tuple[int, int]] = []
    for a, b in seeds:
        k = _key(a, b)
        if k not in depth:
            depth[k] = 0
            frontier.append(k)
    d = 0
    while frontier and (cap is None or d < cap):
        budget.check_time()
        nxt: list[tuple[int, int]] = []
        for x, y in frontier:
            if x == y:
                continue
            for mp in maps:
                p, q = mp[x], mp[y]
                kk = (p, q) if p <= q else (q, p)
                if kk not in depth:
                    depth[kk] = d + 1
                    nxt.append(kk)
        budget.check_pairs(len(depth))
        frontier = nxt
        d += 1
    return depth


@dataclass(eq=False)
class PairDepthGraph:
    """Minimum translation counts for every unordered pair reached from
    the source pair within the cap (cap=None: to the fixed point)."""

    source: tuple[int, int]
    cap: int | None
    depth: dict[tuple[int, int], int]

    def to_json(self) -> dict:
        pairs = [
            {"x": x, "y": y, "depth": d}
            for (x, y), d in sorted(self.depth.items())
        ]
        return {"source": list(self.source), "cap": self.cap, "pairs": pairs}


def pair_depth_graph(target, a: int, b: int, cap: int | None = None, *,
                     system: TranslationSystem | None = None,
                     symbols: Iterable[str] | None = None,
                     budget: Budget = DEFAULT_BUDGET) -> PairDepthGraph:
    sys_ = system if system is not None else translation_system(target, symbols, budget)
    depth = _pair_bfs(sys_.maps, [(a, b)], cap, budget)
    return PairDepthGraph(source=(a, b), cap=cap, depth=depth)


def _congruence_from_depth(size: int, depth: dict[tuple[int, int], int]) -> Congruence:
    dsu = DisjointSets(size)
    for x, y in depth:
        if x != y:
            dsu.union(x, y)
    return Congruence(dsu.labels())


def _universe_size(target) -> int:
    return target.size


def principal_congruence(target, a: int, b: int, *,
                         system: TranslationSystem | None = None,
                         budget: Budget = DEFAULT_BUDGET) -> Congruence:
    """Cg(a,b): reflexive-symmetric-transitive closure of the pairs
    reachable from (a,b) by fundamental translations."""
    sys_ = system if system is not None else translation_system(target, None, budget)
    depth = _pair_bfs(sys_.maps, [(a, b)], None, budget)
    return _congruence_from_depth(_universe_size(target), depth)


def congruence_from_pairs(target, pairs: Iterable[tuple[int, int]], *,
                          system: TranslationSystem | None = None,
                          budget: Budget = DEFAULT_BUDGET) -> Congruence:
    """Least congruence containing all the pairs (the join of their
    principal congruences)."""
    seeds = list(pairs)
    if not seeds:
        return Congruence.identity(_universe_size(target))
    sys_ = system if system is not None else translation_system(target, None, budget)
    depth = _pair_bfs(sys_.maps, seeds, None, budget)
    return _congruence_from_depth(_universe_size(target), depth)


def _adjacency(depth: dict[tuple[int, int], int]) -> dict[int, list[tuple[int, int]]]:
    adj: dict[int, list[tuple[int, int]]] = {}
    for (x, y), d in sorted(depth.items()):
        if x == y:
            continue
        adj.setdefault(x, []).append((y, d))
        adj.setdefault(y, []).append((x, d))
    return adj


def _bottleneck(adj: dict[int, list[tuple[int, int]]], src: int, dst: int) -> int | None:
    best: dict[int, int] = {src: 0}
    heap: list[tuple[int, int]] = [(0, src)]
    while heap:
        w, u = heapq.heappop(heap)
        if w > best.get(u, 1 << 60):
            continue
        if u == dst:
            return w
        for v, ew in adj.get(u, ()):
            nw = max(w, ew)
            if nw < best.get(v, 1 << 60):
                best[v] = nw
                heapq.heappush(heap, (nw, v))
    return None


def _lex_shortest_path(adj, src: int, dst: int, limit: int) -> list[int] | None:
    """Lexicographically smallest among minimum-hop src->dst paths in the
    subgraph of edges with weight <= limit."""
    from collections import deque

    nbrs: dict[int, list[int]] = {}
    for u, edges in adj.items():
        nbrs[u] = sorted({v for v, w in edges if w <= limit})
    if src == dst:
        return [src]

    def bfs(start):
        dist = {start: 0}
        dq = deque([start])
        while dq:
            u = dq.popleft()
            for v in nbrs.get(u, ()):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    dq.append(v)
        return dist

    d_src = bfs(src)
    if dst not in d_src:
        return None
    d_dst = bfs(dst)
    total = d_src[dst]
    path = [src]
    u = src
    while u != dst:
        step = d_src[u] + 1
        u = min(v for v in nbrs.get(u, ())
                if d_dst.get(v, 1 << 60) + step == total)
        path.append(u)
    return path


def maltsev_depth(target, gen: tuple[int, int], pair: tuple[int, int],
                  cap: int | None = None, *,
                  system: TranslationSystem | None = None,
                  budget: Budget = DEFAULT_BUDGET) -> int | None:
    """Minimax chain depth of `pair` inside Cg(gen): the least M such that
    a Maltsev chain links the pair using only translation polynomials of
    depth <= M.  None when the pair is not connected within the cap."""
    c, d = pair
    if c == d:
        return 0
    graph = pair_depth_graph(target, gen[0], gen[1], cap,
                             system=system, budget=budget)
    return _bottleneck(_adjacency(graph.depth), c, d)


def maltsev_chain(target, gen: tuple[int, int], pair: tuple[int, int],
                  cap: int | None = None, *,
                  system: TranslationSystem | None = None,
                  budget: Budget = DEFAULT_BUDGET
                  ) -> tuple[int, list[int]] | None:
    """Like maltsev_depth but also returns a witness chain of elements:
    the minimax value, then among minimax-optimal chains one with fewest
    edges, lexicographically smallest."""
    c, d = pair
    if c == d:
        return 0, [c]
    graph = pair_depth_graph(target, gen[0], gen[1], cap,
                             system=system, budget=budget)
    adj = _adjacency(graph.depth)
    value = _bottleneck(adj, c, d)
    if value is None:
        return None
    path = _lex_shortest_path(adj, c, d, value)
    assert path is not None
    return value, path
