"""Basis generation: all canonical nonzero graphs of a given tri-degree.

Within a fixed (hairs, loops) cell the cohomological degree is v plus a
constant, so bases are produced per vertex count.  Generation walks degree
sequences and then edge multisets by a backtracking search; duplicates are
removed by canonicalization and zero classes dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .graphs import (
    ZERO,
    FlavorParams,
    HairyGraph,
    canonicalize,
    decode,
    flavor_tag,
    grading,
    is_connected,
    line_graph,
)

DEFAULT_MAX_V = 14
DEFAULT_MAX_E = 20


class ResourceCapError(RuntimeError):
    """A block needs more vertices/edges than the configured caps allow."""


@dataclass
class Basis:
    flavor: FlavorParams
    hairs: int
    loops: int
    degree: int
    keys: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.keys)

    def index(self) -> dict:
        return {k: i for i, k in enumerate(self.keys)}


def max_vertices(f: FlavorParams, hairs: int, loops: int) -> int:
    """Largest possible vertex count: min-valence bound 3v <= 2e + h
    (trivalent) with e = loops + v - 1.  Bivalent flavors are unbounded in
    v and must be capped explicitly."""
    if f.min_valence == 3:
        return max(0, 2 * loops + hairs - 2)
    return DEFAULT_MAX_V


def _hair_distributions(v: int, total: int):
    """All ways to place `total` hairs on v vertices."""
    if v == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _hair_distributions(v - 1, total - head):
            yield (head,) + rest


def _vertex_profiles(v: int, hairs: int, deg_total: int, min_valence: int):
    """Nonincreasing sequences of (edge-degree, hair-count) pairs with
    sum of degrees == deg_total and sum of hairs == hairs.

    Every isomorphism class has a labeling with sorted profiles, so this is
    a safe symmetry reduction before canonical deduplication.  Degrees are
    >= 1 for v >= 2 (connectivity) and degree + hairs >= min_valence.
    """
    min_deg = 1 if v >= 2 else 0

    def rec(i, deg_left, hair_left, bound_d, bound_h):
        if i == v:
            if deg_left == 0 and hair_left == 0:
                yield ()
            return
        remaining = v - i - 1
        for d in range(min(bound_d, deg_left), min_deg - 1, -1):
            if deg_left - d > d * remaining:
                continue  # later degrees are capped at d
            h_hi = hair_left if d < bound_d else min(bound_h, hair_left)
            for h in range(h_hi, max(min_valence - d, 0) - 1, -1):
                for rest in rec(i + 1, deg_left - d, hair_left - h, d, h):
                    yield ((d, h),) + rest

    big = deg_total + hairs + 1
    yield from rec(0, deg_total, hairs, big, big)


def _multigraphs_with_degrees(v: int, deg):
    """All edge multisets (sorted tuples of (i,j), i<=j, tadpoles allowed)
    realizing the edge-valence sequence deg."""
    results = []
    edges = []

    def feasible(rem):
        # each remaining stub must be matchable: rem[i] <= sum(others) + 2*floor cap via tadpoles is always possible, so only parity matters
        return sum(rem) % 2 == 0

    def rec(i, rem):
        if i == v:
            if all(r == 0 for r in rem):
                results.append(tuple(sorted(edges)))
            return
        if not feasible(rem):
            return
        # choose all edges (i, j) with j >= i; tadpoles at i use two stubs
        def choose(j, left):
            if left == 0:
                # vertex i fully matched; nothing below i remains open
                rec(i + 1, rem)
                return
            if j >= v:
                return
            if j == i:
                maxm = left // 2
            else:
                maxm = min(left, rem[j])
            for mcount in range(maxm, -1, -1):
                if mcount:
                    cost = 2 * mcount if j == i else mcount
                    rem[i] -= cost if j == i else mcount
                    if j != i:
                        rem[j] -= mcount
                    edges.extend([(i, j)] * mcount)
                    choose(j + 1, left - cost if j == i else left - mcount)
                    del edges[-mcount:]
                    if j == i:
                        rem[i] += cost
                    else:
                        rem[i] += mcount
                        rem[j] += mcount
                else:
                    choose(j + 1, left)

        choose(i, rem[i])

    rec(0, list(deg))
    return results


def _locally_maximal(v, edges, profile):
    """Cheap duplicate filter: reject an edge matrix if transposing two
    adjacent vertices with equal (degree, hairs) makes it lexicographically
    larger.  The maximal labeling of every class passes, so no class is
    lost; most redundant labelings are dropped before canonicalization."""
    adj = [[0] * v for _ in range(v)]
    for a, b in edges:
        adj[a][b] += 1
        if a != b:
            adj[b][a] += 1
    for i in range(v - 1):
        j = i + 1
        if profile[i] != profile[j]:
            continue
        swp = list(range(v))
        swp[i], swp[j] = j, i
        for r in range(v):
            ra = adj[r]
            rb = [adj[swp[r]][swp[c]] for c in range(v)]
            if ra < rb:
                return False
            if ra > rb:
                break
    return True


def _cycle_graph(v: int) -> HairyGraph:
    if v == 1:
        return HairyGraph(1, ((0, 0),), (0,))
    edges = [(i, i + 1) for i in range(v - 1)] + [(0, v - 1)]
    return HairyGraph(v, tuple(sorted(edges)), (0,) * v)


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _subdivide(core: HairyGraph, parts) -> HairyGraph:
    """Insert parts[i] bivalent vertices on the i-th core edge."""
    v = core.v
    edges = []
    for (a, b), k in zip(core.edges, parts):
        if k == 0:
            edges.append((a, b))
            continue
        chain = [a] + [v + j for j in range(k)] + [b]
        v += k
        for x, y in zip(chain, chain[1:]):
            edges.append((min(x, y), max(x, y)))
    return HairyGraph(v, tuple(sorted(edges)), (0,) * v)


def _bivalent_raw(f: FlavorParams, v: int, loops: int):
    """Bald graphs of min valence 2: suppressing all bivalent vertices
    either empties the graph (a cycle, loop order 1) or leaves a core of
    min valence 3 with the same loop order; re-subdividing the cores
    covers every class."""
    if loops == 1:
        yield _cycle_graph(v)
        return
    f3 = FlavorParams(f.m, f.n, kind="bald", min_valence=3)
    for c in range(1, min(v, 2 * loops - 2) + 1):
        e_core = c + loops - 1
        k = v - c
        for core in raw_graphs(f3, c, 0, loops):
            for parts in _compositions(k, e_core):
                yield _subdivide(core, parts)


def raw_graphs(f: FlavorParams, v: int, hairs: int, loops: int):
    """Connected multigraphs (not canonicalized) with the given counts."""
    if v == 0:
        if f.is_hairy and hairs == 2 and loops == 0:
            yield line_graph()
        return
    e = loops + v - 1
    if e < 0:
        return
    if not f.is_hairy and f.min_valence == 2:
        if loops >= 1:
            yield from _bivalent_raw(f, v, loops)
        return
    for profile in _vertex_profiles(v, hairs, 2 * e, f.min_valence):
        deg = tuple(d for (d, _) in profile)
        hv = tuple(h for (_, h) in profile)
        for edges in _multigraphs_with_degrees(v, deg):
            if not _locally_maximal(v, edges, profile):
                continue
            if not is_connected(v, edges):
                continue
            yield HairyGraph(v, edges, hv)


def generate_cell(
    f: FlavorParams,
    hairs: int,
    loops: int,
    v: int,
    max_e: int = DEFAULT_MAX_E,
):
    """Canonical nonzero graphs with exactly v vertices in cell (hairs, loops)."""
    if v > 0 and loops + v - 1 > max_e:
        raise ResourceCapError(
            f"cell (h={hairs}, l={loops}, v={v}) needs {loops + v - 1} edges"
            f" > cap {max_e}"
        )
    keys = set()
    for g in raw_graphs(f, v, hairs, loops):
        key, sign = canonicalize(g, f)
        if sign != ZERO:
            keys.add(key)
    return sorted(keys)


def generate_basis(
    f: FlavorParams,
    hairs: int,
    loops: int,
    max_v: int = DEFAULT_MAX_V,
    max_e: int = DEFAULT_MAX_E,
    degree_shift: int = 0,
):
    """All bases of the (hairs, loops) cell, one per cohomological degree.

    Returns a list of Basis ordered by degree.  Raises ResourceCapError if
    the cell is not exhausted within the caps (bivalent flavors truncate in
    v and need an explicit cap choice by the caller).
    """
    if f.is_hairy:
        if hairs < 1:
            return []
    elif hairs != 0:
        raise ValueError("bald flavors have no hairs")
    vmax = max_vertices(f, hairs, loops)
    if f.min_valence == 3 and vmax > max_v:
        raise ResourceCapError(
            f"cell (h={hairs}, l={loops}) needs v up to {vmax} > cap {max_v}"
        )
    vmax = min(vmax, max_v)
    out = []
    v_range = range(0 if (hairs, loops) == (2, 0) and f.is_hairy else 1, vmax + 1)
    for v in v_range:
        keys = generate_cell(f, hairs, loops, v, max_e=max_e)
        if not keys:
            continue
        deg = grading(decode(keys[0]), f, degree_shift).degree
        out.append(Basis(f, hairs, loops, deg, keys))
    out.sort(key=lambda b: b.degree)
    return out


def generate_block_s(f: FlavorParams, s: int, **kw):
    """Bases for every cell with hairs + loops == s (hairy flavors)."""
    cells = {}
    for hairs in range(1, s + 1):
        loops = s - hairs
        for basis in generate_basis(f, hairs, loops, **kw):
            cells[(basis.degree, hairs, loops)] = basis
    return cells


def one_vertex_irreducible(g: HairyGraph) -> bool:
    """Remains connected after deleting any single vertex."""
    if g.v <= 1:
        return True
    for x in range(g.v):
        keep = [u for u in range(g.v) if u != x]
        remap = {u: i for i, u in enumerate(keep)}
        edges = [
            (remap[a], remap[b]) for (a, b) in g.edges if a != x and b != x
        ]
        if not is_connected(g.v - 1, edges):
            return False
    return True


def filter_one_vertex_irreducible(basis: Basis) -> Basis:
    if basis.flavor.is_hairy:
        raise ValueError("1vi filter applies to bald flavors")
    keys = [k for k in basis.keys if one_vertex_irreducible(decode(k))]
    return Basis(basis.flavor, basis.hairs, basis.loops, basis.degree, keys)


# ---------------------------------------------------------------------------
# Brute-force oracle (for tests): enumerate all edge multisets directly
# ---------------------------------------------------------------------------


def brute_force_cell(f: FlavorParams, hairs: int, loops: int, v: int):
    if v == 0:
        return generate_cell(f, hairs, loops, 0)
    e = loops + v - 1
    if e < 0:
        return []
    pairs = [(i, j) for i in range(v) for j in range(i, v)]
    keys = set()
    for combo in itertools.combinations_with_replacement(pairs, e):
        for hv in _hair_distributions(v, hairs):
            g = HairyGraph(v, tuple(sorted(combo)), hv)
            ok = is_connected(v, g.edges) and all(
                g.valence(x) >= f.min_valence for x in range(v)
            )
            if not ok:
                continue
            key, sign = canonicalize(g, f)
            if sign != ZERO:
                keys.add(key)
    return sorted(keys)


# ---------------------------------------------------------------------------
# Basis file format
# ---------------------------------------------------------------------------


def basis_to_text(b: Basis) -> str:
    lines = [
        f"flavor={flavor_tag(b.flavor)} hairs={b.hairs} loops={b.loops}"
        f" degree={b.degree} dim={b.dim}"
    ]
    lines.extend(b.keys)
    return "\n".join(lines) + "\n"


def basis_from_text(text: str, f: FlavorParams) -> Basis:
    lines = text.strip().split("\n")
    header = dict(tok.split("=", 1) for tok in lines[0].split() if "=" in tok)
    b = Basis(
        f,
        int(header["hairs"]),
        int(header["loops"]),
        int(header["degree"]),
        lines[1:] if len(lines) > 1 else [],
    )
    if b.dim != int(header["dim"]):
        raise ValueError("basis file dim mismatch")
    return b
