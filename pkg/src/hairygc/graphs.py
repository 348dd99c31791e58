"""Graphs, gradings, orientation signs and canonical forms.

A hairy graph is a connected multigraph on internal vertices 0..v-1 with
internal edges (tadpoles allowed) and a number of hairs per vertex.  The
orientation data depends on the flavor:

  * n even: the edge list (internal edges and hair edges) is ordered,
    permuting it picks up the permutation sign;
  * n odd: internal vertices are ordered and edges carry a direction,
    permuting vertices or reversing an edge picks up a sign;
  * m odd: the univalent hair endpoints are ordered.

A hair moves as a unit (its edge plus its endpoint), so swapping two whole
hairs costs a sign exactly when m+n is even.  The degenerate single-edge
graph (v=0, two hairs) is kept as an explicit special case; it is a zero
class unless m and n have equal parity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

LINE_KEY = "v=0;e=;h=LINE"

ZERO = 0  # sentinel sign for zero classes


class FlavorError(ValueError):
    pass


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class FlavorParams:
    """Selects one of the complexes HGC_{m,n}, GC_n or GC2_n.

    m and n are kept as integers (they enter the degree formula); all sign
    rules depend only on their parities.  Bald flavors ignore m.
    """

    m: int
    n: int
    kind: str = "hairy"  # "hairy" | "bald"
    min_valence: int = 3  # 3 for GC/HGC, 2 for GC2

    def __post_init__(self):
        if self.kind not in ("hairy", "bald"):
            raise FlavorError("kind must be 'hairy' or 'bald'")
        if self.min_valence not in (2, 3):
            raise FlavorError("min_valence must be 2 or 3")

    @property
    def m_par(self) -> int:
        return self.m % 2

    @property
    def n_par(self) -> int:
        return self.n % 2

    @property
    def edges_odd(self) -> bool:
        """Whether permuting two edges costs a sign."""
        return self.n_par == 0

    @property
    def verts_odd(self) -> bool:
        """Whether permuting two internal vertices costs a sign."""
        return self.n_par == 1

    @property
    def dirs_odd(self) -> bool:
        """Whether reversing an edge direction costs a sign."""
        return self.n_par == 1

    @property
    def ends_odd(self) -> bool:
        """Whether permuting two hair endpoints costs a sign."""
        return self.m_par == 1

    @property
    def hairs_odd(self) -> bool:
        """Whether swapping two whole hairs costs a sign.

        A hair is its edge (odd iff n even) plus its endpoint (odd iff m
        odd), so the unit is odd exactly when m+n is even."""
        return self.m_par == self.n_par

    @property
    def is_hairy(self) -> bool:
        return self.kind == "hairy"

    def same_parity(self, other: "FlavorParams") -> bool:
        return (self.m_par, self.n_par, self.kind, self.min_valence) == (
            other.m_par,
            other.n_par,
            other.kind,
            other.min_valence,
        )


def flavor_tag(f: FlavorParams) -> str:
    mp = "even" if f.m_par == 0 else "odd"
    np_ = "even" if f.n_par == 0 else "odd"
    rule = "trivalent_min" if f.min_valence == 3 else "bivalent_min"
    return f"{mp},{np_},{f.kind},{rule}"


@dataclass(frozen=True)
class Grading:
    degree: int
    hairs: int
    loops: int


@dataclass(frozen=True)
class HairyGraph:
    """A graph in standard form: edges sorted lexicographically as (i,j)
    with i <= j, hairs given as per-vertex counts.  The standard orientation
    is the sorted order itself (all edges directed low to high)."""

    v: int
    edges: tuple  # tuple of (i, j) pairs, i <= j, sorted
    hairs: tuple  # per-vertex hair counts; () for the v=0 line graph

    @property
    def is_line(self) -> bool:
        return self.v == 0

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_hairs(self) -> int:
        if self.is_line:
            return 2
        return sum(self.hairs)

    @property
    def loops(self) -> int:
        if self.is_line:
            return 0
        return len(self.edges) - self.v + 1

    def valence(self, x: int) -> int:
        val = self.hairs[x]
        for (a, b) in self.edges:
            if a == x:
                val += 1
            if b == x:
                val += 1
        return val

    def key(self) -> str:
        return encode(self)


def line_graph() -> HairyGraph:
    return HairyGraph(0, (), ())


def encode(g: HairyGraph) -> str:
    if g.is_line:
        return LINE_KEY
    estr = ",".join(f"{a}-{b}" for (a, b) in g.edges)
    hstr = ",".join(str(c) for c in g.hairs)
    return f"v={g.v};e={estr};h={hstr}"


def decode(key: str) -> HairyGraph:
    if key == LINE_KEY:
        return line_graph()
    parts = key.split(";")
    if len(parts) != 3 or not parts[0].startswith("v="):
        raise GraphError(f"bad graph key: {key!r}")
    v = int(parts[0][2:])
    estr = parts[1][2:]
    edges = []
    if estr:
        for tok in estr.split(","):
            a, b = tok.split("-")
            edges.append((int(a), int(b)))
    hstr = parts[2][2:]
    hairs = tuple(int(c) for c in hstr.split(",")) if hstr else ()
    if len(hairs) != v:
        raise GraphError(f"hair vector length mismatch in {key!r}")
    return HairyGraph(v, tuple(sorted(edges)), hairs)


def is_connected(v: int, edges) -> bool:
    if v <= 1:
        return True
    adj = [[] for _ in range(v)]
    for (a, b) in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * v
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                count += 1
                stack.append(y)
    return count == v


def check_valid(g: HairyGraph, f: FlavorParams, strict: bool = True) -> None:
    """Raise GraphError if g violates the flavor's structural invariants."""
    if g.is_line:
        if not f.is_hairy:
            raise GraphError("line graph only lives in hairy flavors")
        return
    if g.v < 1:
        raise GraphError("graph needs at least one internal vertex")
    for (a, b) in g.edges:
        if not (0 <= a <= b < g.v):
            raise GraphError(f"edge {(a, b)} out of range")
    if len(g.hairs) != g.v:
        raise GraphError("hair vector length mismatch")
    if any(c < 0 for c in g.hairs):
        raise GraphError("negative hair count")
    if not f.is_hairy and any(g.hairs):
        raise GraphError("bald flavor cannot carry hairs")
    if f.is_hairy and sum(g.hairs) < 1:
        raise GraphError("hairy flavor requires at least one hair")
    if strict:
        if not is_connected(g.v, g.edges):
            raise GraphError("graph is not connected")
        for x in range(g.v):
            if g.valence(x) < f.min_valence:
                raise GraphError(f"vertex {x} has valence < {f.min_valence}")


def admissible(v, edges, hairs, f: FlavorParams) -> bool:
    """Valence + connectivity filter used by the operators."""
    if v == 0:
        return True
    val = list(hairs)
    for (a, b) in edges:
        val[a] += 1
        val[b] += 1
    if any(x < f.min_valence for x in val):
        return False
    return is_connected(v, edges)


def grading(g: HairyGraph, f: FlavorParams, shift: int = 0) -> Grading:
    """Tri-degree of a graph: cohomological degree, hairs, loops.

    degree = n*v + m*h + (1-n)*(e+h) + shift; within a fixed (hairs, loops)
    cell the degree is v plus a constant, so degree determines v.
    """
    if g.is_line:
        # a single edge with two univalent ends: one edge shared by 2 hairs
        return Grading(2 * f.m + (1 - f.n) + shift, 2, 0)
    h = g.n_hairs if f.is_hairy else 0
    e = g.n_edges
    deg = f.n * g.v + f.m * h + (1 - f.n) * (e + h) + shift
    return Grading(deg, h, g.loops)


# ---------------------------------------------------------------------------
# Raw graphs and the orientation sign engine
# ---------------------------------------------------------------------------

INT = 0
HAIR = 1


class RawGraph:
    """A graph under construction, with explicit orientation order.

    items is a list of ('int', a, b) and ('hair', u) entries; the list order
    is the edge order (hair edges ride along with their endpoint).  Internal
    edges are directed a -> b as written; hair edges always point away from
    their vertex.  Vertices are ordered 0..v-1; operators must account for
    any reordering themselves.
    """

    __slots__ = ("v", "items")

    def __init__(self, v: int, items):
        self.v = v
        self.items = items

    @classmethod
    def from_graph(cls, g: HairyGraph) -> "RawGraph":
        items = [(INT, a, b) for (a, b) in g.edges]
        for u, c in enumerate(g.hairs):
            items.extend([(HAIR, u, -1)] * c)
        return cls(g.v, items)

    def copy(self) -> "RawGraph":
        return RawGraph(self.v, list(self.items))


def _atom_odd(item, f: FlavorParams) -> bool:
    if item[0] == INT:
        return f.edges_odd
    return f.hairs_odd


def _sort_sign(items, keys, odd_flags) -> int:
    """Sign of stably sorting items by keys, counting only inversions among
    odd atoms."""
    order = sorted(range(len(items)), key=lambda i: (keys[i], i))
    sign = 1
    # count inversion pairs (i < j, order places j before i) with both odd
    odd_positions = [order.index(i) for i in range(len(items)) if odd_flags[i]]
    for a, b in itertools.combinations(odd_positions, 2):
        if a > b:
            sign = -sign
    return sign


def standardize(raw: RawGraph, f: FlavorParams):
    """Sort a raw graph into standard form; returns (HairyGraph, sign)."""
    items = list(raw.items)
    sign = 1
    # normalize edge directions
    for i, it in enumerate(items):
        if it[0] == INT and it[1] > it[2]:
            items[i] = (INT, it[2], it[1])
            if f.dirs_odd:
                sign = -sign
    keys = [(0, it[1], it[2]) if it[0] == INT else (1, it[1], 0) for it in items]
    odd_flags = [_atom_odd(it, f) for it in items]
    sign *= _sort_sign(items, keys, odd_flags)
    items.sort(key=lambda it: ((0, it[1], it[2]) if it[0] == INT else (1, it[1], 0)))
    edges = tuple((it[1], it[2]) for it in items if it[0] == INT)
    hairs = [0] * raw.v
    for it in items:
        if it[0] == HAIR:
            hairs[it[1]] += 1
    g = HairyGraph(raw.v, edges, tuple(hairs))
    return g, sign


def perm_sign(perm) -> int:
    """Sign of a permutation given as a list mapping position -> value."""
    perm = list(perm)
    n = len(perm)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def relabel_sign(g: HairyGraph, sigma, f: FlavorParams):
    """Relabel g's vertices by sigma (vertex i -> sigma[i]); returns
    (relabeled standard graph, sign).  Duplicate-edge and multi-hair sign
    ambiguities correspond to zero classes and are checked elsewhere."""
    sign = 1
    if f.verts_odd:
        sign *= perm_sign(sigma)
    new_edges = []
    for (a, b) in g.edges:
        x, y = sigma[a], sigma[b]
        if x > y:
            x, y = y, x
            if f.dirs_odd:
                sign = -sign
        new_edges.append((x, y))
    if f.edges_odd:
        order = sorted(range(len(new_edges)), key=lambda i: (new_edges[i], i))
        sign *= perm_sign([order.index(i) for i in range(len(new_edges))])
    hair_list = [sigma[u] for u, c in enumerate(g.hairs) for _ in range(c)]
    if f.hairs_odd:
        order = sorted(range(len(hair_list)), key=lambda i: (hair_list[i], i))
        sign *= perm_sign([order.index(i) for i in range(len(hair_list))])
    new_hairs = [0] * g.v
    for u in hair_list:
        new_hairs[u] += 1
    gg = HairyGraph(g.v, tuple(sorted(new_edges)), tuple(new_hairs))
    return gg, sign


def apply_permutation(g: HairyGraph, perm, flips, f: FlavorParams):
    """Relabel g by the vertex bijection perm, then reverse the edge
    directions listed in flips (indices into the relabeled sorted edge
    list).  Returns (graph, sign)."""
    if sorted(perm) != list(range(g.v)):
        raise GraphError("perm is not a bijection of the internal vertices")
    gg, sign = relabel_sign(g, list(perm), f)
    for idx in flips:
        if not (0 <= idx < len(gg.edges)):
            raise GraphError("flip index out of range")
        if f.dirs_odd:
            sign = -sign
    return gg, sign


# ---------------------------------------------------------------------------
# Canonical labeling: individualization + color refinement
# ---------------------------------------------------------------------------


def _refine_colors(g: HairyGraph, colors):
    """1-WL refinement with edge multiplicities; returns stable color ids."""
    v = g.v
    mult = {}
    tad = [0] * v
    for (a, b) in g.edges:
        if a == b:
            tad[a] += 1
        else:
            mult[(a, b)] = mult.get((a, b), 0) + 1
            mult[(b, a)] = mult.get((b, a), 0) + 1
    adj = [[] for _ in range(v)]
    for (a, b), c in mult.items():
        adj[a].append((b, c))
    while True:
        keys = []
        for x in range(v):
            nb = sorted((colors[y], c) for (y, c) in adj[x])
            keys.append((colors[x], tuple(nb)))
        ranks = {k: i for i, k in enumerate(sorted(set(keys)))}
        new = [ranks[k] for k in keys]
        if new == colors:
            return colors
        colors = new


def _initial_colors(g: HairyGraph):
    v = g.v
    deg = [0] * v
    tad = [0] * v
    for (a, b) in g.edges:
        deg[a] += 1
        deg[b] += 1
        if a == b:
            tad[a] += 1
    keys = [(deg[x], g.hairs[x], tad[x]) for x in range(v)]
    ranks = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [ranks[k] for k in keys]


def _search_labelings(g: HairyGraph):
    """Yield vertex relabelings sigma (lists) that are candidates for the
    canonical one, via individualization-refinement."""
    base = _refine_colors(g, _initial_colors(g))
    results = []

    def descend(colors, fixed_rank):
        cells = {}
        for x, c in enumerate(colors):
            cells.setdefault(c, []).append(x)
        nonsing = [c for c, xs in sorted(cells.items()) if len(xs) > 1]
        if not nonsing:
            order = sorted(range(g.v), key=lambda x: colors[x])
            sigma = [0] * g.v
            for pos, x in enumerate(order):
                sigma[x] = pos
            results.append(sigma)
            return
        target = nonsing[0]
        for x in cells[target]:
            new = list(colors)
            # individualize x: give it a fresh color just below its cell
            for y in range(g.v):
                new[y] = 2 * new[y]
            new[x] -= 1
            descend(_refine_colors(g, new), fixed_rank + 1)

    descend(base, 0)
    return results


def canonicalize(g: HairyGraph, f: FlavorParams, want_aut_count: bool = False):
    """Canonical form of a graph class.

    Returns (key, sign) where sign relates g's standard orientation to the
    canonical representative's, or (key, ZERO) if the class vanishes due to
    a sign-reversing automorphism.  Set want_aut_count to get a third value,
    the number of label-preserving automorphisms found.
    """
    cache_key = (g, f.m_par, f.n_par, f.kind, f.min_valence, want_aut_count)
    hit = _canon_cache.get(cache_key)
    if hit is not None:
        return hit
    out = _canonicalize(g, f, want_aut_count)
    if len(_canon_cache) > 400_000:
        _canon_cache.clear()
    _canon_cache[cache_key] = out
    return out


_canon_cache: dict = {}


def _canonicalize(g: HairyGraph, f: FlavorParams, want_aut_count: bool = False):
    check_valid(g, f)
    if g.is_line:
        sign = 1 if f.m_par == f.n_par else ZERO
        return (LINE_KEY, sign, 1) if want_aut_count else (LINE_KEY, sign)

    # structural zero classes from non-vertex automorphisms
    zero = False
    if f.min_valence == 3 and any(a == b for (a, b) in g.edges):
        zero = True  # tadpole-free convention in at-least-trivalent flavors
    if f.dirs_odd and any(a == b for (a, b) in g.edges):
        zero = True  # tadpole reversal
    if f.edges_odd and len(set(g.edges)) != len(g.edges):
        zero = True  # parallel edge swap
    if f.hairs_odd and any(c >= 2 for c in g.hairs):
        zero = True  # hair swap at one vertex

    best_key = None
    best = []  # (sign, encoding) for labelings achieving the minimum
    for sigma in _search_labelings(g):
        gg, sign = relabel_sign(g, sigma, f)
        enc = (gg.edges, gg.hairs)
        if best_key is None or enc < best_key:
            best_key = enc
            best = [sign]
        elif enc == best_key:
            best.append(sign)
    canon = HairyGraph(g.v, best_key[0], best_key[1])
    if not zero and any(s != best[0] for s in best):
        zero = True
    key = encode(canon)
    sign = ZERO if zero else best[0]
    if want_aut_count:
        return key, sign, len(best)
    return key, sign


def all_automorphism_signs(g: HairyGraph, f: FlavorParams):
    """Brute-force enumeration of vertex-permutation automorphism signs
    (test oracle; does not include parallel-edge/tadpole/hair swaps)."""
    signs = []
    for sigma in itertools.permutations(range(g.v)):
        gg, sign = relabel_sign(g, list(sigma), f)
        if gg.edges == g.edges and gg.hairs == g.hairs:
            signs.append(sign)
    return signs


# ---------------------------------------------------------------------------
# Linear combinations
# ---------------------------------------------------------------------------


class LinComb:
    """Finite formal sum of canonical graph keys with rational coefficients."""

    __slots__ = ("flavor", "terms")

    def __init__(self, flavor: FlavorParams, terms=None):
        self.flavor = flavor
        self.terms = dict(terms) if terms else {}

    def add_graph(self, g: HairyGraph, coeff: Fraction):
        if coeff == 0:
            return
        key, sign = canonicalize(g, self.flavor)
        if sign == ZERO:
            return
        self._accumulate(key, coeff * sign)

    def add_raw(self, raw: RawGraph, coeff: Fraction):
        if coeff == 0:
            return
        g, sign = standardize(raw, self.flavor)
        self.add_graph(g, coeff * sign)

    def _accumulate(self, key: str, coeff):
        cur = self.terms.get(key, 0) + coeff
        if cur == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = cur

    def __add__(self, other: "LinComb") -> "LinComb":
        if not self.flavor.same_parity(other.flavor):
            raise FlavorError("cannot add lin combs of different flavors")
        out = LinComb(self.flavor, self.terms)
        for k, c in other.terms.items():
            out._accumulate(k, c)
        return out

    def scale(self, q) -> "LinComb":
        if q == 0:
            return LinComb(self.flavor)
        return LinComb(self.flavor, {k: c * q for k, c in self.terms.items()})

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinComb)
            and self.flavor.same_parity(other.flavor)
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "LinComb(0)"
        body = " + ".join(f"({c})*[{k}]" for k, c in sorted(self.terms.items()))
        return f"LinComb({body})"


def lincomb_from_graph(g: HairyGraph, f: FlavorParams, coeff=Fraction(1)) -> LinComb:
    out = LinComb(f)
    out.add_graph(g, Fraction(coeff))
    return out
