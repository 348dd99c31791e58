"""The differentials and brackets of the (hairy) graph complexes.

Every operator is first defined on a single standard graph, returning a
LinComb, and extended linearly.  Output item orders follow fixed
conventions (new vertices appended last, new edges/hairs appended at the
end of the item list, items converted in place when a hair becomes an
edge or vice versa); all residual sign freedom is pinned by the
square-zero / chain-map test suite.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial

from .graphs import (
    HAIR,
    INT,
    FlavorError,
    FlavorParams,
    HairyGraph,
    LinComb,
    RawGraph,
    decode,
    grading,
    is_connected,
    line_graph,
)


class WindowError(ValueError):
    """A series operator was asked for a target outside its safe window."""


def apply_linear(op, x: LinComb, out_flavor: FlavorParams | None = None) -> LinComb:
    """Extend a graph-level operator (graph -> LinComb) linearly."""
    out = LinComb(out_flavor or x.flavor)
    for key, c in x.terms.items():
        out = out + op(decode(key)).scale(c)
    return out


# ---------------------------------------------------------------------------
# Half-edge slot helpers
# ---------------------------------------------------------------------------


def _slots_at(items, x):
    """Positions (item index, end) of all half-edges incident to x."""
    out = []
    for i, it in enumerate(items):
        if it[0] == INT:
            if it[1] == x:
                out.append((i, 1))
            if it[2] == x:
                out.append((i, 2))
        elif it[1] == x:
            out.append((i, 1))
    return out


def _move_slot(items, i, end, w):
    it = items[i]
    if it[0] == INT:
        items[i] = (INT, w, it[2]) if end == 1 else (INT, it[1], w)
    else:
        items[i] = (HAIR, w, -1)


def _odd_count(it, f):
    """Number of odd orientation objects an item carries: its edge (n even)
    plus, for a hair, its univalent endpoint (m odd)."""
    n = 1 if f.edges_odd else 0
    if it[0] == HAIR and f.ends_odd:
        n += 1
    return n


def _hair_to_edge(items, i, w, f) -> int:
    """Turn the hair at position i into an edge to w (keeping its direction
    away from its vertex).  Consuming the univalent endpoint removes it from
    the endpoint order, which costs a sign when endpoints are odd."""
    sign = 1
    if f.ends_odd:
        k = sum(_odd_count(items[j], f) for j in range(i + 1, len(items)))
        if k % 2:
            sign = -1
    items[i] = (INT, items[i][1], w)
    return sign


def _new_vertex_sign(f, n_hairs) -> int:
    """Appending a vertex to the vertex order places it before all hair
    endpoints in the combined orientation word (vertices first), so it
    crosses every endpoint; a sign results when both are odd."""
    if f.verts_odd and f.ends_odd and n_hairs % 2:
        return -1
    return 1


# ---------------------------------------------------------------------------
# delta: vertex splitting
# ---------------------------------------------------------------------------


def delta_graph(g: HairyGraph, f: FlavorParams) -> LinComb:
    """Split each vertex into two joined by a new edge, distributing the
    incident half-edges in all ways; each distribution counts 1/2 (the two
    roles of the new vertices are summed over).  Inadmissible results (a
    vertex below the minimum valence) are dropped, which also absorbs the
    'add an edge' counterterm of the unreduced formula."""
    out = LinComb(f)
    if g.is_line:
        return out
    base = RawGraph.from_graph(g)
    w = g.v
    half = Fraction(_new_vertex_sign(f, g.n_hairs), 2)
    for x in range(g.v):
        slots = _slots_at(base.items, x)
        nslots = len(slots)
        for r in range(nslots + 1):
            if r + 1 < f.min_valence or (nslots - r) + 1 < f.min_valence:
                continue
            for chosen in itertools.combinations(slots, r):
                items = list(base.items)
                for (i, end) in chosen:
                    _move_slot(items, i, end, w)
                items.append((INT, x, w))
                out.add_raw(RawGraph(g.v + 1, items), half)
    return out


def delta(x: LinComb) -> LinComb:
    return apply_linear(lambda g: delta_graph(g, x.flavor), x)


# ---------------------------------------------------------------------------
# nabla: add one edge (n even, bald)
# ---------------------------------------------------------------------------


def nabla_graph(g: HairyGraph, f: FlavorParams) -> LinComb:
    out = LinComb(f)
    for a in range(g.v):
        for b in range(a + 1, g.v):
            items = list(RawGraph.from_graph(g).items)
            items.append((INT, a, b))
            out.add_raw(RawGraph(g.v, items), Fraction(1))
    return out


def nabla(x: LinComb) -> LinComb:
    f = x.flavor
    if f.is_hairy or f.n_par != 0:
        raise FlavorError("nabla needs a bald flavor with n even")
    return apply_linear(lambda g: nabla_graph(g, f), x)


# ---------------------------------------------------------------------------
# Delta: reconnect one hair (m odd, hairy)
# ---------------------------------------------------------------------------


def Delta_graph(g: HairyGraph, f: FlavorParams) -> LinComb:
    out = LinComb(f)
    if g.is_line or g.n_hairs <= 1:
        return out
    base = RawGraph.from_graph(g)
    for i, it in enumerate(base.items):
        if it[0] != HAIR:
            continue
        u = it[1]
        for w in range(g.v):
            if w == u:
                continue
            items = list(base.items)
            sign = _hair_to_edge(items, i, w, f)
            out.add_raw(RawGraph(g.v, items), Fraction(sign))
    return out


def Delta_odd(x: LinComb) -> LinComb:
    f = x.flavor
    if not f.is_hairy or f.m_par != 1:
        raise FlavorError("Delta needs a hairy flavor with m odd")
    return apply_linear(lambda g: Delta_graph(g, f), x)


# ---------------------------------------------------------------------------
# D: delta + gathering hair subsets onto a new one-haired vertex (m even)
# ---------------------------------------------------------------------------


def _gather_graph(g: HairyGraph, f: FlavorParams, new_hairs: int, min_s: int,
                  coeff: Fraction) -> LinComb:
    """Move each subset S (|S| >= min_s) of hairs onto a new vertex that
    additionally carries `new_hairs` fresh hairs.  Disconnected or
    under-valent results are dropped."""
    out = LinComb(f)
    w = g.v
    coeff = coeff * _new_vertex_sign(f, g.n_hairs if not g.is_line else 2)
    if g.is_line:
        if min_s <= 2:
            items = [(INT, 0, 0)] + [(HAIR, 0, -1)] * new_hairs
            out.add_raw(RawGraph(1, items), coeff)
        return out
    base = RawGraph.from_graph(g)
    hair_pos = [i for i, it in enumerate(base.items) if it[0] == HAIR]
    # fresh hairs at the new vertex are oriented against the splitting
    # convention of the external vertex, costing a sign per hair (n odd)
    if f.dirs_odd and new_hairs % 2:
        coeff = -coeff
    for r in range(min_s, len(hair_pos) + 1):
        if r == 0 and g.v > 0:
            continue  # nothing to connect the new vertex
        if r + new_hairs < f.min_valence:
            continue
        for chosen in itertools.combinations(hair_pos, r):
            items = list(base.items)
            sign = 1
            for i in reversed(chosen):
                sign *= _hair_to_edge(items, i, w, f)
            items.extend([(HAIR, w, -1)] * new_hairs)
            out.add_raw(RawGraph(g.v + 1, items), coeff * sign)
    return out


def D_graph(g: HairyGraph, f: FlavorParams) -> LinComb:
    return delta_graph(g, f) + _gather_graph(g, f, 1, 2, Fraction(1))


def D_even(x: LinComb) -> LinComb:
    f = x.flavor
    if not f.is_hairy or f.m_par != 0:
        raise FlavorError("D needs a hairy flavor with m even")
    return apply_linear(lambda g: D_graph(g, f), x)


# ---------------------------------------------------------------------------
# Lie bracket on hairy graphs
# ---------------------------------------------------------------------------


def _attach_terms(gx: HairyGraph, gy: HairyGraph, f: FlavorParams,
                  out: LinComb, coeff: Fraction):
    """Attach one hair of gx to each internal vertex of gy; gx's vertices
    precede gy's in the combined order."""
    if gy.v == 0:
        return  # attachments target internal vertices only
    if gx.is_line:
        # gluing one end of the single edge leaves a plain hair behind.
        # The two ends contribute (consume first endpoint: sign -1 when
        # endpoints are odd, direction kept) + (consume second endpoint:
        # sign +1, direction reversed: -1 when directions are odd); the
        # leftover hair item then crosses all of gy's odd objects to reach
        # its place at the end of the word.
        base = RawGraph.from_graph(gy)
        ody = sum(_odd_count(it, f) for it in base.items) % 2
        per1 = (-1) ** ((1 + ody) if f.ends_odd else 0)
        per2 = ((-1) ** (ody if f.ends_odd else 0)) * (-1 if f.dirs_odd else 1)
        block = (1 if f.edges_odd else 0) + (1 if f.ends_odd else 0)
        cross = (-1) ** ((block * ody) % 2)
        total = (per1 + per2) * cross
        if total == 0:
            return
        for w in range(gy.v):
            items = list(base.items) + [(HAIR, w, -1)]
            out.add_raw(RawGraph(gy.v, items), total * coeff)
        return
    sh = gx.v
    # merging the two orientation words moves gx's hair endpoints past
    # gy's vertices
    if f.ends_odd and f.verts_odd and (gx.n_hairs * gy.v) % 2:
        coeff = -coeff
    items_x = RawGraph.from_graph(gx).items
    items_y = [
        (it[0], it[1] + sh, it[2] + sh if it[0] == INT else -1)
        for it in RawGraph.from_graph(gy).items
    ]
    combined = items_x + items_y
    for i, it in enumerate(items_x):
        if it[0] != HAIR:
            continue
        u = it[1]
        for w in range(gy.v):
            items = list(combined)
            sign = _hair_to_edge(items, i, sh + w, f)
            out.add_raw(RawGraph(sh + gy.v, items), coeff * sign)


def lie_parity(g: HairyGraph, f: FlavorParams) -> int:
    """Parity governing the bracket's Koszul signs.  Attaching removes one
    hair, so the bracket has degree -m; the Lie grading is shifted by m."""
    return (grading(g, f).degree + f.m) % 2


def bracket_pair(gx: HairyGraph, gy: HairyGraph, f: FlavorParams) -> LinComb:
    out = LinComb(f)
    px = lie_parity(gx, f)
    py = lie_parity(gy, f)
    # Attaching is an operation of degree -m; for m odd the suspension
    # signs (-1)^{m deg} make the antisymmetrized bracket satisfy the
    # graded Jacobi identity.  The overall sign is pinned by the
    # Maurer-Cartan equation for the hedgehog series.
    e1 = -((-1) ** (f.m * (py + 1)))
    e2 = (-1) ** (px * py) * ((-1) ** (f.m * (px + 1)))
    _attach_terms(gx, gy, f, out, Fraction(e1))
    _attach_terms(gy, gx, f, out, Fraction(e2))
    return out


def bracket(x: LinComb, y: LinComb) -> LinComb:
    if not x.flavor.same_parity(y.flavor):
        raise FlavorError("bracket needs matching flavors")
    out = LinComb(x.flavor)
    for kx, cx in x.terms.items():
        gx = decode(kx)
        for ky, cy in y.terms.items():
            out = out + bracket_pair(gx, decode(ky), x.flavor).scale(cx * cy)
    return out


# ---------------------------------------------------------------------------
# Maurer-Cartan elements and twists
# ---------------------------------------------------------------------------


def h0_element(f: FlavorParams) -> LinComb:
    if not f.is_hairy or f.m_par != f.n_par:
        raise FlavorError("the single-edge element needs m = n mod 2")
    out = LinComb(f)
    out.add_graph(line_graph(), Fraction(1))
    return out


def h1_element(f: FlavorParams, max_hairs: int) -> LinComb:
    """Hedgehog series sum 1/(2k+1)! (one vertex, 2k+1 hairs), truncated to
    hedgehogs with at most max_hairs hairs."""
    if not f.is_hairy or f.m_par == f.n_par:
        raise FlavorError("the hedgehog element needs m = n-1 mod 2")
    out = LinComb(f)
    k = 1
    while 2 * k + 1 <= max_hairs:
        h = 2 * k + 1
        out.add_graph(HairyGraph(1, (), (h,)), Fraction(1, factorial(h)))
        k += 1
    return out


def h0_twist(x: LinComb) -> LinComb:
    """Bracket with the single-edge element: adds hairs (+1 per vertex,
    times a conventional factor 2).  The element sits in the right slot so
    that delta + twist squares to zero under the derivation rule."""
    return bracket(x, h0_element(x.flavor))


def h1_twist(x: LinComb, max_out_hairs: int) -> LinComb:
    """Bracket with the hedgehog series, windowed so that every term with
    at most max_out_hairs output hairs is present."""
    if x.is_zero():
        return LinComb(x.flavor)
    min_h = min(decode(k).n_hairs for k in x.terms)
    # a hedgehog with 2k+1 hairs shifts the hair count by +2k
    need = max_out_hairs - min_h + 1
    if need < 3:
        need = 3
    return bracket(x, h1_element(x.flavor, need))


# ---------------------------------------------------------------------------
# Maps from the bald complexes
# ---------------------------------------------------------------------------


def _valences(g: HairyGraph):
    val = [g.hairs[u] for u in range(g.v)]
    for (a, b) in g.edges:
        val[a] += 1
        val[b] += 1
    return val


def F_graph(g: HairyGraph, target: FlavorParams) -> LinComb:
    out = LinComb(target)
    base = RawGraph.from_graph(g)
    val = _valences(g)
    for w in range(g.v):
        if any(val[u] + (u == w) < target.min_valence for u in range(g.v)):
            continue
        items = list(base.items) + [(HAIR, w, -1)]
        out.add_raw(RawGraph(g.v, items), Fraction(1))
    return out


def F(x: LinComb, target: FlavorParams) -> LinComb:
    if x.flavor.is_hairy or not target.is_hairy:
        raise FlavorError("F maps bald graphs into a hairy flavor")
    return apply_linear(lambda g: F_graph(g, target), x, out_flavor=target)


def F_prime_graph(g: HairyGraph, target: FlavorParams, max_hairs: int) -> LinComb:
    """Attach 2k+1 hairs in all ways, weight (-1)^k/(2k+1)! per ordered
    way (the same alternating series as the multi-edge differentials)."""
    out = LinComb(target)
    k = 0
    while 2 * k + 1 <= max_hairs:
        h = 2 * k + 1
        val = _valences(g)
        for targets in itertools.combinations_with_replacement(range(g.v), h):
            counts = [0] * g.v
            for t in targets:
                counts[t] += 1
            if any(val[u] + counts[u] < target.min_valence
                   for u in range(g.v)):
                continue
            ways = factorial(h)
            for c in counts:
                ways //= factorial(c)
            items = list(RawGraph.from_graph(g).items)
            for t in targets:
                items.append((HAIR, t, -1))
            out.add_raw(
                RawGraph(g.v, items),
                Fraction(ways * (-1) ** k, factorial(h)),
            )
        k += 1
    return out


def F_prime(x: LinComb, target: FlavorParams, max_hairs: int) -> LinComb:
    if x.flavor.is_hairy or not target.is_hairy or target.n_par != 1:
        raise FlavorError("F' maps bald graphs into a hairy flavor, n odd")
    return apply_linear(
        lambda g: F_prime_graph(g, target, max_hairs), x, out_flavor=target
    )


def vertex_delete_graph(g: HairyGraph, target: FlavorParams,
                        dir_sign: int = -1, pos_sign: int = -1) -> LinComb:
    """Delete each vertex in turn, the incident edges becoming hairs on the
    neighbours; a tadpole at the deleted vertex kills the term.  dir_sign /
    pos_sign fix the residual conventions for edge ends pointing into the
    deleted vertex and for its position in the vertex order (n odd)."""
    out = LinComb(target)
    for w in range(g.v):
        if g.v > 1 and not is_connected(
            g.v - 1,
            [(a - (a > w), b - (b > w)) for (a, b) in g.edges
             if a != w and b != w],
        ):
            continue  # deleting a cut vertex: zero
        if any(a == w and b == w for (a, b) in g.edges):
            continue
        # deletion preserves every surviving vertex's valence (incident
        # edges become hairs), so a term lands outside a stricter target
        # flavor exactly when a surviving vertex is already under-valent
        val = [0] * g.v
        for (a, b) in g.edges:
            val[a] += 1
            val[b] += 1
        for u in range(g.v):
            val[u] += g.hairs[u]
        if any(val[u] < target.min_valence for u in range(g.v) if u != w):
            continue
        sign = 1
        if target.verts_odd and pos_sign == -1 and (g.v - 1 - w) % 2:
            sign = -sign
        items = []
        for (a, b) in g.edges:
            aa = a if a < w else a - 1
            bb = b if b < w else b - 1
            if a == w:
                # the edge was directed w -> b; as a hair it points away
                # from b, i.e. it has been reversed
                if target.dirs_odd and dir_sign == -1:
                    sign = -sign
                items.append((HAIR, bb, -1))
            elif b == w:
                items.append((HAIR, aa, -1))
            else:
                items.append((INT, aa, bb))
        out.add_raw(RawGraph(g.v - 1, items), Fraction(sign))
    return out


def vertex_delete(x: LinComb, target: FlavorParams) -> LinComb:
    if x.flavor.is_hairy or not target.is_hairy:
        raise FlavorError("vertex deletion maps bald graphs into hairy ones")
    return apply_linear(
        lambda g: vertex_delete_graph(g, target), x, out_flavor=target
    )


# ---------------------------------------------------------------------------
# Windowed series differentials: delta_Theta (bald, n odd) and D-tilde
# ---------------------------------------------------------------------------


def _theta_new_vertex_terms(g, f, max_k, out, ext_allowed, coeff_sign=1):
    """Add a new vertex joined by 2k+1 edge ends distributed over the old
    vertices (and, for hairy flavors, the external vertex, where an end
    becomes a hair).  Weight: (ordered distributions)/(2k+1)!."""
    base = RawGraph.from_graph(g) if not g.is_line else RawGraph(0, [])
    w = g.v
    targets = list(range(g.v)) + ([-1] if ext_allowed else [])
    for k in range(1, max_k + 1):
        h = 2 * k + 1
        for combo in itertools.combinations_with_replacement(targets, h):
            if g.v > 0 and all(t == -1 for t in combo):
                continue  # would be disconnected
            counts = {}
            for t in combo:
                counts[t] = counts.get(t, 0) + 1
            ways = factorial(h)
            for c in counts.values():
                ways //= factorial(c)
            items = list(base.items)
            n_ext = 0
            for t in combo:
                if t == -1:
                    items.append((HAIR, w, -1))
                    n_ext += 1
                else:
                    items.append((INT, t, w))
            c = Fraction(coeff_sign * (-1) ** (k + 1) * ways, factorial(h))
            # an end landing on the external vertex becomes a hair at w,
            # which reverses its direction relative to the hair convention
            if f.dirs_odd and n_ext % 2:
                c = -c
            out.add_raw(RawGraph(g.v + 1, items), c)


def _theta_split_terms(g, f, max_k, out, coeff_sign=1):
    """Replace each vertex by two vertices joined by 2k+1 parallel edges,
    distributing the incident half-edges; weight 1/2 / (2k+1)!."""
    if g.is_line:
        return
    base = RawGraph.from_graph(g)
    w = g.v
    for k in range(1, max_k + 1):
        h = 2 * k + 1
        coeff = Fraction(coeff_sign * (-1) ** (k + 1), 2 * factorial(h))
        for x in range(g.v):
            slots = _slots_at(base.items, x)
            for r in range(len(slots) + 1):
                for chosen in itertools.combinations(slots, r):
                    items = list(base.items)
                    for (i, end) in chosen:
                        _move_slot(items, i, end, w)
                    items.extend([(INT, x, w)] * h)
                    out.add_raw(RawGraph(g.v + 1, items), coeff)


def delta_theta_graph(g: HairyGraph, f: FlavorParams, max_loops: int) -> LinComb:
    out = delta_graph(g, f)
    max_k = (max_loops - g.loops) // 2
    if max_k >= 1:
        # the two insertion directions carry opposite signs (the multi-edge
        # graphs have even degree), pinned by the windowed square-zero test
        _theta_new_vertex_terms(g, f, max_k, out, ext_allowed=False)
        _theta_split_terms(g, f, max_k, out, coeff_sign=-1)
    return out


def delta_theta(x: LinComb, max_loops: int) -> LinComb:
    f = x.flavor
    if f.is_hairy or f.n_par != 1:
        raise FlavorError("delta_Theta needs a bald flavor with n odd")
    return apply_linear(lambda g: delta_theta_graph(g, f, max_loops), x)


def D_tilde_graph(g: HairyGraph, f: FlavorParams, max_s: int) -> LinComb:
    """The twisted deformation of D, windowed so that all terms with
    hairs+loops <= max_s in the output are present.

    n even: D plus adding one edge between two distinct vertices of the
    one-external-vertex picture (internal-internal: a new edge;
    internal-external: a new hair).
    n odd: D plus the windowed multi-edge terms (a new vertex wired by
    2k+1 edge ends to internal vertices and/or the external vertex; a
    vertex replaced by a (2k+1)-fold multi-edge pair; a hair subset
    regathered onto a new vertex carrying 2k+1 fresh hairs).
    """
    out = D_graph(g, f)
    s = g.n_hairs + g.loops
    if f.n_par == 0:
        # mu twist: one new edge; raises s by 1
        if s + 1 <= max_s:
            if not g.is_line:
                base = RawGraph.from_graph(g)
                for a in range(g.v):
                    for b in range(a + 1, g.v):
                        items = list(base.items) + [(INT, a, b)]
                        out.add_raw(RawGraph(g.v, items), Fraction(1))
                for a in range(g.v):
                    items = list(base.items) + [(HAIR, a, -1)]
                    out.add_raw(RawGraph(g.v, items), Fraction(1))
        return out
    # Theta twist: the k-th term raises s by 2k
    max_k = (max_s - s) // 2
    if max_k >= 1:
        # sign split as in delta_theta: the two insertion directions carry
        # opposite signs; regathering is the split at the external vertex
        _theta_new_vertex_terms(g, f, max_k, out, ext_allowed=True)
        _theta_split_terms(g, f, max_k, out, coeff_sign=-1)
        for k in range(1, max_k + 1):
            h = 2 * k + 1
            out = out + _gather_graph(
                g, f, h, 1, Fraction(-((-1) ** (k + 1)), factorial(h))
            )
    return out


def D_tilde(x: LinComb, max_s: int) -> LinComb:
    f = x.flavor
    if not f.is_hairy or f.m_par != 0:
        raise FlavorError("D-tilde needs a hairy flavor with m even")
    return apply_linear(lambda g: D_tilde_graph(g, f, max_s), x)
