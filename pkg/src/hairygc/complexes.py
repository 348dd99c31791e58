"""Assembling block complexes of the graph differentials.

A *window* is a finite set of (hairs, loops) cells of one flavor.  For a
chosen differential token the bases of all cells are grouped into degree
slices and one matrix per consecutive degree pair is assembled.  Cell
ordering inside a slice is by (hairs, loops), so the layout is a pure
function of (flavor, cell set, token) and matrices can be cached.

Differential tokens (full differentials, not just the deformation term):

  delta        vertex splitting                     (any flavor)
  nabla        delta + one edge                     (bald, n even)
  delta-theta  delta + multi-edge series            (bald, n odd)
  D            delta + hair gathering               (hairy, m even)
  D-tilde      D + its twist                        (hairy, m even)
  Delta        delta + hair/edge exchange           (hairy, m odd)
  h0           delta + bracket with the one-hair MC element  (m = n parity)
  h1           delta + bracket with the hedgehog MC element  (m = n+1)

Windows that are not closed under the operator (the series terms of
delta-theta, D-tilde, h0, h1 leave any finite window) are *clipped*: the
out-of-window part of the image is dropped and the result is flagged
incomplete, so downstream consumers can mark window-edge cells as
indeterminate instead of reporting false dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cache import Cache
from .generate import generate_basis
from .graphs import FlavorParams, LinComb, decode, grading
from .linalg import BlockComplex, LinAlgError, SparseMatrix, assemble_matrix
from . import operators as ops


class WindowError(ValueError):
    pass


def _tok_delta(f, ctx):
    return ops.delta


def _tok_nabla(f, ctx):
    # adding an edge is degree +1 exactly when n = 0
    if f.is_hairy or f.n != 0:
        raise WindowError("nabla needs the bald flavor with n = 0")
    return lambda x: ops.delta(x) + ops.nabla(x)


def _tok_delta_theta(f, ctx):
    # the multi-edge terms are degree +1 exactly when n = 1
    if f.is_hairy or f.n != 1:
        raise WindowError("delta-theta needs the bald flavor with n = 1")
    max_loops = ctx["max_loops"]
    return lambda x: ops.delta_theta(x, max_loops)


def _tok_D(f, ctx):
    # gathering j hairs is degree +1 exactly when m = 0
    if not f.is_hairy or f.m != 0:
        raise WindowError("D needs a hairy flavor with m = 0")
    return ops.D_even


def _tok_D_tilde(f, ctx):
    if not f.is_hairy or f.m != 0:
        raise WindowError("D-tilde needs a hairy flavor with m = 0")
    max_s = ctx["max_s"]
    return lambda x: ops.D_tilde(x, max_s)


def _tok_Delta(f, ctx):
    # the hair-to-edge exchange is degree +1 exactly when m = -1
    if not f.is_hairy or f.m != -1:
        raise WindowError("Delta needs a hairy flavor with m = -1")
    return lambda x: ops.delta(x) + ops.Delta_odd(x)


def _tok_h0(f, ctx):
    # adding one hair is degree +1 exactly when m = n
    if not f.is_hairy or f.m != f.n:
        raise WindowError("h0 twist needs m = n")
    return lambda x: ops.delta(x) + ops.h0_twist(x)


def _tok_h1(f, ctx):
    # attaching a hedgehog is degree +1 exactly when m = n - 1
    if not f.is_hairy or f.m != f.n - 1:
        raise WindowError("h1 twist needs m = n - 1")
    max_hairs = ctx["max_hairs"]
    return lambda x: ops.delta(x) + ops.h1_twist(x, max_hairs)


@dataclass(frozen=True)
class OpInfo:
    factory: object          # (flavor, ctx) -> callable on LinComb
    offsets: object          # predicate (d_hairs, d_loops) -> bool
    closed: bool             # maps every finite closed window into itself
    clip_axis: str | None    # which axis grows without bound, if any


OPERATORS = {
    "delta": OpInfo(_tok_delta, lambda dh, dl: (dh, dl) == (0, 0),
                    True, None),
    "nabla": OpInfo(_tok_nabla, lambda dh, dl: dh == 0 and dl in (0, 1),
                    False, "loops"),
    "delta-theta": OpInfo(
        _tok_delta_theta,
        lambda dh, dl: dh == 0 and dl >= 0 and dl % 2 == 0,
        False, "loops"),
    "D": OpInfo(_tok_D, lambda dh, dl: dh + dl == 0 and dl >= 0,
                True, None),
    "D-tilde": OpInfo(
        _tok_D_tilde,
        lambda dh, dl: (dh + dl == 0 and dl >= 0) or dh + dl > 0,
        False, "s"),
    "Delta": OpInfo(_tok_Delta, lambda dh, dl: (dh, dl) in ((0, 0), (-1, 1)),
                    True, None),
    "h0": OpInfo(_tok_h0, lambda dh, dl: dl == 0 and dh in (0, 1),
                 False, "hairs"),
    "h1": OpInfo(_tok_h1,
                 lambda dh, dl: dl == 0 and dh >= 0 and dh % 2 == 0,
                 False, "hairs"),
}

# accepted alias from the table/figure nomenclature
ALIASES = {"delta-Delta": "Delta"}


def resolve_token(token: str) -> str:
    token = ALIASES.get(token, token)
    if token not in OPERATORS:
        raise WindowError(f"unknown differential {token!r}")
    return token


def canonical_flavor(token: str, m: int, n: int,
                     hairy: bool = True) -> FlavorParams:
    """The congruence representative of (m, n) that makes the chosen
    differential degree +1 with this package's degree convention
    deg = n*v + m*hairs + (1-n)*(edges+hairs).  Only the parities of
    (m, n) matter up to degree shifts; the shift is recorded by callers.
    """
    token = resolve_token(token)
    mp, np_ = m % 2, n % 2
    if token == "delta":
        if hairy:
            return FlavorParams(m, n)
        return FlavorParams(m, n, kind="bald", min_valence=3)
    if token == "nabla":
        if np_ != 0:
            raise WindowError("nabla needs n even")
        return FlavorParams(0, 0, kind="bald", min_valence=2)
    if token == "delta-theta":
        if np_ != 1:
            raise WindowError("delta-theta needs n odd")
        return FlavorParams(0, 1, kind="bald", min_valence=2)
    if token in ("D", "D-tilde"):
        if mp != 0:
            raise WindowError(f"{token} needs m even")
        return FlavorParams(0, np_)
    if token == "Delta":
        if mp != 1:
            raise WindowError("Delta needs m odd")
        return FlavorParams(-1, np_)
    if token == "h0":
        if mp != np_:
            raise WindowError("h0 twist needs m = n mod 2")
        return FlavorParams(np_, np_)
    # h1
    if mp != (np_ + 1) % 2:
        raise WindowError("h1 twist needs m = n + 1 mod 2")
    return FlavorParams(np_ - 1, np_)


@dataclass
class AssembledComplex:
    """A BlockComplex plus the provenance needed by spectral sequences and
    reports: which (hairs, loops) cell every basis element belongs to."""

    flavor: FlavorParams
    token: str
    cells: list                       # sorted (hairs, loops) pairs
    block: BlockComplex = None
    elements: dict = field(default_factory=dict)  # degree -> [(key, h, l)]
    complete: bool = True
    window_note: str = ""


def cell_bases(f, hairs, loops, cache: Cache | None = None, **gen_kw):
    """Per-degree bases of one cell, through the cache when given."""
    if cache is not None:
        return cache.get_bases(f, hairs, loops, **gen_kw)
    return generate_basis(f, hairs, loops, **gen_kw)


def _window_ctx(cells):
    hs = [h for h, _ in cells]
    ls = [l for _, l in cells]
    return {
        "max_hairs": max(hs),
        "max_loops": max(ls),
        "max_s": max(h + l for h, l in cells),
        "min_hairs": min(hs),
        "min_loops": min(ls),
    }


def _clipped(op, f, cells, info, ctx):
    """Wrap op so that image terms outside the window are dropped when the
    window is merely truncated in the operator's growth direction, and
    anything else missing still fails the completeness guard."""
    cellset = set(cells)

    def allowed_loss(gr):
        # degrees above the window are a quotient direction: dropping
        # them is exact on the degrees that remain
        if "max_degree" in ctx and gr.degree > ctx["max_degree"]:
            return True
        h, l = gr.hairs, gr.loops
        if info.clip_axis == "loops":
            return l > ctx["max_loops"]
        if info.clip_axis == "hairs":
            return h > ctx["max_hairs"]
        if info.clip_axis == "s":
            return h + l > ctx["max_s"]
        return False

    def wrapped(x: LinComb) -> LinComb:
        y = op(x)
        out = LinComb(y.flavor)
        for key, coeff in y.terms.items():
            g = decode(key)
            gr = grading(g, y.flavor)
            if (gr.hairs, gr.loops) in cellset and not allowed_loss(gr):
                out.add_graph(g, coeff)
            elif not allowed_loss(gr):
                raise LinAlgError(
                    f"operator output in cell ({gr.hairs},{gr.loops}) "
                    f"missing from window (incomplete basis?)"
                )
        return out

    return wrapped


def build_complex(f: FlavorParams, cells, token: str, *,
                  cache: Cache | None = None,
                  degree_shift: int = 0,
                  **gen_kw) -> AssembledComplex:
    """Assemble the `token` differential on the window `cells`.

    Degree slices concatenate the cells in sorted order.  Every matrix is
    checked against the operator's declared (hairs, loops) offsets.
    """
    token = resolve_token(token)
    info = OPERATORS[token]
    cells = sorted(set(cells))
    ctx = _window_ctx(cells)
    op = info.factory(f, ctx)

    per_cell = {}
    for (h, l) in cells:
        per_cell[(h, l)] = {
            b.degree: b
            for b in cell_bases(f, h, l, cache=cache,
                                degree_shift=degree_shift, **gen_kw)
        }
    degrees = sorted({d for m in per_cell.values() for d in m})
    if not degrees:
        return AssembledComplex(f, token, cells,
                                BlockComplex([], {}, {}), {}, True)
    degrees = list(range(min(degrees), max(degrees) + 1))

    complete = info.closed
    if f.min_valence == 2:
        # bivalent cells are infinite in the vertex direction and degree
        # is monotone in v, so the basis is only complete up to the
        # smallest per-cell top degree; clip the rest (a quotient).
        # bald degree is v + (1-n)(loops-1) + shift, monotone in v, so
        # the basis is complete exactly up to the vertex cap
        from .generate import DEFAULT_MAX_V
        v_cap = gen_kw.get("max_v", DEFAULT_MAX_V)
        ctx["max_degree"] = min(
            v_cap + (1 - f.n) * (l - 1) + degree_shift for _, l in cells)
        degrees = [d for d in degrees if d <= ctx["max_degree"]]
        per_cell = {c: {d: b for d, b in m.items()
                        if d <= ctx["max_degree"]}
                    for c, m in per_cell.items()}
        complete = False
    if not complete:
        op = _clipped(op, f, cells, info, ctx)

    def slice_bases(d):
        return [per_cell[c][d] for c in cells if d in per_cell[c]]

    elements = {}
    dims = {}
    for d in degrees:
        sl = slice_bases(d)
        elements[d] = [(k, b.hairs, b.loops) for b in sl for k in b.keys]
        dims[d] = len(elements[d])

    mats = {}
    for d in degrees:
        dom = slice_bases(d)
        cod = slice_bases(d + 1)
        if not dom:
            continue
        # cache per-cell domain columns; the codomain layout is determined
        # by (flavor, cells, token, caps) which the token string encodes
        cod_index = {k: i for i, (k, _, _) in enumerate(elements.get(d + 1, []))}
        cols = []
        cache_tok = _cache_token(token, info, ctx, gen_kw)
        for b in dom:
            def compute(b=b):
                return assemble_matrix(op, b, cod)
            if cache is not None and cache.enabled:
                m = cache.get_matrix(f, b.hairs, b.loops, cache_tok, d,
                                     compute)
            else:
                m = compute()
            cols.append((b, m))
        entries = {}
        off = 0
        for b, m in cols:
            if m.rows != len(cod_index) or m.cols != b.dim:
                raise LinAlgError("cached matrix shape mismatch; "
                                  "clear the cache directory")
            for (r, c), v in m.entries.items():
                entries[(r, off + c)] = v
            off += b.dim
        mat = SparseMatrix(len(cod_index), dims[d], entries)
        _check_offsets(mat, elements[d], elements.get(d + 1, []), info,
                       token)
        mats[d] = mat

    block = BlockComplex(degrees, dims, mats)
    note = ""
    if not complete:
        axes = [a for a in (info.clip_axis,
                            "degree" if "max_degree" in ctx else None) if a]
        note = (f"window clipped along {'/'.join(axes)}: "
                f"cells {cells[0]}..{cells[-1]}")
    return AssembledComplex(f, token, cells, block, elements, complete, note)


def _cache_token(token, info, ctx, gen_kw):
    parts = [token]
    if info.clip_axis == "loops":
        parts.append(f"L{ctx['max_loops']}")
    elif info.clip_axis == "hairs":
        parts.append(f"H{ctx['max_hairs']}")
    elif info.clip_axis == "s":
        parts.append(f"S{ctx['max_s']}")
    parts.append(f"w{ctx['min_hairs']}.{ctx['max_hairs']}."
                 f"{ctx['min_loops']}.{ctx['max_loops']}")
    for k in sorted(gen_kw):
        parts.append(f"{k}{gen_kw[k]}")
    return "-".join(parts)


def _check_offsets(mat, dom_elems, cod_elems, info: OpInfo, token: str):
    for (r, c) in mat.entries:
        _, h0, l0 = dom_elems[c]
        _, h1, l1 = cod_elems[r]
        if not info.offsets(h1 - h0, l1 - l0):
            raise LinAlgError(
                f"{token} maps cell ({h0},{l0}) to ({h1},{l1}), outside "
                f"its declared grading offsets"
            )


# ---------------------------------------------------------------------------
# Convenience windows
# ---------------------------------------------------------------------------


def cells_for_block_s(f: FlavorParams, s: int):
    """All cells with hairs + loops = s (hairy: hairs >= 1)."""
    if not f.is_hairy:
        return [(0, s)]
    return [(h, s - h) for h in range(1, s + 1)]


def cells_up_to_s(f: FlavorParams, max_s: int):
    out = []
    for s in range(1, max_s + 1):
        out.extend(cells_for_block_s(f, s))
    return sorted(out)


def cells_for_loop_window(f: FlavorParams, max_loops: int):
    """Bald window: all loop orders 1..max_loops."""
    return [(0, l) for l in range(1, max_loops + 1)]


def cells_for_hair_window(f: FlavorParams, loops: int, max_hairs: int):
    """Hairy window at fixed loop order, hairs 1..max_hairs."""
    return [(h, loops) for h in range(1, max_hairs + 1)]
