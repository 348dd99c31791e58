"""Command-line front end.

Commands
  basis        generate and list basis dimensions of one (hairs, loops) cell
  cohom        cohomology dimension tables for a chosen differential
  verify       run the identity suites (square-zero, chain maps, MC, ...)
  ss           spectral sequence page tables
  waterfall    cancellation pairing report (TSV)
  table        figure-style grid of delta-cohomology dimensions
  cache-check  re-derive cached artifacts and compare byte-for-byte

Flavors are selected by integers --m and --n; only their parities matter
up to degree shifts, and each differential needs a specific congruence
representative (e.g. the hair/edge exchange differential lives at m = -1).
The chosen representative is recorded in every output header.
"""

from __future__ import annotations

import argparse
import itertools
import sys

from fractions import Fraction

from . import operators as ops
from .cache import Cache
from .complexes import (OPERATORS, AssembledComplex, WindowError,
                        build_complex, canonical_flavor, cells_for_block_s,
                        cells_for_hair_window, cells_up_to_s, resolve_token)
from .generate import (ResourceCapError, generate_basis, generate_cell,
                       one_vertex_irreducible)
from .graphs import (FlavorParams, decode, flavor_tag, grading,
                     lincomb_from_graph)
from .linalg import cohomology_dims, verify_square_zero
from .specseq import (INDETERMINATE, FilteredComplex, cancellation_report,
                      waterfall_tsv)

COEFF_MODES = {"rat": "rational", "modp": "mod_p", "multip": "multi_p"}


def _parser():
    p = argparse.ArgumentParser(prog="hairygc", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("basis", "cohom", "verify", "ss", "waterfall", "table",
                 "cache-check"):
        sp = sub.add_parser(name)
        sp.add_argument("--m", type=int, default=0)
        sp.add_argument("--n", type=int, default=0)
        sp.add_argument("--diff", default="delta")
        sp.add_argument("--hairs", type=int, default=None)
        sp.add_argument("--loops", type=int, default=None)
        sp.add_argument("--block-s", type=int, default=None, dest="block_s")
        sp.add_argument("--max-s", type=int, default=None, dest="max_s")
        sp.add_argument("--max-v", type=int, default=14, dest="max_v")
        sp.add_argument("--coeff", choices=sorted(COEFF_MODES),
                        default="multip")
        sp.add_argument("--out", default=None)
        sp.add_argument("--cache-dir", default=None, dest="cache_dir")
        sp.add_argument("--no-cache", action="store_true", dest="no_cache")
        sp.add_argument("--figure-layout", action="store_true",
                        dest="figure_layout")
    return p


def _cache(args) -> Cache:
    return Cache(root=args.cache_dir, enabled=not args.no_cache)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flavor(args, hairy=None) -> FlavorParams:
    if hairy is None:
        hairy = args.hairs != 0
    return canonical_flavor(args.diff, args.m, args.n, hairy=hairy)


def _header(args, f: FlavorParams, extra=()) -> list:
    lines = [
        f"# flavor: {flavor_tag(f)} (representative m={f.m}, n={f.n};"
        f" requested m={args.m}, n={args.n}; complexes for congruent"
        f" parameters agree up to degree shifts)",
        f"# degree convention: deg = n*v + m*hairs + (1-n)*(edges+hairs)",
        f"# differential: {resolve_token(args.diff)}  coeff: "
        f"{COEFF_MODES[args.coeff]}  max_v: {args.max_v}",
    ]
    lines.extend(extra)
    return lines


def _window_cells(args, f: FlavorParams):
    """Resolve the window selection flags into a cell list."""
    token = resolve_token(args.diff)
    if not f.is_hairy:
        lmax = args.loops if args.loops is not None else args.max_s
        if lmax is None and args.block_s is not None:
            lmax = args.block_s
        if lmax is None:
            raise WindowError("bald windows need --loops, --block-s or "
                              "--max-s")
        if token == "delta" and args.loops is not None:
            return [(0, args.loops)]
        return [(0, l) for l in range(1, lmax + 1)]
    if args.hairs is not None and args.loops is not None:
        if token in ("h0", "h1"):
            # hair window at fixed loop order, hairs up to --hairs
            return cells_for_hair_window(f, args.loops, args.hairs)
        return [(args.hairs, args.loops)]
    if args.block_s is not None:
        return cells_for_block_s(f, args.block_s)
    if args.max_s is not None:
        return cells_up_to_s(f, args.max_s)
    raise WindowError("need --hairs/--loops, --block-s or --max-s")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_basis(args) -> int:
    f = _flavor(args)
    if args.hairs is None or args.loops is None:
        raise WindowError("basis needs --hairs and --loops")
    cache = _cache(args)
    bases = cache.get_bases(f, args.hairs, args.loops, max_v=args.max_v) \
        if cache.enabled else generate_basis(f, args.hairs, args.loops,
                                             max_v=args.max_v)
    lines = _header(args, f, [f"# cell: hairs={args.hairs} "
                              f"loops={args.loops}"])
    lines.append("degree\tdim")
    for b in bases:
        lines.append(f"{b.degree}\t{b.dim}")
    if not bases:
        lines.append("-\t0")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cohom_rows(args, f, cells, cache):
    token = resolve_token(args.diff)
    info = OPERATORS[token]
    rows = []
    notes = []
    if info.closed and token == "delta":
        # cell by cell: the finest decomposition
        for (h, l) in sorted(cells):
            ac = build_complex(f, [(h, l)], token, cache=cache,
                               max_v=args.max_v)
            dims = cohomology_dims(ac.block, COEFF_MODES[args.coeff])
            for d in sorted(dims):
                rows.append((h, l, d, dims[d]))
    else:
        # group cells into subcomplexes closed under the operator:
        # s-blocks for s-preserving operators, one window otherwise
        groups = []
        if info.closed:
            by_s = {}
            for (h, l) in cells:
                by_s.setdefault(h + l, []).append((h, l))
            groups = [by_s[s] for s in sorted(by_s)]
        else:
            groups = [sorted(cells)]
        for grp in groups:
            ac = build_complex(f, grp, token, cache=cache, max_v=args.max_v)
            dims = cohomology_dims(ac.block, COEFF_MODES[args.coeff])
            tag_h = "*" if len({h for h, _ in grp}) > 1 else grp[0][0]
            tag_l = "*" if len({l for _, l in grp}) > 1 else grp[0][1]
            for d in sorted(dims):
                rows.append((tag_h, tag_l, d, dims[d]))
            if not ac.complete:
                notes.append(f"# window note: {ac.window_note}; dimensions "
                             f"near the window edge are not truncation-safe")
    return rows, notes


def cmd_cohom(args) -> int:
    f = _flavor(args)
    cells = _window_cells(args, f)
    cache = _cache(args)
    rows, notes = _cohom_rows(args, f, cells, cache)
    lines = _header(args, f, notes)
    lines.append("# only nonzero cohomology dimensions are listed")
    if args.figure_layout and resolve_token(args.diff) == "delta":
        lines.extend(_figure_grid(rows))
    else:
        lines.append("hairs\tloops\tdegree\tdim")
        for h, l, d, v in rows:
            lines.append(f"{h}\t{l}\t{d}\t{v}")
    token = resolve_token(args.diff)
    if token == "Delta":
        nonzero = [r for r in rows if r[3]]
        if nonzero:
            lines.append(
                "# EVIDENCE-AGAINST-CONJECTURE: the twisted differential "
                "was conjectured acyclic, but nonzero classes were found "
                "at: " + "; ".join(f"(h={h}, l={l}, deg={d}): dim {v}"
                                   for h, l, d, v in nonzero))
        else:
            lines.append("# conjecture check: all computed dimensions are 0")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _figure_grid(rows) -> list:
    """Rows = hairs ascending, columns = loops; entries dim_deg tokens."""
    cells = {}
    for h, l, d, v in rows:
        if v:
            cells.setdefault((h, l), []).append(f"{v}_{d}")
    hs = sorted({h for h, l, d, v in rows})
    ls = sorted({l for h, l, d, v in rows})
    out = ["hairs\\loops\t" + "\t".join(str(l) for l in ls)]
    for h in hs:
        row = [str(h)]
        for l in ls:
            row.append(",".join(cells.get((h, l), ["."])))
        out.append("\t".join(row))
    return out


def cmd_table(args) -> int:
    args.figure_layout = True
    args.diff = "delta"
    return cmd_cohom(args)


def _ss_build(args):
    f = _flavor(args)
    token = resolve_token(args.diff)
    cells = _window_cells(args, f)
    cache = _cache(args)
    ac = build_complex(f, cells, token, cache=cache, max_v=args.max_v)
    axis = "hairs" if token in ("h0", "h1") else "loops"
    sequence = "first" if token in ("h0", "h1") else "second"
    fc = FilteredComplex(ac, axis=axis, rank_mode=COEFF_MODES[args.coeff])
    return f, fc, sequence


def cmd_ss(args) -> int:
    f, fc, _ = _ss_build(args)
    pages = fc.pages()
    lines = _header(args, f, [f"# filtration axis: {fc.axis} (decreasing)"])
    lines.append("page\tfiltration\tdegree\tdim")
    for page in pages:
        cells = sorted(set(page.dims) | {c for c, ok in page.safe.items()
                                         if not ok})
        for (p, d) in cells:
            e = page.entry(p, d)
            if e == INDETERMINATE:
                lines.append(f"{page.r}\t{p}\t{d}\t{INDETERMINATE}")
            elif e:
                lines.append(f"{page.r}\t{p}\t{d}\t{e}")
    rep = fc.e_infinity_check()
    if fc.truncated:
        lines.append("# E_infinity check skipped: truncated window")
    else:
        for d in sorted(rep):
            s, t, ok = rep[d]
            lines.append(f"# E_inf degree {d}: sum {s} vs total cohomology "
                         f"{t}: {'ok' if ok else 'MISMATCH'}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_waterfall(args) -> int:
    f, fc, sequence = _ss_build(args)
    pages = fc.pages()
    rep = cancellation_report(fc, pages, sequence)
    head = "\n".join(_header(args, f)) + "\n"
    _emit(args, head + waterfall_tsv(rep))
    return 0


def cmd_cache_check(args) -> int:
    cache = _cache(args)
    bad = cache.check()
    lines = [f"# cache root: {cache.root}"]
    if bad:
        for path, why in bad:
            lines.append(f"STALE\t{path}\t{why}")
    else:
        lines.append("OK\tall cached artifacts re-derive byte-identically")
    _emit(args, "\n".join(lines) + "\n")
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# verify: the identity suites
# ---------------------------------------------------------------------------


def _verify_square_zero(args, results):
    jobs = [
        ("delta", 0, 0, True), ("delta", 0, 1, True),
        ("delta", 1, 0, True), ("delta", 1, 1, True),
        ("D", 0, 0, True), ("D", 0, 1, True),
        ("Delta", 1, 0, True), ("Delta", 1, 1, True),
        ("h0", 0, 0, True), ("h0", 1, 1, True),
        ("h1", 1, 0, True), ("h1", 0, 1, True),
        ("nabla", 0, 0, False), ("delta-theta", 0, 1, False),
        ("D-tilde", 0, 0, True), ("D-tilde", 0, 1, True),
    ]
    smax = args.max_s if args.max_s is not None else 4
    for token, m, n, hairy in jobs:
        f = canonical_flavor(token, m, n, hairy=hairy)
        if token in ("h0", "h1"):
            # hair-raising twists need a hair window at fixed loop order
            cells = cells_for_hair_window(f, 1, smax + 1)
        elif hairy:
            cells = cells_up_to_s(f, smax)
        else:
            cells = [(0, l) for l in range(1, smax + 1)]
        # bivalent graphs admit long subdivided edges; cap the vertex
        # count to keep the enumeration tractable
        max_v = min(args.max_v, 8) if f.min_valence == 2 else args.max_v
        try:
            ac = build_complex(f, cells, token, max_v=max_v)
        except ResourceCapError as exc:
            results.append((f"square-zero {token} m%2={m % 2} n%2={n % 2}",
                            False, str(exc)))
            continue
        rep = verify_square_zero(ac.block)
        results.append((
            f"square-zero {token} m%2={m % 2} n%2={n % 2} s<={smax}",
            bool(rep),
            "" if rep else f"offending degree {rep.degree} col {rep.column}",
        ))


def _verify_mc(args, results):
    for n in (0, 1):
        f = FlavorParams(n, n)
        h0 = ops.h0_element(f)
        lhs = ops.delta(h0) + ops.bracket(h0, h0).scale(Fraction(1, 2))
        results.append((f"MC h0 (m=n={n})", lhs.is_zero(), ""))
    for (m, n) in ((0, 1), (1, 0)):
        f = FlavorParams(m, n)
        window = 7
        h1 = ops.h1_element(f, window)
        lhs = ops.delta(h1) + ops.bracket(h1, h1).scale(Fraction(1, 2))
        bad = [k for k, c in lhs.terms.items()
               if c and decode(k).n_hairs <= window - 2]
        results.append((f"MC h1 (m%2={m} n%2={n}, hairs<={window})",
                        not bad, ", ".join(bad[:3])))


def _verify_prop_chain_map(args, results, vmax=5):
    """(delta gamma)_1 = (-1)^n D gamma_1 - F(gamma) on 1vi trivalent
    graphs."""
    for n in (0, 1):
        fb = FlavorParams(0, n, kind="bald", min_valence=3)
        fh = FlavorParams(0, n)
        sign = 1 if n % 2 == 0 else -1
        ok, info = True, ""
        for l in range(3, 6):
            for v in range(4, min(2 * l - 2, vmax) + 1):
                for key in generate_cell(fb, 0, l, v):
                    g = decode(key)
                    if not one_vertex_irreducible(g):
                        continue
                    x = lincomb_from_graph(g, fb)
                    lhs = ops.vertex_delete(ops.delta(x), fh)
                    rhs = (ops.D_even(ops.vertex_delete(x, fh)).scale(sign)
                           + ops.F(x, fh).scale(-1))
                    if not (lhs - rhs).is_zero():
                        ok, info = False, key
        results.append((f"vertex-deletion chain map (n%2={n}, v<={vmax})",
                        ok, info))


def _verify_F_chain_map(args, results, vmax=5):
    for n in (0, 1):
        fb = FlavorParams(0, n, kind="bald", min_valence=3)
        fh = FlavorParams(n, n)
        ok, info = True, ""
        for l in (3, 4):
            for v in range(4, min(2 * l - 2, vmax) + 1):
                for key in generate_cell(fb, 0, l, v):
                    x = lincomb_from_graph(decode(key), fb)
                    r = ops.delta(ops.F(x, fh)) + ops.F(ops.delta(x), fh)
                    if not r.is_zero():
                        ok, info = False, key
        results.append((f"delta F = -F delta (n%2={n}, v<={vmax})", ok, info))


def _verify_anticommute(args, results):
    """delta Delta + Delta delta = 0 on small m=-1 graphs."""
    for n in (0, 1):
        f = FlavorParams(-1, n)
        ok, info = True, ""
        for h in (2, 3):
            for l in (0, 1, 2):
                for b in generate_basis(f, h, l):
                    for key in b.keys:
                        x = lincomb_from_graph(decode(key), f)
                        r = (ops.delta(ops.Delta_odd(x))
                             + ops.Delta_odd(ops.delta(x)))
                        if not r.is_zero():
                            ok, info = False, key
        results.append((f"delta/Delta anticommute (n%2={n})", ok, info))


def cmd_verify(args) -> int:
    results = []
    _verify_square_zero(args, results)
    _verify_mc(args, results)
    _verify_prop_chain_map(args, results)
    _verify_F_chain_map(args, results)
    _verify_anticommute(args, results)
    lines = []
    failed = 0
    for name, ok, info in results:
        status = "PASS" if ok else "FAIL"
        failed += 0 if ok else 1
        lines.append(f"{status}\t{name}" + (f"\t{info}" if info else ""))
    lines.append(f"# {len(results) - failed}/{len(results)} suites passed")
    _emit(args, "\n".join(lines) + "\n")
    return 1 if failed else 0


COMMANDS = {
    "basis": cmd_basis,
    "cohom": cmd_cohom,
    "verify": cmd_verify,
    "ss": cmd_ss,
    "waterfall": cmd_waterfall,
    "table": cmd_table,
    "cache-check": cmd_cache_check,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (WindowError, ResourceCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
