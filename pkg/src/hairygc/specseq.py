"""Spectral sequences of filtered finite cochain complexes.

The filtration is decreasing, spanned by basis elements (every basis
element has a filtration index, the differential never decreases it).
Page dimensions are computed from ranks of restricted matrices via

    Z_r^{p,d} = F^p C^d  intersect  d^{-1}(F^{p+r} C^{d+1})
    dim E_r^{p,d} = [Z_r^{p,d} - Z_{r-1}^{p+1,d}]
                  - [Z_{r-1}^{p-r+1,d-1} - Z_r^{p-r+1,d-1}]

with Z_0^{q} = F^q (valid because d never decreases the filtration).

When the underlying window is truncated along the filtration axis, a
cell (p, d) is reported on page r only if every space entering the
formula lies inside the window, i.e. [p-r+1, p+r-1] is within the
generated filtration range; other cells are marked indeterminate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import AssembledComplex
from .linalg import SparseMatrix, rank, verify_square_zero

INDETERMINATE = "indeterminate"


class FiltrationError(ValueError):
    pass


@dataclass
class SSPage:
    r: int
    dims: dict                 # (p, degree) -> dimension
    safe: dict = field(default_factory=dict)  # (p, degree) -> bool

    def dim(self, p, d):
        return self.dims.get((p, d), 0)

    def entry(self, p, d):
        if not self.safe.get((p, d), True):
            return INDETERMINATE
        return self.dims.get((p, d), 0)


class FilteredComplex:
    """A block complex whose basis elements carry a filtration index along
    `axis` ('hairs' or 'loops').  The filtration is decreasing: F^p is
    spanned by elements with index >= p."""

    def __init__(self, ac: AssembledComplex, axis: str = "hairs",
                 rank_mode: str = "multi_p"):
        if axis not in ("hairs", "loops"):
            raise FiltrationError(f"unknown filtration axis {axis!r}")
        self.ac = ac
        self.axis = axis
        self.rank_mode = rank_mode
        self.block = ac.block
        pick = (lambda h, l: h) if axis == "hairs" else (lambda h, l: l)
        self.filt = {
            d: [pick(h, l) for (_, h, l) in elems]
            for d, elems in ac.elements.items()
        }
        vals = [p for ps in self.filt.values() for p in ps]
        self.p_min = min(vals) if vals else 0
        self.p_max = max(vals) if vals else 0
        rep = verify_square_zero(self.block)
        if not rep:
            raise FiltrationError(
                f"differential does not square to zero at degree "
                f"{rep.degree}, column {rep.column}"
            )
        self._check_filtration()
        self._z_cache = {}

    # conservatively: any clipped window makes edge cells indeterminate
    @property
    def truncated(self) -> bool:
        return not self.ac.complete

    def _check_filtration(self):
        for d, m in self.block.mats.items():
            src = self.filt.get(d, [])
            dst = self.filt.get(d + 1, [])
            for (r, c) in m.entries:
                if dst[r] < src[c]:
                    raise FiltrationError(
                        f"differential lowers the filtration at degree {d}, "
                        f"column {c} ({src[c]} -> {dst[r]})"
                    )

    # -- dimension bookkeeping ---------------------------------------------

    def dim_F(self, p, d) -> int:
        return sum(1 for q in self.filt.get(d, []) if q >= p)

    def dim_Z(self, r, p, d) -> int:
        """dim of F^p C^d intersect d^{-1}(F^{p+r} C^{d+1}); r >= 0."""
        if r <= 0:
            return self.dim_F(p, d)
        key = (r, p, d)
        if key in self._z_cache:
            return self._z_cache[key]
        src = self.filt.get(d, [])
        cols = [j for j, q in enumerate(src) if q >= p]
        if not cols:
            self._z_cache[key] = 0
            return 0
        m = self.block.mats.get(d)
        if m is None:
            self._z_cache[key] = len(cols)
            return len(cols)
        dst = self.filt.get(d + 1, [])
        rows = [i for i, q in enumerate(dst) if q < p + r]
        rmap = {i: k for k, i in enumerate(rows)}
        cmap = {j: k for k, j in enumerate(cols)}
        sub = {}
        for (i, j), v in m.entries.items():
            if i in rmap and j in cmap:
                sub[(rmap[i], cmap[j])] = v
        subm = SparseMatrix(len(rows), len(cols), sub)
        out = len(cols) - rank(subm, self.rank_mode)
        self._z_cache[key] = out
        return out

    def page_dim(self, r, p, d) -> int:
        if r < 1:
            raise FiltrationError("pages start at r = 1")
        z = self.dim_Z(r, p, d) - self.dim_Z(r - 1, p + 1, d)
        b = (self.dim_Z(r - 1, p - r + 1, d - 1)
             - self.dim_Z(r, p - r + 1, d - 1))
        return z - b

    def cell_safe(self, r, p, d) -> bool:
        """Clipping drops image components at filtration > p_max only, and
        those are quotiented away in Z_r^{p} exactly when p + r <= p_max + 1;
        every space entering E_r^{p,d} then satisfies the same bound."""
        if not self.truncated:
            return True
        return p + r <= self.p_max + 1

    def r_stable(self) -> int:
        """A page number beyond which nothing can move (the filtration
        span plus one)."""
        return max(1, self.p_max - self.p_min + 1) + 1

    # -- pages --------------------------------------------------------------

    def pages(self, r_max: int | None = None) -> list:
        """E_1 .. E_{r_max}; E_1 is asserted to equal the cohomology of
        the associated graded complex."""
        if r_max is None:
            r_max = self.r_stable()
        cells = sorted({(p, d)
                        for d, ps in self.filt.items() for p in ps})
        out = []
        prev = None
        for r in range(1, r_max + 1):
            dims = {}
            safe = {}
            for (p, d) in cells:
                v = self.page_dim(r, p, d)
                if v < 0:
                    raise FiltrationError(
                        f"negative page dimension at r={r}, p={p}, d={d}"
                    )
                if v:
                    dims[(p, d)] = v
                safe[(p, d)] = self.cell_safe(r, p, d)
            page = SSPage(r, dims, safe)
            if prev is not None:
                for (p, d), v in dims.items():
                    if page.safe[(p, d)] and prev.safe.get((p, d), True) \
                            and v > prev.dim(p, d):
                        raise FiltrationError(
                            f"page dims increased at r={r}, p={p}, d={d}"
                        )
            out.append(page)
            prev = page
        self._assert_E1(out[0])
        return out

    def _assert_E1(self, e1: SSPage):
        for (p, d), want in self._assoc_graded_cohomology().items():
            if e1.dim(p, d) != want:
                raise FiltrationError(
                    f"E_1 at (p={p}, d={d}) is {e1.dim(p, d)}, but the "
                    f"associated graded cohomology is {want}"
                )

    def _assoc_graded_cohomology(self) -> dict:
        """Cohomology of the filtration-degree-0 part of the differential,
        cell by cell."""
        out = {}
        ranks = {}
        for d, m in self.block.mats.items():
            src = self.filt.get(d, [])
            dst = self.filt.get(d + 1, [])
            by_p = {}
            for (i, j), v in m.entries.items():
                if dst[i] == src[j]:
                    by_p.setdefault(src[j], {})[(i, j)] = v
            for p, sub in by_p.items():
                rows = sorted({i for (i, _) in sub})
                cols = sorted({j for (_, j) in sub})
                rmap = {i: k for k, i in enumerate(rows)}
                cmap = {j: k for k, j in enumerate(cols)}
                mm = SparseMatrix(
                    len(rows), len(cols),
                    {(rmap[i], cmap[j]): v for (i, j), v in sub.items()},
                )
                ranks[(p, d)] = rank(mm, self.rank_mode)
        for d, ps in self.filt.items():
            counts = {}
            for p in ps:
                counts[p] = counts.get(p, 0) + 1
            for p, dim in counts.items():
                h = dim - ranks.get((p, d), 0) - ranks.get((p, d - 1), 0)
                if h:
                    out[(p, d)] = h
        return out

    # -- convergence ---------------------------------------------------------

    def total_cohomology(self) -> dict:
        from .linalg import cohomology_dims
        return cohomology_dims(self.block, self.rank_mode)

    def e_infinity_check(self) -> dict:
        """Per degree: (sum of E_infinity dims, total cohomology dim,
        equal?).  Only meaningful for untruncated windows."""
        r = self.r_stable()
        report = {}
        total = self.total_cohomology()
        for d in self.block.dims:
            s = sum(self.page_dim(r, p, d)
                    for p in sorted(set(self.filt.get(d, []))))
            t = total.get(d, 0)
            report[d] = (s, t, s == t)
        return report


# ---------------------------------------------------------------------------
# Waterfall cancellation report
# ---------------------------------------------------------------------------


@dataclass
class Cancellation:
    page: int
    src: tuple      # (degree, hairs, loops)
    dst: tuple
    mult: int
    sequence: str


def _cell_trigrade(ac: AssembledComplex, axis, p, d):
    """(degree, hairs, loops) of a filtration cell, if unique."""
    hs, ls = set(), set()
    for (_, h, l) in ac.elements.get(d, []):
        if (h if axis == "hairs" else l) == p:
            hs.add(h)
            ls.add(l)
    h = hs.pop() if len(hs) == 1 else None
    l = ls.pop() if len(ls) == 1 else None
    return (d, h, l)


def cancellation_report(fc: FilteredComplex, pages: list,
                        sequence: str = "first") -> list:
    """Pair the dimension drops between consecutive pages.

    On page r the differential maps (p, d) -> (p+r, d+1); the drop
    recurrence  E_{r+1}(p,d) = E_r(p,d) - out(p,d) - out(p-r,d-1)
    determines the multiplicities `out` cell by cell (minimal page first,
    then lexicographic, per the declared pairing heuristic).
    """
    out = []
    for k in range(len(pages) - 1):
        er, enext = pages[k], pages[k + 1]
        r = er.r
        cells = sorted(set(er.dims) | set(enext.dims))
        rho = {}
        for (p, d) in cells:
            drop = er.dim(p, d) - enext.dim(p, d)
            give = rho.get((p - r, d - 1), 0)
            rho[(p, d)] = drop - give
            if rho[(p, d)] < 0:
                raise FiltrationError(
                    f"inconsistent cancellation bookkeeping at r={r}, "
                    f"p={p}, d={d}"
                )
        for (p, d) in sorted(rho):
            m = rho[(p, d)]
            if not m:
                continue
            src = _cell_trigrade(fc.ac, fc.axis, p, d)
            dst = _cell_trigrade(fc.ac, fc.axis, p + r, d + 1)
            out.append(Cancellation(r, src, dst, m, sequence))
    return out


def waterfall_tsv(cancellations: list) -> str:
    lines = ["page\tsrc_deg\tsrc_hairs\tsrc_loops\t"
             "dst_deg\tdst_hairs\tdst_loops\tmult\tsequence"]

    def fmt(x):
        return "?" if x is None else str(x)

    for c in cancellations:
        lines.append("\t".join([
            str(c.page),
            fmt(c.src[0]), fmt(c.src[1]), fmt(c.src[2]),
            fmt(c.dst[0]), fmt(c.dst[1]), fmt(c.dst[2]),
            str(c.mult), c.sequence,
        ]))
    return "\n".join(lines) + "\n"
