"""Exact sparse linear algebra over the rationals and prime fields.

Ranks are computed by sparse Gaussian elimination with Markowitz-style
pivoting (pick the entry minimising fill-in estimate (r-1)*(c-1)).  The
default `multi_p` mode works modulo primes above 2**15, escalating until
two primes agree, and spot-checks against the exact rational rank on
small matrices.  A mod-p rank is always a lower bound for the rational
rank, so agreement certifies the result for these sizes in practice.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .generate import Basis
from .graphs import decode, lincomb_from_graph

# primes just above 2**15, used for modular ranks
_PRIMES = (32771, 32779, 32783, 32789, 32797, 32801, 32803, 32831, 32833,
           32839, 32843, 32869, 32887, 32909, 32911, 32917, 32933, 32939)

# matrices at most this many nonzeros get a rational confirmation in
# multi_p mode (and in the dual-mode test suite)
RATIONAL_SPOT_CHECK_NNZ = 2000


class LinAlgError(ValueError):
    pass


@dataclass
class SparseMatrix:
    """A rows x cols matrix holding exact rational entries, no explicit
    zeros, as a dict {(row, col): Fraction}."""

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise LinAlgError(f"entry ({r},{c}) out of range")
            v = Fraction(v)
            if v:
                clean[(r, c)] = v
        self.entries = clean

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows,
            {(c, r): v for (r, c), v in self.entries.items()},
        )

    def __mul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise LinAlgError("shape mismatch in matrix product")
        by_row = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        out = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                out[(r, c)] = out.get((r, c), Fraction(0)) + v * w
        return SparseMatrix(self.rows, other.cols, out)

    def is_zero(self) -> bool:
        return not self.entries

    def column(self, j: int) -> dict:
        return {r: v for (r, c), v in self.entries.items() if c == j}

    def permuted(self, row_perm=None, col_perm=None) -> "SparseMatrix":
        rp = row_perm or list(range(self.rows))
        cp = col_perm or list(range(self.cols))
        return SparseMatrix(
            self.rows, self.cols,
            {(rp[r], cp[c]): v for (r, c), v in self.entries.items()},
        )

    # file format: header `rows=<R> cols=<C> nnz=<N>`, then `r c p/q` lines
    def to_text(self) -> str:
        lines = [f"rows={self.rows} cols={self.cols} nnz={self.nnz}"]
        for (r, c) in sorted(self.entries):
            lines.append(f"{r} {c} {self.entries[(r, c)]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SparseMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise LinAlgError("empty matrix file")
        head = dict(part.split("=") for part in lines[0].split())
        try:
            rows, cols, nnz = (int(head[k]) for k in ("rows", "cols", "nnz"))
        except KeyError as exc:
            raise LinAlgError(f"bad matrix header: {lines[0]!r}") from exc
        entries = {}
        for ln in lines[1:]:
            r, c, val = ln.split()
            entries[(int(r), int(c))] = Fraction(val)
        m = cls(rows, cols, entries)
        if m.nnz != nnz:
            raise LinAlgError(
                f"matrix file corrupt: header says nnz={nnz}, found {m.nnz}"
            )
        return m


def _rank_elimination(mat: SparseMatrix, p: int | None) -> int:
    """Sparse elimination; p=None works over Q, otherwise over GF(p)."""
    # rows as dicts col -> value
    rows = {}
    for (r, c), v in mat.entries.items():
        if p is not None:
            v = int(v.numerator * pow(v.denominator, -1, p)) % p
            if v == 0:
                continue
        rows.setdefault(r, {})[c] = v
    col_rows = {}  # col -> set of row ids containing it
    for r, row in rows.items():
        for c in row:
            col_rows.setdefault(c, set()).add(r)
    rank = 0
    while rows:
        # Markowitz: among a few sparsest columns pick the entry with the
        # smallest (len(row)-1)*(len(col)-1)
        best = None
        for c in sorted(col_rows, key=lambda c: len(col_rows[c]))[:8]:
            for r in col_rows[c]:
                score = (len(rows[r]) - 1) * (len(col_rows[c]) - 1)
                if best is None or score < best[0]:
                    best = (score, r, c)
            if best and best[0] == 0:
                break
        if best is None:
            break
        _, pr, pc = best
        rank += 1
        prow = rows.pop(pr)
        for c in prow:
            col_rows[c].discard(pr)
            if not col_rows[c]:
                del col_rows[c]
        pivot = prow[pc]
        if p is None:
            inv = 1 / pivot
        else:
            inv = pow(pivot, -1, p)
        targets = list(col_rows.get(pc, ()))
        for r in targets:
            row = rows[r]
            factor = row[pc] * inv
            if p is not None:
                factor %= p
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if p is not None:
                    nv %= p
                if nv:
                    if c not in row:
                        col_rows.setdefault(c, set()).add(r)
                    row[c] = nv
                elif c in row:
                    del row[c]
                    col_rows[c].discard(r)
                    if not col_rows[c]:
                        del col_rows[c]
            if not row:
                del rows[r]
    return rank


def rank(mat: SparseMatrix, mode: str = "multi_p",
         spot_check_nnz: int = RATIONAL_SPOT_CHECK_NNZ) -> int:
    """Exact rank.  mode: 'rational' | 'mod_p' (certified lower bound) |
    'multi_p' (escalate primes until two agree, rational spot-check on
    small matrices)."""
    if mat.nnz == 0:
        return 0
    if mode == "rational":
        return _rank_elimination(mat, None)
    if mode == "mod_p":
        return _rank_elimination(mat, _PRIMES[0])
    if mode != "multi_p":
        raise LinAlgError(f"unknown rank mode {mode!r}")
    seen = []
    for p in _PRIMES:
        seen.append(_rank_elimination(mat, p))
        if len(seen) >= 2 and seen[-1] == seen[-2]:
            break
    else:
        raise LinAlgError("modular ranks never stabilised")
    result = seen[-1]
    if mat.nnz <= spot_check_nnz:
        exact = _rank_elimination(mat, None)
        if exact != result:
            raise LinAlgError(
                f"modular rank {result} disagrees with rational rank {exact}"
            )
        return exact
    return result


def nullity(mat: SparseMatrix, mode: str = "multi_p") -> int:
    return mat.cols - rank(mat, mode)


# ---------------------------------------------------------------------------
# Assembling operator matrices over generated bases
# ---------------------------------------------------------------------------


def assemble_matrix(op, domain, codomain) -> SparseMatrix:
    """Matrix of a linear operator: column j holds op(domain[j]) in the
    codomain basis.  Either side may be a Basis or a sequence of them
    (degree slices of mixed (hairs, loops) cells, concatenated in order).
    Any output graph missing from the codomain raises: the codomain must
    be complete.
    """
    if isinstance(domain, Basis):
        domain = [domain]
    if isinstance(codomain, Basis):
        codomain = [codomain]
    index = {}
    for b in codomain:
        for k in b.keys:
            if k in index:
                raise LinAlgError(f"duplicate codomain element {k}")
            index[k] = len(index)
    entries = {}
    dom_keys = [(k, b.flavor) for b in domain for k in b.keys]
    for j, (key, flavor) in enumerate(dom_keys):
        image = op(lincomb_from_graph(decode(key), flavor))
        for k, coeff in image.terms.items():
            if k not in index:
                raise LinAlgError(
                    f"operator output {k} missing from codomain "
                    f"(incomplete basis?)"
                )
            entries[(index[k], j)] = coeff
    return SparseMatrix(len(index), len(dom_keys), entries)


# ---------------------------------------------------------------------------
# Block complexes and cohomology
# ---------------------------------------------------------------------------


@dataclass
class BlockComplex:
    """A finite cochain complex: bases indexed by consecutive integer
    degrees and one matrix per consecutive pair, mats[d]: C^d -> C^{d+1}."""

    degrees: list
    dims: dict           # degree -> dimension
    mats: dict           # degree -> SparseMatrix (C^d -> C^{d+1})
    labels: dict = field(default_factory=dict)  # degree -> metadata

    def __post_init__(self):
        for d, m in self.mats.items():
            if m.cols != self.dims.get(d, 0):
                raise LinAlgError(f"matrix at degree {d} has {m.cols} cols, "
                                  f"basis has {self.dims.get(d, 0)}")
            if m.rows != self.dims.get(d + 1, 0):
                raise LinAlgError(f"matrix at degree {d} has {m.rows} rows, "
                                  f"next basis has {self.dims.get(d + 1, 0)}")

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * dim for d, dim in self.dims.items())


@dataclass
class SquareZeroReport:
    ok: bool
    degree: int | None = None
    column: int | None = None

    def __bool__(self):
        return self.ok


def verify_square_zero(c: BlockComplex) -> SquareZeroReport:
    """Check d_{k+1} d_k = 0 for all consecutive pairs; on failure report
    the first offending (degree, column)."""
    for d in sorted(c.mats):
        if d + 1 not in c.mats:
            continue
        prod = c.mats[d + 1] * c.mats[d]
        if not prod.is_zero():
            col = min(cc for (_, cc) in prod.entries)
            return SquareZeroReport(False, d, col)
    return SquareZeroReport(True)


def cohomology_dims(c: BlockComplex, mode: str = "multi_p") -> dict:
    """dim H^d = dim C^d - rank(d: C^d -> C^{d+1}) - rank(d: C^{d-1} -> C^d),
    after asserting square-zero.  Also checks Euler characteristic
    consistency."""
    rep = verify_square_zero(c)
    if not rep:
        raise LinAlgError(
            f"differential does not square to zero at degree {rep.degree}, "
            f"column {rep.column}"
        )
    ranks = {d: rank(m, mode) for d, m in c.mats.items()}
    out = {}
    for d, dim in c.dims.items():
        out[d] = dim - ranks.get(d, 0) - ranks.get(d - 1, 0)
        if out[d] < 0:
            raise LinAlgError(f"negative cohomology dimension at degree {d}")
    lhs = sum((-1) ** d * dim for d, dim in c.dims.items())
    rhs = sum((-1) ** d * dim for d, dim in out.items())
    if lhs != rhs:
        raise LinAlgError(
            f"Euler characteristic mismatch: complex {lhs}, cohomology {rhs}"
        )
    return out


def random_permutation_invariance(mat: SparseMatrix, trials: int = 3,
                                  seed: int = 0, mode: str = "rational"):
    """Test helper: rank is unchanged by random row/column permutations."""
    rng = random.Random(seed)
    base = rank(mat, mode)
    for _ in range(trials):
        rp = list(range(mat.rows))
        cp = list(range(mat.cols))
        rng.shuffle(rp)
        rng.shuffle(cp)
        if rank(mat.permuted(rp, cp), mode) != base:
            return False
    return True
