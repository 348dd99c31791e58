"""On-disk cache of generated bases and assembled matrices.

Layout: <root>/<flavor>/<hairs>_<loops>/basis_<degree>.txt and
        <root>/<flavor>/<hairs>_<loops>/mat_<token>_<degree>.txt

The environment variable HGC_CACHE_DIR overrides the default root.  All
writes go through a temporary file in the same directory followed by an
atomic rename, so concurrent runs can share a cache safely.  Matrix
tokens must encode every parameter that affects the matrix content
(operator, window caps, codomain ordering); the block-assembly layer is
responsible for that.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .generate import Basis, basis_from_text, basis_to_text, generate_basis
from .graphs import FlavorParams
from .linalg import SparseMatrix

ENV_VAR = "HGC_CACHE_DIR"
DEFAULT_ROOT = "~/.cache/hairygc"


def default_root() -> Path:
    return Path(os.environ.get(ENV_VAR, DEFAULT_ROOT)).expanduser()


def fs_flavor_tag(f: FlavorParams) -> str:
    # actual m, n (not just parities): degrees stored in basis files
    # depend on them
    return f"m{f.m}_n{f.n}_{f.kind}{f.min_valence}"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Cache:
    """Basis/matrix cache.  With enabled=False everything recomputes and
    nothing is read or written (the --no-cache behaviour)."""

    def __init__(self, root: Path | str | None = None, enabled: bool = True):
        self.root = Path(root) if root is not None else default_root()
        self.enabled = enabled

    def cell_dir(self, f: FlavorParams, hairs: int, loops: int) -> Path:
        return self.root / fs_flavor_tag(f) / f"{hairs}_{loops}"

    # -- bases ------------------------------------------------------------

    def get_bases(self, f: FlavorParams, hairs: int, loops: int,
                  **gen_kw) -> list[Basis]:
        """The full list of per-degree bases of one (hairs, loops) cell."""
        if not self.enabled:
            return generate_basis(f, hairs, loops, **gen_kw)
        d = self.cell_dir(f, hairs, loops)
        marker = d / "complete"
        if marker.exists():
            caps = marker.read_text().strip()
            if caps == _caps_tag(gen_kw):
                out = []
                for p in sorted(d.glob("basis_*.txt")):
                    out.append(basis_from_text(p.read_text(), f))
                out.sort(key=lambda b: b.degree)
                return out
        bases = generate_basis(f, hairs, loops, **gen_kw)
        for b in bases:
            write_atomic(d / f"basis_{b.degree}.txt", basis_to_text(b))
        write_atomic(marker, _caps_tag(gen_kw) + "\n")
        return bases

    # -- matrices ----------------------------------------------------------

    def get_matrix(self, f: FlavorParams, hairs: int, loops: int,
                   token: str, degree: int, compute) -> SparseMatrix:
        """Matrix of the `token` operator with domain = this cell's basis
        at `degree`; `compute` produces it on a miss."""
        if not self.enabled:
            return compute()
        p = self.cell_dir(f, hairs, loops) / f"mat_{token}_{degree}.txt"
        if p.exists():
            return SparseMatrix.from_text(p.read_text())
        m = compute()
        write_atomic(p, m.to_text())
        return m

    # -- audits ------------------------------------------------------------

    def check(self) -> list:
        """Re-derive every cached basis file from scratch and report any
        that are not byte-identical (the cache-check command).  Matrix
        files are validated for parseability only (re-deriving them needs
        the original window context)."""
        bad = []
        if not self.root.exists():
            return bad
        for marker in self.root.glob("*/*/complete"):
            cell = marker.parent
            try:
                f, hairs, loops = _parse_cell_path(cell)
                kw = _caps_from_tag(marker.read_text().strip())
                fresh = {b.degree: basis_to_text(b)
                         for b in generate_basis(f, hairs, loops, **kw)}
            except Exception as exc:  # pragma: no cover - defensive
                bad.append((str(cell), f"re-derivation failed: {exc}"))
                continue
            for p in cell.glob("basis_*.txt"):
                deg = int(p.stem.split("_")[1])
                if fresh.get(deg) != p.read_text():
                    bad.append((str(p), "differs from fresh derivation"))
            for p in cell.glob("mat_*.txt"):
                try:
                    SparseMatrix.from_text(p.read_text())
                except Exception as exc:
                    bad.append((str(p), str(exc)))
        return bad


def _caps_tag(gen_kw: dict) -> str:
    parts = [f"{k}={gen_kw[k]}" for k in sorted(gen_kw)]
    return " ".join(parts) if parts else "default"


def _caps_from_tag(tag: str) -> dict:
    if tag == "default":
        return {}
    out = {}
    for part in tag.split():
        k, v = part.split("=")
        out[k] = int(v)
    return out


def _parse_cell_path(cell: Path):
    hairs, loops = (int(x) for x in cell.name.split("_"))
    tag = cell.parent.name
    mp, np_, rest = tag.split("_")
    m = int(mp[1:])
    n = int(np_[1:])
    kind = rest.rstrip("23")
    minval = int(rest[len(kind):])
    return FlavorParams(m, n, kind=kind, min_valence=minval), hairs, loops
