"""Spectral sequences: page dimensions, convergence, cancellations."""

import pytest

from hairygc.complexes import (build_complex, canonical_flavor,
                               cells_for_block_s, cells_for_hair_window)
from hairygc.specseq import (INDETERMINATE, Cancellation, FiltrationError,
                             FilteredComplex, cancellation_report,
                             waterfall_tsv)


def d_sequence(s, n=0):
    f = canonical_flavor("D", 0, n)
    ac = build_complex(f, cells_for_block_s(f, s), "D")
    return FilteredComplex(ac, axis="loops")


def test_constant_filtration_equals_cohomology():
    """With the differential preserving the filtration cell (delta on a
    single cell), E_1 already equals the total cohomology and no page
    moves."""
    f = canonical_flavor("delta", 0, 0)
    ac = build_complex(f, [(1, 3)], "delta")
    fc = FilteredComplex(ac, axis="hairs")
    pages = fc.pages(r_max=3)
    total = fc.total_cohomology()
    for page in pages:
        assert {d: v for (p, d), v in page.dims.items()} == total
    rep = fc.e_infinity_check()
    assert all(ok for (_, _, ok) in rep.values())


def test_wrong_axis_is_rejected():
    # D lowers the hair count, so hairs is not a decreasing filtration
    f = canonical_flavor("D", 0, 0)
    ac = build_complex(f, cells_for_block_s(f, 4), "D")
    with pytest.raises(FiltrationError):
        FilteredComplex(ac, axis="hairs")
    with pytest.raises(FiltrationError):
        FilteredComplex(ac, axis="sideways")


@pytest.mark.parametrize("n", [0, 1])
def test_D_sequence_E1_is_delta_cohomology_and_E_inf_vanishes(n):
    """The loop filtration of the hair-gathering differential: page 1 is
    the plain delta-cohomology cell by cell, and everything cancels."""
    fc = d_sequence(4, n)
    pages = fc.pages()
    # E_1 = associated graded cohomology is asserted inside pages();
    # the abutment must be zero because the total complex is acyclic
    last = pages[-1]
    assert last.dims == {}
    rep = fc.e_infinity_check()
    for d, (s, t, ok) in rep.items():
        assert ok and s == 0 and t == 0


def test_D_sequence_cancellations_pair_adjacent_cells():
    fc = d_sequence(4, 0)
    pages = fc.pages()
    cans = cancellation_report(fc, pages, "second")
    total = 0
    for c in cans:
        assert c.dst[0] == c.src[0] + 1  # degree +1
        # page-r differential moves r steps up in loop order
        assert c.dst[2] == c.src[2] + c.page
        assert c.dst[1] == c.src[1] - c.page  # s is preserved
        total += c.mult
    # everything present on E_1 must eventually cancel
    e1_total = sum(pages[0].dims.values())
    assert 2 * total == e1_total


def test_waterfall_tsv_format():
    rows = waterfall_tsv([
        Cancellation(2, (6, 3, 1), (7, 1, 3), 1, "second"),
        Cancellation(1, (4, None, 2), (5, None, 3), 2, "first"),
    ]).strip().split("\n")
    assert rows[0].split("\t") == [
        "page", "src_deg", "src_hairs", "src_loops",
        "dst_deg", "dst_hairs", "dst_loops", "mult", "sequence"]
    assert rows[1].split("\t") == ["2", "6", "3", "1", "7", "1", "3",
                                   "1", "second"]
    assert rows[2].split("\t") == ["1", "4", "?", "2", "5", "?", "3",
                                   "2", "first"]


def test_truncated_windows_mark_edge_cells():
    f = canonical_flavor("h0", 0, 0)
    ac = build_complex(f, cells_for_hair_window(f, 1, 5), "h0")
    fc = FilteredComplex(ac, axis="hairs")
    assert fc.truncated
    pages = fc.pages(r_max=3)
    p2 = pages[1]
    # a cell at the top of the hair window cannot be trusted at page 2
    assert not fc.cell_safe(2, fc.p_max, 0)
    assert fc.cell_safe(2, fc.p_max - 2, 0)
    # entries report the indeterminate marker
    for (p, d), safe in p2.safe.items():
        if not safe:
            assert p2.entry(p, d) == INDETERMINATE


def test_corrupted_filtration_is_flagged():
    """Injecting a matrix entry that lowers the filtration must raise."""
    from fractions import Fraction
    f = canonical_flavor("D", 0, 1)
    ac = build_complex(f, cells_for_block_s(f, 4), "D")
    # find a degree with elements at two distinct loop orders
    for d, elems in ac.elements.items():
        loops = sorted({l for (_, _, l) in elems})
        if len(loops) >= 2 and d in ac.block.mats and \
                ac.elements.get(d + 1):
            hi = next(i for i, (_, _, l) in enumerate(elems)
                      if l == loops[-1])
            lo = next(i for i, (_, _, l) in enumerate(ac.elements[d + 1])
                      if l == min(x for (_, _, x) in ac.elements[d + 1]))
            if ac.elements[d + 1][lo][2] < loops[-1]:
                ac.block.mats[d].entries[(lo, hi)] = Fraction(1)
                with pytest.raises(FiltrationError):
                    FilteredComplex(ac, axis="loops")
                return
    pytest.skip("no suitable injection point in this window")
