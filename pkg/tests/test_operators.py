"""Operator identities: square-zero, Lie algebra laws, chain maps."""

from fractions import Fraction

import pytest

from hairygc import operators as ops
from hairygc.generate import generate_basis, generate_cell, \
    one_vertex_irreducible
from hairygc.graphs import (FlavorParams, HairyGraph, decode, grading,
                            lincomb_from_graph)

EE = FlavorParams(0, 0)
EO = FlavorParams(0, 1)
OE = FlavorParams(1, 0)
OO = FlavorParams(1, 1)


def cell_elements(f, hairs, loops, **kw):
    for b in generate_basis(f, hairs, loops, **kw):
        for key in b.keys:
            yield lincomb_from_graph(decode(key), f)


@pytest.mark.parametrize("f", [EE, EO, OE, OO])
@pytest.mark.parametrize("hairs,loops", [(1, 2), (2, 1), (2, 2), (3, 1)])
def test_delta_squares_to_zero(f, hairs, loops):
    for x in cell_elements(f, hairs, loops):
        assert ops.delta(ops.delta(x)).is_zero()


@pytest.mark.parametrize("f", [EE, EO, OE, OO])
def test_delta_raises_degree_by_one(f):
    for x in cell_elements(f, 2, 2):
        d0 = grading(decode(next(iter(x.terms))), f).degree
        for key in ops.delta(x).terms:
            assert grading(decode(key), f).degree == d0 + 1


@pytest.mark.parametrize("f", [EE, EO, OE, OO])
def test_bracket_antisymmetry(f):
    elems = list(cell_elements(f, 1, 2)) + list(cell_elements(f, 2, 1))
    for x in elems[:4]:
        for y in elems[:4]:
            gx = decode(next(iter(x.terms)))
            gy = decode(next(iter(y.terms)))
            px = ops.lie_parity(gx, f)
            py = ops.lie_parity(gy, f)
            sign = -(-1) ** (px * py)
            lhs = ops.bracket(x, y)
            rhs = ops.bracket(y, x).scale(sign)
            assert (lhs - rhs).is_zero()


@pytest.mark.parametrize("f", [EE, OO])
def test_bracket_jacobi(f):
    elems = list(cell_elements(f, 1, 1)) + list(cell_elements(f, 1, 2))
    elems = elems[:3]
    for x in elems:
        for y in elems:
            for z in elems:
                px = ops.lie_parity(decode(next(iter(x.terms))), f)
                py = ops.lie_parity(decode(next(iter(y.terms))), f)
                pz = ops.lie_parity(decode(next(iter(z.terms))), f)
                total = (
                    ops.bracket(x, ops.bracket(y, z))
                    .scale((-1) ** (px * pz))
                    + ops.bracket(y, ops.bracket(z, x))
                    .scale((-1) ** (py * px))
                    + ops.bracket(z, ops.bracket(x, y))
                    .scale((-1) ** (pz * py))
                )
                assert total.is_zero()


@pytest.mark.parametrize("f", [EE, EO, OE, OO])
def test_delta_is_a_derivation_of_the_bracket(f):
    elems = list(cell_elements(f, 1, 2)) + list(cell_elements(f, 2, 1))
    for x in elems[:3]:
        for y in elems[:3]:
            py = ops.lie_parity(decode(next(iter(y.terms))), f)
            lhs = ops.delta(ops.bracket(x, y))
            rhs = (ops.bracket(ops.delta(x), y).scale((-1) ** py)
                   + ops.bracket(x, ops.delta(y)))
            assert (lhs - rhs).is_zero()


@pytest.mark.parametrize("n", [0, 1])
def test_h0_maurer_cartan_exact(n):
    f = FlavorParams(n, n)
    h0 = ops.h0_element(f)
    assert (ops.delta(h0)
            + ops.bracket(h0, h0).scale(Fraction(1, 2))).is_zero()


@pytest.mark.parametrize("m,n", [(0, 1), (1, 0)])
def test_h1_maurer_cartan_windowed(m, n):
    f = FlavorParams(m, n)
    window = 7
    h1 = ops.h1_element(f, window)
    lhs = ops.delta(h1) + ops.bracket(h1, h1).scale(Fraction(1, 2))
    # the hedgehog series only closes up asymptotically: terms with
    # more than window-2 hairs may be truncation artifacts
    for key, coeff in lhs.terms.items():
        assert decode(key).n_hairs > window - 2, (key, coeff)


@pytest.mark.parametrize("m,n,hairs,loops", [
    (0, 0, 2, 2), (0, 0, 3, 1), (0, 1, 2, 2), (0, 1, 3, 1)])
def test_D_squares_to_zero_and_preserves_s(m, n, hairs, loops):
    f = FlavorParams(m, n)
    for x in cell_elements(f, hairs, loops):
        y = ops.D_even(x)
        for key in y.terms:
            gr = grading(decode(key), f)
            assert gr.hairs + gr.loops == hairs + loops
        assert ops.D_even(y).is_zero()


@pytest.mark.parametrize("n", [0, 1])
def test_Delta_squares_to_zero_with_delta(n):
    f = FlavorParams(-1, n)
    for hairs, loops in ((2, 1), (3, 1), (2, 2)):
        for x in cell_elements(f, hairs, loops):
            d = lambda z: ops.delta(z) + ops.Delta_odd(z)
            assert d(d(x)).is_zero()


def test_Delta_kills_single_hair_and_avoids_tadpoles():
    f = FlavorParams(-1, 0)
    one_hair = HairyGraph(2, ((0, 1),) * 2, (1, 1))
    # reconnecting is only allowed to *other* vertices, and a graph with
    # one hair maps to zero
    for x in cell_elements(f, 1, 2):
        assert ops.Delta_odd(x).is_zero()
    y = ops.Delta_odd(lincomb_from_graph(one_hair, f)
                      + lincomb_from_graph(one_hair, f))
    for key in y.terms:
        assert all(a != b for (a, b) in decode(key).edges)


@pytest.mark.parametrize("n", [0, 1])
def test_h0_twisted_differential_squares_to_zero(n):
    f = FlavorParams(n, n)
    d = lambda x: ops.delta(x) + ops.h0_twist(x)
    for hairs, loops in ((1, 2), (2, 2)):
        for x in cell_elements(f, hairs, loops):
            y = d(d(x))
            assert y.is_zero()


@pytest.mark.parametrize("m,n", [(0, 1), (1, 0)])
def test_h1_twisted_differential_squares_to_zero_windowed(m, n):
    f = FlavorParams(m, n)
    window = 8
    d = lambda x: ops.delta(x) + ops.h1_twist(x, window)
    for x in cell_elements(f, 2, 2):
        y = d(d(x))
        # residual terms can only live beyond the hair window
        for key in y.terms:
            assert decode(key).n_hairs > window - 2


@pytest.mark.parametrize("n", [0, 1])
def test_vertex_deletion_chain_map(n):
    """(delta g)_1 = (-1)^n D(g_1) - F(g) on one-vertex-irreducible
    trivalent bald graphs."""
    fb = FlavorParams(0, n, kind="bald", min_valence=3)
    fh = FlavorParams(0, n)
    sign = (-1) ** n
    checked = 0
    for loops in (3, 4):
        for v in range(4, 2 * loops - 1):
            for key in generate_cell(fb, 0, loops, v):
                g = decode(key)
                if not one_vertex_irreducible(g):
                    continue
                x = lincomb_from_graph(g, fb)
                lhs = ops.vertex_delete(ops.delta(x), fh)
                rhs = (ops.D_even(ops.vertex_delete(x, fh)).scale(sign)
                       + ops.F(x, fh).scale(-1))
                assert (lhs - rhs).is_zero(), key
                checked += 1
    assert checked > 0


@pytest.mark.parametrize("n", [0, 1])
def test_F_anticommutes_with_delta(n):
    fb = FlavorParams(0, n, kind="bald", min_valence=3)
    fh = FlavorParams(n, n)
    for loops in (3, 4):
        for v in range(4, 2 * loops - 1):
            for key in generate_cell(fb, 0, loops, v):
                x = lincomb_from_graph(decode(key), fb)
                r = ops.delta(ops.F(x, fh)) + ops.F(ops.delta(x), fh)
                assert r.is_zero(), key


def test_D_tilde_relation_n_even():
    """On trivalent 1vi bald graphs, D-tilde(g_1) = ((delta+nabla)g)_1
    + F(g) for n = 0."""
    fb = FlavorParams(0, 0, kind="bald", min_valence=3)
    fh = FlavorParams(0, 0)
    max_s = 12
    for loops in (3, 4):
        for v in range(4, 2 * loops - 1):
            for key in generate_cell(fb, 0, loops, v):
                g = decode(key)
                if not one_vertex_irreducible(g):
                    continue
                x = lincomb_from_graph(g, fb)
                lhs = ops.D_tilde(ops.vertex_delete(x, fh), max_s)
                rhs = (ops.vertex_delete(ops.delta(x) + ops.nabla(x), fh)
                       + ops.F(x, fh))
                assert (lhs - rhs).is_zero(), key


def test_D_tilde_relation_n_odd():
    """On trivalent 1vi bald graphs, D-tilde(g_1) = -(delta_theta g)_1
    - F'(g) for n = 1."""
    fb = FlavorParams(0, 1, kind="bald", min_valence=3)
    fh = FlavorParams(0, 1)
    max_s, max_loops, max_hairs = 12, 12, 12
    for loops in (3, 4):
        for v in range(4, 2 * loops - 1):
            for key in generate_cell(fb, 0, loops, v):
                g = decode(key)
                if not one_vertex_irreducible(g):
                    continue
                x = lincomb_from_graph(g, fb)
                lhs = ops.D_tilde(ops.vertex_delete(x, fh), max_s)
                rhs = (ops.vertex_delete(
                            ops.delta_theta(x, max_loops), fh).scale(-1)
                       + ops.F_prime(x, fh, max_hairs).scale(-1))
                # the three series clip along different axes (s, loops,
                # hairs); residuals may only sit beyond the s window
                for k in (lhs - rhs).terms:
                    gr = grading(decode(k), fh)
                    assert gr.hairs + gr.loops > max_s, (key, k)


@pytest.mark.parametrize("n,max_loops", [(1, 8)])
def test_delta_theta_squares_to_zero_windowed(n, max_loops):
    f2 = FlavorParams(0, n, kind="bald", min_valence=2)
    for loops in (1, 2):
        for x in cell_elements(f2, 0, loops, max_v=5):
            y = ops.delta_theta(ops.delta_theta(x, max_loops), max_loops)
            # only terms clipped by the loop window may survive
            for key in y.terms:
                assert decode(key).loops > max_loops - 2


def test_nabla_squares_to_zero_with_delta():
    f2 = FlavorParams(0, 0, kind="bald", min_valence=2)
    d = lambda x: ops.delta(x) + ops.nabla(x)
    for loops in (1, 2):
        for x in cell_elements(f2, 0, loops, max_v=5):
            assert d(d(x)).is_zero()
