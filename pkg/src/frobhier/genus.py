"""Genus-one and genus-two jet functions and their evaluations.

The genus-two free energy of a semisimple Frobenius manifold is a finite sum
of rational expressions in the canonical-coordinate jets u_i', ..., u_i'''',
the frame lengths h_i, the constant matrix V, and differences u_i - u_j.
Each summand is encoded as structured data; a model instantiates the sum over
index assignments (indices that would put a vanishing difference into a
denominator are excluded; V_ii = 0 prunes the rest).

The genus-one free energy log(tau_I / J^(1/24)) + (1/24) sum log u_i' is kept
as a log-linear object: a rational multiple of log(u_1 - u_2) plus multiples
of log u_i'.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Optional

from .errors import UnsupportedModel
from .evaluate import evaluate_on_solution
from .frobenius import FrobeniusModel
from .jets import JetPoly
from .rational import JetRational
from .scalars import ExactScalar
from .series import TauSeries

# -- genus-2 term table -----------------------------------------------------------
#
# Each term: (coeff, V, h, num_poly, den_jets, u_num, u_den)
#   coeff:    Fraction
#   V:        tuple of index pairs, one per V factor
#   h:        dict sym -> net power (negative powers in the denominator)
#   num_poly: list of (Fraction, {(sym, order): power}) building the jet
#             polynomial in the numerator (order >= 1)
#   den_jets: dict (sym, order) -> power
#   u_num:    tuple of (a, b) pairs: factors (u_a - u_b) in the numerator
#   u_den:    tuple of (a, b) pairs: factors (u_a - u_b) in the denominator

F = Fraction
i, j, k, l = "i", "j", "k", "l"


def _t(coeff, V=(), h=None, num=None, den=None, u_num=(), u_den=()):
    return (F(coeff), tuple(V), dict(h or {}), num or [(F(1), {})],
            dict(den or {}), tuple(u_num), tuple(u_den))


def _m(expr: dict) -> list:
    """Single-monomial numerator."""
    return [(F(1), dict(expr))]


GENUS2_TERMS = [
    # pure n = 1 block
    _t(F(1, 1152), h={i: -2}, num=_m({(i, 4): 1}), den={(i, 1): 2}),
    _t(F(-7, 1920), h={i: -2}, num=_m({(i, 2): 1, (i, 3): 1}), den={(i, 1): 3}),
    _t(F(1, 360), h={i: -2}, num=_m({(i, 2): 3}), den={(i, 1): 4}),
    # V^2 u''' terms
    _t(F(1, 40), V=((i, j), (i, j)), h={i: -2}, num=_m({(i, 3): 1}),
       den={(i, 1): 1}, u_den=((i, j),)),
    _t(F(1, 640), V=((i, j),), h={j: 1, i: -3},
       num=_m({(j, 1): 1, (i, 3): 1}), den={(i, 1): 2}, u_den=((i, j),)),
    _t(F(-19, 2880), V=((i, j),), h={j: 1, i: -3},
       num=_m({(i, 3): 1}), den={(i, 1): 1}, u_den=((i, j),)),
    _t(F(1, 1152), V=((i, j),), h={i: 1, j: -3},
       num=_m({(i, 3): 1}), den={(j, 1): 1}, u_den=((i, j),)),
    # V^2 V and V V^2 u'' terms
    _t(F(7, 40), V=((i, j), (i, j), (i, k), (i, k)), h={i: -2},
       num=_m({(i, 2): 1}), u_den=((i, j), (i, k))),
    _t(F(-1, 240), V=((i, j), (i, j), (i, k)), h={k: 1, i: -3},
       num=[(F(32), {(i, 2): 1, (i, 1): 1}), (F(-7), {(i, 2): 1, (k, 1): 1})],
       den={(i, 1): 1}, u_den=((i, j), (i, k))),
    _t(F(1, 40), V=((i, j), (j, k), (j, k)), h={i: 1, j: -3},
       num=_m({(i, 2): 1}), u_den=((i, j), (j, k))),
    _t(F(-1, 48), V=((i, j), (j, k), (j, k)), h={i: -1, j: -1},
       num=_m({(j, 1): 1, (i, 2): 1}), den={(i, 1): 1}, u_den=((i, j), (j, k))),
    _t(F(-3, 64), V=((i, j), (i, j)), h={i: -2},
       num=_m({(i, 2): 1}), u_den=((i, j), (i, j))),
    _t(F(-11, 480), V=((i, j), (i, j)), h={i: -2},
       num=_m({(i, 2): 2}), den={(i, 1): 2}, u_den=((i, j),)),
    _t(F(29, 5760), V=((i, j), (j, k)), h={i: 1, k: 1, j: -4},
       num=[(F(1), {(i, 2): 1, (k, 1): 1}), (F(-2), {(i, 2): 1, (j, 1): 1})],
       den={(j, 1): 1}, u_den=((i, j), (j, k))),
    _t(F(1, 1920), V=((i, j), (i, k)), h={j: 1, k: 1, i: -4},
       num=[(F(54), {(i, 2): 1, (i, 1): 2}),
            (F(-25), {(i, 2): 1, (i, 1): 1, (j, 1): 1}),
            (F(-1), {(i, 2): 1, (j, 1): 1, (k, 1): 1})],
       den={(i, 1): 2}, u_den=((i, j), (i, k))),
    _t(F(1, 384), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=[(F(1), {(i, 2): 1, (i, 1): 1}), (F(-1), {(i, 2): 1, (k, 1): 1})],
       den={(j, 1): 1}, u_den=((i, j), (i, k))),
    _t(F(-1, 384), V=((i, k), (j, k)), h={i: 1, j: -3},
       num=_m({(k, 1): 1, (i, 2): 1}), den={(j, 1): 1}, u_den=((i, k), (j, k))),
    _t(F(1, 576), V=((i, j), (j, k)), h={k: 1, i: -1, j: -2},
       num=[(F(2), {(i, 2): 1, (j, 1): 1}), (F(-1), {(i, 2): 1, (k, 1): 1})],
       den={(i, 1): 1}, u_den=((i, j), (j, k))),
    _t(F(-1, 5760), V=((i, j), (j, k)), h={k: 1, i: -3},
       num=[(F(27), {(k, 1): 1, (i, 2): 1, (i, 1): 1}),
            (F(1), {(k, 1): 2, (i, 2): 1})],
       den={(i, 1): 2}, u_den=((j, k), (i, k))),
    _t(F(-19, 1920), V=((i, j), (j, k)), h={k: 1, i: -3},
       num=_m({(i, 2): 1}), u_den=((i, j), (i, k))),
    _t(F(1, 5760), V=((i, j), (j, k)), h={k: 1, i: -3},
       num=[(F(27), {(i, 1): 1, (k, 1): 1, (i, 2): 1}),
            (F(-1), {(j, 1): 2, (i, 2): 1}),
            (F(2), {(j, 1): 1, (k, 1): 1, (i, 2): 1})],
       den={(i, 1): 2}, u_den=((i, j), (j, k))),
    _t(F(1, 288), V=((i, j), (j, k)), h={i: 1, k: -3},
       num=_m({(i, 2): 1}), u_den=((j, k), (i, k))),
    _t(F(1, 384), V=((i, j), (j, k)), h={i: 1, k: -3},
       num=_m({(i, 1): 1, (i, 2): 1}), den={(k, 1): 1}, u_den=((i, j), (i, k))),
    _t(F(-1, 576), V=((i, j), (j, k)), h={i: -1, k: -1},
       num=_m({(k, 1): 1, (i, 2): 1}), den={(i, 1): 1}, u_den=((j, k), (i, k))),
    # V u''^2 and u'' u'' mixed terms
    _t(F(1, 1920), V=((i, j),), h={j: 1, i: -3},
       num=[(F(11), {(i, 2): 2, (i, 1): 1}), (F(-5), {(i, 2): 2, (j, 1): 1})],
       den={(i, 1): 3}, u_den=((i, j),)),
    _t(F(-1, 5760), V=((i, j),), h={j: 1, i: -3},
       num=_m({(i, 2): 1, (j, 2): 1}), den={(i, 1): 2}, u_den=((i, j),)),
    _t(F(1, 5760), V=((i, j),), h={j: 1, i: -3},
       num=[(F(57), {(i, 2): 1, (i, 1): 2}),
            (F(-27), {(i, 2): 1, (i, 1): 1, (j, 1): 1}),
            (F(-1), {(i, 2): 1, (j, 1): 2})],
       den={(i, 1): 2}, u_den=((i, j), (i, j))),
    _t(F(1, 1152), V=((i, j),), h={i: 1, j: -3},
       num=[(F(4), {(i, 2): 1, (j, 1): 1}), (F(-3), {(i, 2): 1, (i, 1): 1})],
       den={(j, 1): 1}, u_den=((i, j), (i, j))),
    _t(F(-1, 576), V=((i, j),), h={i: -1, j: -1},
       num=_m({(j, 1): 1, (i, 2): 1}), den={(i, 1): 1}, u_den=((i, j), (i, j))),
    _t(F(-1, 1152), V=((i, j),), h={i: -1, j: -1},
       num=_m({(i, 2): 1, (j, 2): 1}), den={(i, 1): 1, (j, 1): 1}, u_den=((i, j),)),
    # quartic-V u'^2 block
    _t(F(1, 10), V=((i, j), (i, j), (i, k), (i, k), (i, l), (i, l)), h={i: -2},
       num=_m({(i, 1): 2}), u_den=((i, j), (i, k), (i, l))),
    _t(F(-7, 20), V=((i, j), (i, j), (i, k), (i, k), (i, l)), h={l: 1, i: -3},
       num=_m({(i, 1): 2}), u_den=((i, j), (i, k), (i, l))),
    _t(F(7, 40), V=((i, j), (i, j), (i, k), (i, k), (i, l)), h={l: 1, i: -3},
       num=_m({(i, 1): 1, (l, 1): 1}), u_den=((i, j), (i, k), (i, l))),
    _t(F(-1, 8), V=((i, j), (i, j), (i, k), (k, l), (k, l)), h={i: -1, k: -1},
       num=_m({(i, 1): 1, (k, 1): 1}), u_den=((i, j), (i, k), (k, l))),
    _t(F(1, 40), V=((i, j), (i, j), (i, k), (k, l)), h={l: 1, i: -3},
       num=[(F(1), {(k, 1): 2}), (F(-3), {(i, 1): 2}), (F(-2), {(k, 1): 1, (l, 1): 1})],
       u_den=((i, j), (i, k), (k, l))),
    _t(F(3, 40), V=((i, j), (i, j), (i, k), (k, l)), h={l: 1, i: -3},
       num=_m({(i, 1): 1, (l, 1): 1}), u_den=((i, j), (i, k), (i, l))),
    _t(F(1, 40), V=((i, j), (i, j), (i, k), (k, l)), h={l: 1, i: -3},
       num=[(F(3), {(i, 1): 2}), (F(1), {(l, 1): 2})],
       u_den=((i, j), (k, l), (i, l))),
    _t(F(1, 48), V=((i, j), (i, j), (i, k), (k, l)), h={l: 1, i: -1, k: -2},
       num=[(F(2), {(i, 1): 1, (k, 1): 1}), (F(-1), {(i, 1): 1, (l, 1): 1})],
       u_den=((i, j), (i, k), (k, l))),
    _t(F(5, 96), V=((i, j), (i, j), (i, k), (i, l)), h={k: 1, l: 1, i: -4},
       num=[(F(4), {(i, 1): 2}), (F(-4), {(i, 1): 1, (k, 1): 1}),
            (F(1), {(k, 1): 1, (l, 1): 1})],
       u_den=((i, j), (i, k), (i, l))),
    _t(F(-83, 480), V=((i, j), (i, j), (i, k), (i, k)), h={i: -2},
       num=_m({(i, 1): 2}), u_den=((i, j), (i, k), (i, k))),
    _t(F(1, 144), V=((i, j), (i, k), (j, l), (k, l)), h={i: -2},
       num=_m({(i, 1): 2}), u_den=((i, k), (j, l), (i, l))),
    _t(F(-1, 144), V=((i, j), (i, k), (j, l), (k, l)), h={i: -2},
       num=_m({(i, 1): 2}), u_den=((i, j), (i, k), (k, l))),
    _t(F(-1, 48), V=((i, j), (i, j), (i, k), (k, l)), h={i: -1, l: -1},
       num=_m({(i, 1): 1, (l, 1): 1}), u_den=((i, j), (k, l), (i, l))),
    _t(F(29, 1920), V=((i, j), (i, k), (j, l)), h={k: 1, l: 1, i: -4},
       num=[(F(1), {(k, 1): 1, (l, 1): 1}), (F(-1), {(i, 1): 1, (k, 1): 1}),
            (F(2), {(i, 1): 2}), (F(-1), {(i, 1): 1, (l, 1): 1})],
       u_den=((i, j), (i, k), (i, l))),
    _t(F(-29, 5760), V=((i, j), (i, k), (j, l)), h={k: 1, l: 1, i: -4},
       num=[(F(2), {(l, 1): 2, (i, 1): 1}), (F(-1), {(l, 1): 2, (k, 1): 1})],
       den={(i, 1): 1}, u_den=((i, k), (j, l), (i, l))),
    _t(F(-29, 5760), V=((i, j), (i, k), (j, l)), h={k: 1, l: 1, i: -4},
       num=[(F(2), {(j, 1): 1, (k, 1): 1, (l, 1): 1}),
            (F(2), {(j, 1): 2, (i, 1): 1}),
            (F(-1), {(j, 1): 2, (k, 1): 1}),
            (F(-4), {(j, 1): 1, (i, 1): 1, (l, 1): 1})],
       den={(i, 1): 1}, u_den=((i, j), (i, k), (j, l))),
    _t(F(-1, 1152), V=((i, j), (i, k), (j, l)), h={k: 1, l: 1, i: -2, j: -2},
       num=[(F(4), {(i, 1): 1, (j, 1): 1}), (F(-4), {(i, 1): 1, (l, 1): 1}),
            (F(1), {(k, 1): 1, (l, 1): 1})],
       u_den=((i, j), (i, k), (j, l))),
    _t(F(-1, 384), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=[(F(1), {(i, 1): 1, (j, 1): 2}), (F(-2), {(j, 1): 1, (i, 1): 1, (l, 1): 1})],
       den={(k, 1): 1}, u_den=((i, j), (i, k), (j, l))),
    _t(F(1, 1152), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=[(F(1), {(i, 1): 3}), (F(-3), {(i, 1): 2, (l, 1): 1})],
       den={(k, 1): 1}, u_den=((i, j), (i, k), (i, l))),
    _t(F(-1, 384), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=_m({(i, 1): 1, (l, 1): 2}), den={(k, 1): 1}, u_den=((i, k), (j, l), (i, l))),
    _t(F(-1, 1152), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=[(F(3), {(j, 1): 2, (l, 1): 1}), (F(-2), {(j, 1): 3})],
       den={(k, 1): 1}, u_den=((i, j), (j, l), (j, k))),
    _t(F(-1, 288), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=[(F(1), {(j, 1): 2}), (F(-2), {(j, 1): 1, (l, 1): 1})],
       u_den=((i, k), (j, l), (j, k))),
    _t(F(1, 576), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=[(F(2), {(k, 1): 2}), (F(-3), {(k, 1): 1, (l, 1): 1})],
       u_den=((i, k), (j, k), (k, l))),
    _t(F(-1, 1152), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=_m({(l, 1): 3}), den={(k, 1): 1}, u_den=((j, l), (k, l), (i, l))),
    _t(F(1, 288), V=((i, j), (i, k), (j, l)), h={l: 1, k: -3},
       num=_m({(l, 1): 2}), u_den=((i, k), (j, l), (k, l))),
    _t(F(-1, 576), V=((i, j), (i, k), (j, l)), h={k: 1, i: -2, l: -1},
       num=[(F(1), {(l, 1): 1, (k, 1): 1}), (F(-2), {(l, 1): 1, (i, 1): 1})],
       u_den=((i, k), (j, l), (i, l))),
    _t(F(-1, 1152), V=((i, j), (i, k), (j, l)), h={k: -1, l: -1},
       num=_m({(k, 1): 1, (l, 1): 1}), u_den=((i, k), (j, l), (k, l))),
    _t(F(-7, 1440), V=((i, j), (i, k), (i, l)), h={j: 1, k: 1, l: 1, i: -5},
       num=[(F(8), {(i, 1): 3}), (F(-12), {(i, 1): 2, (j, 1): 1}),
            (F(-1), {(j, 1): 1, (k, 1): 1, (l, 1): 1}),
            (F(6), {(i, 1): 1, (j, 1): 1, (k, 1): 1})],
       den={(i, 1): 1}, u_den=((i, j), (i, k), (i, l))),
    _t(F(-29, 1152), V=((i, j), (i, k), (j, k)), h={i: -2},
       num=_m({(i, 1): 2}), u_den=((i, j), (i, k), (i, k))),
    _t(F(-1, 320), V=((i, j), (i, j), (i, k)), h={k: 1, i: -3},
       num=[(F(3), {(i, 1): 2}), (F(-8), {(k, 1): 2})],
       u_den=((i, j), (i, k), (i, k))),
    _t(F(-53, 1920), V=((i, j), (i, j), (i, k)), h={k: 1, i: -3},
       num=_m({(i, 1): 1, (k, 1): 1}), u_den=((i, j), (i, k), (j, k))),
    _t(F(-1), V=((i, j), (i, j), (i, k)), h={k: 1, i: -3},
       num=[(F(27, 640), {(i, 1): 1, (k, 1): 1}), (F(-233, 2880), {(i, 1): 2})],
       u_den=((i, j), (i, j), (j, k))),
    _t(F(-1), V=((i, j), (i, j), (i, k)), h={k: 1, i: -3},
       num=[(F(233, 2880), {(i, 1): 2}), (F(-67, 960), {(i, 1): 1, (k, 1): 1})],
       u_den=((i, k), (i, k), (j, k))),
    _t(F(1, 1152), V=((i, j), (i, j), (i, k)), h={i: 1, k: -3},
       num=_m({(i, 1): 3}), den={(k, 1): 1}, u_den=((i, j), (i, k), (i, k))),
    _t(F(-1, 576), V=((i, j), (i, j), (i, k)), h={i: 1, k: -3},
       num=_m({(i, 1): 3}), den={(k, 1): 1}, u_den=((i, j), (i, j), (i, k))),
    _t(F(-1, 48), V=((i, j), (i, j), (i, k)), h={i: -1, k: -1},
       num=_m({(i, 1): 1, (k, 1): 1}), u_den=((i, j), (i, k), (i, k))),
    _t(F(233, 1440), V=((i, j), (i, j), (i, j)), h={j: 1, i: -3},
       num=_m({(i, 1): 2}), u_den=((i, j), (i, j), (i, j))),
    _t(F(-43, 384), V=((i, j), (i, j), (i, j)), h={j: 1, i: -3},
       num=_m({(i, 1): 1, (j, 1): 1}), u_den=((i, j), (i, j), (i, j))),
    _t(F(-1, 12), V=((i, j), (i, j), (i, j)), h={i: -1, j: -1},
       num=_m({(i, 1): 1, (j, 1): 1}), u_den=((i, j), (i, j), (i, j))),
    _t(F(29, 5760), V=((i, j), (i, k)), h={j: 1, k: 1, i: -4},
       num=[(F(1), {(j, 1): 1, (k, 1): 2}), (F(-6), {(j, 1): 1, (k, 1): 1, (i, 1): 1})],
       den={(i, 1): 1}, u_den=((i, j), (i, k), (i, k))),
    _t(F(29, 5760), V=((i, j), (i, k)), h={j: 1, k: 1, i: -4},
       num=[(F(3), {(i, 1): 1, (k, 1): 1}), (F(3), {(j, 1): 1, (k, 1): 1}),
            (F(6), {(i, 1): 1, (j, 1): 1}), (F(-6), {(i, 1): 2}),
            (F(-2), {(j, 1): 2})],
       u_den=((i, j), (i, j), (i, k))),
    _t(F(1, 576), V=((i, j), (i, k)), h={k: 1, i: -2, j: -1},
       num=[(F(2), {(j, 1): 1, (i, 1): 1}), (F(-1), {(j, 1): 1, (k, 1): 1})],
       u_den=((i, j), (i, j), (i, k))),
    _t(F(1, 1152), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=[(F(3), {(i, 1): 2, (k, 1): 1}), (F(-3), {(i, 1): 1, (k, 1): 2}),
            (F(1), {(k, 1): 3}), (F(-1), {(i, 1): 3})],
       den={(j, 1): 1}, u_num=((i, j),), u_den=((i, k), (i, k), (j, k), (j, k))),
    _t(F(1, 576), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=[(F(-1), {(i, 1): 3}), (F(3), {(j, 1): 2, (k, 1): 1}),
            (F(-4), {(i, 1): 1, (j, 1): 1, (k, 1): 1}),
            (F(2), {(i, 1): 2, (j, 1): 1}), (F(-2), {(j, 1): 3})],
       den={(j, 1): 1}, u_num=((i, k),), u_den=((i, j), (i, j), (j, k), (j, k))),
    _t(F(1, 384), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=[(F(-1), {(i, 1): 1, (k, 1): 2}), (F(1), {(i, 1): 3}),
            (F(-6), {(j, 1): 2, (k, 1): 1})],
       den={(j, 1): 1}, u_den=((i, j), (j, k), (j, k))),
    _t(F(1, 288), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=[(F(4), {(i, 1): 1, (j, 1): 1, (k, 1): 1}),
            (F(1), {(j, 1): 1, (k, 1): 2}), (F(-2), {(i, 1): 2, (j, 1): 1}),
            (F(3), {(j, 1): 3})],
       den={(j, 1): 1}, u_den=((i, j), (j, k), (j, k))),
    _t(F(1, 384), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=[(F(2), {(i, 1): 1, (k, 1): 2}), (F(-1), {(i, 1): 2, (k, 1): 1}),
            (F(-1), {(k, 1): 3})],
       den={(j, 1): 1}, u_den=((i, k), (j, k), (j, k))),
    _t(F(1, 288), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=[(F(1), {(j, 1): 1, (k, 1): 2}), (F(-2), {(i, 1): 1, (j, 1): 1, (k, 1): 1}),
            (F(1), {(i, 1): 2, (j, 1): 1})],
       den={(j, 1): 1}, u_den=((i, k), (j, k), (j, k))),
    _t(F(1, 384), V=((i, j), (i, k)), h={k: 1, j: -3},
       num=_m({(i, 1): 2, (k, 1): 1}), den={(j, 1): 1},
       u_den=((i, j), (i, j), (j, k))),
    _t(F(-1, 576), V=((i, j), (i, k)), h={j: -1, k: -1},
       num=_m({(j, 1): 1, (k, 1): 1}), u_den=((i, k), (j, k), (j, k))),
    # (1/1152) V_ij^2 u_i' (37 u_i'u_j'h_j^2 + 10 u_i'u_j'h_i^2 - 3 u_i'^2 h_i^2
    #   + 11 u_j'^2 h_j^2) / (u_ij u_j' h_i^2 h_j^2), split by h-monomial
    _t(F(37, 1152), V=((i, j), (i, j)), h={i: -2},
       num=_m({(i, 1): 2, (j, 1): 1}), den={(j, 1): 1}, u_den=((i, j), (i, j), (i, j))),
    _t(F(10, 1152), V=((i, j), (i, j)), h={j: -2},
       num=_m({(i, 1): 2, (j, 1): 1}), den={(j, 1): 1}, u_den=((i, j), (i, j), (i, j))),
    _t(F(-3, 1152), V=((i, j), (i, j)), h={j: -2},
       num=_m({(i, 1): 3}), den={(j, 1): 1}, u_den=((i, j), (i, j), (i, j))),
    _t(F(11, 1152), V=((i, j), (i, j)), h={i: -2},
       num=_m({(i, 1): 1, (j, 1): 2}), den={(j, 1): 1}, u_den=((i, j), (i, j), (i, j))),
    _t(F(-1, 576), V=((i, j),), h={j: 1, i: -3},
       num=[(F(4), {(i, 1): 3}), (F(4), {(i, 1): 1, (j, 1): 2}),
            (F(-6), {(i, 1): 2, (j, 1): 1}), (F(-1), {(j, 1): 3})],
       den={(i, 1): 1}, u_den=((i, j), (i, j), (i, j))),
    _t(F(1, 576), V=((i, j),), h={i: -1, j: -1},
       num=_m({(i, 1): 1, (j, 1): 1}), u_den=((i, j), (i, j), (i, j))),
]


def genus2(model: FrobeniusModel) -> JetRational:
    """The genus-two free energy as a rational function of canonical jets."""
    can = model.canonical_coordinates()
    n = can.n
    total = JetRational.zero(n)
    syms = (i, j, k, l)
    for (coeff, Vfac, hpow, num_poly, den_jets, u_num, u_den) in GENUS2_TERMS:
        used = sorted({s for pair in Vfac for s in pair}
                      | {s for _, mono in num_poly for (s, _) in mono}
                      | {s for (s, _) in den_jets}
                      | {s for pair in u_num for s in pair}
                      | {s for pair in u_den for s in pair}
                      | set(hpow)
                      | {i})
        for assign_vals in iproduct(range(1, n + 1), repeat=len(used)):
            a = dict(zip(used, assign_vals))
            if any(a[x] == a[y] for (x, y) in u_den):
                continue
            scal = ExactScalar(coeff)
            ok = True
            for (x, y) in Vfac:
                vxy = can.V[a[x] - 1][a[y] - 1]
                if vxy.is_zero():
                    ok = False
                    break
                scal = scal * vxy
            if not ok:
                continue
            hmerged: dict[int, int] = {}
            for s, p in hpow.items():
                hmerged[a[s]] = hmerged.get(a[s], 0) + p
            hc, hp = can.h_mono(hmerged)
            scal = scal * hc
            num = JetPoly.zero(n)
            for (c, mono) in num_poly:
                term = JetPoly.const(n, c)
                for (s, order), p in mono.items():
                    term = term * JetPoly.var(n, a[s], order) ** p
                num = num + term
            num = num * scal
            for (x, y) in u_num:
                num = num * (JetPoly.var(n, a[x]) - JetPoly.var(n, a[y]))
            den: dict[JetPoly, int] = {}
            for (s, order), p in den_jets.items():
                key = JetPoly.var(n, a[s], order)
                den[key] = den.get(key, 0) + p
            u12 = None
            if n >= 2:
                u12 = JetPoly.var(n, 1) - JetPoly.var(n, 2)
            if hp > 0:
                if hp.denominator != 1:
                    raise UnsupportedModel("fractional u12 power in h-monomial")
                num = num * u12 ** int(hp)
            elif hp < 0:
                den[u12] = den.get(u12, 0) + int(-hp)
            for (x, y) in u_den:
                ux, uy = a[x], a[y]
                key = JetPoly.var(n, min(ux, uy)) - JetPoly.var(n, max(ux, uy))
                sign = 1 if ux < uy else -1
                den[key] = den.get(key, 0) + 1
                if sign < 0:
                    num = -num
            total = total + JetRational(num, den)
    return total


# -- genus one ------------------------------------------------------------------


@dataclass
class GenusOneFunction:
    """F_1 = sum coeffs['du', i] log u_i' + coeffs['u12'] log(u_1 - u_2)."""

    n: int
    du_coeffs: dict[int, Fraction]
    u12_coeff: Fraction

    def evaluate(self, sol_u: dict[int, TauSeries], x_var=(1, 0)) -> TauSeries:
        """Series value on a canonical-coordinate solution (constants dropped)."""
        out = None
        for idx, c in self.du_coeffs.items():
            s = sol_u[idx].diff(*x_var)
            term = _log_normalized(s) * c
            out = term if out is None else out + term
        if self.u12_coeff:
            s = sol_u[1] - sol_u[2]
            out = out + _log_normalized(s) * self.u12_coeff
        return out


def _log_normalized(s: TauSeries) -> TauSeries:
    c0 = s.constant_term()
    if c0.is_zero():
        raise ValueError("log of a series with zero constant term")
    return (s * c0.inverse()).log()


def genus1(model: FrobeniusModel) -> GenusOneFunction:
    """F_1 = log tau_I - (1/24) log J + (1/24) sum log u_i' (constants dropped)."""
    can = model.canonical_coordinates()
    tau = model.isomonodromic_tau()["exponent"]
    u12c = Fraction(tau) - Fraction(can.log_J_u12_coeff, 24)
    return GenusOneFunction(can.n, {idx: Fraction(1, 24) for idx in range(1, can.n + 1)},
                            u12c if can.n >= 2 else Fraction(0))


# -- evaluation of rational jet functions on solutions ----------------------------


def canonical_solution_series(model: FrobeniusModel, sol_v: dict[int, TauSeries],
                              x_var=(1, 0)) -> dict[int, TauSeries]:
    """Series of the canonical coordinates u_i on a flat-coordinate solution."""
    can = model.canonical_coordinates()
    cache: dict = {}
    return {idx + 1: evaluate_on_solution(can.u_exprs[idx], sol_v, x_var, cache=cache)
            for idx in range(can.n)}


def evaluate_rational(jr: JetRational, sol: dict[int, TauSeries],
                      x_var=(1, 0), cache: Optional[dict] = None) -> TauSeries:
    """num/den evaluation; denominator constant terms must be invertible."""
    cache = cache if cache is not None else {}
    num = evaluate_on_solution(jr.num, sol, x_var, cache=cache)
    out = num
    for f, e in jr.den.items():
        fs = evaluate_on_solution(f, sol, x_var, cache=cache)
        inv = fs.inverse()
        for _ in range(e):
            out = out * inv
    return out


# -- full tau assembly and correlator extraction -----------------------------------


def genus_blocks(model: FrobeniusModel, sol, g_max: int = 2) -> dict[int, TauSeries]:
    """The genus pieces F_0, F_1, F_2 of log tau evaluated on the solution.

    Each block keeps its own reliability bounds (jets consume degree: the
    genus-g block of a degree-D solution is reliable to roughly D - (3g - 2)).
    String normalization throughout.
    """
    from .errors import InadmissibleSolution
    from .solutions import genus0_free_energy

    out = {0: genus0_free_energy(sol)}
    if g_max >= 1:
        su = canonical_solution_series(model, sol.v)
        try:
            out[1] = genus1(model).evaluate(su)
        except ZeroDivisionError as exc:
            raise InadmissibleSolution("genus-1 denominator vanishes on the solution") from exc
    if g_max >= 2:
        f2 = genus2(model)
        try:
            out[2] = evaluate_rational(f2, su)
        except ZeroDivisionError as exc:
            raise InadmissibleSolution("genus-2 denominator vanishes on the solution") from exc
    return out


def full_tau_log(model: FrobeniusModel, sol, g_max: int = 2) -> TauSeries:
    """log tau = eps^-2 F_0 + F_1 + eps^2 F_2 on the given solution.

    The combined series carries the weakest of the per-genus degree bounds;
    use genus_blocks for per-genus reliability.
    """
    blocks = genus_blocks(model, sol, g_max)
    out = blocks[0].mul_eps(-2)
    for g in range(1, g_max + 1):
        out = out + blocks[g].mul_eps(2 * g - 2)
    return out.with_bounds(eps_lo=-2, eps_hi=2 * g_max - 2)


def gw_invariants(blocks: dict[int, TauSeries], genus: int,
                  index_multiset) -> "ExactScalar":
    """<tau_{p1}(phi_{a1}) ... >_g from the genus blocks of log tau.

    index_multiset: iterable of (alpha, p) with repetitions; the generating
    function carries 1/n! so repeated entries contribute multiplicities.
    """
    counts: dict = {}
    for key in index_multiset:
        counts[key] = counts.get(key, 0) + 1
    coeff = blocks[genus].coefficient(dict(counts), eps=0)
    mult = 1
    for c in counts.values():
        for x in range(2, c + 1):
            mult *= x
    return coeff * Fraction(mult)


def check_trr1(model: FrobeniusModel, F0: TauSeries, F1: TauSeries,
               alpha: int, p: int) -> TauSeries:
    """Residual of the genus-one topological recursion relation for
    <<tau_p(phi_alpha)>>_1."""
    lhs = F1.diff(alpha, p)
    rhs = None
    for nu in range(1, model.n + 1):
        for mu in range(1, model.n + 1):
            e = model.eta_inv[nu - 1][mu - 1]
            if e.is_zero():
                continue
            term = F0.diff(alpha, p - 1).diff(nu, 0) * F1.diff(mu, 0) * e
            term = term + F0.diff(alpha, p - 1).diff(nu, 0).diff(mu, 0) * e * Fraction(1, 24)
            rhs = term if rhs is None else rhs + term
    return lhs - rhs


def check_getzler(model: FrobeniusModel, G: JetPoly) -> dict:
    """Residuals of the degree-4 genus-one relation for the small-phase-space
    function G(v); returns the nonzero symmetrized coefficients (empty dict
    means the identity holds)."""
    n = model.n

    def d(*idx) -> JetPoly:
        p = model.F
        for a in idx:
            p = p.diff(a)
        return p

    def c_up(mu, *lower) -> JetPoly:
        acc = JetPoly.zero(n)
        for e in range(1, n + 1):
            x = model.eta_inv[mu - 1][e - 1]
            if not x.is_zero():
                acc = acc + d(e, *lower) * x
        return acc

    dG = {a: G.diff(a) for a in range(1, n + 1)}
    ddG = {(a, b): G.diff(a).diff(b) for a in range(1, n + 1) for b in range(1, n + 1)}

    out = {}
    from itertools import product as iproduct2
    acc: dict = {}
    for a1, a2, a3, a4 in iproduct2(range(1, n + 1), repeat=4):
        term = JetPoly.zero(n)
        for mu in range(1, n + 1):
            for nu in range(1, n + 1):
                term = term + 3 * c_up(mu, a1, a2) * c_up(nu, a3, a4) * ddG[(mu, nu)]
                term = term - 4 * c_up(mu, a1, a2) * c_up(nu, a3, mu) * ddG[(a4, nu)]
                term = term - c_up(mu, a1, a2) * c_up(nu, a3, a4, mu) * dG[nu]
                term = term + 2 * c_up(mu, a1, a2, a3) * c_up(nu, a4, mu) * dG[nu]
                term = term + c_up(mu, a1, a2, a3) * c_up(nu, a4, mu, nu) * Fraction(1, 6)
                term = term + c_up(mu, a1, a2, a3, a4) * c_up(nu, mu, nu) * Fraction(1, 24)
                term = term - c_up(mu, a1, a2, nu) * c_up(nu, a3, a4, mu) * Fraction(1, 4)
        key = tuple(sorted((a1, a2, a3, a4)))
        acc[key] = acc.get(key, JetPoly.zero(n)) + term
    for key, val in acc.items():
        if not val.is_zero():
            out[key] = val
    return out
