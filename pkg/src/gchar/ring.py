"""Weighted-graded polynomial quotient rings realized degreewise.

A GradedRing is GF(p)[x_1..x_n]/(f_1..f_c) with positive integer
weights on the variables and homogeneous relations.  Every graded
component is a finite-dimensional GF(p)-vector space with a chosen
monomial basis (the non-pivot monomials of the relation span), so all
downstream computations reduce to exact linear algebra.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import gf, series
from .errors import CertificationError, InputError
from .poly import Poly, parse_poly


class GradedRing:
    """GF(p)[x_1..x_n]/(f_1..f_c) with positive weights, realized degreewise."""

    def __init__(self, p, names, weights, relations, check=True):
        if not gf.is_prime(p):
            raise InputError(f"field size {p} is not prime")
        if len(names) != len(weights):
            raise InputError("need one weight per variable")
        if any(w <= 0 for w in weights):
            raise InputError("weights must be positive")
        self.p = p
        self.names = list(names)
        self.weights = list(weights)
        self.nvars = len(names)
        self.relations = list(relations)
        self.relation_degrees = []
        for f in self.relations:
            d = f.weighted_degree(self.weights)
            if d is None or d == 0:
                raise InputError("relations must be nonzero of positive degree")
            self.relation_degrees.append(d)
        self._monomials = {}
        self._components = {}
        self._mult_cache = {}
        if check:
            self.certify_regular_sequence()

    # -- basic invariants ---------------------------------------------------

    @property
    def codim(self):
        return len(self.relations)

    @property
    def dim(self):
        """Krull dimension, valid once the regular-sequence certificate holds."""
        return self.nvars - self.codim

    @property
    def max_weight(self):
        return max(self.weights)

    @property
    def max_relation_degree(self):
        return max(self.relation_degrees, default=0)

    @property
    def max_step(self):
        return max([self.max_weight] + self.relation_degrees)

    def is_regular(self):
        return not self.relations

    def parse(self, text):
        return parse_poly(text, self.names, self.p)

    def variable(self, i):
        return Poly.variable(i, self.nvars, self.p)

    def __repr__(self):
        rels = ", ".join(f.format(self.names) for f in self.relations)
        vars_ = ", ".join(f"{n}:{w}" for n, w in zip(self.names, self.weights))
        return f"GradedRing(GF({self.p})[{vars_}]/({rels}))"

    # -- monomial enumeration ----------------------------------------------

    def monomials(self, d):
        """All exponent tuples of weighted degree d in the polynomial ring."""
        if d < 0:
            return []
        if d not in self._monomials:
            self._monomials[d] = sorted(self._enumerate(d, 0))
        return self._monomials[d]

    def _enumerate(self, d, start):
        if d == 0:
            yield (0,) * self.nvars
            return
        if start >= self.nvars:
            return
        w = self.weights[start]
        for e in range(d // w + 1):
            for rest in self._enumerate(d - e * w, start + 1):
                exps = list(rest)
                exps[start] = e
                yield tuple(exps)

    # -- graded components of the quotient ----------------------------------

    def component(self, d):
        """(basis monomials, projection matrix, full-monomial index) for R_d."""
        if d < 0:
            return [], gf.zeros(0, 0), {}
        if d in self._components:
            return self._components[d]
        full = self.monomials(d)
        index = {m: i for i, m in enumerate(full)}
        nfull = len(full)
        span_rows = []
        for f, fdeg in zip(self.relations, self.relation_degrees):
            for mon in self.monomials(d - fdeg):
                row = np.zeros(nfull, dtype=np.int64)
                for e, c in f.terms.items():
                    prod = tuple(a + b for a, b in zip(mon, e))
                    row[index[prod]] = c
                span_rows.append(row)
        if span_rows:
            r, pivots = gf.rref(np.array(span_rows), self.p)
        else:
            r, pivots = gf.zeros(0, nfull), []
        basis_cols = [c for c in range(nfull) if c not in pivots]
        proj = gf.zeros(len(basis_cols), nfull)
        for j, c in enumerate(basis_cols):
            proj[j, c] = 1
        for i, pc in enumerate(pivots):
            for j, c in enumerate(basis_cols):
                proj[j, pc] = (-r[i, c]) % self.p
        basis = [full[c] for c in basis_cols]
        self._components[d] = (basis, proj, index)
        return self._components[d]

    def dim_component(self, d):
        return len(self.component(d)[0])

    def poly_to_vec(self, poly, d=None):
        """Coordinates of a homogeneous polynomial in the chosen basis of R_d."""
        if d is None:
            d = poly.weighted_degree(self.weights)
            if d is None:
                raise InputError("cannot infer degree of the zero polynomial")
        _, proj, index = self.component(d)
        full = np.zeros(len(index), dtype=np.int64)
        for e, c in poly.terms.items():
            deg = sum(a * w for a, w in zip(e, self.weights))
            if deg != d:
                raise InputError("polynomial is not homogeneous of the stated degree")
            full[index[e]] = c
        return gf.matmul(proj, full.reshape(-1, 1), self.p).ravel()

    def vec_to_poly(self, vec, d):
        basis, _, _ = self.component(d)
        terms = {}
        for c, mon in zip(vec, basis):
            if c % self.p:
                terms[mon] = int(c) % self.p
        return Poly(terms, self.nvars, self.p)

    def mult_matrix(self, poly, d):
        """Matrix of multiplication by a homogeneous poly: R_d -> R_{d+deg}."""
        e = poly.weighted_degree(self.weights)
        if e is None:
            src = self.dim_component(d)
            return gf.zeros(0, src)
        key = (poly, d)
        cached = self._mult_cache.get(key)
        if cached is not None:
            return cached
        basis, _, _ = self.component(d)
        _, proj_t, index_t = self.component(d + e)
        out = gf.zeros(len(index_t), len(basis))
        for j, mon in enumerate(basis):
            for exps, c in poly.terms.items():
                prod = tuple(a + b for a, b in zip(mon, exps))
                out[index_t[prod], j] = (out[index_t[prod], j] + c) % self.p
        mat = gf.matmul(proj_t, out, self.p)
        self._mult_cache[key] = mat
        return mat

    def variable_mult_matrix(self, i, d):
        return self.mult_matrix(self.variable(i), d)

    # -- certificates -------------------------------------------------------

    def hilbert_series(self, order):
        """Expected Hilbert series of the quotient if the relations form a
        regular sequence: prod(1 - t^deg(f_j)) / prod(1 - t^w_i)."""
        num = series.TruncatedSeries.one(order)
        for fdeg in self.relation_degrees:
            num = num * (series.TruncatedSeries.one(order)
                         - series.TruncatedSeries.monomial(fdeg, order))
        for w in self.weights:
            num = num * series.geometric(w, order)
        return num

    def certify_regular_sequence(self, upto=None):
        """Check dim R_d against the complete-intersection Hilbert series.

        Agreement on a window of width past every relation degree pins the
        Koszul homology degreewise and certifies the regular sequence.
        """
        if upto is None:
            upto = 2 * (sum(self.relation_degrees) + self.max_weight) + 2
        hs = self.hilbert_series(upto)
        for d in range(upto + 1):
            if self.dim_component(d) != hs[d]:
                raise CertificationError(
                    f"relations are not a regular sequence: dim R_{d} = "
                    f"{self.dim_component(d)}, Hilbert series predicts {hs[d]}")
        return True

    def shape(self):
        return series.CIShape(embdim=self.nvars, codim=self.codim)

    def is_element_regular(self, s, upto=None):
        """Certify that multiplication by s is injective degreewise."""
        e = s.weighted_degree(self.weights)
        if e is None:
            return False
        if upto is None:
            upto = 2 * (sum(self.relation_degrees) + self.max_weight + e) + 2
        for d in range(upto + 1):
            m = self.mult_matrix(s, d)
            if gf.rank(m, self.p) != self.dim_component(d):
                return False
        # Dimension must drop by exactly one: compare Hilbert series.
        quotient = self.quotient_by(s, check=False)
        hs = quotient.hilbert_series(upto)
        for d in range(upto + 1):
            if quotient.dim_component(d) != hs[d]:
                return False
        return True

    def quotient_by(self, s, check=True):
        """The ring R/(s) for a homogeneous element s; certifies regularity."""
        e = s.weighted_degree(self.weights)
        if e is None or e == 0:
            raise InputError("quotient element must be homogeneous of positive degree")
        if check and not self.is_element_regular(s):
            raise InputError(
                f"{s.format(self.names)} is a zerodivisor; quotient refused")
        return GradedRing(self.p, self.names, self.weights,
                          self.relations + [s], check=check)


@lru_cache(maxsize=None)
def _cached_ring(p, names, weights, relation_texts):
    relations = [parse_poly(t, list(names), p) for t in relation_texts]
    return GradedRing(p, list(names), list(weights), relations)


def make_ring(p, names, weights, relation_texts=()):
    """Build (and cache) a ring from textual relation data."""
    return _cached_ring(p, tuple(names), tuple(weights), tuple(relation_texts))
