"""Graded modules realized degreewise, and degree-zero graded maps.

A GradedModule stores, for every internal degree d in an explicit
window, the dimension of the component M_d together with the matrices
of the variable actions M_d -> M_{d+w}.  All higher constructions
(kernels, quotients, Hom modules, tensor products, minimal generators,
presentations) reduce to exact linear algebra on these matrices.

Windows are explicit everywhere.  An operation that cannot certify its
answer inside the window raises TruncationError instead of returning a
possibly wrong value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf
from .errors import CertificationError, InputError, TruncationError
from .poly import Poly

# Extra degrees past the top generator in which no new generator may
# appear, as a multiple of the ring's maximal degree step.
GUARD_STEPS = 1


def _quotient_projection(span, dim, p):
    """Projection/section pair for V/span with V = GF(p)^dim.

    span holds spanning vectors as columns.  Returns (proj, section)
    with proj of shape (q, dim), section of shape (dim, q), and
    proj @ section = identity.
    """
    if dim == 0:
        return gf.zeros(0, 0), gf.zeros(0, 0)
    if span.size == 0:
        return gf.identity(dim), gf.identity(dim)
    r, pivots = gf.rref(span.T % p, p)
    free = [c for c in range(dim) if c not in pivots]
    proj = gf.zeros(len(free), dim)
    for j, c in enumerate(free):
        proj[j, c] = 1
    for i, pc in enumerate(pivots):
        for j, c in enumerate(free):
            proj[j, pc] = (-r[i, c]) % p
    section = gf.zeros(dim, len(free))
    for j, c in enumerate(free):
        section[c, j] = 1
    return proj, section


@dataclass
class Presentation:
    """Minimal-cover presentation data attached to a module."""

    gen_degrees: list
    gen_vectors: list          # one vector in M_{gen_degrees[i]} per generator
    cover: "GradedMap"         # epsilon: free cover -> M
    rel_degrees: list = field(default_factory=list)
    rel_columns: list = field(default_factory=list)  # list of list[Poly], per column

    @property
    def free_cover(self):
        return self.cover.source


class GradedModule:
    """A graded module realized degreewise on a window [dmin, dmax]."""

    def __init__(self, ring, dmin, dmax, dims, actions, label=""):
        self.ring = ring
        self.dmin = dmin
        self.dmax = dmax
        self.dims = dims
        self.actions = actions  # actions[v][d]: M_d -> M_{d+w_v}
        self.label = label
        self.presentation = None
        self.hom_data = None
        self.sum_parts = None
        self.free_twists = None
        self._mono_action_cache = {}

    # -- basics -------------------------------------------------------------

    @property
    def p(self):
        return self.ring.p

    def dim(self, d):
        if d < self.dmin or d > self.dmax:
            raise TruncationError(
                f"degree {d} outside realized window [{self.dmin}, {self.dmax}]"
                f" of {self.label or 'module'}", degree=d)
        return self.dims.get(d, 0)

    def degrees(self):
        return range(self.dmin, self.dmax + 1)

    def dim_or_zero(self, d):
        """Like dim, but degrees below the window are genuinely empty.

        Every constructor realizes modules from their true lowest degree,
        so below-window components are zero; above-window still errors.
        """
        if d < self.dmin:
            return 0
        return self.dim(d)

    def action_or_zero(self, v, d):
        """Action matrix, with degrees below the window treated as empty."""
        if d < self.dmin:
            return gf.zeros(self.dim_or_zero(d + self.ring.weights[v]), 0)
        return self.action(v, d)

    def action(self, v, d):
        mat = self.actions[v].get(d)
        if mat is None:
            if d + self.ring.weights[v] > self.dmax:
                raise TruncationError(
                    f"action x_{v} out of window at degree {d}", degree=d)
            mat = gf.zeros(self.dim(d + self.ring.weights[v]), self.dim(d))
        return mat

    def is_zero(self):
        return all(self.dims.get(d, 0) == 0 for d in self.degrees())

    def total_dim(self):
        return sum(self.dims.get(d, 0) for d in self.degrees())

    def support(self):
        return [d for d in self.degrees() if self.dims.get(d, 0)]

    def __repr__(self):
        nz = self.support()
        head = f"{nz[0]}..{nz[-1]}" if nz else "empty"
        return f"GradedModule({self.label or 'M'}, support {head})"

    # -- construction helpers ----------------------------------------------

    @classmethod
    def zero_module(cls, ring, dmin=0, dmax=0):
        m = cls(ring, dmin, dmax, {}, [dict() for _ in ring.weights], label="0")
        m.free_twists = []
        return m

    def check_actions_commute(self):
        """Verify pairwise commutation and that every ring relation acts as 0."""
        ring = self.ring
        for v in range(ring.nvars):
            for u in range(v + 1, ring.nvars):
                for d in self.degrees():
                    if d + ring.weights[v] + ring.weights[u] > self.dmax:
                        continue
                    a = gf.matmul(self.action(u, d + ring.weights[v]),
                                  self.action(v, d), self.p)
                    b = gf.matmul(self.action(v, d + ring.weights[u]),
                                  self.action(u, d), self.p)
                    if not np.array_equal(a, b):
                        return False
        for f in ring.relations:
            fdeg = f.weighted_degree(ring.weights)
            for d in self.degrees():
                if d + fdeg > self.dmax:
                    continue
                if np.any(self.poly_action(f, d)):
                    return False
        return True

    # -- polynomial action --------------------------------------------------

    def monomial_action(self, mon, d):
        """Matrix of the action of a monomial (exponent tuple) on M_d."""
        key = (mon, d)
        cached = self._mono_action_cache.get(key)
        if cached is not None:
            return cached
        ring = self.ring
        if all(e == 0 for e in mon):
            return gf.identity(self.dim(d))
        v = next(i for i, e in enumerate(mon) if e)
        rest = list(mon)
        rest[v] -= 1
        lower = self.monomial_action(tuple(rest), d)
        mat = gf.matmul(
            self.action(v, d + sum(a * w for a, w in zip(rest, ring.weights))),
            lower, self.p)
        self._mono_action_cache[key] = mat
        return mat

    def poly_action(self, poly, d):
        """Matrix of multiplication by a homogeneous polynomial on M_d."""
        e = poly.weighted_degree(self.ring.weights)
        if e is None:
            return gf.zeros(0, self.dim(d))
        out = gf.zeros(self.dim(d + e), self.dim(d))
        for mon, c in poly.terms.items():
            out = (out + c * self.monomial_action(mon, d)) % self.p
        return out

    # -- minimal generators and length ---------------------------------------

    def minimal_generators(self, guard=None):
        """Degreewise bases of M_d / (m M)_d as a list of (degree, vector).

        Raises TruncationError if a generator shows up within the guard
        region at the top of the window, since generators past the window
        could then be missed.
        """
        ring = self.ring
        if guard is None:
            guard = GUARD_STEPS * ring.max_step
        gens = []
        for d in self.degrees():
            md = self.dims.get(d, 0)
            if md == 0:
                continue
            blocks = []
            for v, w in enumerate(ring.weights):
                if d - w >= self.dmin:
                    blocks.append(self.action(v, d - w))
            span = np.concatenate(blocks, axis=1) if blocks else gf.zeros(md, 0)
            _, section = _quotient_projection(span, md, self.p)
            for j in range(section.shape[1]):
                if d > self.dmax - guard:
                    raise TruncationError(
                        f"minimal generator of {self.label or 'module'} found at "
                        f"degree {d}, inside the guard region; enlarge dmax",
                        degree=d)
                gens.append((d, section[:, j].copy()))
        return gens

    def beta0(self):
        return len(self.minimal_generators())

    def generator_bound(self):
        gens = self.minimal_generators()
        return max((d for d, _ in gens), default=self.dmin)

    def length(self):
        """Total length, or None when the finite-length certificate fails.

        Finite length is certified by a run of zero components of width at
        least the maximal variable weight past the top generator degree.
        """
        try:
            top = self.generator_bound()
        except TruncationError:
            return None
        w = self.ring.max_weight
        if any(self.dims.get(d, 0) for d in range(top + 1, self.dmax + 1)
               if d > top + 0):
            # Support continues past the generators; find a zero run.
            pass
        run = 0
        for d in range(top + 1, self.dmax + 1):
            if self.dims.get(d, 0) == 0:
                run += 1
                if run >= w:
                    return sum(self.dims.get(e, 0) for e in range(self.dmin, d + 1))
            else:
                run = 0
        return None

    # -- presentation ---------------------------------------------------------

    def present(self, with_relations=True, force=False):
        """Compute (and cache) a minimal presentation on the window."""
        if self.presentation is not None and not force:
            if not with_relations or self.presentation.rel_columns is not None:
                return self.presentation
        gens = self.minimal_generators()
        twists = [d for d, _ in gens]
        cover = free_module(self.ring, twists, self.dmin, self.dmax)
        eps = _cover_map(cover, self, [v for _, v in gens])
        pres = Presentation(gen_degrees=twists,
                            gen_vectors=[v for _, v in gens],
                            cover=eps, rel_degrees=None, rel_columns=None)
        if with_relations:
            ker, _ = kernel(eps)
            guard = GUARD_STEPS * self.ring.max_step
            relgens = ker.minimal_generators(guard=guard)
            pres.rel_degrees = [d for d, _ in relgens]
            pres.rel_columns = []
            for d, kvec in relgens:
                fvec = gf.matmul(ker._sub_basis[d], kvec.reshape(-1, 1),
                                 self.p).ravel()
                pres.rel_columns.append(cover.vector_to_polys(d, fvec))
        self.presentation = pres
        return pres


class FreeModule(GradedModule):
    """Finite free module with twists, basis indexed by (generator, monomial)."""

    def __init__(self, ring, twists, dmin, dmax):
        self.twists = list(twists)
        dims = {}
        basis = {}
        index = {}
        for d in range(dmin, dmax + 1):
            items = []
            for i, a in enumerate(self.twists):
                for mon in ring.component(d - a)[0]:
                    items.append((i, mon))
            basis[d] = items
            index[d] = {bm: j for j, bm in enumerate(items)}
            dims[d] = len(items)
        actions = [dict() for _ in ring.weights]
        for v, w in enumerate(ring.weights):
            for d in range(dmin, dmax + 1 - w):
                blocks = [ring.variable_mult_matrix(v, d - a)
                          for a in self.twists]
                actions[v][d] = _block_diag(blocks, dims[d + w], dims[d])
        super().__init__(ring, dmin, dmax, dims, actions,
                         label=f"free{tuple(self.twists)}")
        self.basis = basis
        self.index = index
        self.free_twists = list(self.twists)

    def generator_vector(self, i):
        """The i-th free generator as (degree, vector)."""
        d = self.twists[i]
        vec = np.zeros(self.dims[d], dtype=np.int64)
        vec[self.index[d][(i, (0,) * self.ring.nvars)]] = 1
        return d, vec

    def element_from_polys(self, polys, d):
        """Vector of an element given by one polynomial per generator."""
        vec = np.zeros(self.dims[d], dtype=np.int64)
        for i, (a, q) in enumerate(zip(self.twists, polys)):
            if q is None or q.is_zero():
                continue
            coords = self.ring.poly_to_vec(q, d - a)
            rbasis = self.ring.component(d - a)[0]
            for c, mon in zip(coords, rbasis):
                if c:
                    vec[self.index[d][(i, mon)]] = c
        return vec

    def vector_to_polys(self, d, vec):
        """Split a vector of F_d into one polynomial per generator."""
        ring = self.ring
        out = []
        for i, a in enumerate(self.twists):
            rbasis = ring.component(d - a)[0]
            coords = np.zeros(len(rbasis), dtype=np.int64)
            for j, mon in enumerate(rbasis):
                coords[j] = vec[self.index[d][(i, mon)]]
            out.append(ring.vec_to_poly(coords, d - a))
        return out

    def minimal_generators(self, guard=None):
        return [self.generator_vector(i) for i in range(len(self.twists))]


def _block_diag(blocks, nrows, ncols):
    out = gf.zeros(nrows, ncols)
    r = c = 0
    for b in blocks:
        br, bc = b.shape
        out[r:r + br, c:c + bc] = b
        r += br
        c += bc
    return out


def free_module(ring, twists, dmin=None, dmax=40):
    if dmin is None:
        dmin = min(twists, default=0)
    return FreeModule(ring, twists, min(dmin, min(twists, default=dmin)), dmax)


def ring_as_module(ring, dmax=40):
    return free_module(ring, [0], 0, dmax)


# ---------------------------------------------------------------------------
# Graded maps
# ---------------------------------------------------------------------------

class GradedMap:
    """Degree-zero graded map, stored as one matrix per degree."""

    def __init__(self, source, target, mats, label="", dmin_cap=None,
                 dmax_cap=None):
        self.source = source
        self.target = target
        self.mats = mats
        self.label = label
        # Caps record windows narrowed by composition: outside them the
        # map is unknown (truncated), not zero.
        self._dmin_cap = dmin_cap
        self._dmax_cap = dmax_cap

    @property
    def p(self):
        return self.source.p

    @property
    def dmin(self):
        # Below a module's window the component is genuinely zero, so the
        # map is known (zero) down to the smaller of the two dmins.
        v = min(self.source.dmin, self.target.dmin)
        if self._dmin_cap is not None:
            v = max(v, self._dmin_cap)
        return v

    @property
    def dmax(self):
        v = min(self.source.dmax, self.target.dmax)
        if self._dmax_cap is not None:
            v = min(v, self._dmax_cap)
        return v

    def degrees(self):
        return range(self.dmin, self.dmax + 1)

    def mat(self, d):
        m = self.mats.get(d)
        if m is None:
            m = gf.zeros(self.target.dim_or_zero(d), self.source.dim_or_zero(d))
        return m

    def is_zero(self):
        return all(not np.any(self.mat(d)) for d in self.degrees())

    def compose(self, other):
        """self o other; the window shrinks to where both are defined."""
        lo = min(self.dmin, other.dmin)
        hi = min(self.dmax, other.dmax)
        mats = {d: gf.matmul(self.mat(d), other.mat(d), self.p)
                for d in range(lo, hi + 1)}
        return GradedMap(other.source, self.target, mats,
                         label=f"{self.label}o{other.label}",
                         dmax_cap=hi)

    def __add__(self, other):
        lo = min(self.dmin, other.dmin)
        hi = min(self.dmax, other.dmax)
        mats = {d: (self.mat(d) + other.mat(d)) % self.p
                for d in range(lo, hi + 1)}
        return GradedMap(self.source, self.target, mats,
                         dmax_cap=hi)

    def __neg__(self):
        return GradedMap(self.source, self.target,
                         {d: (-self.mat(d)) % self.p for d in self.degrees()},
                         label=self.label, dmin_cap=self._dmin_cap,
                         dmax_cap=self._dmax_cap)

    def scale(self, c):
        return GradedMap(self.source, self.target,
                         {d: (c * self.mat(d)) % self.p for d in self.degrees()},
                         dmin_cap=self._dmin_cap, dmax_cap=self._dmax_cap)

    def commutes_with_actions(self):
        ring = self.source.ring
        for v, w in enumerate(ring.weights):
            for d in self.degrees():
                if d + w > self.dmax:
                    continue
                a = gf.matmul(self.target.action_or_zero(v, d), self.mat(d),
                              self.p)
                b = gf.matmul(self.mat(d + w), self.source.action_or_zero(v, d),
                              self.p)
                if not np.array_equal(a, b):
                    return False
        return True

    def rank(self, d):
        return gf.rank(self.mat(d), self.p)

    def is_injective(self):
        return all(self.rank(d) == self.source.dim_or_zero(d)
                   for d in self.degrees())

    def is_surjective(self):
        return all(self.rank(d) == self.target.dim_or_zero(d)
                   for d in self.degrees())

    def is_bijective(self):
        return all(self.source.dim_or_zero(d) == self.target.dim_or_zero(d)
                   == self.rank(d) for d in self.degrees())


def zero_map(source, target):
    return GradedMap(source, target, {})


def identity_map(m):
    return GradedMap(m, m, {d: gf.identity(m.dim(d)) for d in m.degrees()})


def _cover_map(cover, target, gen_vectors):
    """epsilon: free cover -> target sending generator i to gen_vectors[i].

    Built degree by degree: a basis element (i, mon) with mon != 1 maps
    through a variable action applied to a lower-degree column.
    """
    ring = cover.ring
    p = ring.p
    mats = {}
    for d in range(cover.dmin, min(cover.dmax, target.dmax) + 1):
        cols = np.zeros((target.dim(d), cover.dims[d]), dtype=np.int64)
        for j, (i, mon) in enumerate(cover.basis[d]):
            if all(e == 0 for e in mon):
                cols[:, j] = gen_vectors[i]
            else:
                v = next(t for t, e in enumerate(mon) if e)
                rest = list(mon)
                rest[v] -= 1
                rest = tuple(rest)
                lower_d = d - ring.weights[v]
                lower_col = mats[lower_d][:, cover.index[lower_d][(i, rest)]]
                cols[:, j] = gf.matmul(
                    target.action(v, lower_d),
                    lower_col.reshape(-1, 1), p).ravel()
        mats[d] = cols
    return GradedMap(cover, target, mats, label="cover")


def map_from_gen_images(source, target, images):
    """Graded map determined by images of source's minimal generators.

    images is a list of vectors, one per generator of source.present().
    The map must be well defined; this is checked by solvability of the
    defining linear systems.
    """
    pres = source.present(with_relations=False)
    cover = pres.free_cover
    g = _cover_map(cover, target, images)
    mats = {}
    for d in range(source.dmin, min(source.dmax, target.dmax) + 1):
        eps_d = pres.cover.mat(d)
        x = gf.solve_many(eps_d.T % source.p, g.mat(d).T % source.p, source.p)
        if x is None:
            raise CertificationError(
                "generator images do not define a graded map (relations "
                f"not respected at degree {d})")
        mats[d] = x.T % source.p
    return GradedMap(source, target, mats)


# ---------------------------------------------------------------------------
# Kernels, images, quotients, sums
# ---------------------------------------------------------------------------

def kernel(f):
    """(K, incl) with K = ker f realized as a submodule of f.source."""
    src = f.source
    p = f.p
    ring = src.ring
    bases = {}
    dims = {}
    for d in f.degrees():
        k = gf.kernel_basis(f.mat(d), p)
        bases[d] = k
        dims[d] = k.shape[1]
    actions = [dict() for _ in ring.weights]
    for v, w in enumerate(ring.weights):
        for d in f.degrees():
            if d + w > f.dmax:
                continue
            img = gf.matmul(src.action_or_zero(v, d), bases[d], p)
            x = gf.solve_many(bases[d + w], img, p)
            if x is None:
                raise CertificationError("kernel not action-stable (bug)")
            actions[v][d] = x
    k = GradedModule(ring, f.dmin, f.dmax, dims, actions,
                     label=f"ker({f.label})")
    k._sub_basis = bases
    incl = GradedMap(k, src, dict(bases), label="incl")
    return k, incl


def image(f):
    """(I, incl) with I = im f realized as a submodule of f.target."""
    tgt = f.target
    p = f.p
    ring = tgt.ring
    bases = {}
    dims = {}
    for d in f.degrees():
        m = f.mat(d)
        _, pivots = gf.rref(m, p)
        bases[d] = (m[:, pivots].copy() if pivots
                    else gf.zeros(tgt.dim_or_zero(d), 0))
        dims[d] = len(pivots)
    actions = [dict() for _ in ring.weights]
    for v, w in enumerate(ring.weights):
        for d in f.degrees():
            if d + w > f.dmax:
                continue
            img = gf.matmul(tgt.action_or_zero(v, d), bases[d], p)
            x = gf.solve_many(bases[d + w], img, p)
            if x is None:
                raise CertificationError("image not action-stable (bug)")
            actions[v][d] = x
    i = GradedModule(ring, f.dmin, f.dmax, dims, actions,
                     label=f"im({f.label})")
    i._sub_basis = bases
    incl = GradedMap(i, tgt, dict(bases), label="incl")
    return i, incl


def quotient_by_map(f):
    """(C, proj) with C = coker f = target / im f."""
    tgt = f.target
    spans = {d: f.mat(d) for d in f.degrees()}
    return quotient_by_spans(tgt, spans, dmin=f.dmin, dmax=f.dmax)


def quotient_by_spans(m, spans, dmin=None, dmax=None):
    """Quotient of m by degreewise spanning vectors (given as columns)."""
    ring = m.ring
    p = m.p
    dmin = m.dmin if dmin is None else dmin
    dmax = m.dmax if dmax is None else dmax
    projs = {}
    sections = {}
    dims = {}
    for d in range(dmin, dmax + 1):
        span = spans.get(d)
        if span is None:
            span = gf.zeros(m.dim_or_zero(d), 0)
        proj, section = _quotient_projection(span, m.dim_or_zero(d), p)
        projs[d] = proj
        sections[d] = section
        dims[d] = proj.shape[0]
    actions = [dict() for _ in ring.weights]
    for v, w in enumerate(ring.weights):
        for d in range(dmin, dmax + 1 - w):
            actions[v][d] = gf.matmul(
                projs[d + w], gf.matmul(m.action_or_zero(v, d), sections[d], p),
                p)
    q = GradedModule(ring, dmin, dmax, dims, actions,
                     label=f"{m.label}/~")
    q._quot_section = sections
    proj_map = GradedMap(m, q, projs, label="proj")
    return q, proj_map


def direct_sum(*parts):
    """Direct sum with remembered inclusion maps."""
    ring = parts[0].ring
    p = parts[0].p
    dmin = min(m.dmin for m in parts)
    dmax = min(m.dmax for m in parts)
    dims = {d: sum(m.dim_or_zero(d) for m in parts) for d in range(dmin, dmax + 1)}
    actions = [dict() for _ in ring.weights]
    for v, w in enumerate(ring.weights):
        for d in range(dmin, dmax + 1 - w):
            actions[v][d] = _block_diag([m.action_or_zero(v, d) for m in parts],
                                        dims[d + w], dims[d])
    s = GradedModule(ring, dmin, dmax, dims, actions,
                     label="(" + "+".join(m.label or "M" for m in parts) + ")")
    s.sum_parts = list(parts)
    incls = []
    projs = []
    for i, m in enumerate(parts):
        inc_mats = {}
        prj_mats = {}
        for d in range(dmin, dmax + 1):
            off = sum(q.dim_or_zero(d) for q in parts[:i])
            md = m.dim_or_zero(d)
            inc = gf.zeros(dims[d], md)
            inc[off:off + md] = gf.identity(md)
            inc_mats[d] = inc
            prj_mats[d] = inc.T.copy()
        incls.append(GradedMap(m, s, inc_mats))
        projs.append(GradedMap(s, m, prj_mats))
    s.sum_inclusions = incls
    s.sum_projections = projs
    return s


def twist(m, a):
    """The shifted module m(-a): component d is m_{d-a}."""
    ring = m.ring
    dims = {d + a: m.dims.get(d, 0) for d in m.degrees()}
    actions = [
        {d + a: mat for d, mat in m.actions[v].items()}
        for v in range(ring.nvars)
    ]
    t = GradedModule(ring, m.dmin + a, m.dmax + a, dims, actions,
                     label=f"{m.label}({-a})")
    t._twist_of = (m, a)
    return t


def homology_at(outgoing, incoming):
    """H = ker(outgoing) / im(incoming) for composable maps with zero product."""
    k, incl = kernel(outgoing)
    p = k.p
    spans = {}
    for d in k.degrees():
        if d < incoming.dmin or d > incoming.dmax:
            img = gf.zeros(k.ring and 0 or 0, 0)
            spans[d] = gf.zeros(k.dim(d), 0)
            continue
        img = incoming.mat(d)
        x = gf.solve_many(incl.mat(d), img, p)
        if x is None:
            raise CertificationError("image not contained in kernel (d^2 != 0?)")
        spans[d] = x
    h, _ = quotient_by_spans(k, spans)
    h.label = "H"
    return h


# ---------------------------------------------------------------------------
# Hom modules
# ---------------------------------------------------------------------------

def hom_module(m, n, dmin=None, dmax=None):
    """Hom_R(m, n) as a realized graded module.

    Built from a minimal presentation of m: a homogeneous map of degree e
    is a tuple of elements of n_{e+a_i} (one per generator of m)
    annihilated by every relation column.  The result carries evaluation
    data so that hom elements can be applied to elements of m.
    """
    ring = m.ring
    p = m.p
    pres = m.present(with_relations=True)
    a = pres.gen_degrees
    reldegs = pres.rel_degrees
    relcols = pres.rel_columns
    if dmax is None:
        dmax = n.dmax - max(list(reldegs) + list(a), default=0)
    if dmin is None:
        dmin = n.dmin - max(a, default=0)
    if dmin > dmax:
        raise TruncationError("empty Hom window; enlarge the target window")
    free_source = not relcols
    dims = {}
    bases = {}
    offsets = {}
    for e in range(dmin, dmax + 1):
        offs = [0]
        for ai in a:
            offs.append(offs[-1] + n.dim_or_zero(e + ai))
        offsets[e] = offs
        total = offs[-1]
        if free_source:
            # No relations: every tuple of target elements is a hom.
            bases[e] = gf.identity(total)
            dims[e] = total
            continue
        rows = []
        for rdeg, col in zip(reldegs, relcols):
            block_rows = n.dim_or_zero(e + rdeg)
            blockmat = gf.zeros(block_rows, total)
            for i, (ai, entry) in enumerate(zip(a, col)):
                if entry.is_zero() or offs[i + 1] == offs[i] or block_rows == 0:
                    continue
                blockmat[:, offs[i]:offs[i + 1]] = n.poly_action(entry, e + ai)
            rows.append(blockmat)
        constraint = np.concatenate(rows, axis=0) if rows else gf.zeros(0, total)
        basis = gf.kernel_basis(constraint, p)
        bases[e] = basis
        dims[e] = basis.shape[1]
    actions = [dict() for _ in ring.weights]
    for v, w in enumerate(ring.weights):
        for e in range(dmin, dmax + 1 - w):
            offs = offsets[e]
            offs2 = offsets[e + w]
            total2 = offs2[-1]
            block = gf.zeros(total2, offs[-1])
            for i, ai in enumerate(a):
                if offs[i + 1] == offs[i]:
                    continue
                block[offs2[i]:offs2[i + 1], offs[i]:offs[i + 1]] = \
                    n.action(v, e + ai)
            if free_source:
                actions[v][e] = block
                continue
            img = gf.matmul(block, bases[e], p)
            x = gf.solve_many(bases[e + w], img, p)
            if x is None:
                raise CertificationError("Hom module not action-stable (bug)")
            actions[v][e] = x
    h = GradedModule(ring, dmin, dmax, dims, actions,
                     label=f"Hom({m.label},{n.label})")
    h.hom_data = {"source": m, "coeff": n, "gen_degrees": a,
                  "bases": bases, "offsets": offsets, "free": free_source}
    return h


def _cover_section(m, d):
    """Cached right inverse of the minimal cover's degree-d matrix."""
    cache = getattr(m, "_cover_sections", None)
    if cache is None:
        cache = m._cover_sections = {}
    if d not in cache:
        cm = m.presentation.cover.mat(d)
        sec = gf.solve_many(cm, gf.identity(cm.shape[0]), m.p)
        if sec is None:
            raise CertificationError("cover is not surjective (bug)")
        cache[d] = sec
    return cache[d]


def hom_evaluate(h, e, phi_vec, d, m_vec):
    """Evaluate a degree-e hom element on an element of M_d; lands in N_{d+e}."""
    data = h.hom_data
    m = data["source"]
    n = data["coeff"]
    a = data["gen_degrees"]
    p = h.p
    full = gf.matmul(data["bases"][e], phi_vec.reshape(-1, 1), p).ravel()
    offs = data["offsets"][e]
    cover = m.presentation.free_cover
    x = gf.matmul(_cover_section(m, d),
                  np.asarray(m_vec, dtype=np.int64).reshape(-1, 1), p).ravel()
    out = np.zeros(n.dim_or_zero(d + e), dtype=np.int64)
    for j, (i, mon) in enumerate(cover.basis[d]):
        if x[j] == 0 or offs[i + 1] == offs[i]:
            continue
        phi_i = full[offs[i]:offs[i + 1]]
        moved = gf.matmul(n.monomial_action(mon, e + a[i]),
                          phi_i.reshape(-1, 1), p).ravel()
        out = (out + int(x[j]) * moved) % p
    return out


def hom_evaluate_elements(h, e, phi_vec, d, m_mat):
    """Evaluate one hom element on every column of m_mat at once."""
    data = h.hom_data
    m = data["source"]
    n = data["coeff"]
    a = data["gen_degrees"]
    p = h.p
    full = gf.matmul(data["bases"][e], phi_vec.reshape(-1, 1), p).ravel()
    offs = data["offsets"][e]
    cover = m.presentation.free_cover
    x = gf.matmul(_cover_section(m, d), m_mat, p)
    out = np.zeros((n.dim_or_zero(d + e), m_mat.shape[1]), dtype=np.int64)
    for j, (i, mon) in enumerate(cover.basis[d]):
        if offs[i + 1] == offs[i]:
            continue
        row = x[j, :]
        if not row.any():
            continue
        moved = gf.matmul(n.monomial_action(mon, e + a[i]),
                          full[offs[i]:offs[i + 1]].reshape(-1, 1), p).ravel()
        out = (out + np.outer(moved, row)) % p
    return out


def hom_evaluate_many(h, e, phi_mat, d, m_vec):
    """Evaluate all columns of phi_mat (hom coordinates) on one element.

    Returns an (dim N_{d+e} x ncols) matrix; the batched counterpart of
    hom_evaluate.
    """
    data = h.hom_data
    m = data["source"]
    n = data["coeff"]
    a = data["gen_degrees"]
    p = h.p
    ncols = phi_mat.shape[1]
    full = gf.matmul(data["bases"][e], phi_mat, p)
    offs = data["offsets"][e]
    cover = m.presentation.free_cover
    x = gf.matmul(_cover_section(m, d),
                  np.asarray(m_vec, dtype=np.int64).reshape(-1, 1), p).ravel()
    out = np.zeros((n.dim_or_zero(d + e), ncols), dtype=np.int64)
    for j, (i, mon) in enumerate(cover.basis[d]):
        if x[j] == 0 or offs[i + 1] == offs[i]:
            continue
        moved = gf.matmul(n.monomial_action(mon, e + a[i]),
                          full[offs[i]:offs[i + 1], :], p)
        out = (out + int(x[j]) * moved) % p
    return out


def induced_hom_map(f, hom_target, hom_source):
    """Hom(f, N): Hom(B, N) -> Hom(A, N) for f: A -> B, by precomposition."""
    a_mod = hom_source.hom_data["source"]
    p = f.p
    pres_a = a_mod.presentation
    mats = {}
    for e in range(max(hom_source.dmin, hom_target.dmin),
                   min(hom_source.dmax, hom_target.dmax) + 1):
        nb = hom_target.dim(e)
        ident = gf.identity(nb)
        comps = []
        for i, (ai, gv) in enumerate(zip(pres_a.gen_degrees,
                                         pres_a.gen_vectors)):
            img = gf.matmul(f.mat(ai), gv.reshape(-1, 1), p).ravel()
            comps.append(hom_evaluate_many(hom_target, e, ident, ai, img))
        full = (np.concatenate(comps, axis=0) if comps
                else np.zeros((0, nb), dtype=np.int64))
        if hom_source.hom_data.get("free"):
            mats[e] = full
        else:
            x = gf.solve_many(hom_source.hom_data["bases"][e], full, p)
            if x is None:
                raise CertificationError(
                    "precomposition left the Hom module (bug)")
            mats[e] = x
    return GradedMap(hom_target, hom_source, mats, label=f"Hom({f.label},-)")


def induced_post_map(f, hom_ha, hom_hb):
    """Hom(H, f): Hom(H, A) -> Hom(H, B) for f: A -> B, by postcomposition."""
    a_mod = f.source
    b_mod = f.target
    h = hom_ha.hom_data["source"]
    gen_degs = hom_ha.hom_data["gen_degrees"]
    p = f.p
    mats = {}
    for e in range(max(hom_ha.dmin, hom_hb.dmin),
                   min(hom_ha.dmax, hom_hb.dmax) + 1):
        offs_a = hom_ha.hom_data["offsets"][e]
        basis_a = hom_ha.hom_data["bases"][e]
        nb = hom_ha.dim(e)
        comps = []
        for i, ai in enumerate(gen_degs):
            blk = basis_a[offs_a[i]:offs_a[i + 1], :]
            if blk.shape[0] == 0:
                comps.append(np.zeros((b_mod.dim_or_zero(e + ai), nb),
                                      dtype=np.int64))
            else:
                comps.append(gf.matmul(f.mat(e + ai), blk, p))
        flat = (np.concatenate(comps, axis=0) if comps
                else np.zeros((0, nb), dtype=np.int64))
        if hom_hb.hom_data.get("free"):
            mats[e] = flat
        else:
            x = gf.solve_many(hom_hb.hom_data["bases"][e], flat, p)
            if x is None:
                raise CertificationError("postcomposition left the Hom module")
            mats[e] = x
    return GradedMap(hom_ha, hom_hb, mats, label=f"Hom(-,{f.label})")


def quotient_by_element(m, s):
    """(M/sM, projection) for a homogeneous ring element s."""
    ring = m.ring
    e = s.weighted_degree(ring.weights)
    spans = {}
    for d in m.degrees():
        if d - e >= m.dmin:
            spans[d] = m.poly_action(s, d - e)
    q, proj = quotient_by_spans(m, spans)
    q.label = f"{m.label}/s"
    return q, proj


def biduality_map(m, dmax_hint=None):
    """(map M -> M**, M*, M**); components compared on the common window."""
    ring = m.ring
    rmod = ring_as_module(ring, dmax=m.dmax + 2 * ring.max_step)
    dual = hom_module(m, rmod)
    bidual = hom_module(dual, rmod)
    p = m.p
    pres_dual = dual.presentation
    b = pres_dual.gen_degrees
    mats = {}
    dmin = max(m.dmin, bidual.dmin)
    dmax = min(m.dmax, bidual.dmax)
    for d in range(dmin, dmax + 1):
        cols = []
        for jcol in range(m.dim(d)):
            vec = np.zeros(m.dim(d), dtype=np.int64)
            vec[jcol] = 1
            comps = []
            for (bj, psi_vec) in zip(b, pres_dual.gen_vectors):
                comps.append(hom_evaluate(dual, bj, psi_vec, d, vec))
            full = np.concatenate(comps) if comps else np.zeros(0, dtype=np.int64)
            x = gf.solve(bidual.hom_data["bases"][d], full, p)
            if x is None:
                raise CertificationError("biduality image left M** (bug)")
            cols.append(x)
        mats[d] = (np.stack(cols, axis=1) if cols
                   else gf.zeros(bidual.dim(d), 0))
    return GradedMap(m, bidual, mats, label="biduality"), dual, bidual


# ---------------------------------------------------------------------------
# Tensor products of modules
# ---------------------------------------------------------------------------

def tensor_modules(a, b, dmax=None):
    """A (x)_R B via presentations of both factors."""
    ring = a.ring
    p = a.p
    pa = a.present(with_relations=True)
    pb = b.present(with_relations=True)
    twists = [ai + bk for ai in pa.gen_degrees for bk in pb.gen_degrees]
    nvars = ring.nvars
    zero = Poly.zero(nvars, p)
    rel_cols = []
    # Relations of A against every generator of B.
    for col in pa.rel_columns:
        for kk in range(len(pb.gen_degrees)):
            new = []
            for i in range(len(pa.gen_degrees)):
                for k2 in range(len(pb.gen_degrees)):
                    new.append(col[i] if k2 == kk else zero)
            rel_cols.append(new)
    # Relations of B against every generator of A.
    for col in pb.rel_columns:
        for ii in range(len(pa.gen_degrees)):
            new = []
            for i2 in range(len(pa.gen_degrees)):
                for k in range(len(pb.gen_degrees)):
                    new.append(col[k] if i2 == ii else zero)
            rel_cols.append(new)
    if dmax is None:
        dmax = min(a.dmax, b.dmax)
    return presented_module(ring, twists, rel_cols,
                            dmin=min(twists, default=0), dmax=dmax,
                            label=f"{a.label}(x){b.label}")


def presented_module(ring, twists, rel_columns, dmin=None, dmax=40, label=""):
    """Module from generator twists and relation columns of polynomials."""
    if dmin is None:
        dmin = min(twists, default=0)
    cover = free_module(ring, twists, dmin, dmax)
    spans = {d: [] for d in range(dmin, dmax + 1)}
    for col in rel_columns:
        degs = set()
        for a, entry in zip(twists, col):
            ed = entry.weighted_degree(ring.weights)
            if ed is not None:
                degs.add(ed + a)
        if not degs:
            continue
        if len(degs) > 1:
            raise InputError(
                f"relation column is not homogeneous: degrees {sorted(degs)}")
        e = degs.pop()
        if e > dmax:
            continue
        base_vec = cover.element_from_polys(col, e)
        # Close the span under monomial multiplication degree by degree.
        for d in range(e, dmax + 1):
            for mon in ring.monomials(d - e):
                moved = gf.matmul(cover.monomial_action(mon, e),
                                  base_vec.reshape(-1, 1), ring.p).ravel()
                spans[d].append(moved)
    span_mats = {d: (np.stack(v, axis=1) if v else gf.zeros(cover.dim(d), 0))
                 for d, v in spans.items()}
    q, proj = quotient_by_spans(cover, span_mats)
    q.label = label or "presented"
    gen_vectors = []
    for i in range(len(twists)):
        d, vec = cover.generator_vector(i)
        gen_vectors.append(gf.matmul(proj.mat(d), vec.reshape(-1, 1),
                                     ring.p).ravel())
    eps = proj
    eps.source = cover
    q.presentation = Presentation(
        gen_degrees=list(twists), gen_vectors=gen_vectors,
        cover=GradedMap(cover, q, {d: proj.mat(d) for d in q.degrees()},
                        label="cover"),
        rel_degrees=None, rel_columns=None)
    # Relation columns as given may be non-minimal; recompute lazily on demand.
    return q
