"""Chain complexes of graded modules.

Bounded complexes with degree-zero differentials, plus the standard
constructions: shifts, mapping cones, tensor products against complexes
of free modules, Koszul complexes, slotwise duals, truncations,
homology, and the finite-length alternating-sum identity.

Sign convention for tensor differentials:
d(a (x) b) = da (x) b + (-1)^|a| a (x) db.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import gf
from .errors import CertificationError, InputError, UnsupportedError
from .module import (FreeModule, GradedMap, GradedModule, direct_sum,
                     free_module, homology_at, hom_module, induced_hom_map,
                     image, ring_as_module, twist, zero_map)
from .poly import Poly


class ChainComplex:
    """A bounded complex: slots[n] with differentials slots[n] -> slots[n-1]."""

    def __init__(self, ring, slots, diffs, check=True):
        self.ring = ring
        self.slots = dict(slots)
        self.diffs = dict(diffs)
        if self.slots:
            self.nmin = min(self.slots)
            self.nmax = max(self.slots)
        else:
            self.nmin = 0
            self.nmax = -1
        dmins = [m.dmin for m in self.slots.values()]
        dmaxs = [m.dmax for m in self.slots.values()]
        self._dmin = min(dmins, default=0)
        self._dmax = max(dmaxs, default=0)
        if check:
            self.check_d_squared()

    def slot(self, n):
        m = self.slots.get(n)
        if m is None:
            m = GradedModule.zero_module(self.ring, self._dmin, self._dmax)
        return m

    def diff(self, n):
        d = self.diffs.get(n)
        if d is None:
            d = zero_map(self.slot(n), self.slot(n - 1))
        return d

    def support(self):
        return [n for n in range(self.nmin, self.nmax + 1)
                if not self.slot(n).is_zero()]

    def check_d_squared(self):
        for n in range(self.nmin + 2, self.nmax + 1):
            comp = self.diff(n - 1).compose(self.diff(n))
            if not comp.is_zero():
                raise CertificationError(
                    f"differential squared is nonzero between slots {n} and {n-2}")
        return True

    def __repr__(self):
        return (f"ChainComplex(slots {self.nmin}..{self.nmax}, "
                f"ranks {[self.slot(n).total_dim() for n in range(self.nmin, self.nmax + 1)]})")

    # -- constructions -------------------------------------------------------

    def shift(self, k=1):
        """Slot n of the result holds slot n-k; differentials pick up (-1)^k."""
        slots = {n + k: m for n, m in self.slots.items()}
        sign = (-1) ** k
        diffs = {n + k: (d if sign == 1 else d.scale(-1 % d.p))
                 for n, d in self.diffs.items()}
        return ChainComplex(self.ring, slots, diffs, check=False)

    def homology(self, n):
        return homology_at(self.diff(n), self.diff(n + 1))

    def homology_is_zero(self, n):
        return self.homology(n).is_zero()

    def is_exact(self, exclude=()):
        return all(self.homology_is_zero(n)
                   for n in range(self.nmin, self.nmax + 1)
                   if n not in exclude)

    def hard_truncation(self, n):
        """Drop every slot below n (and the differential leaving slot n)."""
        slots = {m: s for m, s in self.slots.items() if m >= n}
        diffs = {m: d for m, d in self.diffs.items() if m > n}
        return ChainComplex(self.ring, slots, diffs, check=False)

    def soft_truncation(self, d):
        """Replace slot d by the image of its incoming differential.

        For an acyclic-above-zero complex this is the d-th syzygy sitting
        inside slot d-1, giving 0 -> K_d -> F_{d-1} -> ... -> F_0 -> 0.
        """
        if d <= self.nmin or d > self.nmax:
            raise InputError(f"soft truncation index {d} out of range")
        syz, incl = image(self.diff(d))
        slots = {m: s for m, s in self.slots.items() if m < d}
        slots[d] = syz
        diffs = {m: dd for m, dd in self.diffs.items() if m < d}
        diffs[d] = incl
        return ChainComplex(self.ring, slots, diffs, check=False)

    def alternating_sum(self):
        """(slot sum, homology sum) of alternating lengths; must agree.

        Requires every slot to have certified finite length.
        """
        slot_sum = 0
        for n in range(self.nmin, self.nmax + 1):
            ln = self.slot(n).length()
            if ln is None:
                raise InputError(
                    f"slot {n} has no finite-length certificate")
            slot_sum += (-1) ** n * ln
        h_sum = 0
        for n in range(self.nmin, self.nmax + 1):
            h = self.homology(n)
            lh = h.length()
            if lh is None:
                raise InputError(
                    f"homology at slot {n} has no finite-length certificate")
            h_sum += (-1) ** n * lh
        if slot_sum != h_sum:
            raise CertificationError(
                f"alternating sums disagree: slots {slot_sum}, homology {h_sum}")
        return slot_sum, h_sum


# ---------------------------------------------------------------------------
# Maps of complexes and mapping cones
# ---------------------------------------------------------------------------

class ChainMap:
    """A degreewise map of complexes, one GradedMap per slot."""

    def __init__(self, source, target, comps, check=True):
        self.source = source
        self.target = target
        self.comps = dict(comps)
        if check:
            self.check_chain_map()

    def comp(self, n):
        c = self.comps.get(n)
        if c is None:
            c = zero_map(self.source.slot(n), self.target.slot(n))
        return c

    def check_chain_map(self):
        lo = min(self.source.nmin, self.target.nmin)
        hi = max(self.source.nmax, self.target.nmax)
        for n in range(lo + 1, hi + 1):
            a = self.target.diff(n).compose(self.comp(n))
            b = self.comp(n - 1).compose(self.source.diff(n))
            diff = a + (-b)
            if not diff.is_zero():
                raise InputError(
                    f"not a chain map: square at slot {n} does not commute")
        return True


def block_map(source_sum, target_sum, blocks):
    """Assemble a GradedMap between direct sums from a grid of blocks.

    blocks[i][j] maps source part j to target part i; None means zero.
    """
    total = None
    for i, row in enumerate(blocks):
        for j, g in enumerate(row):
            if g is None:
                continue
            term = target_sum.sum_inclusions[i].compose(g).compose(
                source_sum.sum_projections[j])
            total = term if total is None else total + term
    if total is None:
        total = zero_map(source_sum, target_sum)
    return GradedMap(source_sum, target_sum, total.mats, label="block")


def cone(f: ChainMap):
    """Mapping cone: slot n = source_{n-1} (+) target_n.

    The differential is (x, y) |-> (-dx, f(x) + dy); the result's
    d-squared is validated.
    """
    x, y = f.source, f.target
    ring = x.ring
    nmin = min(x.nmin + 1, y.nmin)
    nmax = max(x.nmax + 1, y.nmax)
    slots = {}
    for n in range(nmin, nmax + 1):
        slots[n] = direct_sum(x.slot(n - 1), y.slot(n))
    diffs = {}
    p = ring.p
    for n in range(nmin + 1, nmax + 1):
        dx = x.diff(n - 1).scale(-1 % p)
        diffs[n] = block_map(
            slots[n], slots[n - 1],
            [[dx, None],
             [f.comp(n - 1), y.diff(n)]])
    return ChainComplex(ring, slots, diffs, check=True)


# ---------------------------------------------------------------------------
# Free complexes, Koszul complexes, tensor products
# ---------------------------------------------------------------------------

def free_map(src: FreeModule, tgt: FreeModule, entries):
    """Map between free modules from a matrix of polynomial entries.

    entries[k][l] is the coefficient of target generator k in the image
    of source generator l; it must be homogeneous of the right degree.
    """
    ring = src.ring
    p = ring.p
    mats = {}
    for d in range(max(src.dmin, tgt.dmin), min(src.dmax, tgt.dmax) + 1):
        cols = np.zeros((tgt.dim(d), src.dims[d]), dtype=np.int64)
        for j, (l, mon) in enumerate(src.basis[d]):
            monp = Poly.monomial(mon, ring.nvars, p)
            polys = [entries[k][l] * monp for k in range(len(tgt.twists))]
            cols[:, j] = tgt.element_from_polys(polys, d)
        mats[d] = cols
    return GradedMap(src, tgt, mats)


def map_entries(f: GradedMap):
    """Polynomial entry matrix of a map between free modules."""
    src, tgt = f.source, f.target
    out = []
    for k in range(len(tgt.twists)):
        out.append([None] * len(src.twists))
    for l in range(len(src.twists)):
        d, vec = src.generator_vector(l)
        img = gf.matmul(f.mat(d), vec.reshape(-1, 1), f.p).ravel()
        polys = tgt.vector_to_polys(d, img)
        for k in range(len(tgt.twists)):
            out[k][l] = polys[k]
    return out


def koszul(ring, elems, dmax=40):
    """Koszul complex on a sequence of homogeneous elements.

    Slot j is free of rank C(c, j) on the j-element subsets, with twists
    the degree sums; the differential drops one element at a time with
    alternating signs.
    """
    degs = []
    for s in elems:
        e = s.weighted_degree(ring.weights)
        if e is None or e <= 0:
            raise InputError("Koszul elements must be homogeneous of positive degree")
        degs.append(e)
    c = len(elems)
    subsets = {j: list(itertools.combinations(range(c), j))
               for j in range(c + 1)}
    slots = {}
    for j in range(c + 1):
        twists = [sum(degs[i] for i in s) for s in subsets[j]]
        slots[j] = free_module(ring, twists, 0, dmax)
    zero = Poly.zero(ring.nvars, ring.p)
    diffs = {}
    for j in range(1, c + 1):
        entries = [[zero] * len(subsets[j]) for _ in subsets[j - 1]]
        index = {s: k for k, s in enumerate(subsets[j - 1])}
        for l, s in enumerate(subsets[j]):
            for t, i in enumerate(s):
                rest = tuple(a for a in s if a != i)
                sign = (-1) ** t
                entries[index[rest]][l] = elems[i] * sign
        diffs[j] = free_map(slots[j], slots[j - 1], entries)
    return ChainComplex(ring, slots, diffs, check=True)


def tensor(c: ChainComplex, d: ChainComplex):
    """Total complex of the tensor product, one factor free slotwise.

    At least one factor must consist of free modules with known twists;
    general module slots are then tensored as direct sums of twists.
    """
    def all_free(cx):
        return all(isinstance(cx.slot(n), FreeModule) or cx.slot(n).is_zero()
                   for n in range(cx.nmin, cx.nmax + 1))

    if not all_free(d):
        if all_free(c):
            return tensor(d, c)
        raise UnsupportedError(
            "tensor of two complexes with non-free slots is not supported")
    ring = c.ring
    p = ring.p
    nmin = c.nmin + d.nmin
    nmax = c.nmax + d.nmax
    # Parts of slot n: (i, j, generator index of D_j) with i + j = n.
    parts = {}
    slots = {}
    for n in range(nmin, nmax + 1):
        items = []
        mods = []
        for j in range(d.nmin, d.nmax + 1):
            i = n - j
            if i < c.nmin or i > c.nmax:
                continue
            dj = d.slot(j)
            twists = dj.free_twists if dj.free_twists is not None else []
            for g, a in enumerate(twists):
                items.append((i, j, g))
                mods.append(twist(c.slot(i), a))
        parts[n] = items
        slots[n] = (direct_sum(*mods) if mods
                    else GradedModule.zero_module(ring, c._dmin, c._dmax))
    diffs = {}
    for n in range(nmin + 1, nmax + 1):
        src_parts = parts[n]
        tgt_parts = parts[n - 1]
        tgt_index = {q: t for t, q in enumerate(tgt_parts)}
        blocks = [[None] * len(src_parts) for _ in tgt_parts]
        for s_idx, (i, j, g) in enumerate(src_parts):
            a = d.slot(j).free_twists[g]
            # dC (x) 1 component: (i, j, g) -> (i-1, j, g).
            key = (i - 1, j, g)
            if key in tgt_index:
                dm = c.diff(i)
                shifted = GradedMap(slots[n].sum_parts[s_idx],
                                    slots[n - 1].sum_parts[tgt_index[key]],
                                    {dd + a: dm.mat(dd) for dd in dm.degrees()})
                blocks[tgt_index[key]][s_idx] = shifted
            # (-1)^i 1 (x) dD component: generator g of D_j maps into D_{j-1}.
            if j - 1 >= d.nmin:
                entriesD = map_entries(d.diff(j))
                for h, b in enumerate(d.slot(j - 1).free_twists):
                    q = entriesD[h][g]
                    if q.is_zero():
                        continue
                    key = (i, j - 1, h)
                    if key not in tgt_index:
                        continue
                    sign = (-1) ** i
                    srcm = slots[n].sum_parts[s_idx]       # C_i twisted by a
                    tgtm = slots[n - 1].sum_parts[tgt_index[key]]  # by b
                    ci = c.slot(i)
                    mats = {}
                    for dd in ci.degrees():
                        if dd + (a - b) > ci.dmax:
                            continue
                        mats[dd + a] = (sign * ci.poly_action(q, dd)) % p
                    term = GradedMap(srcm, tgtm, mats)
                    prev = blocks[tgt_index[key]][s_idx]
                    blocks[tgt_index[key]][s_idx] = (
                        term if prev is None else prev + term)
        diffs[n] = block_map(slots[n], slots[n - 1], blocks)
    return ChainComplex(ring, slots, diffs, check=True)


def dualize(c: ChainComplex, rmod=None):
    """Apply Hom(-, R) slotwise and reindex so slot m holds the dual of
    slot top-m; differentials are precompositions."""
    ring = c.ring
    if rmod is None:
        rmod = ring_as_module(ring, dmax=c._dmax + 2 * ring.max_step)
    top = c.nmax
    duals = {}
    for n in range(c.nmin, c.nmax + 1):
        s = c.slot(n)
        if s.is_zero():
            duals[n] = GradedModule.zero_module(ring, -c._dmax, c._dmax)
        else:
            duals[n] = hom_module(s, rmod)
    slots = {top - n: duals[n] for n in range(c.nmin, c.nmax + 1)}
    diffs = {}
    for n in range(c.nmin + 1, c.nmax + 1):
        if c.slot(n).is_zero() or c.slot(n - 1).is_zero():
            continue
        # Slot top-(n-1) -> slot top-n, i.e. Hom(C_{n-1}) -> Hom(C_n).
        diffs[top - n + 1] = induced_hom_map(c.diff(n), duals[n - 1], duals[n])
    return ChainComplex(ring, slots, diffs, check=True)


def twist_complex(c, a):
    """Twist every slot by a: component d of each new slot is old d - a."""
    slots = {n: twist(m, a) for n, m in c.slots.items()}
    diffs = {}
    for n, f in c.diffs.items():
        diffs[n] = GradedMap(slots[n], slots[n - 1],
                             {d + a: f.mat(d) for d in f.degrees()})
    return ChainComplex(c.ring, slots, diffs, check=False)


def mult_chain_map(c, s):
    """Multiplication by a homogeneous s as a chain map twist(C, e) -> C."""
    e = s.weighted_degree(c.ring.weights)
    src = twist_complex(c, e)
    comps = {}
    for n, m in c.slots.items():
        mats = {}
        for d in m.degrees():
            if d + e > m.dmax:
                continue
            mats[d + e] = m.poly_action(s, d)
        comps[n] = GradedMap(src.slot(n), m, mats, label="mult")
    return ChainMap(src, c, comps, check=True)


def one_slot(module, n=0):
    """The complex with a single module placed in slot n."""
    return ChainComplex(module.ring, {n: module}, {}, check=False)
