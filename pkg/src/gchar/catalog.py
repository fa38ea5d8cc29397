"""Ready-made rings and modules for the engine's worked computations.

Each entry materializes a weighted-graded complete-intersection ring
over GF(13) together with the modules of interest on it (residue field,
graded maximal ideal and its powers, syzygies, matrix-factorization
cokernels, distinguished quotients), plus generic-point parametrizations
of the irreducible components of Spec R for probabilistic rank.  Entries
are immutable after build and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf
from .errors import CertificationError, InputError
from .poly import Poly, parse_poly
from .ring import make_ring
from .module import (FreeModule, GradedMap, GradedModule, direct_sum,
                     free_module, image, presented_module, quotient_by_map,
                     quotient_by_spans, ring_as_module, twist)
from .complexes import ChainComplex, free_map
from . import resolution as resolution_mod
from . import gdim as gdim_mod

P = 13


@dataclass
class CatalogEntry:
    """A named ring with its distinguished modules and rank data."""

    name: str
    ring: object
    modules: dict
    components: list = None            # generic-point parametrizations
    classification_complete: bool = False
    tr_labels: list = field(default_factory=list)   # advertised totally reflexive
    et_labels: list = field(default_factory=list)   # epsilon/tau candidate pool
    elements: dict = field(default_factory=dict)    # distinguished ring elements
    notes: str = ""

    def module(self, label):
        m = self.modules.get(label)
        if m is None:
            raise InputError(
                f"entry {self.name!r} has no module {label!r}; "
                f"available: {sorted(self.modules)}")
        return m


# ---------------------------------------------------------------------------
# Generic builders
# ---------------------------------------------------------------------------

def _params(texts, names):
    return [parse_poly(t, list(names), P) for t in texts]


def ideal_module(ring, polys, dmax, label="I"):
    """The ideal generated by homogeneous polynomials, as a submodule of R."""
    rmod = ring_as_module(ring, dmax=dmax)
    degs = []
    for q in polys:
        e = q.weighted_degree(ring.weights)
        if e is None or e <= 0:
            raise InputError("ideal generators must have positive degree")
        degs.append(e)
    cover = free_module(ring, degs, dmax=dmax)
    f = free_map(cover, rmod, [list(polys)])
    sub, incl = image(f)
    sub.label = label
    sub._ideal_map = f
    return sub, incl


def cyclic_quotient(ring, polys, dmax, label=None):
    """R modulo the ideal generated by homogeneous polynomials."""
    cols = [[q] for q in polys]
    lab = label or ("R/(" + ",".join(q.format(ring.names) for q in polys) + ")")
    return presented_module(ring, [0], cols, dmax=dmax, label=lab)


def max_ideal(ring, dmax, label="m"):
    """The graded maximal ideal (all variables) as a submodule of R."""
    return ideal_module(ring, [ring.variable(i) for i in range(ring.nvars)],
                        dmax, label=label)


def _exponents_of_total(nvars, t):
    if nvars == 1:
        yield (t,)
        return
    for e in range(t + 1):
        for rest in _exponents_of_total(nvars - 1, t - e):
            yield (e,) + rest


def max_ideal_power(ring, t, dmax, label=None):
    """The t-th power of the graded maximal ideal as a submodule of R."""
    gens = [Poly.monomial(e, ring.nvars, ring.p)
            for e in _exponents_of_total(ring.nvars, t)]
    return ideal_module(ring, gens, dmax, label=label or f"m^{t}")


def max_ideal_power_quotient(ring, t, dmax, label=None):
    """R / m^t from the same generating monomials."""
    gens = [Poly.monomial(e, ring.nvars, ring.p)
            for e in _exponents_of_total(ring.nvars, t)]
    return cyclic_quotient(ring, gens, dmax, label=label or f"R/m^{t}")


def submodule_quotient(sub, incl, polys, shift_degs, label):
    """Quotient of a realized submodule of R by an ideal's image inside it.

    polys generate the ideal J; the result is sub / (J R cap sub) with
    the span at degree d obtained by solving J's degree-d vectors into
    sub's inclusion basis.
    """
    ring = sub.ring
    p = sub.p
    spans = {}
    for d in sub.degrees():
        cols = []
        for q, e in zip(polys, shift_degs):
            if d - e < 0:
                continue
            mat = ring.mult_matrix(q, d - e)
            for j in range(mat.shape[1]):
                cols.append(mat[:, j])
        if not cols:
            continue
        stacked = np.stack(cols, axis=1)
        x = gf.solve_many(incl.mat(d), stacked, p)
        if x is None:
            raise InputError("ideal does not land inside the submodule")
        spans[d] = x
    q, _ = quotient_by_spans(sub, spans)
    q.label = label
    return q


# ---------------------------------------------------------------------------
# Matrix factorizations
# ---------------------------------------------------------------------------

def _parse_matrix(entries, ring):
    out = []
    for row in entries:
        out.append([e if isinstance(e, Poly) else ring.parse(e) for e in row])
    return out


def _infer_mf_twists(phi, ring):
    """Generator twists (g for targets, h for sources) from entry degrees."""
    n = len(phi)
    g = [None] * n
    h = [None] * n
    g[0] = 0
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                e = phi[i][j].weighted_degree(ring.weights)
                if e is None:
                    continue
                if g[i] is not None and h[j] is None:
                    h[j] = g[i] + e
                    changed = True
                elif h[j] is not None and g[i] is None:
                    g[i] = h[j] - e
                    changed = True
                elif g[i] is not None and h[j] is not None:
                    if h[j] - g[i] != e:
                        raise InputError(
                            "matrix factorization entries are not homogeneous "
                            "for any generator twists")
    if any(v is None for v in g) or any(v is None for v in h):
        raise InputError("matrix factorization has an unreachable generator")
    base = min(g)
    return [v - base for v in g], [v - base for v in h]


def mf_cokernel(ring, phi_entries, psi_entries, dmax=40, label="coker",
                certify=True):
    """Coker(phi) for a matrix factorization (phi, psi) of the hypersurface.

    Verifies phi.psi = psi.phi = f.I as polynomial matrices, builds the
    presented cokernel, attaches the two-periodic complete-resolution
    window, and certifies total reflexivity.
    """
    if ring.codim != 1:
        raise InputError("matrix factorizations require a hypersurface ring")
    f = ring.relations[0]
    phi = _parse_matrix(phi_entries, ring)
    psi = _parse_matrix(psi_entries, ring)
    n = len(phi)
    if any(len(r) != n for r in phi) or len(psi) != n or \
            any(len(r) != n for r in psi):
        raise InputError("matrix factorization matrices must be square")
    zero = Poly.zero(ring.nvars, ring.p)
    for a, b in ((phi, psi), (psi, phi)):
        for i in range(n):
            for j in range(n):
                s = zero
                for l in range(n):
                    s = s + a[i][l] * b[l][j]
                want = f if i == j else zero
                if s != want:
                    raise InputError(
                        "matrix product is not f times the identity")
    g, h = _infer_mf_twists(phi, ring)
    cols = [[phi[i][j] for i in range(n)] for j in range(n)]
    mod = presented_module(ring, g, cols, dmax=dmax, label=label)
    if mod.is_zero():
        mod._mf_pair = (phi, psi)
        return mod
    df = ring.relation_degrees[0]
    slots = {1: free_module(ring, h, dmax=dmax),
             0: free_module(ring, g, dmax=dmax),
             -1: free_module(ring, [a - df for a in h], dmax=dmax),
             -2: free_module(ring, [a - df for a in g], dmax=dmax)}
    diffs = {1: free_map(slots[1], slots[0], phi),
             0: free_map(slots[0], slots[-1], psi),
             -1: free_map(slots[-1], slots[-2], phi)}
    window = ChainComplex(ring, slots, diffs)
    mod._mf_pair = (phi, psi)
    mod._complete_window = window
    if certify and not gdim_mod.is_totally_reflexive(mod).ok:
        raise CertificationError(
            "matrix-factorization cokernel failed the reflexivity certificate")
    return mod


# ---------------------------------------------------------------------------
# Entries
# ---------------------------------------------------------------------------

def _with_components(ring, components):
    ring.component_data = components
    return ring


def _entry_hypersurface_dim1(dmax, f="x^2"):
    ring = make_ring(P, ("x", "y"), (1, 1), (f,))
    comps = [_params(["0", "t"], ["t"])]
    _with_components(ring, comps)
    rmod = ring_as_module(ring, dmax=dmax)
    k = resolution_mod.residue_field(ring, dmax=dmax)
    msub, mincl = max_ideal(ring, dmax)
    modules = {"R": rmod, "k": k, "m": msub}
    for t in range(2, 5):
        modules[f"m^{t}"], _ = max_ideal_power(ring, t, dmax)
    for t in range(1, 5):
        modules[f"R/m^{t}"] = max_ideal_power_quotient(ring, t, dmax)
    y2 = ring.parse("y^2")
    modules["m/y2R"] = submodule_quotient(msub, mincl, [y2], [2],
                                          label="m/y2R")
    return CatalogEntry(
        name="hypersurface-dim1", ring=ring, modules=modules,
        components=comps, tr_labels=["m"],
        elements={"y": ring.parse("y")},
        notes="one-dimensional hypersurface with a single reduced component")


def _entry_regular2(dmax):
    ring = make_ring(P, ("x", "y"), (1, 1), ())
    rmod = ring_as_module(ring, dmax=dmax)
    k = resolution_mod.residue_field(ring, dmax=dmax)
    msub, _ = max_ideal(ring, dmax)
    return CatalogEntry(name="regular2", ring=ring,
                        modules={"R": rmod, "k": k, "m": msub},
                        notes="regular in two variables; every pdim is finite")


def _entry_e3c1(dmax):
    ring = make_ring(P, ("x", "y", "z"), (1, 1, 1), ("x^2",))
    comps = [_params(["0", "s", "t"], ["s", "t"])]
    _with_components(ring, comps)
    modules = {"R": ring_as_module(ring, dmax=dmax),
               "k": resolution_mod.residue_field(ring, dmax=dmax),
               "m": max_ideal(ring, dmax)[0]}
    return CatalogEntry(name="e3c1", ring=ring, modules=modules,
                        components=comps,
                        notes="embedding dimension 3, one quadric relation")


def _entry_e4c1(dmax):
    ring = make_ring(P, ("x", "y", "z", "w"), (1, 1, 1, 1), ("x^2",))
    comps = [_params(["0", "s", "t", "u"], ["s", "t", "u"])]
    _with_components(ring, comps)
    modules = {"R": ring_as_module(ring, dmax=dmax),
               "k": resolution_mod.residue_field(ring, dmax=dmax)}
    return CatalogEntry(name="e4c1", ring=ring, modules=modules,
                        components=comps,
                        notes="embedding dimension 4, one quadric relation")


def _entry_ci32(dmax):
    ring = make_ring(P, ("x", "y", "z"), (1, 1, 1), ("x^2", "y^2"))
    comps = [_params(["0", "0", "t"], ["t"])]
    _with_components(ring, comps)
    modules = {"R": ring_as_module(ring, dmax=dmax),
               "k": resolution_mod.residue_field(ring, dmax=dmax),
               "m": max_ideal(ring, dmax)[0]}
    return CatalogEntry(name="ci-3-2", ring=ring, modules=modules,
                        components=comps,
                        notes="codimension-two complete intersection")


def _entry_threefold(dmax):
    ring = make_ring(P, ("x", "y", "z"), (1, 1, 1), ("x^2+y^2+z^2",))
    # (7(s^2-t^2))^2 + (4(s^2+t^2))^2 + (st)^2 = 13(s^4 - s^2 t^2 + t^4) = 0.
    comps = [_params(["7*s^2+6*t^2", "4*s^2+4*t^2", "s*t"], ["s", "t"])]
    _with_components(ring, comps)
    modules = {"R": ring_as_module(ring, dmax=dmax),
               "k": resolution_mod.residue_field(ring, dmax=dmax),
               "m": max_ideal(ring, dmax)[0]}
    return CatalogEntry(name="threefold", ring=ring, modules=modules,
                        components=comps,
                        notes="two-dimensional quadric hypersurface")


def _entry_axes(dmax):
    ring = make_ring(P, ("x", "y"), (1, 1), ("x*y",))
    comps = [_params(["t", "0"], ["t"]), _params(["0", "t"], ["t"])]
    _with_components(ring, comps)
    rmod = ring_as_module(ring, dmax=dmax)
    modules = {"R": rmod,
               "k": resolution_mod.residue_field(ring, dmax=dmax),
               "m": max_ideal(ring, dmax)[0],
               "R/y": cyclic_quotient(ring, [ring.parse("y")], dmax,
                                      label="R/y")}
    return CatalogEntry(
        name="axes", ring=ring, modules=modules, components=comps,
        elements={"s": ring.parse("x+y")},
        notes="two coordinate axes; x+y cuts each component transversally")


def _an_odd_ring(n):
    if n % 2 == 0:
        raise InputError("the A_n entry requires n odd")
    if n == 1:
        return make_ring(P, ("x", "y"), (1, 1), ("x^2+y^2",))
    return make_ring(P, ("x", "y"), (n + 1, 2), (f"x^2+y^{n + 1}",))


def _entry_an_odd(dmax, n=1):
    ring = _an_odd_ring(n)
    m_half = (n + 1) // 2
    # 5^2 = -1 mod 13, so x^2 + y^(n+1) = (x + 5 y^m)(x - 5 y^m), m=(n+1)/2.
    plus = f"x+5*y^{m_half}" if m_half > 1 else "x+5*y"
    minus = f"x+8*y^{m_half}" if m_half > 1 else "x+8*y"
    comps = [_params([f"8*t^{m_half}" if m_half > 1 else "8*t", "t"], ["t"]),
             _params([f"5*t^{m_half}" if m_half > 1 else "5*t", "t"], ["t"])]
    _with_components(ring, comps)
    rmod = ring_as_module(ring, dmax=dmax)
    modules = {"R": rmod,
               "k": resolution_mod.residue_field(ring, dmax=dmax),
               "m": max_ideal(ring, dmax)[0]}
    r_plus = mf_cokernel(ring, [[minus]], [[plus]], dmax=dmax, label="R+")
    r_minus = mf_cokernel(ring, [[plus]], [[minus]], dmax=dmax, label="R-")
    modules["R+"] = r_plus
    modules["R-"] = r_minus
    both = direct_sum(r_plus, r_minus)
    both.label = "R++R-"
    modules["R++R-"] = both
    tr = ["R+", "R-", "R++R-"]
    for j in range(1, m_half):
        nj = mf_cokernel(
            ring,
            [["x", f"y^{j}" if j > 1 else "y"],
             [f"y^{n + 1 - j}", "12*x"]],
            [["x", f"y^{j}" if j > 1 else "y"],
             [f"y^{n + 1 - j}", "12*x"]],
            dmax=dmax, label=f"N{j}")
        modules[f"N{j}"] = nj
        tr.append(f"N{j}")
    name = "node" if n == 1 else f"An-odd-{n}"
    return CatalogEntry(
        name=name, ring=ring, modules=modules, components=comps,
        classification_complete=True, tr_labels=tr,
        et_labels=tr + ["k", "m"],
        notes="the relevant factorizations are rational over GF(13); the "
              "classification-complete flag relies on that rationality")


def _entry_cusp(dmax):
    ring = make_ring(P, ("x", "y"), (3, 2), ("x^2+y^3",))
    comps = [_params(["t^3", "12*t^2"], ["t"])]
    _with_components(ring, comps)
    rmod = ring_as_module(ring, dmax=dmax)
    n_mod = mf_cokernel(ring, [["x", "y"], ["y^2", "12*x"]],
                        [["x", "y"], ["y^2", "12*x"]], dmax=dmax, label="N")
    modules = {"R": rmod,
               "k": resolution_mod.residue_field(ring, dmax=dmax),
               "m": max_ideal(ring, dmax)[0],
               "N": n_mod}
    return CatalogEntry(
        name="cusp", ring=ring, modules=modules, components=comps,
        classification_complete=True, tr_labels=["N", "m"],
        et_labels=["N", "m", "k"],
        notes="weighted grading (deg x = 3, deg y = 2) homogenizes the cubic")


def _entry_quadric4(dmax):
    ring = make_ring(P, ("x", "y", "z", "w"), (1, 1, 1, 1), ("x*y+12*z*w",))
    comps = [_params(["a*b", "c*d", "a*d", "c*b"], ["a", "b", "c", "d"])]
    _with_components(ring, comps)
    modules = {"R": ring_as_module(ring, dmax=dmax),
               "k": resolution_mod.residue_field(ring, dmax=dmax),
               "R/p": cyclic_quotient(ring, [ring.parse("x"),
                                             ring.parse("z")], dmax,
                                      label="R/p"),
               "R/q": cyclic_quotient(ring, [ring.parse("y"),
                                             ring.parse("w")], dmax,
                                      label="R/q")}
    return CatalogEntry(
        name="quadric-4var", ring=ring, modules=modules, components=comps,
        notes="irreducible quadric; p=(x,z) and q=(y,w) with R/p tensor R/q "
              "of finite length")


_BUILDERS = {
    "hypersurface-dim1": _entry_hypersurface_dim1,
    "regular2": _entry_regular2,
    "e3c1": _entry_e3c1,
    "e4c1": _entry_e4c1,
    "ci-3-2": _entry_ci32,
    "threefold": _entry_threefold,
    "axes": _entry_axes,
    "node": _entry_an_odd,
    "An-odd": _entry_an_odd,
    "cusp": _entry_cusp,
    "quadric-4var": _entry_quadric4,
}

_DEFAULT_DMAX = {
    "e3c1": 16,
    "e4c1": 12,
    "ci-3-2": 16,
    "threefold": 16,
    "quadric-4var": 12,
}

_CACHE = {}


def list_entries():
    return sorted(_BUILDERS)


def build(name, dmax=None, **params):
    """Materialize a catalog entry (cached per name/bounds/params)."""
    if name not in _BUILDERS:
        raise InputError(f"unknown catalog entry {name!r}; "
                         f"available: {list_entries()}")
    if dmax is None:
        dmax = _DEFAULT_DMAX.get(name, 40)
    key = (name, dmax, tuple(sorted(params.items())))
    if key not in _CACHE:
        _CACHE[key] = _BUILDERS[name](dmax, **params)
    return _CACHE[key]


# ---------------------------------------------------------------------------
# Sampling for the property suites
# ---------------------------------------------------------------------------

def sample_modules(entry, count=20, seed=0):
    """Deterministic list of (label, module) pairs over an entry's ring.

    Drawn from twists and small direct sums of the entry's named modules
    and the low syzygies of k, so that every sample has computable
    invariants inside the default windows.
    """
    import random
    rng = random.Random(seed)
    ring = entry.ring
    base = [(lab, m) for lab, m in sorted(entry.modules.items())]
    k = entry.modules.get("k")
    if k is not None:
        for n in (1, 2):
            s = resolution_mod.syzygy(k, n, hmax=n)
            if not s.is_zero():
                s.label = f"syz{n}(k)"
                base.append((s.label, s))
    out = []
    while len(out) < count:
        roll = rng.random()
        if roll < 0.45 or len(base) == 1:
            lab, m = base[rng.randrange(len(base))]
            a = rng.randrange(0, 3)
            if a:
                m2 = twist(m, a)
                m2.label = f"{lab}({-a})"
                out.append((m2.label, m2))
            else:
                out.append((lab, m))
        else:
            (l1, m1), (l2, m2) = (base[rng.randrange(len(base))]
                                  for _ in range(2))
            s = direct_sum(m1, m2)
            s.label = f"{l1}+{l2}"
            out.append((s.label, s))
    return out[:count]


def epsilon_tau_candidates(entry, with_sums=True):
    """The candidate pool for the restricted epsilon/tau infima."""
    labels = entry.et_labels or sorted(entry.modules)
    cands = [(lab, entry.module(lab)) for lab in labels]
    if with_sums:
        extra = []
        for i in range(len(cands)):
            for j in range(i, len(cands)):
                li, mi = cands[i]
                lj, mj = cands[j]
                s = direct_sum(mi, mj)
                s.label = f"{li}+{lj}"
                extra.append((s.label, s))
        cands = cands + extra
    return cands


# ---------------------------------------------------------------------------
# Definition-file text format
# ---------------------------------------------------------------------------

def render_ring_text(ring):
    lines = [f"field {ring.p}"]
    for n, w in zip(ring.names, ring.weights):
        lines.append(f"var {n} {w}")
    for f in ring.relations:
        lines.append(f"rel {f.format(ring.names)}")
    return "\n".join(lines) + "\n"


def render_module_text(m):
    pres = m.present(with_relations=True)
    lines = ["gens " + " ".join(str(d) for d in pres.gen_degrees)]
    for j, col in enumerate(pres.rel_columns):
        for i, q in enumerate(col):
            if not q.is_zero():
                lines.append(f"row {i} col {j} : {q.format(m.ring.names)}")
    return "\n".join(lines) + "\n"


def parse_ring_text(text):
    p = None
    names = []
    weights = []
    rels = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(None, 2)
        try:
            if parts[0] == "field":
                p = int(parts[1])
            elif parts[0] == "var":
                names.append(parts[1])
                weights.append(int(parts[2]))
            elif parts[0] == "rel":
                rels.append(line.split(None, 1)[1])
            else:
                raise InputError(f"line {ln}: unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise InputError(f"line {ln}: malformed ring directive "
                             f"({raw.strip()!r})") from exc
    if p is None or not names:
        raise InputError("ring file needs a field line and at least one var")
    return make_ring(p, tuple(names), tuple(weights), tuple(rels))


def parse_module_text(text, ring, dmax=40, label="M"):
    gens = None
    entries = {}
    ncols = 0
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("gens"):
            try:
                gens = [int(t) for t in line.split()[1:]]
            except ValueError as exc:
                raise InputError(f"line {ln}: malformed gens line") from exc
            continue
        if line.startswith("row"):
            head, _, poly_text = line.partition(":")
            parts = head.split()
            try:
                i = int(parts[1])
                j = int(parts[3])
            except (IndexError, ValueError) as exc:
                raise InputError(f"line {ln}: malformed row/col entry") from exc
            entries[(i, j)] = ring.parse(poly_text.strip())
            ncols = max(ncols, j + 1)
            continue
        raise InputError(f"line {ln}: unknown directive ({line!r})")
    if gens is None:
        raise InputError("module file needs a gens line")
    zero = Poly.zero(ring.nvars, ring.p)
    cols = [[entries.get((i, j), zero) for i in range(len(gens))]
            for j in range(ncols)]
    return presented_module(ring, gens, cols, dmax=dmax, label=label)
