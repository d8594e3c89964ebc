"""Exhaustive property checks over one complex with an acyclic matching.

Every check returns ``(ok, detail)``; :func:`run_suite` runs them all in a
fixed order.  The command line ``verify`` subcommand and the test-suite
share this module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from importlib import resources
from itertools import product

from .category import (build_flow_category, left_fiber, rho_closure,
                       rho_image_is_fiber, right_fiber, tau_on_morphism,
                       verify_fiber_contractible)
from .cw import FacePoset, load_complex, validate_regular
from .flowpaths import (FlowPoset, embedding, embeddings, enumerate_flow_paths, flow_poset,
                        is_reduced, path_problems, reduce, stable_face_poset, trivial_path)
from .errors import CapacityError
from .homology import DEFAULT_SIMPLEX_CAP, HomologyResult, nerve_homology, poset_homology
from .morse import (PartialMatching, faithful_function, is_acyclic, is_faithful, load_matching,
                    matching_from_function)
from .poset import PosetMap, _bits, is_descending_closure_operator

log = logging.getLogger(__name__)


@dataclass
class Context:
    """Everything derived from one matching, built once and shared by the checks."""

    m: PartialMatching
    max_dim: int | None = None
    cap_paths: int = 10**6
    cap_simplices: int = DEFAULT_SIMPLEX_CAP
    _cache: dict = field(default_factory=dict)

    @property
    def fp(self) -> FacePoset:
        return self.m.fp

    def _get(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    @property
    def f(self):
        return self._get("f", lambda: faithful_function(self.m))

    @property
    def paths(self):
        return self._get("paths", lambda: enumerate_flow_paths(self.m, self.cap_paths))

    def flow(self, reduced: bool) -> FlowPoset:
        return self._get(("flow", reduced),
                         lambda: flow_poset(self.m, reduced_only=reduced, paths=self.paths))

    def category(self, reduced: bool):
        return self._get(("cat", reduced),
                         lambda: build_flow_category(self.m, reduced, flow=self.flow(reduced)))

    @property
    def nerve_dim(self) -> int:
        return self.max_dim if self.max_dim is not None else self.fp.dim + 1


def _fail(msg, *args):
    return False, msg % args


def check_regular(ctx):
    ok, diag = validate_regular(ctx.fp)
    return ok, "; ".join(diag[:3]) if diag else "graded, diamond"


def check_matching(ctx):
    ok, cycle = is_acyclic(ctx.m)
    if not ok:
        return _fail("closed gradient path through %s", [ctx.fp.ids[d] for d in cycle])
    f = ctx.f
    if matching_from_function(f) != ctx.m:
        return _fail("faithful function induces a different matching")
    if not is_faithful(f):
        return _fail("constructed function is not faithful")
    return True, "acyclic, %d critical, faithful round trip" % len(ctx.m.critical)


def check_paths(ctx):
    """Paths are valid, values decrease along them, ``reduce`` lands in reduced paths."""
    m, f = ctx.m, ctx.f
    for g in ctx.paths:
        bad = path_problems(m, g)
        if bad:
            return _fail("invalid path: %s", bad[0])
        vals = []
        for e, u in g.steps:
            vals += [f(e), f(u)]
        vals.append(f(g.target))
        for i in range(len(vals) - 1):
            strict = i % 2 == 1
            if vals[i] < vals[i + 1] or (strict and vals[i] == vals[i + 1]):
                return _fail("values do not decrease along %s", ctx.flow(False).label(g))
    return True, "%d paths, %d reduced" % (len(ctx.paths), len(ctx.flow(True)))


def check_order(ctx):
    """Partial order, unique embeddings, and the target/length lemmas."""
    fp, f = ctx.fp, ctx.f
    for reduced in (False, True):
        fpo = ctx.flow(reduced)
        probs = fpo.poset.check_axioms()
        if probs:
            return _fail("%s", probs[0])
    fpo = ctx.flow(False)
    for g, h in product(fpo.paths, repeat=2):
        found = list(embeddings(fp, g, h))
        if len(found) > 1:
            return _fail("two embedding functions for %s <= %s", fpo.label(g), fpo.label(h))
        if found:
            if f(g.target) > f(h.target):
                return _fail("target value rises along %s <= %s", fpo.label(g), fpo.label(h))
            if g.target == h.target and g.length > h.length:
                return _fail("length rises along %s <= %s", fpo.label(g), fpo.label(h))
    return True, "%d relations, all embeddings unique" % fpo.poset.relation_count()


def check_reduction(ctx):
    """``reduce`` is an idempotent order-preserving retraction and a descending closure operator."""
    m = ctx.m
    full = ctx.flow(False)
    red = ctx.flow(True)
    table = {g: reduce(m, g) for g in full.paths}
    if any(not is_reduced(m, r) for r in table.values()):
        return _fail("reduction leaves a reducible path")
    if any(table[r] != r for r in table.values()):
        return _fail("reduction is not idempotent")
    if sorted(set(table.values())) != sorted(red.paths):
        return _fail("image of reduction differs from the reduced paths")
    rmap = PosetMap(full.poset, full.poset, table)
    if not is_descending_closure_operator(rmap):
        return _fail("reduction is not a descending closure operator")
    for g, h in full.poset.relation_pairs():
        if not red.poset.leq(table[g], table[h]):
            return _fail("reduction does not preserve the order into the reduced poset")
    return True, "closure operator onto %d reduced paths" % len(red)


def _relations(p):
    return [(p.elements[j], p.elements[i]) for i, mk in enumerate(p.below) for j in _bits(mk)]


def _check_composition(fc):
    objs = fc.objects
    table = fc.composition_table()
    for a, b, c in product(objs, repeat=3):
        entries = table[(a, b, c)]
        target = fc.homs[(a, c)]
        for (g, g2), (h, h2) in product(_relations(fc.homs[(b, c)]), _relations(fc.homs[(a, b)])):
            if not target.leq(entries[(g, h)], entries[(g2, h2)]):
                return "composition is not monotone at %s o %s" % (fc.label(g2), fc.label(h2))
    for a, b, c, d in product(objs, repeat=4):
        for g in fc.homs[(c, d)]:
            for h in fc.homs[(b, c)]:
                gh = table[(b, c, d)][(g, h)]
                for k in fc.homs[(a, b)]:
                    if table[(a, b, d)][(gh, k)] != table[(a, c, d)][(g, table[(a, b, c)][(h, k)])]:
                        return "composition is not associative"
    for (a, b), p in fc.homs.items():
        one_a, one_b = trivial_path(a), trivial_path(b)
        for g in p:
            if table[(a, a, b)][(g, one_a)] != g or table[(a, b, b)][(one_b, g)] != g:
                return "identity law fails for %s" % fc.label(g)
    return None


def check_composition(ctx):
    """Composition is an associative poset map with units, in both variants."""
    for reduced in (False, True):
        err = _check_composition(ctx.category(reduced))
        if err:
            return _fail("%s (%s)", err, "reduced" if reduced else "full")
    fc = ctx.category(False)
    fp = ctx.fp
    for (a, b, c), entries in fc.composition_table().items():
        if a == b or b == c:
            continue
        for (g, h), k in entries.items():
            # h sits inside g * h only when its first cell lies under every e_p of g
            if h.length and all(fp.is_face(h.initial, g.e(p)) for p in range(1, g.length + 1)):
                if not fc.leq(h, k):
                    return _fail("%s is not a subpath of %s", fc.label(h), fc.label(k))
            if g.length and not fc.leq(k, g):
                return _fail("%s is not a subpath of %s", fc.label(k), fc.label(g))
    return True, "associative, unital, monotone"


def check_reduction_functor(ctx):
    """Reducing then composing equals composing then reducing."""
    m = ctx.m
    full, red = ctx.category(False), ctx.category(True)
    n = 0
    for (a, b, c), entries in full.composition_table().items():
        for (g, h), k in entries.items():
            if red.compose(reduce(m, g), reduce(m, h)) != reduce(m, k):
                return _fail("r(%s o %s) differs", full.label(g), full.label(h))
            n += 1
    for key, p in full.homs.items():
        if len(p) and not poset_homology(p).agrees_with(poset_homology(red.homs[key])):
            return _fail("hom %s: homology changes under reduction", key)
    return True, "%d composable pairs" % n


def check_colax(ctx):
    """Normality and the 2-chain inequality of the collapsing functor."""
    fp = ctx.fp
    for reduced in (False, True):
        fc = ctx.category(reduced)
        p = fc.flow.poset
        paths = fc.flow.paths
        tau = {}
        for g, h in p.relation_pairs():
            t = tau_on_morphism(g, embedding(fp, g, h))
            if t not in fc.homs[(g.target, h.target)]:
                return _fail("tau(%s <= %s) is not a morphism", fc.label(g), fc.label(h))
            tau[(g, h)] = t
        for g in paths:
            if tau[(g, g)] != trivial_path(g.target):
                return _fail("tau is not normal at %s", fc.label(g))
        count = 0
        for i, g3 in enumerate(paths):
            below3 = p.below[i]
            for j in _bits(below3):
                g2 = paths[j]
                for k in _bits(p.below[j]):
                    g1 = paths[k]
                    lhs = tau[(g1, g3)]
                    rhs = fc.compose(tau[(g2, g3)], tau[(g1, g2)])
                    if not fc.leq(lhs, rhs):
                        return _fail("colax inequality fails on %s <= %s <= %s",
                                     fc.label(g1), fc.label(g2), fc.label(g3))
                    count += 1
    return True, "%d chains" % count


def check_fibers(ctx):
    """Right fibers retract onto genuine fibers; left fibers are posets; fibers contract."""
    m, f = ctx.m, ctx.f
    for reduced in (False, True):
        fc = ctx.category(reduced)
        for c in m.critical:
            right = right_fiber(fc, c)
            rho = rho_closure(fc, c, right)
            if not is_descending_closure_operator(rho):
                return _fail("rho is not a descending closure operator over %s", m.fp.ids[c])
            if not rho_image_is_fiber(fc, c, rho):
                return _fail("rho image differs from the fiber over %s", m.fp.ids[c])
            left_fiber(fc, c)
            ok, clog = verify_fiber_contractible(m, c, f, reduced, flow=fc.flow)
            if not ok:
                return _fail("fiber over %s: %s", m.fp.ids[c], clog.failure)
    return True, "%d critical cells, both variants" % len(m.critical)


def homology_chain(ctx) -> dict[str, HomologyResult]:
    return ctx._get("homology", lambda: {
        "F(X)": poset_homology(ctx.fp.poset()),
        "FPbar": poset_homology(ctx.flow(True).poset),
        "FP": poset_homology(ctx.flow(False).poset),
        "B2 Cbar": nerve_homology(ctx.category(True), ctx.nerve_dim, ctx.cap_simplices),
        "B2 C": nerve_homology(ctx.category(False), ctx.nerve_dim, ctx.cap_simplices),
    })


def check_homology(ctx):
    chain = homology_chain(ctx)
    base = chain["F(X)"]
    for name, h in chain.items():
        if not base.agrees_with(h):
            return _fail("H(%s) = %s but H(F(X)) = %s", name, h.describe(), base.describe())
    return True, base.describe()


def check_stable(ctx):
    """The reduced path poset, graded by stable-cell dimension, looks like a regular face poset of X."""
    sfp = stable_face_poset(ctx.flow(True))
    ok, diag = validate_regular(sfp)
    if not ok:
        return _fail("%s", diag[0])
    if sfp.euler_characteristic() != ctx.fp.euler_characteristic():
        return _fail("Euler characteristic changes")
    return True, "cells %s" % (sfp.cell_counts(),)


CHECKS = [
    ("regular", check_regular),
    ("matching", check_matching),
    ("paths", check_paths),
    ("order", check_order),
    ("reduction", check_reduction),
    ("composition", check_composition),
    ("reduction functor", check_reduction_functor),
    ("colax", check_colax),
    ("fibers", check_fibers),
    ("homology", check_homology),
    ("stable cells", check_stable),
]


def run_suite(m: PartialMatching, max_dim=None, only=None, cap_paths=10**6,
              cap_simplices=DEFAULT_SIMPLEX_CAP) -> list[tuple[str, bool, str]]:
    """Run the checks in order; exceeding a size cap aborts the whole run."""
    ctx = Context(m, max_dim=max_dim, cap_paths=cap_paths, cap_simplices=cap_simplices)
    out = []
    for name, check in CHECKS:
        if only and name not in only:
            continue
        try:
            ok, detail = check(ctx)
        except CapacityError:
            raise
        except Exception as exc:  # a crash is a failure, never a pass
            log.debug("check %s raised", name, exc_info=True)
            ok, detail = False, "%s: %s" % (type(exc).__name__, exc)
        out.append((name, ok, detail))
    return out


FIXTURES = {
    "triangle": ("triangle.txt", "simplicial", "triangle.matching"),
    "simplex2": ("simplex2.txt", "simplicial", "simplex2.matching"),
    "full_simplex": ("full_simplex.txt", "simplicial", "full_simplex.matching"),
    "tetra_boundary": ("tetra_boundary.txt", "simplicial", "tetra_boundary.matching"),
    "torus": ("torus.json", "faceposet", "torus.matching"),
}


def fixture_path(name: str):
    return resources.files("flowcat") / "fixtures" / name


def load_fixture(name: str) -> PartialMatching:
    cx, kind, mt = FIXTURES[name]
    fp = load_complex(fixture_path(cx), kind)
    return load_matching(fp, fixture_path(mt))
