"""Flow categories, the collapsing functor and its homotopy fibers.

Public functions speak in category terms: a morphism ``a -> b`` of the
flow category is a flow path with target ``a`` whose initial cell is a
proper face of ``b``.  The identity of ``c`` is the length-0 path ``(c)``.
Composition ``g o h`` of ``h: a -> b`` and ``g: b -> c`` is the path
``steps(g) + steps(h)`` with target ``a``, reduced in the reduced variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .errors import OrderViolationError, TypeMismatchError
from .flowpaths import (DEFAULT_PATH_CAP, FlowPath, FlowPoset, embedding, flow_poset,
                        path_label, reduce, trivial_path, upgrade)
from .morse import DiscreteMorseFunction, PartialMatching, faithful_function
from .poset import (FinitePoset, PosetMap, _bits, is_ascending_closure_operator,
                    is_descending_closure_operator)


def concatenate(fp, g: FlowPath, h: FlowPath) -> FlowPath:
    """``g * h``: the steps of ``g`` followed by those of ``h``.

    Needs ``target(g)`` to contain ``initial(h)`` as a face; equality only
    happens when ``h`` is the trivial path at ``target(g)``.
    """
    if not fp.is_face(h.initial, g.target):
        raise TypeMismatchError("cannot concatenate: %s is not a face of %s"
                                % (fp.ids[h.initial], fp.ids[g.target]))
    if not h.steps:
        return g if g.target == h.target else FlowPath(g.steps, h.target)
    return FlowPath(g.steps + h.steps, h.target)


def reduced_compose(m: PartialMatching, g: FlowPath, h: FlowPath) -> FlowPath:
    return reduce(m, concatenate(m.fp, g, h))


def tau_on_morphism(g: FlowPath, phi) -> FlowPath:
    """Image of the relation ``g <= g'`` witnessed by ``phi``: the suffix of ``g`` from ``e_k``."""
    return g.suffix(len(phi) - 1)


class FlowCategory:
    """Critical cells as objects, hom posets of flow paths."""

    def __init__(self, m: PartialMatching, flow: FlowPoset, reduced: bool):
        self.matching = m
        self.fp = m.fp
        self.flow = flow
        self.reduced = reduced
        self.objects = tuple(m.critical)
        fp = self.fp
        homs = {}
        for a in self.objects:
            for b in self.objects:
                if a == b:
                    members = [trivial_path(a)]
                else:
                    members = [g for g in flow.paths
                               if g.target == a and fp.is_proper_face(g.initial, b)]
                homs[(a, b)] = flow.poset.subposet(members)
        for c in self.objects:
            stray = [g for g in flow.paths if g.target == c and g.steps
                     and fp.is_proper_face(g.initial, c)]
            if stray:
                raise OrderViolationError("non-trivial endomorphism of %s" % fp.ids[c])
        self.homs = homs
        self._composition = None

    def __repr__(self):
        return "FlowCategory(%d objects, reduced=%s)" % (len(self.objects), self.reduced)

    def hom(self, a: int, b: int) -> FinitePoset:
        return self.homs[(a, b)]

    def identity(self, c: int) -> FlowPath:
        return trivial_path(c)

    def label(self, g: FlowPath) -> str:
        return path_label(self.fp, g)

    def leq(self, g: FlowPath, h: FlowPath) -> bool:
        return self.flow.poset.leq(g, h)

    def compose(self, g: FlowPath, h: FlowPath) -> FlowPath:
        """``g o h`` for ``h: a -> b`` and ``g: b -> c``."""
        out = concatenate(self.fp, g, h)
        return reduce(self.matching, out) if self.reduced else out

    def composition_table(self) -> dict:
        """``(a, b, c) -> {(g, h): g o h}`` over all composable pairs."""
        if self._composition is None:
            table = {}
            objs = self.objects
            for a, b, c in product(objs, repeat=3):
                target = self.homs[(a, c)]
                entries = {}
                for g in self.homs[(b, c)]:
                    for h in self.homs[(a, b)]:
                        k = self.compose(g, h)
                        if k not in target:
                            raise OrderViolationError(
                                "composite %s lands outside hom(%s, %s)"
                                % (self.label(k), self.fp.ids[a], self.fp.ids[c]))
                        entries[(g, h)] = k
                table[(a, b, c)] = entries
            self._composition = table
        return self._composition

    def tau(self, g: FlowPath, h: FlowPath) -> FlowPath:
        """Collapsing functor on the relation ``g <= h``."""
        phi = embedding(self.fp, g, h)
        if phi is None:
            raise ValueError("%s is not a subpath of %s" % (self.label(g), self.label(h)))
        return tau_on_morphism(g, phi)

    def to_json(self) -> str:
        ids = self.fp.ids
        homs = []
        for (a, b), p in sorted(self.homs.items()):
            homs.append({"source": ids[a], "target": ids[b],
                         "elements": [self.label(g) for g in p.elements],
                         "covers": [[self.label(x), self.label(y)] for x, y in p.cover_pairs()]})
        comp = []
        for (a, b, c), entries in sorted(self.composition_table().items()):
            for (g, h), k in entries.items():
                comp.append([self.label(g), self.label(h), self.label(k)])
        data = {"objects": [ids[c] for c in self.objects], "reduced": self.reduced,
                "homs": homs, "composition": comp}
        return json.dumps(data, indent=1)


def build_flow_category(m: PartialMatching, reduced: bool = False,
                        cap: int = DEFAULT_PATH_CAP, flow: FlowPoset | None = None) -> FlowCategory:
    if flow is None:
        flow = flow_poset(m, reduced_only=reduced, cap=cap)
    fc = FlowCategory(m, flow, reduced)
    fc.composition_table()
    return fc


# fibers of the collapsing functor

def fiber(fc: FlowCategory, c: int) -> FinitePoset:
    """Paths with target ``c`` under the subpath order."""
    return fc.flow.poset.subposet([g for g in fc.flow.paths if g.target == c])


def _pair_label(fc, first, second):
    return "(%s, %s)" % (fc.label(first), fc.label(second))


def _fiber_poset(fc: FlowCategory, c: int, left: bool) -> FinitePoset:
    # elements are grouped by path; within a group they follow the hom's element order
    paths = fc.flow.paths
    homs = [fc.homs[(g.target, c)] if left else fc.homs[(c, g.target)] for g in paths]
    base, elems = [], []
    for g, h in zip(paths, homs):
        base.append(len(elems))
        elems += [(g, d) if left else (d, g) for d in h.elements]
    above = [0] * len(elems)
    p = fc.flow.poset
    for i, g in enumerate(paths):
        for j in _bits(p.above[i]):
            g2 = paths[j]
            t = tau_on_morphism(g, embedding(fc.fp, g, g2))
            src, dst = homs[i], homs[j]
            if left:
                # (g, d) <= (g2, d2) iff d2 o t <= d
                for b, d2 in enumerate(dst.elements):
                    x = src.index[fc.compose(d2, t)]
                    for a in _bits(src.above[x]):
                        above[base[i] + a] |= 1 << (base[j] + b)
            else:
                # (d, g) <= (d2, g2) iff t o d <= d2
                for a, d in enumerate(src.elements):
                    x = dst.index[fc.compose(t, d)]
                    above[base[i] + a] |= dst.above[x] << base[j]
    below = [0] * len(elems)
    for i, mask in enumerate(above):
        for j in _bits(mask):
            below[j] |= 1 << i
    return FinitePoset(elems, below, label=lambda x: _pair_label(fc, *x))


def right_fiber(fc: FlowCategory, c: int) -> FinitePoset:
    """Pairs ``(delta, g)`` with ``delta: c -> target(g)``.

    ``(delta, g) <= (delta', g')`` iff ``g <= g'`` and
    ``tau(g <= g') o delta <= delta'``.
    """
    return _checked(_fiber_poset(fc, c, left=False))


def left_fiber(fc: FlowCategory, c: int) -> FinitePoset:
    """Pairs ``(g, delta)`` with ``delta: target(g) -> c``.

    ``(g, delta) <= (g', delta')`` iff ``g <= g'`` and
    ``delta' o tau(g <= g') <= delta``.
    """
    return _checked(_fiber_poset(fc, c, left=True))


def fiber_order_bruteforce(fc: FlowCategory, c: int, left: bool) -> FinitePoset:
    """The same fiber orders evaluated pair by pair from the defining formulas."""
    elems = []
    for g in fc.flow.paths:
        if left:
            elems += [(g, d) for d in fc.homs[(g.target, c)].elements]
        else:
            elems += [(d, g) for d in fc.homs[(c, g.target)].elements]

    def leq(x, y):
        if left:
            (g, d), (g2, d2) = x, y
        else:
            (d, g), (d2, g2) = x, y
        phi = embedding(fc.fp, g, g2)
        if phi is None:
            return False
        t = tau_on_morphism(g, phi)
        if left:
            return fc.leq(fc.compose(d2, t), d)
        return fc.leq(fc.compose(t, d), d2)

    return FinitePoset.from_leq(elems, leq, label=lambda x: _pair_label(fc, *x))


def _checked(p: FinitePoset) -> FinitePoset:
    problems = p.check_axioms()
    if problems:
        raise OrderViolationError("; ".join(problems[:5]))
    return p


def rho_closure(fc: FlowCategory, c: int, right: FinitePoset | None = None) -> PosetMap:
    """``(delta, g) -> (1_c, g o delta)`` on the right fiber over ``c``."""
    if right is None:
        right = right_fiber(fc, c)
    one = trivial_path(c)
    table = {(d, g): (one, fc.compose(g, d)) for d, g in right.elements}
    return PosetMap(right, right, table)


def rho_image_is_fiber(fc: FlowCategory, c: int, rho: PosetMap) -> bool:
    """The image of ``rho`` is ``{1_c} x fiber(c)``, with the same order."""
    image = rho.image()
    genuine = fiber(fc, c)
    if sorted(g for _, g in image) != sorted(genuine.elements):
        return False
    dom = rho.domain
    return all(dom.leq(x, y) == genuine.leq(x[1], y[1]) for x in image for y in image)


# contraction of the genuine fiber along the level filtration

@dataclass
class ContractionLog:
    ok: bool = True
    steps: list = field(default_factory=list)
    failure: str | None = None

    def lines(self) -> list[str]:
        out = list(self.steps)
        if self.failure:
            out.append("FAILED: " + self.failure)
        return out


def verify_fiber_contractible(m: PartialMatching, c: int, f: DiscreteMorseFunction | None = None,
                              reduced: bool = False, flow: FlowPoset | None = None,
                              check_homology: bool = True) -> tuple[bool, ContractionLog]:
    """Contract the fiber over ``c`` one level of ``f o initial`` at a time.

    At a level holding a matched lower cell ``d`` the paths starting at
    ``d`` are upgraded (an ascending closure operator); at a level holding
    ``mu(d)`` they lose their first step (a descending one).  Each map
    must have the next filtration stage as its image.  The last stage
    must be ``{(c)}``.  Optionally cross-checks that the order complex of
    the fiber has vanishing reduced homology.
    """
    from .homology import is_acyclic_space

    fp = m.fp
    if f is None:
        f = faithful_function(m)
    if flow is None:
        flow = flow_poset(m, reduced_only=reduced)
    log = ContractionLog()
    stage = [g for g in flow.paths if g.target == c]
    whole = flow.poset.subposet(stage)
    if check_homology and not is_acyclic_space(whole):
        log.ok = False
        log.failure = "fiber over %s has non-trivial reduced homology" % fp.ids[c]
        return False, log
    cell_at = {f(x): x for x in fp.cells}
    for level in sorted(cell_at, reverse=True):
        if level <= f(c):
            break
        x = cell_at[level]
        moving = [g for g in stage if g.initial == x]
        if not moving:
            continue
        sub = flow.poset.subposet(stage)
        if x in m.up:
            table = {g: (upgrade(g) if g.initial == x else g) for g in stage}
            kind, good = "upgrade", is_ascending_closure_operator
        elif x in m.down:
            table = {g: (g.suffix(2) if g.initial == x else g) for g in stage}
            kind, good = "drop first step", is_descending_closure_operator
        else:
            log.ok = False
            log.failure = "level %d: paths start at critical cell %s" % (level, fp.ids[x])
            return False, log
        if any(y not in sub for y in table.values()):
            log.ok = False
            log.failure = "level %d (%s at %s): image leaves the filtration stage" % (
                level, kind, fp.ids[x])
            return False, log
        rho = PosetMap(sub, sub, table)
        nxt = [g for g in stage if g.initial != x]
        if not good(rho) or sorted(set(table.values())) != sorted(nxt):
            log.ok = False
            log.failure = "level %d (%s at %s): not a closure operator onto the next stage" % (
                level, kind, fp.ids[x])
            return False, log
        log.steps.append("level %d: %s at %s, %d -> %d paths" % (
            level, kind, fp.label(x), len(stage), len(nxt)))
        stage = nxt
    if stage != [trivial_path(c)]:
        log.ok = False
        log.failure = "filtration ends in %d paths, not the trivial path" % len(stage)
        return False, log
    return True, log
