"""Explicit finite categories, functors, set-valued diagrams, cones, limits.

Categories are given by exhaustive data: object labels, hom-sets as lists
of morphism labels, a composition table, and identity assignments.  All
laws are checked by enumeration, never assumed.  Diagrams land in the
concrete setting of finite carrier sets and total maps, which makes limits
computable and the universal property a bounded brute-force search.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .errors import CapExceeded, InputError
from .validation import ValidationReport

DEFAULT_SEARCH_CAP = 5_000_000


# ---------------------------------------------------------------------------
# categories


@dataclass
class FinCategory:
    """A finite category presented by tables.

    objects: list of labels.
    homs: (src, dst) -> list of morphism labels; labels are globally unique.
    compose: (g, f) -> g after f, total on composable pairs.
    identities: object -> its identity morphism label.
    """

    objects: list
    homs: dict
    compose: dict
    identities: dict

    def morphisms(self) -> dict:
        """Label -> (src, dst).  Later duplicates win; check_category reports them."""
        table = {}
        for (src, dst), labels in self.homs.items():
            for m in labels:
                table[m] = (src, dst)
        return table

    def hom(self, src, dst) -> list:
        return self.homs.get((src, dst), [])

    def arrows(self, include_identities: bool = False) -> list:
        """(label, src, dst) triples in deterministic order."""
        out = []
        idents = set(self.identities.values())
        for (src, dst), labels in self.homs.items():
            for m in labels:
                if include_identities or m not in idents:
                    out.append((m, src, dst))
        return out


def discrete_category(objects: list) -> FinCategory:
    homs = {(o, o): [f"id_{o}"] for o in objects}
    return FinCategory(
        objects=list(objects),
        homs=homs,
        compose={(f"id_{o}", f"id_{o}"): f"id_{o}" for o in objects},
        identities={o: f"id_{o}" for o in objects},
    )


def poset_category(elements: list, leq) -> FinCategory:
    """Category of a finite poset: one arrow a -> b whenever leq(a, b)."""
    objects = list(elements)
    homs: dict = {}
    compose: dict = {}
    identities = {}

    def label(a, b):
        return f"id_{a}" if a == b else f"{a}<={b}"

    for a in objects:
        for b in objects:
            if leq(a, b):
                homs.setdefault((a, b), []).append(label(a, b))
        identities[a] = label(a, a)
    for a in objects:
        for b in objects:
            if not leq(a, b):
                continue
            for c in objects:
                if leq(b, c):
                    compose[(label(b, c), label(a, b))] = label(a, c)
    return FinCategory(objects, homs, compose, identities)


def check_category(c: FinCategory) -> ValidationReport:
    """Exhaustively verify identity and associativity laws.

    Structural defects (duplicate labels, missing identities, composition
    table gaps or mistyped composites) are reported with kind
    ``category.structure`` naming the offending pair.
    """
    report = ValidationReport()
    seen: dict = {}
    for (src, dst), labels in c.homs.items():
        if src not in c.objects or dst not in c.objects:
            report.add("category.structure", f"hom-set ({src},{dst}) references unknown object")
        for m in labels:
            if m in seen:
                report.add("category.structure", f"morphism label {m!r} used in {seen[m]} and ({src},{dst})")
            seen[m] = (src, dst)
    morphs = c.morphisms()

    for o in c.objects:
        i = c.identities.get(o)
        if i is None:
            report.add("category.structure", f"object {o!r} has no identity")
        elif morphs.get(i) != (o, o):
            report.add("category.structure", f"identity {i!r} of {o!r} is not in hom({o},{o})")
    if not report.ok:
        return report

    # composition total and well typed
    for g, (gs, gd) in morphs.items():
        for f, (fs, fd) in morphs.items():
            if fd != gs:
                continue
            gf = c.compose.get((g, f))
            if gf is None:
                report.add("category.structure", f"missing composite ({g!r}, {f!r})")
            elif morphs.get(gf) != (fs, gd):
                report.add(
                    "category.structure",
                    f"composite {gf!r} of ({g!r}, {f!r}) is not in hom({fs},{gd})",
                )
    if not report.ok:
        return report

    for f, (fs, fd) in morphs.items():
        if c.compose[(c.identities[fd], f)] != f:
            report.add("category.identity", f"id_{fd} o {f!r} != {f!r}")
        if c.compose[(f, c.identities[fs])] != f:
            report.add("category.identity", f"{f!r} o id_{fs} != {f!r}")

    for h, (hs, hd) in morphs.items():
        for g, (gs, gd) in morphs.items():
            if gd != hs:
                continue
            for f, (fs, fd) in morphs.items():
                if fd != gs:
                    continue
                left = c.compose[(h, c.compose[(g, f)])]
                right = c.compose[(c.compose[(h, g)], f)]
                if left != right:
                    report.add("category.assoc", f"h={h!r} g={g!r} f={f!r}: {left!r} != {right!r}")
    return report


# ---------------------------------------------------------------------------
# functors


@dataclass
class Functor:
    source: FinCategory
    target: FinCategory
    object_map: dict
    morphism_map: dict


def check_functor(f: Functor) -> ValidationReport:
    """Verify totality, typing, and preservation of identities and composites."""
    report = ValidationReport()
    src_morphs = f.source.morphisms()
    dst_morphs = f.target.morphisms()

    for o in f.source.objects:
        if o not in f.object_map:
            report.add("functor.structure", f"object {o!r} unmapped")
        elif f.object_map[o] not in f.target.objects:
            report.add("functor.structure", f"object {o!r} maps outside the target")
    for m, (ms, md) in src_morphs.items():
        fm = f.morphism_map.get(m)
        if fm is None:
            report.add("functor.structure", f"morphism {m!r} unmapped")
        elif dst_morphs.get(fm) != (f.object_map.get(ms), f.object_map.get(md)):
            report.add("functor.structure", f"morphism {m!r} -> {fm!r} is mistyped")
    if not report.ok:
        return report

    for o in f.source.objects:
        if f.morphism_map[f.source.identities[o]] != f.target.identities[f.object_map[o]]:
            report.add("functor.identity", f"identity of {o!r} not preserved")
    for (g, h), gf in f.source.compose.items():
        image = f.target.compose.get((f.morphism_map[g], f.morphism_map[h]))
        if image != f.morphism_map[gf]:
            report.add("functor.compose", f"composite ({g!r}, {h!r}) not preserved")
    return report


def compose_functors(g: Functor, f: Functor) -> Functor:
    if g.source is not f.target and g.source != f.target:
        raise InputError("functors not composable: middle categories differ")
    return Functor(
        source=f.source,
        target=g.target,
        object_map={o: g.object_map[v] for o, v in f.object_map.items()},
        morphism_map={m: g.morphism_map[v] for m, v in f.morphism_map.items()},
    )


# ---------------------------------------------------------------------------
# concrete diagrams and cones


@dataclass
class Diagram:
    """A functor from a finite index category into finite sets and total maps.

    carriers: index object -> list of hashable elements.
    maps: morphism label -> dict element -> element.
    Identity morphisms may be omitted from ``maps``; they act as identity.
    """

    index: FinCategory
    carriers: dict
    maps: dict = field(default_factory=dict)

    def map_of(self, m) -> dict:
        if m in self.maps:
            return self.maps[m]
        morphs = self.index.morphisms()
        src, dst = morphs[m]
        if m == self.index.identities.get(src) and src == dst:
            return {x: x for x in self.carriers[src]}
        raise InputError(f"diagram has no map for morphism {m!r}")


def check_diagram(d: Diagram) -> ValidationReport:
    """Functor laws for a concrete diagram: totality, typing, composition."""
    report = ValidationReport()
    morphs = d.index.morphisms()
    for o in d.index.objects:
        if o not in d.carriers:
            report.add("diagram.structure", f"object {o!r} has no carrier")
    if not report.ok:
        return report

    for m, (src, dst) in morphs.items():
        try:
            table = d.map_of(m)
        except InputError:
            report.add("diagram.structure", f"morphism {m!r} has no map")
            continue
        for x in d.carriers[src]:
            if x not in table:
                report.add("diagram.structure", f"map of {m!r} undefined on {x!r}")
            elif table[x] not in set(d.carriers[dst]):
                report.add("diagram.structure", f"map of {m!r} sends {x!r} outside carrier of {dst!r}")
    if not report.ok:
        return report

    for o in d.index.objects:
        table = d.map_of(d.index.identities[o])
        for x in d.carriers[o]:
            if table[x] != x:
                report.add("diagram.identity", f"identity of {o!r} moves {x!r}")
    for (g, f), gf in d.index.compose.items():
        fs, _ = morphs[f]
        mg, mf, mgf = d.map_of(g), d.map_of(f), d.map_of(gf)
        for x in d.carriers[fs]:
            if mg[mf[x]] != mgf[x]:
                report.add("diagram.compose", f"D({g!r}) o D({f!r}) != D({gf!r}) at {x!r}")
    return report


@dataclass
class Cone:
    """A cone on a concrete diagram.

    With ``to_apex=False`` legs are total maps from the apex carrier to each
    object carrier; with ``to_apex=True`` they run the other way (used for
    the dualized fixtures where the apex receives the diagram).
    """

    apex: list
    legs: dict
    to_apex: bool = False


def check_cone(cone: Cone, d: Diagram) -> ValidationReport:
    """Verify every triangle over a diagram arrow commutes, variance-adjusted."""
    report = ValidationReport()
    morphs = d.index.morphisms()
    for o in d.index.objects:
        if o not in cone.legs:
            report.add("cone.structure", f"missing leg at {o!r}")
    if not report.ok:
        return report

    for o in d.index.objects:
        leg = cone.legs[o]
        dom = d.carriers[o] if cone.to_apex else cone.apex
        cod = set(cone.apex) if cone.to_apex else set(d.carriers[o])
        for x in dom:
            if x not in leg:
                report.add("cone.structure", f"leg at {o!r} undefined on {x!r}")
            elif leg[x] not in cod:
                report.add("cone.structure", f"leg at {o!r} sends {x!r} outside its codomain")
    if not report.ok:
        return report

    idents = set(d.index.identities.values())
    for m, (src, dst) in morphs.items():
        if m in idents:
            continue
        table = d.map_of(m)
        if cone.to_apex:
            for x in d.carriers[src]:
                if cone.legs[src][x] != cone.legs[dst][table[x]]:
                    report.add(
                        "cone.triangle",
                        f"leg({src!r}) != leg({dst!r}) o D({m!r}) at {x!r}",
                    )
        else:
            for a in cone.apex:
                if cone.legs[dst][a] != table[cone.legs[src][a]]:
                    report.add(
                        "cone.triangle",
                        f"leg({dst!r}) != D({m!r}) o leg({src!r}) at apex element {a!r}",
                    )
    return report


def limit_of_diagram(d: Diagram) -> Cone:
    """Limit cone: apex = compatible families, legs = component projections.

    Families are tuples ordered like ``d.index.objects``.  Built by
    backtracking with early pruning on every arrow whose endpoints are both
    assigned; an empty apex is a valid result.
    """
    objects = list(d.index.objects)
    position = {o: i for i, o in enumerate(objects)}
    morphs = d.index.morphisms()
    idents = set(d.index.identities.values())
    arrows = [(m, src, dst) for m, (src, dst) in morphs.items() if m not in idents]
    # arrows become checkable once the later of their endpoints is assigned
    ready: list[list] = [[] for _ in objects]
    for m, src, dst in arrows:
        ready[max(position[src], position[dst])].append((d.map_of(m), position[src], position[dst]))

    families: list[tuple] = []
    partial: list = [None] * len(objects)

    def extend(i: int) -> None:
        if i == len(objects):
            families.append(tuple(partial))
            return
        for x in d.carriers[objects[i]]:
            partial[i] = x
            if all(table.get(partial[ps]) == partial[pd] for table, ps, pd in ready[i]):
                extend(i + 1)
        partial[i] = None

    extend(0)
    legs = {o: {fam: fam[position[o]] for fam in families} for o in objects}
    return Cone(apex=families, legs=legs)


def enumerate_cones(d: Diagram, max_apex_size: int, search_cap: int = DEFAULT_SEARCH_CAP) -> list[Cone]:
    """All cones with abstract apex {0..k-1}, k <= max_apex_size.

    Legs are enumerated exhaustively and filtered by the cone condition.
    Refuses (CapExceeded) when the raw leg count would pass ``search_cap``.
    """
    objects = list(d.index.objects)
    cones = []
    for k in range(max_apex_size + 1):
        total = 1
        for o in objects:
            total *= max(1, len(d.carriers[o])) ** k
        if total > search_cap:
            raise CapExceeded(f"cone enumeration at apex size {k}", total, search_cap)
        apex = list(range(k))
        per_object = [list(itertools.product(d.carriers[o], repeat=k)) for o in objects]
        for combo in itertools.product(*per_object):
            legs = {o: dict(zip(apex, combo[i])) for i, o in enumerate(objects)}
            cone = Cone(apex=apex, legs=legs)
            if check_cone(cone, d).ok:
                cones.append(cone)
    return cones


def check_universal_property(
    candidate: Cone,
    d: Diagram,
    cones: list[Cone],
    search_cap: int = DEFAULT_SEARCH_CAP,
) -> bool:
    """Brute-force universality: exactly one mediating map per listed cone.

    Every function from a cone's apex to the candidate's apex is tried;
    refuses (CapExceeded) when a single search would exceed ``search_cap``.
    """
    if candidate.to_apex or any(c.to_apex for c in cones):
        raise InputError("universal property is checked for apex-out cones only")
    objects = list(d.index.objects)
    for cone in cones:
        space = len(candidate.apex) ** len(cone.apex) if cone.apex else 1
        if space > search_cap:
            raise CapExceeded("mediating-map search", space, search_cap)
        found = 0
        for image in itertools.product(candidate.apex, repeat=len(cone.apex)):
            h = dict(zip(cone.apex, image))
            if all(
                candidate.legs[o][h[a]] == cone.legs[o][a] for o in objects for a in cone.apex
            ):
                found += 1
                if found > 1:
                    break
        if found != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# serialization


def category_to_json(c: FinCategory) -> dict:
    return {
        "objects": list(c.objects),
        "homs": [
            {"src": src, "dst": dst, "morphisms": list(labels)}
            for (src, dst), labels in c.homs.items()
        ],
        "identities": dict(c.identities),
        "compose": [[g, f, gf] for (g, f), gf in c.compose.items()],
    }


def category_from_json(data: dict) -> FinCategory:
    try:
        objects = list(data["objects"])
        homs = {(h["src"], h["dst"]): list(h["morphisms"]) for h in data["homs"]}
        identities = dict(data["identities"])
        compose = {(g, f): gf for g, f, gf in data["compose"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed category JSON: {exc}") from exc
    return FinCategory(objects, homs, compose, identities)


def functor_to_json(f: Functor) -> dict:
    return {
        "source": category_to_json(f.source),
        "target": category_to_json(f.target),
        "object_map": dict(f.object_map),
        "morphism_map": dict(f.morphism_map),
    }


def functor_from_json(data: dict) -> Functor:
    try:
        return Functor(
            source=category_from_json(data["source"]),
            target=category_from_json(data["target"]),
            object_map=dict(data["object_map"]),
            morphism_map=dict(data["morphism_map"]),
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed functor JSON: {exc}") from exc


def diagram_to_json(d: Diagram) -> dict:
    return {
        "index": category_to_json(d.index),
        "carriers": {str(o): [str(x) for x in xs] for o, xs in d.carriers.items()},
        "maps": {str(m): {str(k): str(v) for k, v in t.items()} for m, t in d.maps.items()},
    }


def diagram_from_json(data: dict) -> Diagram:
    try:
        index = category_from_json(data["index"])
        carriers = {o: list(xs) for o, xs in data["carriers"].items()}
        maps = {m: dict(t) for m, t in data["maps"].items()}
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed diagram JSON: {exc}") from exc
    return Diagram(index, carriers, maps)


def category_to_dot(c: FinCategory, name: str = "category") -> str:
    """DOT digraph of the category; identity arrows are omitted."""
    lines = [f"digraph {json.dumps(name)} {{"]
    for o in c.objects:
        lines.append(f"  {json.dumps(str(o))};")
    for m, src, dst in c.arrows():
        lines.append(f"  {json.dumps(str(src))} -> {json.dumps(str(dst))} [label={json.dumps(str(m))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cone_to_dot(cone: Cone, d: Diagram, name: str = "cone") -> str:
    """DOT digraph of a cone: apex node, dashed legs, solid diagram arrows."""
    lines = [f"digraph {json.dumps(name)} {{"]
    lines.append('  "apex" [shape=box];')
    for o in d.index.objects:
        lines.append(f"  {json.dumps(str(o))} [label={json.dumps(f'{o} ({len(d.carriers[o])})')}];")
    for o in d.index.objects:
        if cone.to_apex:
            lines.append(f"  {json.dumps(str(o))} -> \"apex\" [style=dashed];")
        else:
            lines.append(f"  \"apex\" -> {json.dumps(str(o))} [style=dashed];")
    for m, src, dst in d.index.arrows():
        lines.append(f"  {json.dumps(str(src))} -> {json.dumps(str(dst))} [label={json.dumps(str(m))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
