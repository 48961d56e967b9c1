"""Directed-cycle hybrid automaton: domains, edges, guards, successor map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import UnknownVertex
from .mechanics import GeneralizedState, contact_force

GUARD_KINDS = ("foot-height", "normal-force", "phase-threshold")
EDGE_KINDS = ("contact-add", "contact-break")


@dataclass(frozen=True)
class GuardSpec:
    """Scalar guard whose zero crossing in `direction` triggers the edge.

    foot-height:     height of `contact` above ground (state only)
    normal-force:    vertical multiplier at `contact` (needs closed-loop u)
    phase-threshold: base forward displacement minus `threshold`
    """

    kind: str
    contact: Optional[str] = None
    direction: int = -1
    threshold: float = 0.0

    def __post_init__(self):
        if self.kind not in GUARD_KINDS:
            raise ValueError(f"unknown guard kind {self.kind!r}")
        if self.direction not in (-1, 1):
            raise ValueError("guard direction must be -1 or +1")


@dataclass(frozen=True)
class DomainSpec:
    id: str
    constraint_set: Sequence[str]
    contact_kind: str  # "single" | "multi"
    guard: Optional[GuardSpec] = None


@dataclass(frozen=True)
class EdgeSpec:
    """Discrete transition.

    contact-add edges apply the plastic impact through the target domain's
    constraint set (or `impact_constraints`, for walkers whose touchdown and
    lift-off coincide and the impulse acts through a transient contact set).
    The optional relabel permutation folds symmetric domains onto one chart;
    it is applied after the impulse, when every involved contact is
    stationary, so a pure permutation is exact.
    """

    source: str
    target: str
    kind: str  # "contact-add" | "contact-break"
    relabel: Optional[np.ndarray] = None
    impact_constraints: Optional[str] = None

    def __post_init__(self):
        if self.kind not in EDGE_KINDS:
            raise ValueError(f"unknown edge kind {self.kind!r}")
        if self.relabel is not None:
            object.__setattr__(
                self, "relabel", np.asarray(self.relabel, dtype=float))


@dataclass(frozen=True)
class HybridGraph:
    vertices: Sequence[DomainSpec]
    edges: Sequence[EdgeSpec]
    _by_id: dict = field(default_factory=dict, repr=False)
    _edge_by_source: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_id", {v.id: v for v in self.vertices})
        object.__setattr__(
            self, "_edge_by_source", {e.source: e for e in self.edges})

    def vertex(self, v):
        try:
            return self._by_id[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}")

    def out_edge(self, v):
        self.vertex(v)
        try:
            return self._edge_by_source[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v!r} has no outgoing edge")

    def in_edge(self, v):
        self.vertex(v)
        for e in self.edges:
            if e.target == v:
                return e
        raise UnknownVertex(f"vertex {v!r} has no incoming edge")

    @property
    def vertex_ids(self):
        return [v.id for v in self.vertices]

    def cycle_from(self, v0):
        """Executed vertex sequence starting at v0 (one full traversal)."""
        seq = [v0]
        v = next_domain(self, v0)
        while v != v0:
            seq.append(v)
            v = next_domain(self, v)
        return seq


def next_domain(graph, v):
    """Successor vertex of v along the directed cycle."""
    return graph.out_edge(v).target


def validate_graph(graph):
    """Structural checks; returns a list of violation strings (empty = valid)."""
    report = []
    ids = [v.id for v in graph.vertices]
    if len(set(ids)) != len(ids):
        report.append("duplicate vertex ids")
    sources = [e.source for e in graph.edges]
    targets = [e.target for e in graph.edges]
    if len(set(sources)) != len(sources):
        report.append("not a directed cycle: a vertex has two outgoing edges")
    if len(graph.edges) != len(graph.vertices):
        report.append("not a directed cycle: edge count differs from vertex count")
    for name, group in (("source", sources), ("target", targets)):
        for v in group:
            if v not in graph._by_id:
                report.append(f"edge {name} {v!r} is not a vertex")
    if not report:
        # single orbit must cover all vertices
        seen = set()
        v = graph.vertices[0].id
        for _ in range(len(graph.vertices)):
            seen.add(v)
            v = next_domain(graph, v)
        if v != graph.vertices[0].id or len(seen) != len(graph.vertices):
            report.append("successor map does not form a single covering cycle")
    for v in graph.vertices:
        if v.guard is None:
            report.append(f"vertex {v.id!r} has no guard")
        if not v.constraint_set:
            report.append(f"vertex {v.id!r} has an empty constraint set")
    for e in graph.edges:
        if e.relabel is not None:
            r = np.asarray(e.relabel, dtype=float)
            if r.ndim != 2 or r.shape[0] != r.shape[1]:
                report.append(f"edge {e.source}->{e.target}: relabel not square")
            elif not np.allclose(r @ r.T, np.eye(r.shape[0]), atol=1e-12) or \
                    not np.all(np.isin(np.abs(r[np.abs(r) > 1e-12]), [1.0])):
                report.append(
                    f"edge {e.source}->{e.target}: relabel not a signed permutation")
    return report


def guard_value(graph, model, v, x, u=None):
    """Guard scalar for domain v at state x (and closed-loop input u)."""
    if not isinstance(x, GeneralizedState):
        x = GeneralizedState.from_concat(np.asarray(x, dtype=float))
    spec = graph.vertex(v).guard
    if spec is None:
        raise ValueError(f"vertex {v!r} has no guard")
    if spec.kind == "foot-height":
        point = model.contact_points[spec.contact]
        return float(point(x.q)[1])
    if spec.kind == "phase-threshold":
        return float(model.base_x(x.q)) - spec.threshold
    if spec.kind == "normal-force":
        if u is None:
            raise ValueError("normal-force guard requires the control input")
        cs = model.constraint_set(v)
        lam = contact_force(model, v, x.q, x.qd, u)
        return float(lam[cs.row_index(spec.contact, "z")])
    raise ValueError(f"unknown guard kind {spec.kind!r}")


def build_amble_cycle():
    """Eight-domain quadruped amble cycle (legs numbered 0..3).

    Vertices l_{i,j} have legs i and j in contact; l_i has only leg i.
    Lift-off edges are contact-break, touch-down edges contact-add.
    """
    order = [
        ("l2,3", ("leg2", "leg3")),
        ("l2", ("leg2",)),
        ("l2,1", ("leg2", "leg1")),
        ("l1", ("leg1",)),
        ("l0,1", ("leg0", "leg1")),
        ("l0", ("leg0",)),
        ("l0,3", ("leg0", "leg3")),
        ("l3", ("leg3",)),
    ]
    vertices = []
    edges = []
    n = len(order)
    for i, (vid, contacts) in enumerate(order):
        nid, ncontacts = order[(i + 1) % n]
        if len(contacts) > len(ncontacts):
            # a leg lifts: force guard on the leaving contact
            leaving = next(c for c in contacts if c not in ncontacts)
            guard = GuardSpec(kind="normal-force", contact=leaving, direction=-1)
            kind = "contact-break"
        else:
            arriving = next(c for c in ncontacts if c not in contacts)
            guard = GuardSpec(kind="foot-height", contact=arriving, direction=-1)
            kind = "contact-add"
        vertices.append(DomainSpec(
            id=vid, constraint_set=contacts,
            contact_kind="multi" if len(contacts) > 1 else "single",
            guard=guard))
        edges.append(EdgeSpec(source=vid, target=nid, kind=kind))
    return HybridGraph(vertices=vertices, edges=edges)
