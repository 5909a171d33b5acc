"""Integer bookkeeping for branched multiple covers.

Everything here is genus-zero: Riemann-Hurwitz ramification counts,
Fredholm indices, unperturbed moduli dimensions, obstruction-bundle ranks,
normal Chern numbers, two-level boundary stratification, and a
symmetric-group Hurwitz-counting oracle for cross checks.

Dimension conventions.  ``tangency_dimension`` reports the unperturbed
count ``ind(base) + 2Z`` minus 2 per constrained branch point and records
unquotiented symmetries (target translations for cylinder covers, domain
automorphisms when there are fewer than three special points) in a note
instead of silently subtracting them.  Virtual dimensions subtract the
translation quotient only for unconstrained cylinder covers; a marked
point pinned to a special point already kills the translation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import factorial

from .errors import (
    DegreeTooLarge,
    HypothesesViolated,
    InconsistentProfile,
    IterateOutOfRange,
    NotImmersed,
    OddChern,
)
from .orbits import (
    EMPTY_COLLECTION,
    OrbitCollection,
    OrbitIterate,
    ReebOrbit,
    cz_iterate,
)

HURWITZ_DEGREE_BOUND = 6

TOP_CYLINDER = "top-cylinder"
MIDDLE = "middle"
BOTTOM_CYLINDER = "bottom-cylinder"


@dataclass(frozen=True)
class BaseCurve:
    """A fixed simple curve that multiple covers factor through."""

    name: str
    positive_ends: OrbitCollection = EMPTY_COLLECTION
    negative_ends: OrbitCollection = EMPTY_COLLECTION
    index: int = 0
    rel_c1_doubled: int = 0
    immersed: bool = True
    closed: bool = False

    def __post_init__(self):
        if self.closed and (len(self.positive_ends) or len(self.negative_ends)):
            raise ValueError(f"curve {self.name}: closed curves have no ends")

    @property
    def punctures(self) -> int:
        return len(self.positive_ends) + len(self.negative_ends)

    def ends(self, side: str) -> OrbitCollection:
        return self.positive_ends if side == "positive" else self.negative_ends


def cylinder_over(orbit: ReebOrbit) -> BaseCurve:
    """The trivial cylinder over a simple orbit."""
    return BaseCurve(
        name=f"cyl({orbit.name})",
        positive_ends=OrbitCollection((orbit.iterate(1),), sign="positive"),
        negative_ends=OrbitCollection((orbit.iterate(1),), sign="negative"),
        index=0,
        rel_c1_doubled=0,
        immersed=True,
        closed=False,
    )


def is_orbit_cylinder(base: BaseCurve) -> bool:
    if base.closed or len(base.positive_ends) != 1 or len(base.negative_ends) != 1:
        return False
    up = base.positive_ends.items[0]
    down = base.negative_ends.items[0]
    return (up.orbit.name == down.orbit.name and up.k == down.k == 1
            and base.rel_c1_doubled == 0 and base.index == 0)


@dataclass(frozen=True)
class CoverSpec:
    """A degree-d multiple cover of a base curve with marked-point data.

    All ``marked_points`` are pinned to special points of the base;
    ``constrained_branch_points`` of them are additionally required to be
    branch points.
    """

    base: BaseCurve
    degree: int
    positive_ends: OrbitCollection = EMPTY_COLLECTION
    negative_ends: OrbitCollection = EMPTY_COLLECTION
    marked_points: int = 0
    constrained_branch_points: int = 0

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("cover degree must be positive")
        if self.marked_points < 0 or self.constrained_branch_points < 0:
            raise ValueError("marked point counts must be nonnegative")
        if self.constrained_branch_points > self.marked_points:
            raise ValueError("constrained branch points exceed marked points")

    @property
    def punctures(self) -> int:
        return len(self.positive_ends) + len(self.negative_ends)

    def ends(self, side: str) -> OrbitCollection:
        return self.positive_ends if side == "positive" else self.negative_ends

    def describe(self) -> str:
        tag = f"M[{self.base.name},{self.degree}]"
        if self.constrained_branch_points:
            tag = f"M^{self.constrained_branch_points}[{self.base.name},{self.degree},{self.marked_points}]"
        elif self.marked_points:
            tag = f"M[{self.base.name},{self.degree},{self.marked_points}]"
        return f"{tag}({self.positive_ends.render()}|{self.negative_ends.render()})"


def _side_profile(ends: OrbitCollection) -> dict[str, int]:
    out: dict[str, int] = {}
    for it in ends:
        out[it.orbit.name] = out.get(it.orbit.name, 0) + it.k
    return out


def validate_cover(spec: CoverSpec) -> None:
    """Multiplicity consistency of the cover asymptotics with the base."""
    for side in ("positive", "negative"):
        base_profile = _side_profile(spec.base.ends(side))
        cover_profile = _side_profile(spec.ends(side))
        want = {name: spec.degree * mult for name, mult in base_profile.items()}
        if cover_profile != want:
            raise InconsistentProfile(
                f"{spec.describe()}: {side} ends {cover_profile} do not cover the "
                f"base profile {base_profile} with degree {spec.degree}")
    if branch_count_unchecked(spec) < 0:
        raise InconsistentProfile(
            f"{spec.describe()}: negative total ramification")


def branch_count_unchecked(spec: CoverSpec, components: int = 1) -> int:
    s_base = spec.base.punctures
    s_cover = spec.punctures
    return spec.degree * (2 - s_base) - (2 * components - s_cover)


def branch_count(spec: CoverSpec) -> int:
    """Total interior ramification from Riemann-Hurwitz (with multiplicity)."""
    validate_cover(spec)
    return branch_count_unchecked(spec)


def fredholm_index(spec: CoverSpec, components: int = 1) -> int:
    """Fredholm index of the cover.

    Genus-zero formula in dimension four: minus the Euler characteristic,
    plus the index sums of the ends, plus the degree-scaled doubled
    relative Chern number of the base.
    """
    validate_cover(spec)
    chi = 2 * components - spec.punctures
    total = -chi + spec.degree * spec.base.rel_c1_doubled
    for it in spec.positive_ends:
        total += cz_iterate(it.orbit, it.k)
    for it in spec.negative_ends:
        total -= cz_iterate(it.orbit, it.k)
    return total


def virtual_dimension(spec: CoverSpec, components: int = 1) -> int:
    """Expected dimension of the constrained moduli space.

    Marked points are pinned to special points (net dimension change zero,
    by the divisor equation); each constrained branch point cuts down by
    two more.  Unconstrained covers of an orbit cylinder get the target
    translation quotiented; a pinned special point on the cylinder fixes
    the translation, so nothing is subtracted in the constrained case.
    """
    dim = fredholm_index(spec, components) - 2 * spec.constrained_branch_points
    if is_orbit_cylinder(spec.base) and spec.marked_points == 0:
        dim -= 1
    return dim


@dataclass(frozen=True)
class TangencyReport:
    dimension: int
    quotient_note: tuple[str, ...]


def tangency_report(spec: CoverSpec) -> TangencyReport:
    """Unperturbed dimension of the space of covers, with quotient notes."""
    if not spec.base.immersed:
        raise NotImmersed(
            f"{spec.describe()}: base not immersed, branch points of the cover "
            f"and of the covering map differ")
    dim = spec.base.index + 2 * branch_count(spec) - 2 * spec.constrained_branch_points
    notes = []
    if is_orbit_cylinder(spec.base):
        notes.append("target translation symmetry left unquotiented")
    if spec.punctures + spec.marked_points < 3:
        notes.append("domain automorphisms left unquotiented (fewer than three special points)")
    return TangencyReport(dim, tuple(notes))


def tangency_dimension(spec: CoverSpec) -> int:
    return tangency_report(spec).dimension


def cokernel_rank(spec: CoverSpec) -> int:
    """Rank of the obstruction bundle over the space of covers.

    Valid when the base is immersed, all asymptotics are elliptic (or the
    base is an orbit cylinder, where no ellipticity is needed), and the
    index does not exceed the unperturbed dimension bound.
    """
    if not spec.base.immersed:
        raise HypothesesViolated(f"{spec.describe()}: base not immersed")
    if not is_orbit_cylinder(spec.base):
        bad = [it.name for it in (*spec.positive_ends, *spec.negative_ends)
               if not it.orbit.elliptic]
        if bad:
            raise HypothesesViolated(
                f"{spec.describe()}: non-elliptic asymptotics {bad} outside the "
                f"orbit-cylinder case")
    bound = spec.base.index + 2 * branch_count(spec)
    ind = fredholm_index(spec)
    if ind > bound:
        raise HypothesesViolated(
            f"{spec.describe()}: index {ind} exceeds the unperturbed dimension "
            f"{bound}; deformations need not stay multiple covers")
    return bound - ind


@dataclass(frozen=True)
class NormalChernRecord:
    c_N_doubled: int
    adjusted_c1_Nu: int
    negative_c1: bool


def normal_chern_numbers(spec: CoverSpec) -> NormalChernRecord:
    """Doubled normal Chern number and the adjusted normal first Chern number.

    ``2 c_N = ind - 2 + #Gamma_0`` at genus zero, where ``#Gamma_0`` counts
    asymptotic iterates with even index; ``c_1(N) = c_N - 2 Z``.  A negative
    adjusted Chern number forces the normal deformation kernel to vanish.
    """
    ind = fredholm_index(spec)
    gamma0 = sum(1 for it in (*spec.positive_ends, *spec.negative_ends)
                 if cz_iterate(it.orbit, it.k) % 2 == 0)
    doubled = ind - 2 + gamma0
    if doubled % 2:
        raise OddChern(
            f"{spec.describe()}: ind - 2 + #Gamma_0 = {doubled} is odd; "
            f"index and even-end count are inconsistent")
    c_n = doubled // 2
    adjusted = c_n - 2 * branch_count(spec)
    return NormalChernRecord(doubled, adjusted, adjusted < 0)


# ---------------------------------------------------------------------------
# Boundary stratification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NeckSplit:
    """A separating neck: breaking orbits plus the two limit curves."""

    orbits: tuple[ReebOrbit, ...]
    side_plus: BaseCurve
    side_minus: BaseCurve

    def __post_init__(self):
        if not self.orbits:
            raise ValueError("a neck needs at least one breaking orbit")
        if self.side_plus.index != 0 or self.side_minus.index != 0:
            raise HypothesesViolated(
                "neck limit curves must be rigid (index zero) by index additivity")


@dataclass(frozen=True)
class StratumNode:
    """One level of a two-level splitting, possibly disconnected.

    ``empty`` marks descriptors whose branch-point constraints outnumber
    the available branch points, so the unperturbed space is empty even
    though the descriptor appears in the stratification bookkeeping.
    """

    node_id: str
    spec: CoverSpec
    components: int
    level: str
    index: int
    virtual_dim: int
    unperturbed_dim: int | None
    obstruction_rank: int | None
    empty: bool = False

    def describe(self) -> str:
        return f"{self.spec.describe()} n={self.components} [{self.level}]"


@dataclass(frozen=True)
class StratumEdge:
    parent: str
    upper: str
    lower: str
    middle: OrbitCollection
    kind: str  # "sft" or "neck"


@dataclass
class StrataGraph:
    root: str
    nodes: dict[str, StratumNode] = field(default_factory=dict)
    edges: list[StratumEdge] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not self.edges

    def node_list(self) -> list[StratumNode]:
        return [self.nodes[k] for k in self.nodes]

    def render_adjacency(self) -> str:
        lines = []
        for node in self.node_list():
            lines.append(f"node {node.node_id}")
            lines.append(f"  space {node.describe()}")
            lines.append(f"  index {node.index} virdim {node.virtual_dim}"
                         + (f" dim {node.unperturbed_dim}" if node.unperturbed_dim is not None else "")
                         + (f" rank {node.obstruction_rank}" if node.obstruction_rank is not None else ""))
        for edge in self.edges:
            lines.append(f"edge {edge.parent} -> {edge.upper} | {edge.lower} "
                         f"middle {edge.middle.render()} kind {edge.kind}")
        return "\n".join(lines)

    def render_edge_lines(self) -> str:
        """One stratum per line: upper id, lower id, intermediate collection.

        The same product can bound several parents; it is listed once.
        """
        seen = []
        for e in self.edges:
            line = f"{e.upper}\t{e.lower}\t{e.middle.render()}"
            if line not in seen:
                seen.append(line)
        return "\n".join(seen)


def _partitions(n: int, max_part: int | None = None) -> list[tuple[int, ...]]:
    max_part = n if max_part is None else min(max_part, n)
    if n == 0:
        return [()]
    out = []
    for first in range(max_part, 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return out


def end_profiles(orbit: ReebOrbit, total: int) -> list[OrbitCollection]:
    """All collections of iterates of one orbit with the given total multiplicity."""
    if orbit.elliptic and orbit.max_iterate < total:
        raise IterateOutOfRange(
            f"orbit {orbit.name}: max_iterate {orbit.max_iterate} cannot express "
            f"all end profiles of total multiplicity {total}")
    return [OrbitCollection(tuple(orbit.iterate(k) for k in parts))
            for parts in _partitions(total)]


def _mixed_profiles(orbits: list[ReebOrbit], total_each: int) -> list[OrbitCollection]:
    """Cartesian products of per-orbit end profiles, one block per orbit."""
    blocks = [end_profiles(orbit, total_each) for orbit in orbits]
    out = []
    for combo in itertools.product(*blocks):
        items = tuple(it for block in combo for it in block)
        out.append(OrbitCollection(items))
    return out


def _node_id(spec: CoverSpec, components: int, level: str) -> str:
    return (f"{spec.base.name}:d{spec.degree}:{spec.positive_ends.render()}"
            f"/{spec.negative_ends.render()}:r{spec.marked_points}"
            f"c{spec.constrained_branch_points}:n{components}:{level}")


def _make_node(spec: CoverSpec, components: int, level: str) -> StratumNode | None:
    """Annotated stratum node, or None when no such cover exists at all."""
    z = branch_count_unchecked(spec, components)
    if z < 0:
        return None
    unperturbed = None
    rank = None
    empty = False
    if spec.base.immersed:
        unperturbed = spec.base.index + 2 * z - 2 * spec.constrained_branch_points
        if unperturbed < 0:
            # branch-point constraint cannot be met; keep the descriptor
            empty = True
            unperturbed = None
        elif components == 1:
            try:
                rank = cokernel_rank(
                    replace(spec, marked_points=0, constrained_branch_points=0))
            except HypothesesViolated:
                rank = None
    ind = fredholm_index(spec, components)
    virdim = ind - 2 * spec.constrained_branch_points
    if is_orbit_cylinder(spec.base) and spec.marked_points == 0:
        virdim -= 1
    return StratumNode(
        node_id=_node_id(spec, components, level),
        spec=spec,
        components=components,
        level=level,
        index=ind,
        virtual_dim=virdim,
        unperturbed_dim=unperturbed,
        obstruction_rank=rank,
        empty=empty,
    )


def _is_trivial_cylinder_level(spec: CoverSpec, components: int) -> bool:
    if not is_orbit_cylinder(spec.base):
        return False
    if spec.marked_points or spec.constrained_branch_points:
        return False
    return (branch_count_unchecked(spec, components) == 0
            and spec.positive_ends.key() == spec.negative_ends.key()
            and components == len(spec.positive_ends))


def _component_bound_for_base_cover(spec: CoverSpec) -> int:
    """Each component of a cover surjects onto the base near every puncture."""
    bound = spec.degree
    for side in ("positive", "negative"):
        base_counts: dict[str, int] = {}
        for it in spec.base.ends(side):
            base_counts[it.orbit.name] = base_counts.get(it.orbit.name, 0) + 1
        cover_counts: dict[str, int] = {}
        for it in spec.ends(side):
            cover_counts[it.orbit.name] = cover_counts.get(it.orbit.name, 0) + 1
        for name, base_n in base_counts.items():
            bound = min(bound, cover_counts.get(name, 0) // base_n)
    return bound


def _marked_placements(r: int, c: int) -> list[tuple[int, int, int, int]]:
    """Distributions (r_up, c_up, r_low, c_low) over the two levels."""
    out = []
    for r_up in range(r + 1):
        r_low = r - r_up
        for c_up in range(min(c, r_up) + 1):
            c_low = c - c_up
            if c_low <= r_low:
                out.append((r_up, c_up, r_low, c_low))
    return out


def _simple_orbits(ends: OrbitCollection) -> list[ReebOrbit]:
    seen: dict[str, ReebOrbit] = {}
    for it in ends:
        seen.setdefault(it.orbit.name, it.orbit)
    return [seen[name] for name in sorted(seen)]


def _select(ends: OrbitCollection, orbit: ReebOrbit,
            keep: bool) -> tuple[OrbitIterate, ...]:
    return tuple(it for it in ends
                 if (it.orbit.name == orbit.name) == keep)


def _cylinder_strata(spec: CoverSpec):
    """Two-level splittings of a cover of an orbit cylinder."""
    orbit = spec.base.positive_ends.items[0].orbit
    for middle in end_profiles(orbit, spec.degree):
        for r_up, c_up, r_low, c_low in _marked_placements(
                spec.marked_points, spec.constrained_branch_points):
            upper = CoverSpec(spec.base, spec.degree, spec.positive_ends,
                              OrbitCollection(middle.items, sign="negative"),
                              r_up, c_up)
            lower = CoverSpec(spec.base, spec.degree,
                              OrbitCollection(middle.items, sign="positive"),
                              spec.negative_ends, r_low, c_low)
            for n_up in range(1, min(len(upper.positive_ends), len(middle),
                                     spec.degree) + 1):
                n_low = len(middle) + 1 - n_up
                if not 1 <= n_low <= min(len(lower.negative_ends), len(middle),
                                         spec.degree):
                    continue
                if (_is_trivial_cylinder_level(upper, n_up)
                        or _is_trivial_cylinder_level(lower, n_low)):
                    continue
                yield (upper, n_up, TOP_CYLINDER), (lower, n_low, BOTTOM_CYLINDER), middle


def _cobordism_strata(spec: CoverSpec):
    """Splittings of a cover of a punctured base: one cylinder level at a time."""
    for side, level in (("positive", TOP_CYLINDER), ("negative", BOTTOM_CYLINDER)):
        for orbit in _simple_orbits(spec.base.ends(side)):
            active = OrbitCollection(_select(spec.ends(side), orbit, keep=True))
            passthrough = _select(spec.ends(side), orbit, keep=False)
            d_cyl = active.total_multiplicity()
            cyl_base = cylinder_over(orbit)
            for middle in end_profiles(orbit, d_cyl):
                for r_cyl, c_cyl, r_main, c_main in _marked_placements(
                        spec.marked_points, spec.constrained_branch_points):
                    if side == "positive":
                        cyl = CoverSpec(cyl_base, d_cyl, active,
                                        OrbitCollection(middle.items, sign="negative"),
                                        r_cyl, c_cyl)
                        main = replace(
                            spec,
                            positive_ends=OrbitCollection(passthrough + middle.items,
                                                          sign="positive"),
                            marked_points=r_main, constrained_branch_points=c_main)
                    else:
                        cyl = CoverSpec(cyl_base, d_cyl,
                                        OrbitCollection(middle.items, sign="positive"),
                                        active, r_cyl, c_cyl)
                        main = replace(
                            spec,
                            negative_ends=OrbitCollection(passthrough + middle.items,
                                                          sign="negative"),
                            marked_points=r_main, constrained_branch_points=c_main)
                    n_cyl_max = min(len(active), len(middle), d_cyl)
                    main_bound = _component_bound_for_base_cover(main)
                    for n_cyl in range(1, n_cyl_max + 1):
                        n_main = len(middle) + 1 - n_cyl
                        if not 1 <= n_main <= main_bound:
                            continue
                        if _is_trivial_cylinder_level(cyl, n_cyl):
                            continue
                        if branch_count_unchecked(main, n_main) < 0:
                            continue
                        if side == "positive":
                            yield (cyl, n_cyl, level), (main, n_main, MIDDLE), middle
                        else:
                            yield (main, n_main, MIDDLE), (cyl, n_cyl, level), middle


def _neck_strata(spec: CoverSpec, neck: NeckSplit):
    """Neck-stretch limits of a cover of a closed curve."""
    orbits = sorted(neck.orbits, key=lambda o: o.name)
    for middle in _mixed_profiles(orbits, spec.degree):
        for r_up, c_up, r_low, c_low in _marked_placements(
                spec.marked_points, spec.constrained_branch_points):
            upper = CoverSpec(neck.side_plus, spec.degree, EMPTY_COLLECTION,
                              OrbitCollection(middle.items, sign="negative"),
                              r_up, c_up)
            lower = CoverSpec(neck.side_minus, spec.degree,
                              OrbitCollection(middle.items, sign="positive"),
                              EMPTY_COLLECTION, r_low, c_low)
            up_bound = _component_bound_for_base_cover(upper)
            low_bound = _component_bound_for_base_cover(lower)
            for n_up in range(1, up_bound + 1):
                n_low = len(middle) + 1 - n_up
                if not 1 <= n_low <= low_bound:
                    continue
                if (branch_count_unchecked(upper, n_up) < 0
                        or branch_count_unchecked(lower, n_low) < 0):
                    continue
                yield (upper, n_up, MIDDLE), (lower, n_low, MIDDLE), middle


def boundary_strata(spec: CoverSpec, neck: NeckSplit | None = None,
                    max_codim: int = 2) -> StrataGraph:
    """Recursive two-level decomposition of a compactified cover space.

    Emits the root plus all strata reachable by splitting connected nodes
    up to ``max_codim`` times.  Neck splittings (for covers of closed
    curves with a declared neck) count as one step and are tagged "neck";
    ordinary two-level splittings are tagged "sft".
    """
    validate_cover(spec)
    root = _make_node(spec, 1, MIDDLE)
    if root is None:
        raise InconsistentProfile(f"{spec.describe()}: root space is empty")
    graph = StrataGraph(root=root.node_id, nodes={root.node_id: root})
    seen_edges: set[tuple] = set()
    queue: list[tuple[str, int]] = [(root.node_id, 0)]
    while queue:
        node_id, codim = queue.pop(0)
        if codim >= max_codim:
            continue
        node = graph.nodes[node_id]
        if node.components != 1:
            continue
        if node.spec.base.closed:
            strata = _neck_strata(node.spec, neck) if (
                neck is not None and codim == 0) else iter(())
            kind = "neck"
        elif is_orbit_cylinder(node.spec.base):
            strata = _cylinder_strata(node.spec)
            kind = "sft"
        else:
            strata = _cobordism_strata(node.spec)
            kind = "sft"
        for (up_spec, n_up, up_level), (low_spec, n_low, low_level), middle in strata:
            upper = _make_node(up_spec, n_up, up_level)
            lower = _make_node(low_spec, n_low, low_level)
            if upper is None or lower is None:
                continue
            edge_key = (node_id, upper.node_id, lower.node_id, middle.key(), kind)
            if edge_key in seen_edges:
                continue
            seen_edges.add(edge_key)
            for child in (upper, lower):
                if child.node_id not in graph.nodes:
                    graph.nodes[child.node_id] = child
                    queue.append((child.node_id, codim + 1))
            graph.edges.append(StratumEdge(node_id, upper.node_id,
                                           lower.node_id, middle, kind))
    return graph


# ---------------------------------------------------------------------------
# Hurwitz oracle
# ---------------------------------------------------------------------------


def _perm_compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """(a after b): first apply b, then a."""
    return tuple(a[b[i]] for i in range(len(a)))


def _perm_inverse(a: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(a)
    for i, v in enumerate(a):
        out[v] = i
    return tuple(out)


def cycle_type(perm: tuple[int, ...]) -> tuple[int, ...]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        cur = start
        while not seen[cur]:
            seen[cur] = True
            cur = perm[cur]
            length += 1
        cycles.append(length)
    cycles.sort(reverse=True)
    return tuple(cycles)


def permutations_of_type(d: int, profile: tuple[int, ...]) -> list[tuple[int, ...]]:
    want = tuple(sorted(profile, reverse=True))
    return [p for p in itertools.permutations(range(d)) if cycle_type(p) == want]


def _is_transitive(perms: list[tuple[int, ...]], d: int) -> bool:
    if d == 1:
        return True
    reached = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for p in perms:
            for y in (p[x], p.index(x)):
                if y not in reached:
                    reached.add(y)
                    frontier.append(y)
    return len(reached) == d


def hurwitz_count(d: int, end_profiles: list[tuple[int, ...]],
                  simple_branch_points: int = 0) -> Fraction:
    """Connected Hurwitz count with labeled branch points.

    Counts tuples of permutations in S_d, one of each requested cycle type
    plus one transposition per simple branch point, with identity product
    and transitive joint action, weighted by 1/d!.
    """
    if d > HURWITZ_DEGREE_BOUND:
        raise DegreeTooLarge(f"degree {d} exceeds the enumeration bound "
                             f"{HURWITZ_DEGREE_BOUND}")
    if d < 1:
        raise ValueError("degree must be positive")
    for profile in end_profiles:
        if sum(profile) != d:
            raise InconsistentProfile(f"profile {profile} is not a partition of {d}")
    identity = tuple(range(d))
    transpositions = permutations_of_type(d, (2,) + (1,) * (d - 2)) if d >= 2 else []
    if simple_branch_points and d < 2:
        return Fraction(0)
    classes = [permutations_of_type(d, tuple(p)) for p in end_profiles]
    classes += [transpositions] * simple_branch_points
    if not classes:
        return Fraction(1, factorial(d)) if d == 1 else Fraction(0)
    # The last factor is determined by the inverse of the running product.
    last_type = (cycle_type(classes[-1][0]) if classes[-1]
                 else None)
    if last_type is None:
        return Fraction(0)
    count = 0
    for prefix in itertools.product(*classes[:-1]):
        product = identity
        for perm in prefix:
            product = _perm_compose(product, perm)
        last = _perm_inverse(product)
        if cycle_type(last) != last_type:
            continue
        if _is_transitive(list(prefix) + [last], d):
            count += 1
    return Fraction(count, factorial(d))
