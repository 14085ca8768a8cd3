"""Correspondence (DP-) colouring: colour sets plus per-edge matchings.

Every edge carries a partial injective map between the endpoint colour sets;
a colouring is valid when no edge's endpoint colours are matched by its map.
List colouring embeds as the special case where every map is the identity on
shared colours.

Maps are stored once per edge, on the canonical orientation
min(u, v) -> max(u, v); the reverse direction is obtained by inversion, which
makes the inversion-consistency invariant hold by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .graph import Graph

# A partial colouring is a plain dict vertex -> colour; absent keys are
# uncoloured vertices.
PartialColouring = dict[int, int]


class AssignmentError(ValueError):
    """Raised for malformed correspondence assignments."""


@dataclass(frozen=True)
class CorrespondenceAssignment:
    """Per-vertex colour sets and per-edge partial injective colour maps.

    `colour_sets[u]` is a sorted tuple of the colours available at u.
    `edge_maps[(u, v)]` (with u < v) maps colours of u injectively to colours
    of v; the reverse map is the inverse.
    """

    colour_sets: tuple[tuple[int, ...], ...]
    edge_maps: Mapping[tuple[int, int], Mapping[int, int]]

    def colours(self, u: int) -> tuple[int, ...]:
        return self.colour_sets[u]

    def set_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.colour_sets)

    def min_size(self) -> int:
        return min((len(s) for s in self.colour_sets), default=0)

    def is_k_assignment(self, k: int) -> bool:
        return self.min_size() >= k

    def map_between(self, u: int, v: int) -> dict[int, int]:
        """The colour map from u to v (inverting the stored orientation)."""
        if u < v:
            return dict(self.edge_maps.get((u, v), {}))
        stored = self.edge_maps.get((v, u), {})
        return {c2: c1 for c1, c2 in stored.items()}

    def correspondent(self, u: int, v: int, colour: int) -> Optional[int]:
        """Colour at v matched with `colour` at u, or None if unmatched."""
        if u < v:
            return self.edge_maps.get((u, v), {}).get(colour)
        stored = self.edge_maps.get((v, u), {})
        for c1, c2 in stored.items():
            if c2 == colour:
                return c1
        return None

    def corresponds(self, u: int, v: int, cu: int, cv: int) -> bool:
        """True when colour cu at u and colour cv at v are matched."""
        if u < v:
            return self.edge_maps.get((u, v), {}).get(cu) == cv
        return self.edge_maps.get((v, u), {}).get(cv) == cu


def validate_assignment(g: Graph, c: CorrespondenceAssignment) -> None:
    """Check structural invariants against a host graph."""
    if len(c.colour_sets) != g.n:
        raise AssignmentError("colour set count does not match vertex count")
    sets = [set(s) for s in c.colour_sets]
    for u, s in enumerate(c.colour_sets):
        if list(s) != sorted(set(s)):
            raise AssignmentError(f"colour set of {u} not sorted/unique")
        if any(col < 0 for col in s):
            raise AssignmentError(f"negative colour at vertex {u}")
    for (u, v), mp in c.edge_maps.items():
        if not u < v:
            raise AssignmentError(f"edge map key ({u},{v}) not canonical")
        if not g.has_edge(u, v):
            raise AssignmentError(f"edge map for non-edge ({u},{v})")
        if len(set(mp.values())) != len(mp):
            raise AssignmentError(f"edge map ({u},{v}) not injective")
        for c1, c2 in mp.items():
            if c1 not in sets[u] or c2 not in sets[v]:
                raise AssignmentError(
                    f"edge map ({u},{v}) uses colours outside the endpoint sets"
                )


def is_total(g: Graph, c: CorrespondenceAssignment) -> bool:
    """True when every edge map is a bijection between its endpoint sets."""
    for u, v in g.edges():
        mp = c.edge_maps.get((u, v), {})
        if len(mp) != len(c.colour_sets[u]) or len(mp) != len(c.colour_sets[v]):
            return False
    return True


def from_lists(
    g: Graph, lists: Sequence[Iterable[int]]
) -> CorrespondenceAssignment:
    """Embed a list assignment: identity maps on shared colours per edge.

    A colouring is then valid iff it is a proper list colouring.
    """
    colour_sets = tuple(tuple(sorted(set(l))) for l in lists)
    if len(colour_sets) != g.n:
        raise AssignmentError("need one colour list per vertex")
    for u, s in enumerate(colour_sets):
        if not s:
            raise AssignmentError(f"empty colour list at vertex {u}")
    edge_maps = {}
    for u, v in g.edges():
        shared = set(colour_sets[u]) & set(colour_sets[v])
        edge_maps[(u, v)] = {col: col for col in sorted(shared)}
    return CorrespondenceAssignment(colour_sets, edge_maps)


def uniform_lists(g: Graph, k: int) -> CorrespondenceAssignment:
    """List assignment {0..k-1} at every vertex (identity maps, total)."""
    return from_lists(g, [range(k)] * g.n)


def truncate(c: CorrespondenceAssignment, k: int) -> CorrespondenceAssignment:
    """Restrict every colour set to its k smallest colours.

    Edge maps are restricted to pairs whose endpoints both survive.  Every
    colouring valid after truncation was valid before it.
    """
    if any(len(s) < k for s in c.colour_sets):
        raise AssignmentError(f"some colour set smaller than k={k}")
    new_sets = tuple(s[:k] for s in c.colour_sets)
    kept = [set(s) for s in new_sets]
    new_maps = {
        (u, v): {
            c1: c2 for c1, c2 in mp.items() if c1 in kept[u] and c2 in kept[v]
        }
        for (u, v), mp in c.edge_maps.items()
    }
    return CorrespondenceAssignment(new_sets, new_maps)


def totalize(g: Graph, c: CorrespondenceAssignment) -> CorrespondenceAssignment:
    """Extend every edge map to a bijection between the endpoint sets.

    Requires all colour sets to share one size (truncate first).  The
    extension is deterministic: unmatched colours on either side are paired
    in ascending order.  Valid colourings of the result are valid for the
    input, since the result only adds forbidden pairs.
    """
    sizes = set(c.set_sizes())
    if len(sizes) > 1:
        raise AssignmentError(f"totalize needs equal colour set sizes, got {sizes}")
    new_maps: dict[tuple[int, int], dict[int, int]] = {}
    for u, v in g.edges():
        mp = dict(c.edge_maps.get((u, v), {}))
        free_u = [col for col in c.colour_sets[u] if col not in mp]
        used_v = set(mp.values())
        free_v = [col for col in c.colour_sets[v] if col not in used_v]
        mp.update(zip(free_u, free_v))
        new_maps[(u, v)] = mp
    return CorrespondenceAssignment(c.colour_sets, new_maps)


def is_valid_colouring(
    g: Graph, c: CorrespondenceAssignment, f: PartialColouring
) -> bool:
    """True iff every coloured vertex uses its own set and no edge with both
    ends coloured has matched colours."""
    for u, colour in f.items():
        if colour not in set(c.colour_sets[u]):
            return False
    for u, v in g.edges():
        if u in f and v in f and c.corresponds(u, v, f[u], f[v]):
            return False
    return True


@dataclass(frozen=True)
class Residual:
    """Uncoloured part of an instance after a valid partial colouring.

    `vertices[new_id] = old_id` maps the residual graph back to the host.
    Any valid colouring of the residual, translated through `vertices` and
    united with the partial colouring, is valid for the host instance.
    """

    graph: Graph
    assignment: CorrespondenceAssignment
    vertices: tuple[int, ...]


def residual_assignment(
    g: Graph, c: CorrespondenceAssignment, f: PartialColouring
) -> Residual:
    """Instance induced on uncoloured vertices after removing matched colours.

    Every uncoloured vertex loses the colours matched with its coloured
    neighbours' colours; edge maps are restricted to surviving colours.
    Residual colour sets may become empty, which surfaces later as greedy
    failure rather than an error here.
    """
    if not is_valid_colouring(g, c, f):
        raise AssignmentError("partial colouring is not valid for the assignment")
    uncoloured = [u for u in range(g.n) if u not in f]
    sub, old_ids = g.induced(uncoloured)
    new_sets = []
    for old in old_ids:
        removed = set()
        for w in g.neighbours(old):
            if w in f:
                back = c.correspondent(w, old, f[w])
                if back is not None:
                    removed.add(back)
        new_sets.append(tuple(col for col in c.colour_sets[old] if col not in removed))
    kept = [set(s) for s in new_sets]
    new_maps: dict[tuple[int, int], dict[int, int]] = {}
    for a, b in sub.edges():
        mp = c.map_between(old_ids[a], old_ids[b])
        new_maps[(a, b)] = {
            c1: c2 for c1, c2 in mp.items() if c1 in kept[a] and c2 in kept[b]
        }
    return Residual(sub, CorrespondenceAssignment(tuple(new_sets), new_maps), old_ids)


# -- JSON -------------------------------------------------------------------


def to_json_dict(c: CorrespondenceAssignment) -> dict:
    return {
        "colours": {str(u): list(s) for u, s in enumerate(c.colour_sets)},
        "maps": [
            {"u": u, "v": v, "pairs": sorted([c1, c2] for c1, c2 in mp.items())}
            for (u, v), mp in sorted(c.edge_maps.items())
        ],
    }


def from_json_dict(data: dict) -> CorrespondenceAssignment:
    colours = data["colours"]
    n = len(colours)
    sets = tuple(tuple(sorted(colours[str(u)])) for u in range(n))
    maps = {
        (entry["u"], entry["v"]): {c1: c2 for c1, c2 in entry["pairs"]}
        for entry in data["maps"]
    }
    return CorrespondenceAssignment(sets, maps)
