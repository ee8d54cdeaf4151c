"""Linkage classes, strong/terminal strong linkage classes and circulations."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import networkx as nx

from .netmodel import GeneralizedNetwork


class NotWeaklyReversibleError(ValueError):
    pass


@dataclass(frozen=True)
class LinkageDecomposition:
    linkage_classes: tuple[tuple[int, ...], ...]
    strong_linkage_classes: tuple[tuple[int, ...], ...]
    terminal_classes: tuple[tuple[int, ...], ...]

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.linkage_classes)

    @property
    def t(self) -> int:
        return len(self.terminal_classes)

    @property
    def weakly_reversible(self) -> bool:
        return self.linkage_classes == self.strong_linkage_classes

    def linkage_of(self) -> dict[int, int]:
        """Map complex id -> index of its linkage class."""
        return {y: i for i, cls in enumerate(self.linkage_classes) for y in cls}


def complex_graph(net: GeneralizedNetwork) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(net.m))
    for j, rx in enumerate(net.reactions):
        g.add_edge(rx.source, rx.target, reaction=j)
    return g


def _canonical(parts) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(p)) for p in parts), key=lambda p: p[0]))


def decompose(net: GeneralizedNetwork) -> LinkageDecomposition:
    g = complex_graph(net)
    linkage = _canonical(nx.weakly_connected_components(g))
    strong = _canonical(nx.strongly_connected_components(g))
    terminal = []
    for cls in strong:
        members = set(cls)
        if all(v in members for u in cls for v in g.successors(u)):
            terminal.append(cls)
    return LinkageDecomposition(linkage, strong, tuple(terminal))


def circulation_rates(net: GeneralizedNetwork) -> list[int]:
    """Positive integer rates k with sum k_{y->y'} (w_{y'} - w_y) = 0.

    Every reaction y -> y' not yet covered is closed into a cycle by a
    shortest path y' -> ... -> y; k counts how many of these cycles use each
    reaction.
    """
    if not decompose(net).weakly_reversible:
        raise NotWeaklyReversibleError(
            "network is not weakly reversible; no positive circulation exists"
        )
    g = complex_graph(net)
    counts: Counter[int] = Counter()
    for j, rx in enumerate(net.reactions):
        if counts[j]:
            continue
        path = nx.shortest_path(g, rx.target, rx.source)
        counts[j] += 1
        for u, v in zip(path, path[1:]):
            counts[g.edges[u, v]["reaction"]] += 1
    return [counts[j] for j in range(net.r)]
