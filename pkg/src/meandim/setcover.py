"""Weighted set cover over small finite universes, plus candidate families.

Sets are stored as Python int bitmasks over point indices.  The exact solver
is a depth-first branch and bound with a per-mask memo and the standard
price lower bound; the greedy solver is the cost-per-new-element rule, which
is within a factor ``H(n) <= 1 + ln n`` of the optimum over the same family.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import BudgetExceededError

DEFAULT_NODE_BUDGET = 2_000_000
DEFAULT_FAMILY_BUDGET = 200_000


def to_mask(members: Iterable[int]) -> int:
    m = 0
    for i in members:
        m |= 1 << int(i)
    return m


def from_mask(mask: int) -> tuple:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def closeness_graph(dist: np.ndarray, eps: float) -> nx.Graph:
    """Graph joining distinct points at distance strictly below ``eps``."""
    n = dist.shape[0]
    g = nx.Graph()
    g.add_nodes_from(range(n))
    ii, jj = np.nonzero(np.triu(dist < eps, k=1))
    g.add_edges_from(zip(ii.tolist(), jj.tolist()))
    return g


def maximal_cliques(dist: np.ndarray, eps: float) -> list:
    """Maximal sets with all pairwise distances ``< eps`` (so diameter ``< eps``)."""
    cliques = {tuple(sorted(c)) for c in nx.find_cliques(closeness_graph(dist, eps))}
    return sorted(cliques)


def sublevel_truncations(cliques: Sequence[tuple], values: np.ndarray) -> list:
    """All sets ``{x in C : values[x] <= t}`` for maximal cliques C and thresholds t.

    Any set of diameter < eps lies in some maximal clique C, and replacing it by
    the truncation of C at its own sup never raises a weight that depends only
    on the sup, so this family is complete for the covering-number objective.
    """
    out = set()
    for c in cliques:
        vals = values[list(c)]
        for t in np.unique(vals):
            out.add(tuple(x for x, v in zip(c, vals) if v <= t))
    out.update((i,) for i in range(len(values)))
    return sorted(out)


def all_cliques(dist: np.ndarray, eps: float, max_size: int | None = None,
                budget: int = DEFAULT_FAMILY_BUDGET) -> list:
    """Every nonempty set of diameter ``< eps``, optionally capped in size."""
    out = []
    for c in nx.enumerate_all_cliques(closeness_graph(dist, eps)):
        if max_size is not None and len(c) > max_size:
            break
        out.append(tuple(sorted(c)))
        if len(out) > budget:
            raise BudgetExceededError(f"more than {budget} candidate sets")
    return sorted(out)


def greedy_cover(n: int, masks: Sequence[int], costs: Sequence[float],
                 prune: bool = True) -> tuple:
    """Cost-per-new-element greedy; returns ``(value, chosen indices)``."""
    full = (1 << n) - 1
    covered = 0
    chosen = []
    costs = list(costs)
    while covered != full:
        best, best_ratio = -1, math.inf
        for k, m in enumerate(masks):
            gain = (m & ~covered).bit_count()
            if gain:
                r = costs[k] / gain
                if r < best_ratio:
                    best, best_ratio = k, r
        if best < 0:
            raise ValueError("family does not cover the universe")
        chosen.append(best)
        covered |= masks[best]
    if prune:
        # drop sets made redundant by later picks, most expensive first
        for k in sorted(chosen, key=lambda k: -costs[k]):
            rest = 0
            for j in chosen:
                if j != k:
                    rest |= masks[j]
            if rest == full:
                chosen.remove(k)
    return float(sum(costs[k] for k in chosen)), sorted(chosen)


def exact_cover(n: int, masks: Sequence[int], costs: Sequence[float],
                node_budget: int = DEFAULT_NODE_BUDGET) -> tuple:
    """Minimum-cost cover by branch and bound; returns ``(value, chosen indices)``."""
    full = (1 << n) - 1
    costs = [float(c) for c in costs]
    containing = [[] for _ in range(n)]
    for k, m in enumerate(masks):
        for i in from_mask(m):
            containing[i].append(k)
    for i in range(n):
        if not containing[i]:
            raise ValueError(f"element {i} is not covered by any set")
        containing[i].sort(key=lambda k: (costs[k], -masks[k].bit_count()))

    best_val, best_sel = greedy_cover(n, masks, costs)
    best_sel = list(best_sel)
    memo: dict = {}
    nodes = 0
    stack_sel: list = []

    def price_bound(uncovered: int) -> float:
        lb = 0.0
        rest = uncovered
        i = 0
        while rest:
            if rest & 1:
                lb += min(costs[k] / (masks[k] & uncovered).bit_count() for k in containing[i])
            rest >>= 1
            i += 1
        return lb

    def dfs(covered: int, cost: float):
        nonlocal best_val, best_sel, nodes
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceededError(f"branch and bound exceeded {node_budget} nodes")
        if covered == full:
            if cost < best_val:
                best_val, best_sel = cost, list(stack_sel)
            return
        seen = memo.get(covered)
        if seen is not None and seen <= cost:
            return
        memo[covered] = cost
        uncovered = full & ~covered
        if cost + price_bound(uncovered) >= best_val * (1 - 1e-12):
            return
        # branch on the uncovered element with the fewest options
        pick, pick_len = -1, math.inf
        rest, i = uncovered, 0
        while rest:
            if rest & 1 and len(containing[i]) < pick_len:
                pick, pick_len = i, len(containing[i])
            rest >>= 1
            i += 1
        for k in containing[pick]:
            stack_sel.append(k)
            dfs(covered | masks[k], cost + costs[k])
            stack_sel.pop()

    dfs(0, 0.0)
    return float(best_val), sorted(best_sel)
