"""Exact maximum-weight bipartite matching on a sparse edge list.

Successive shortest augmenting paths with node potentials: each round
runs Dijkstra over reduced costs from all unmatched left vertices, picks
the cheapest augmenting path, and stops as soon as the best path no
longer improves the total weight. Every intermediate matching is optimal
for its cardinality, so the result is a true optimum over matchings of
any cardinality, never a greedy approximation.
"""

from __future__ import annotations

import heapq
from typing import Hashable, Sequence

_EPS = 1e-12
_INF = float("inf")


def max_weight_matching(edges: Sequence[tuple[Hashable, Hashable, float]]) -> list[tuple[Hashable, Hashable]]:
    """Matching of maximum total weight in a bipartite graph.

    edges are (left, right, weight) with weight >= 0; parallel edges keep
    the heaviest. Returns the matched (left, right) pairs. Vertices may
    stay unmatched; zero-weight edges never improve the total and are not
    forced into the matching.
    """
    left_ids: dict[Hashable, int] = {}
    right_ids: dict[Hashable, int] = {}
    weight: dict[tuple[int, int], float] = {}
    for l, r, w in edges:
        if w < 0:
            raise ValueError(f"negative weight {w} on edge ({l!r}, {r!r})")
        li = left_ids.setdefault(l, len(left_ids))
        ri = right_ids.setdefault(r, len(right_ids))
        if weight.get((li, ri), -1.0) < w:
            weight[(li, ri)] = w
    nl, nr = len(left_ids), len(right_ids)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(nl)]
    for (li, ri), w in weight.items():
        adj[li].append((ri, w))

    # Reduced cost of edge (l, r) is -w + pot_l[l] - pot_r[r]; the initial
    # potentials make every reduced cost non-negative, and the update rule
    # below (add min(dist, path length), unreached vertices add the full
    # path length) keeps it that way across rounds.
    max_w = max(weight.values(), default=0.0)
    pot_l = [max_w] * nl
    pot_r = [0.0] * nr
    pot_t = 0.0
    match_l = [-1] * nl
    match_r = [-1] * nr

    while True:
        dist_l = [_INF] * nl
        dist_r = [_INF] * nr
        parent_r = [-1] * nr  # left vertex the shortest path arrives from
        heap: list[tuple[float, int]] = []
        for li in range(nl):
            if match_l[li] == -1:
                dist_l[li] = max_w - pot_l[li]
                heapq.heappush(heap, (dist_l[li], li))
        while heap:
            d, li = heapq.heappop(heap)
            if d > dist_l[li] + _EPS:
                continue
            for ri, w in adj[li]:
                if match_l[li] == ri:
                    continue
                nd = d + max(0.0, -w + pot_l[li] - pot_r[ri])
                if nd + _EPS < dist_r[ri]:
                    dist_r[ri] = nd
                    parent_r[ri] = li
                    lj = match_r[ri]
                    if lj != -1:
                        back = max(0.0, weight[(lj, ri)] + pot_r[ri] - pot_l[lj])
                        if nd + back + _EPS < dist_l[lj]:
                            dist_l[lj] = nd + back
                            heapq.heappush(heap, (dist_l[lj], lj))

        # cheapest path to the virtual sink behind all unmatched rights
        dist_t = _INF
        best_r = -1
        for ri in range(nr):
            if match_r[ri] == -1 and dist_r[ri] < _INF:
                through = dist_r[ri] + pot_r[ri] - pot_t
                if through < dist_t:
                    dist_t = through
                    best_r = ri
        if best_r == -1:
            break
        if dist_t + pot_t - max_w >= -_EPS:
            break  # best augmentation would not increase the total weight

        for li in range(nl):
            pot_l[li] += min(dist_l[li], dist_t)
        for ri in range(nr):
            pot_r[ri] += min(dist_r[ri], dist_t)
        pot_t += dist_t

        ri = best_r
        while ri != -1:
            li = parent_r[ri]
            prev = match_l[li]
            match_l[li] = ri
            match_r[ri] = li
            ri = prev

    lefts = list(left_ids)
    rights = list(right_ids)
    return [(lefts[li], rights[ri]) for li, ri in enumerate(match_l) if ri != -1]
