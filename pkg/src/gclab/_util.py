"""Small shared utilities: union-find and deterministic JSON emission."""

from __future__ import annotations

import json
import math


class UnionFind:
    """Union-find over arbitrary hashable items, path-halving."""

    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True

    def connected(self, a, b) -> bool:
        return self.find(a) == self.find(b)

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def json_number(x):
    """Map a float to something json can round-trip, with inf as a string."""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def parse_number(x) -> float:
    if x == "inf":
        return math.inf
    return float(x)


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, no timestamps, repr-exact floats."""
    return json.dumps(obj, sort_keys=True, indent=2)
