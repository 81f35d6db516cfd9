"""2-SAT via implication graph and Tarjan's strongly connected components.

Variables are ``0..n-1``; literal ``2*v`` is ``v`` true and ``2*v + 1`` is
``v`` false.  Every clause carries a label so that refutations can be replayed
as a chain of implications.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass


def lit(var: int, value: bool) -> int:
    return 2 * var if value else 2 * var + 1


def neg(literal: int) -> int:
    return literal ^ 1


@dataclass(frozen=True)
class Step:
    src: int
    dst: int
    reason: object


class TwoSat:
    def __init__(self, nvars: int):
        self.nvars = nvars
        self.adj: list[list[tuple[int, object]]] = [[] for _ in range(2 * nvars)]

    def add_clause(self, a: int, b: int, reason=None) -> None:
        """Add ``a or b``."""
        self.adj[neg(a)].append((b, reason))
        if a != b:
            self.adj[neg(b)].append((a, reason))

    def force(self, a: int, reason=None) -> None:
        self.add_clause(a, a, reason)

    def _components(self) -> list[int]:
        n = len(self.adj)
        index = [-1] * n
        low = [0] * n
        comp = [-1] * n
        on_stack = [False] * n
        stack: list[int] = []
        counter = 0
        ncomp = 0
        for root in range(n):
            if index[root] != -1:
                continue
            work = [(root, 0)]
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on_stack[root] = True
            while work:
                v, pos = work[-1]
                edges = self.adj[v]
                if pos < len(edges):
                    work[-1] = (v, pos + 1)
                    w = edges[pos][0]
                    if index[w] == -1:
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack[w] = True
                        work.append((w, 0))
                    elif on_stack[w]:
                        low[v] = min(low[v], index[w])
                    continue
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
        return comp

    def solve(self) -> tuple[list[bool] | None, list[Step] | None]:
        """Return ``(values, None)`` when satisfiable, else ``(None, cycle)``.

        The cycle runs ``x -> ... -> not x -> ... -> x`` for some variable x.
        """
        comp = self._components()
        for v in range(self.nvars):
            if comp[2 * v] == comp[2 * v + 1]:
                there = self._chain(2 * v, 2 * v + 1)
                back = self._chain(2 * v + 1, 2 * v)
                return None, there + back
        # Tarjan numbers components in reverse topological order.
        return [comp[2 * v] < comp[2 * v + 1] for v in range(self.nvars)], None

    def _chain(self, src: int, dst: int) -> list[Step]:
        prev: dict[int, Step | None] = {src: None}
        queue = deque([src])
        while queue:
            v = queue.popleft()
            if v == dst:
                break
            for w, reason in self.adj[v]:
                if w not in prev:
                    prev[w] = Step(v, w, reason)
                    queue.append(w)
        steps = []
        node = dst
        while prev[node] is not None:
            step = prev[node]
            steps.append(step)
            node = step.src
        return steps[::-1]
