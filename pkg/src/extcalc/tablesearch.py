"""Backtracking completion of binary operation tables under local constraints.

The engine fills one n x n table in flat row-major order subject to:

* prefilled cells (kernel block, unit row and column, ...);
* per-cell candidate values (the base-digit of every product is forced when
  the projection to the base must be a homomorphism, so branching happens
  only over the kernel digit);
* all-different cell groups (rows and columns for quasigroup-like
  varieties, transversal columns for monoid extensions);
* optional associativity, enforced incrementally: each new cell is examined
  in all four roles it can play inside an instance (ab)c = a(bc), using
  occurrence lists by value. When only one participating cell of an
  instance is still open its value is implied, so it is placed immediately
  and propagation cascades; a violation is caught at the latest when the
  last participating cell is filled;
* optional commutativity, by mirror propagation.

The branching cell is chosen by fewest remaining values (ties broken by
lowest index) and values are tried ascending, so the search order is a
pure function of the problem and the leaf sequence is deterministic. Work
can be split by enumerating decision prefixes; replaying a prefix repeats
the same choices, so concatenating the leaf lists in prefix order
reproduces the sequential order exactly and multi-worker runs stay
byte-identical with single-worker runs.
"""

from __future__ import annotations

import multiprocessing
from dataclasses import dataclass

from .limits import Limits, NodeBudget

UNDEF = -1


@dataclass(frozen=True)
class TableProblem:
    size: int
    fixed: tuple[tuple[int, int], ...] = ()
    candidates: tuple[tuple[int, ...], ...] | None = None
    alldiff_groups: tuple[tuple[int, ...], ...] = ()
    associative: bool = False
    commutative: bool = False


class _State:
    def __init__(self, problem: TableProblem, budget: NodeBudget):
        n = problem.size
        self.problem = problem
        self.budget = budget
        self.n = n
        self.table = [UNDEF] * (n * n)
        self.occ: list[list[int]] = [[] for _ in range(n)]
        self.groups_of_cell: list[list[int]] = [[] for _ in range(n * n)]
        for gi, cells in enumerate(problem.alldiff_groups):
            for c in cells:
                self.groups_of_cell[c].append(gi)
        self.group_used: list[set[int]] = [set() for _ in problem.alldiff_groups]
        self.trail: list[int] = []

    # -- constraint propagation -------------------------------------------

    def _assoc_scan(self, cell: int, v: int, queue: list[tuple[int, int]]) -> bool:
        """Examine the new cell in all four associativity roles.

        For every instance (ab)c = a(bc) touching the cell: contradiction
        between two known sides fails, a single open side is queued with
        its implied value, anything less determined is left to later fills.
        """
        n, T = self.n, self.table
        x, y = divmod(cell, n)
        for z in range(n):
            # role inner-left: instances (x, y, z), the new cell is (x y)
            t_yz = T[y * n + z]
            if t_yz != UNDEF:
                c2, c4 = v * n + z, x * n + t_yz
                left, right = T[c2], T[c4]
                if left == UNDEF:
                    if right != UNDEF:
                        queue.append((c2, right))
                elif right == UNDEF:
                    queue.append((c4, left))
                elif left != right:
                    return False
            # role inner-right: instances (z, x, y), the new cell is (x y)
            t_zx = T[z * n + x]
            if t_zx != UNDEF:
                c2, c4 = t_zx * n + y, z * n + v
                left, right = T[c2], T[c4]
                if left == UNDEF:
                    if right != UNDEF:
                        queue.append((c2, right))
                elif right == UNDEF:
                    queue.append((c4, left))
                elif left != right:
                    return False
        for pair_cell in self.occ[x]:
            # role outer-left: the new cell is ( (a b) y ) with a b = x
            a, b = divmod(pair_cell, n)
            t_by = T[b * n + y]
            if t_by != UNDEF:
                c4 = a * n + t_by
                right = T[c4]
                if right == UNDEF:
                    queue.append((c4, v))
                elif right != v:
                    return False
        for pair_cell in self.occ[y]:
            # role outer-right: the new cell is ( x (b c) ) with b c = y
            b, c = divmod(pair_cell, n)
            t_xb = T[x * n + b]
            if t_xb != UNDEF:
                c2 = t_xb * n + c
                left = T[c2]
                if left == UNDEF:
                    queue.append((c2, v))
                elif left != v:
                    return False
        return True

    def assign(self, cell: int, v: int) -> bool:
        """Place v and run propagation to a fixpoint. False on any clash."""
        queue = [(cell, v)]
        T = self.table
        while queue:
            c, val = queue.pop()
            current = T[c]
            if current != UNDEF:
                if current == val:
                    continue
                return False
            if self.problem.candidates is not None and val not in self.problem.candidates[c]:
                return False
            for gi in self.groups_of_cell[c]:
                if val in self.group_used[gi]:
                    return False
            self.budget.spend()
            T[c] = val
            self.occ[val].append(c)
            for gi in self.groups_of_cell[c]:
                self.group_used[gi].add(val)
            self.trail.append(c)
            if self.problem.associative and not self._assoc_scan(c, val, queue):
                return False
            if self.problem.commutative:
                cx, cy = divmod(c, self.n)
                if cx != cy:
                    queue.append((cy * self.n + cx, val))
        return True

    def choose_cell(self) -> tuple[int, int]:
        """The open cell with the fewest currently legal values.

        Returns (-1, 0) when the table is complete and (cell, 0) when some
        open cell has no legal value left, so the branch is dead.
        """
        T = self.table
        cands = self.problem.candidates
        best, best_count = -1, 0
        for c in range(len(T)):
            if T[c] != UNDEF:
                continue
            options = cands[c] if cands is not None else range(self.n)
            count = 0
            for v in options:
                if all(v not in self.group_used[gi] for gi in self.groups_of_cell[c]):
                    count += 1
            if count == 0:
                return c, 0
            if best == -1 or count < best_count:
                best, best_count = c, count
                if count == 1:
                    break
        return best, best_count

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            cell = self.trail.pop()
            v = self.table[cell]
            self.table[cell] = UNDEF
            self.occ[v].pop()
            for gi in self.groups_of_cell[cell]:
                self.group_used[gi].discard(v)


def _candidate_values(problem: TableProblem, cell: int):
    if problem.candidates is not None:
        return problem.candidates[cell]
    return range(problem.size)


def iter_tables(
    problem: TableProblem,
    budget: NodeBudget,
    prefix: tuple[tuple[int, int], ...] = (),
):
    """Yield completed tables (as tuples) in deterministic order."""
    state = _State(problem, budget)
    for cell, v in problem.fixed + prefix:
        if not state.assign(cell, v):
            return

    def dfs():
        cell, count = state.choose_cell()
        if cell == -1:
            yield tuple(state.table)
            return
        if count == 0:
            return
        for v in _candidate_values(problem, cell):
            m = state.mark()
            if state.assign(cell, v):
                yield from dfs()
            state.undo(m)

    yield from dfs()


def split_prefixes(
    problem: TableProblem, budget: NodeBudget, target: int
) -> list[tuple[tuple[int, int], ...]]:
    """Decision prefixes covering the whole tree, at least ``target`` of them
    when the tree allows it. Prefix order refines the sequential leaf order."""
    state = _State(problem, budget)
    for cell, v in problem.fixed:
        if not state.assign(cell, v):
            return []

    def expand(prefixes: list[tuple[tuple[int, int], ...]]):
        out: list[tuple[tuple[int, int], ...]] = []
        for prefix in prefixes:
            m0 = state.mark()
            ok = all(state.assign(c, v) for c, v in prefix)
            if not ok:
                state.undo(m0)
                continue
            cell, count = state.choose_cell()
            if cell == -1:
                out.append(prefix)  # already a leaf, keep as its own chunk
                state.undo(m0)
                continue
            if count == 0:
                state.undo(m0)
                continue
            for v in _candidate_values(problem, cell):
                m1 = state.mark()
                if state.assign(cell, v):
                    out.append(prefix + ((cell, v),))
                state.undo(m1)
            state.undo(m0)
        return out

    prefixes: list[tuple[tuple[int, int], ...]] = [()]
    depth = 0
    while len(prefixes) < target and depth < 4:
        expanded = expand(prefixes)
        if not expanded:
            return expanded
        if len(expanded) == len(prefixes) and depth > 0:
            break
        prefixes = expanded
        depth += 1
    return prefixes


def _leaf_worker(args) -> list[tuple[int, ...]]:
    problem, prefix, max_nodes = args
    return list(iter_tables(problem, NodeBudget(max_nodes), prefix))


def collect_tables(problem: TableProblem, limits: Limits) -> list[tuple[int, ...]]:
    """All completed tables, lexicographically; splits across workers if asked.

    The node budget applies per worker; the merged output does not depend
    on the worker count.
    """
    if limits.workers <= 1:
        return list(iter_tables(problem, NodeBudget(limits.max_nodes)))
    prefixes = split_prefixes(problem, NodeBudget(limits.max_nodes), 8 * limits.workers)
    if not prefixes:
        return []
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(limits.workers) as pool:
        chunks = pool.map(
            _leaf_worker,
            [(problem, prefix, limits.max_nodes) for prefix in prefixes],
        )
    out: list[tuple[int, ...]] = []
    for chunk in chunks:
        out.extend(chunk)
    return out
