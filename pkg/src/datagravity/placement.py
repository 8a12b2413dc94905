"""
Compute placement under the power-law movement energy.

Data objects are fixed.  Each compute kernel exchanges ``N[k, o]`` bits per
run with data object ``o`` and pays ``alpha * N * d**beta`` for it.  The
placement objective is the sum over all (kernel, object) pairs::

    E(x) = sum_k sum_o alpha * N[k, o] * max(|x_k - p_o|, eps)**beta

Kernels never talk to each other, so the objective separates per kernel and
each kernel is convex in its own position for beta >= 1.  For beta = 2 the
optimum is the traffic-weighted centroid of the objects; as beta approaches
1 it slides toward the weighted geometric median and the heaviest object.

Two solvers are provided:

* :func:`optimize_continuous` -- projected descent inside the region box.
  The default step rule tries the iteratively-reweighted (Weiszfeld) step
  first and halves it until the energy drops, so the objective never
  increases between iterations.
* :func:`optimize_discrete` -- assignment of kernels to capacity-1 slots.
  Small instances are solved exactly by depth-first branch and bound, larger
  ones by greedy insertion followed by swap-based local search.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .energy import TechProfile
from .errors import DomainError
from .gravity import EPSILON_D, DataObject

EXHAUSTIVE_MAX_KERNELS = 8
EXHAUSTIVE_MAX_SLOTS = 12
_ARMIJO = 1e-4
_MAX_HALVINGS = 80
_MIN_MOVE = 1e-12


@dataclass(frozen=True)
class ComputeKernel:
    """A kernel with per-object traffic (bits per run) and an optional start position."""

    id: str
    traffic: Mapping[str, float]
    position: tuple | None = None

    def __post_init__(self):
        traffic = {}
        for key, bits in dict(self.traffic).items():
            bits = float(bits)
            if not (bits >= 0 and math.isfinite(bits)):
                raise DomainError(f"traffic {self.id!r} -> {key!r} must be finite and >= 0, got {bits!r}")
            traffic[str(key)] = bits
        object.__setattr__(self, "traffic", traffic)
        if self.position is not None:
            pos = np.asarray(self.position, dtype=float)
            if pos.shape != (3,) or not np.all(np.isfinite(pos)):
                raise DomainError(f"position of kernel {self.id!r} must be a finite 3-vector")
            object.__setattr__(self, "position", tuple(pos.tolist()))

    @property
    def total_traffic(self):
        return sum(self.traffic.values())


class PlacementProblem:
    """Fixed data objects, movable kernels, a technology profile and a legal box.

    ``region`` is ``(lo, hi)``.  ``slots`` (optional) lists candidate
    positions for discrete placement, each holding at most one kernel.
    """

    def __init__(self, objects: Sequence[DataObject], kernels: Sequence[ComputeKernel],
                 profile: TechProfile, region, slots=None, epsilon_d: float = EPSILON_D,
                 seed: int | None = None):
        self.objects = tuple(objects)
        self.kernels = tuple(kernels)
        self.profile = profile
        self.epsilon_d = float(epsilon_d)
        self.seed = seed
        if not self.epsilon_d > 0:
            raise DomainError("epsilon_d must be > 0")

        obj_ids = [o.id for o in self.objects]
        if len(set(obj_ids)) != len(obj_ids):
            raise DomainError("duplicate data object id")
        kern_ids = [k.id for k in self.kernels]
        if len(set(kern_ids)) != len(kern_ids):
            raise DomainError("duplicate kernel id")
        index = {oid: i for i, oid in enumerate(obj_ids)}
        self.traffic = np.zeros((len(self.kernels), len(self.objects)))
        for k, kern in enumerate(self.kernels):
            for oid, bits in kern.traffic.items():
                if oid not in index:
                    raise DomainError(f"kernel {kern.id!r} references unknown data object {oid!r}")
                self.traffic[k, index[oid]] = bits
        self.object_positions = np.array([o.position for o in self.objects], dtype=float).reshape(-1, 3)

        lo = np.asarray(region[0], dtype=float)
        hi = np.asarray(region[1], dtype=float)
        if lo.shape != (3,) or hi.shape != (3,) or not np.all(np.isfinite(lo) & np.isfinite(hi)):
            raise DomainError("region corners must be finite 3-vectors")
        if np.any(hi < lo) or not np.linalg.norm(hi - lo) > 0:
            raise DomainError("region is degenerate")
        self.region = (lo, hi)

        if slots is None:
            self.slots = None
        else:
            arr = np.asarray(slots, dtype=float).reshape(-1, 3)
            if not np.all(np.isfinite(arr)):
                raise DomainError("slot positions must be finite")
            outside = np.any((arr < lo) | (arr > hi), axis=1)
            if np.any(outside):
                raise DomainError(f"slot {int(np.argmax(outside))} lies outside the region")
            self.slots = arr

        for kern in self.kernels:
            if kern.position is not None and not self.contains(kern.position):
                raise DomainError(f"start position of kernel {kern.id!r} lies outside the region")

    @property
    def kernel_ids(self):
        return tuple(k.id for k in self.kernels)

    @property
    def diagonal(self):
        return float(np.linalg.norm(self.region[1] - self.region[0]))

    @property
    def center(self):
        return 0.5 * (self.region[0] + self.region[1])

    def contains(self, point):
        p = np.asarray(point, dtype=float)
        return bool(np.all((p >= self.region[0]) & (p <= self.region[1])))

    def translated(self, offset):
        """Same problem with objects, region, slots and start positions shifted by ``offset``."""
        t = np.asarray(offset, dtype=float)
        objs = [DataObject(o.id, np.add(o.position, t), o.entropy_per_access, o.access_frequency)
                for o in self.objects]
        kerns = [ComputeKernel(k.id, k.traffic, None if k.position is None else np.add(k.position, t))
                 for k in self.kernels]
        slots = None if self.slots is None else self.slots + t
        return PlacementProblem(objs, kerns, self.profile, (self.region[0] + t, self.region[1] + t),
                                slots, self.epsilon_d, self.seed)


@dataclass
class PlacementSolution:
    kernel_ids: tuple
    positions: dict
    objective: float
    iterations: int
    converged: bool
    status: dict
    method: str
    slots: dict | None = None
    history: list = field(default_factory=list)
    seed: int | None = None

    def position_array(self):
        """(K, 3) array; rows of unplaced kernels are NaN."""
        return np.array([(math.nan,) * 3 if self.positions[k] is None else self.positions[k]
                         for k in self.kernel_ids], dtype=float).reshape(-1, 3)

    def to_dict(self):
        return {
            "method": self.method,
            "objective_j": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "seed": self.seed,
            "kernels": [
                {
                    "id": k,
                    "status": self.status[k],
                    "position_m": None if self.positions[k] is None else list(self.positions[k]),
                    "slot": None if self.slots is None else self.slots.get(k),
                }
                for k in self.kernel_ids
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def table(self):
        """Human-readable summary with units."""
        lines = [f"method: {self.method}   objective (pJ): {self.objective / 1e-12:.6g}   "
                 f"iterations: {self.iterations}   converged: {str(self.converged).lower()}",
                 f"{'kernel':<16}{'status':<12}{'x (m)':>14}{'y (m)':>14}{'z (m)':>14}{'slot':>6}"]
        for k in self.kernel_ids:
            pos = self.positions[k]
            coords = ("-", "-", "-") if pos is None else tuple(f"{c:.6g}" for c in pos)
            slot = "-" if self.slots is None or self.slots.get(k) is None else str(self.slots[k])
            lines.append(f"{k:<16}{self.status[k]:<12}{coords[0]:>14}{coords[1]:>14}{coords[2]:>14}{slot:>6}")
        return "\n".join(lines) + "\n"


def _kernel_energies(problem, rows, X):
    """Energy of kernels ``rows`` placed at ``X`` (N, 3), summed object by object."""
    alpha, beta, eps = problem.profile.alpha, problem.profile.beta, problem.epsilon_d
    W = problem.traffic[rows]
    acc = np.zeros(X.shape[0])
    for o in range(problem.object_positions.shape[0]):
        delta = X - problem.object_positions[o]
        dist = np.maximum(np.sqrt(np.einsum("ij,ij->i", delta, delta)), eps)
        acc = acc + np.where(W[:, o] > 0, alpha * W[:, o] * dist ** beta, 0.0)
    return acc


def _kernel_gradients(problem, rows, X):
    alpha, beta, eps = problem.profile.alpha, problem.profile.beta, problem.epsilon_d
    W = problem.traffic[rows]
    grad = np.zeros_like(X)
    for o in range(problem.object_positions.shape[0]):
        delta = X - problem.object_positions[o]
        dist = np.sqrt(np.einsum("ij,ij->i", delta, delta))
        live = (W[:, o] > 0) & (dist > eps)
        coef = np.where(live, alpha * W[:, o] * beta * np.where(live, dist, 1.0) ** (beta - 2.0), 0.0)
        grad += coef[:, None] * delta
    return grad


def _as_positions(problem, positions):
    if isinstance(positions, Mapping):
        positions = [positions[k] for k in problem.kernel_ids]
    X = np.array([(math.nan,) * 3 if p is None else p for p in positions], dtype=float)
    X = X.reshape(-1, 3)
    if X.shape[0] != len(problem.kernels):
        raise DomainError(f"expected {len(problem.kernels)} kernel positions, got {X.shape[0]}")
    placed = problem.traffic.sum(axis=1) > 0
    if not np.all(np.isfinite(X[placed])):
        raise DomainError("kernel positions must be finite")
    return np.where(placed[:, None], X, 0.0)


def objective_energy(problem: PlacementProblem, positions) -> float:
    """Total movement energy in joules for kernels at ``positions``.

    ``positions`` is a (K, 3) array-like or a mapping from kernel id to
    position.  Distances shorter than ``epsilon_d`` are clamped to it.
    Kernels without traffic contribute nothing and may be given as None.
    """
    X = _as_positions(problem, positions)
    total = 0.0
    for e in _kernel_energies(problem, np.arange(X.shape[0]), X).tolist():
        total += e
    return total


def objective_gradient(problem: PlacementProblem, positions) -> np.ndarray:
    """(K, 3) gradient of :func:`objective_energy`.

    Pairs closer than ``epsilon_d`` sit on the clamped floor and contribute
    zero.
    """
    X = _as_positions(problem, positions)
    return _kernel_gradients(problem, np.arange(X.shape[0]), X)


def _projected_gradient(g, X, lo, hi):
    pg = g.copy()
    pg[(X <= lo) & (g > 0)] = 0.0
    pg[(X >= hi) & (g < 0)] = 0.0
    return pg


def _weiszfeld_step(problem, rows, X):
    """Step length 1 / (alpha * beta * sum_o N d**(beta-2)).

    Moving ``-step * grad`` lands on the centroid reweighted by
    ``N * d**(beta - 2)``; exact in one step for beta = 2.
    """
    alpha, beta, eps = problem.profile.alpha, problem.profile.beta, problem.epsilon_d
    W = problem.traffic[rows]
    s = np.zeros(X.shape[0])
    for o in range(problem.object_positions.shape[0]):
        dist = np.maximum(np.linalg.norm(X - problem.object_positions[o], axis=1), eps)
        s += np.where(W[:, o] > 0, W[:, o] * dist ** (beta - 2.0), 0.0)
    return 1.0 / (alpha * beta * s)


def _energy_change(problem, rows, X, step):
    """Energy change of moving kernels ``rows`` from ``X`` by ``step``.

    Uses ``d**beta * expm1(beta/2 * log1p(q))`` with
    ``q = (|u + s|**2 - |u|**2) / |u|**2 = s.(2u + s) / |u|**2`` so that tiny
    steps near the optimum are not lost to cancellation between two large
    energies.  Pairs touching the ``epsilon_d`` floor are differenced directly.
    """
    alpha, beta, eps = problem.profile.alpha, problem.profile.beta, problem.epsilon_d
    W = problem.traffic[rows]
    acc = np.zeros(X.shape[0])
    for o in range(problem.object_positions.shape[0]):
        u = X - problem.object_positions[o]
        d2 = np.einsum("ij,ij->i", u, u)
        d2_new = np.einsum("ij,ij->i", u + step, u + step)
        d, d_new = np.sqrt(d2), np.sqrt(d2_new)
        smooth = (d > eps) & (d_new > eps)
        q = np.einsum("ij,ij->i", step, 2.0 * u + step) / np.where(smooth, d2, 1.0)
        smooth &= q > -1.0
        fine = d ** beta * np.expm1(0.5 * beta * np.log1p(np.where(smooth, q, 0.0)))
        coarse = np.maximum(d_new, eps) ** beta - np.maximum(d, eps) ** beta
        acc = acc + np.where(W[:, o] > 0, alpha * W[:, o] * np.where(smooth, fine, coarse), 0.0)
    return acc


def optimize_continuous(problem: PlacementProblem, max_iters: int = 10000, tol: float = 1e-9,
                        step_rule: str = "weiszfeld", initial=None) -> PlacementSolution:
    """Place every kernel at a minimum of its movement energy inside the region.

    Parameters
    ----------
    max_iters : int
        Iteration cap shared by all kernels (they advance in lockstep).
    tol : float
        A kernel has converged once its projected gradient norm drops below
        ``tol * alpha * traffic * diagonal**(beta - 1)``, or once an accepted
        step moves it less than 1e-12 m.
    step_rule : {"weiszfeld", "fixed"}
        Initial trial step before halving.  ``"weiszfeld"`` uses the
        reweighted-centroid step; ``"fixed"`` moves a tenth of the region
        diagonal along the negative gradient.
    initial : array-like or mapping, optional
        Start positions; defaults to each kernel's own ``position`` and then
        to the region center.

    Kernels with no traffic are left unplaced with status ``"unplaced"``.
    """
    if step_rule not in ("weiszfeld", "fixed"):
        raise DomainError(f"unknown step rule {step_rule!r}")
    K = len(problem.kernels)
    lo, hi = problem.region
    if initial is None:
        X = np.array([problem.center if k.position is None else k.position for k in problem.kernels],
                     dtype=float).reshape(-1, 3)
    else:
        X = _as_positions(problem, initial).copy()
        if K and not all(problem.contains(x) for x in X):
            raise DomainError("initial positions must lie inside the region")

    traffic = problem.traffic.sum(axis=1)
    placed = traffic > 0
    rows = np.arange(K)
    p = problem.profile
    gtol = tol * p.alpha * traffic * problem.diagonal ** (p.beta - 1.0)
    done = ~placed
    converged = np.zeros(K, dtype=bool)
    # running energies: start value plus accepted (negative) changes
    f = _kernel_energies(problem, rows, X)
    history = [float(np.sum(f[placed]))]
    it = 0
    while it < max_iters and not np.all(done):
        it += 1
        act = np.flatnonzero(~done)
        xa = X[act]
        g = _kernel_gradients(problem, act, xa)
        pg = _projected_gradient(g, xa, lo, hi)
        small = np.linalg.norm(pg, axis=1) < gtol[act]
        converged[act[small]] = True
        done[act[small]] = True
        keep = ~small
        act, xa, g = act[keep], xa[keep], g[keep]
        if act.size == 0:
            history.append(history[-1])
            break

        if step_rule == "weiszfeld":
            t = _weiszfeld_step(problem, act, xa)
        else:
            t = 0.1 * problem.diagonal / np.linalg.norm(g, axis=1)
        pending = np.ones(act.size, dtype=bool)
        new_x = xa.copy()
        new_f = f[act].copy()
        for _ in range(_MAX_HALVINGS):
            idx = np.flatnonzero(pending)
            trial = np.clip(xa[idx] - t[idx, None] * g[idx], lo, hi)
            step = trial - xa[idx]
            change = _energy_change(problem, act[idx], xa[idx], step)
            slope = np.einsum("ij,ij->i", g[idx], step)
            ok = (change <= _ARMIJO * slope) & (change < 0)
            new_x[idx[ok]] = xa[idx[ok]] + step[ok]
            new_f[idx[ok]] = f[act[idx[ok]]] + change[ok]
            pending[idx[ok]] = False
            if not pending.any():
                break
            t[pending] *= 0.5

        moved = np.linalg.norm(new_x - xa, axis=1)
        stalled = pending | (moved < _MIN_MOVE)
        X[act] = new_x
        f[act] = new_f
        converged[act[stalled]] = True
        done[act[stalled]] = True
        history.append(float(np.sum(f[placed])))

    status = {}
    positions = {}
    for k, kern in enumerate(problem.kernels):
        if not placed[k]:
            status[kern.id] = "unplaced"
            positions[kern.id] = None
        else:
            status[kern.id] = "converged" if converged[k] else "max_iters"
            positions[kern.id] = tuple(X[k].tolist())
    objective = objective_energy(problem, positions)
    return PlacementSolution(problem.kernel_ids, positions, objective, it,
                             bool(np.all(converged[placed])), status, "continuous",
                             history=history, seed=problem.seed)


def slot_costs(problem: PlacementProblem) -> np.ndarray:
    """(K, S) matrix of each kernel's energy when placed on each slot."""
    if problem.slots is None:
        raise DomainError("problem has no slots")
    K, S = len(problem.kernels), problem.slots.shape[0]
    rows = np.repeat(np.arange(K), S)
    X = np.tile(problem.slots, (K, 1))
    return _kernel_energies(problem, rows, X).reshape(K, S)


def assignment_cost(costs, assignment) -> float:
    """Sum of ``costs[k][assignment[k]]`` accumulated in kernel order."""
    total = 0.0
    for k, s in enumerate(assignment):
        total += costs[k][s]
    return total


def _greedy(costs, order):
    """Each kernel in ``order`` takes its cheapest free slot (lowest index on ties)."""
    S = len(costs[0]) if costs else 0
    used = [False] * S
    assign = [0] * len(costs)
    for k in order:
        best_s, best_c = -1, math.inf
        for s in range(S):
            if not used[s] and costs[k][s] < best_c:
                best_s, best_c = s, costs[k][s]
        assign[k] = best_s
        used[best_s] = True
    return assign


def _neighbours(assign, n_slots):
    """Candidate reassignments as lists of (kernel, new_slot) changes.

    Scanned in order: pairwise swaps, moves to a free slot, ejection chains
    (one kernel takes another's slot, which moves to a free slot) and
    3-cycles.  Pairwise moves alone leave too many poor local optima.
    """
    K = len(assign)
    free = sorted(set(range(n_slots)) - set(assign))
    for k1 in range(K):
        for k2 in range(k1 + 1, K):
            yield ((k1, assign[k2]), (k2, assign[k1]))
        for s in free:
            yield ((k1, s),)
    for k1 in range(K):
        for k2 in range(K):
            if k1 != k2:
                for s in free:
                    yield ((k1, assign[k2]), (k2, s))
    for k1 in range(K):
        for k2 in range(K):
            for k3 in range(K):
                if len({k1, k2, k3}) == 3:
                    yield ((k1, assign[k2]), (k2, assign[k3]), (k3, assign[k1]))


def _local_search(costs, assign):
    """First-improvement descent over :func:`_neighbours` until no move helps."""
    n_slots = len(costs[0])
    assign = list(assign)
    current = assignment_cost(costs, assign)
    improved = True
    while improved:
        improved = False
        for change in _neighbours(assign, n_slots):
            delta = sum(costs[k][s] - costs[k][assign[k]] for k, s in change)
            if delta >= 0:
                continue
            trial = list(assign)
            for k, s in change:
                trial[k] = s
            cost = assignment_cost(costs, trial)
            if cost < current:
                assign, current, improved = trial, cost, True
                break
    return assign


def _branch_and_bound(costs, incumbent):
    """Exact lexicographically-smallest minimum-cost assignment.

    Kernels are fixed in index order and slots tried in ascending order.
    Bounds add each remaining kernel's cheapest slot in the same order as
    :func:`assignment_cost`, so they are exact floating-point lower bounds.
    """
    K, S = len(costs), len(costs[0])
    row_min = [min(row) for row in costs]
    best = list(incumbent)
    best_val = assignment_cost(costs, best)
    assign = [0] * K
    used = [False] * S
    nodes = 0

    def descend(k, prefix):
        nonlocal best, best_val, nodes
        nodes += 1
        if k == K:
            if prefix < best_val or (prefix == best_val and assign < best):
                best, best_val = list(assign), prefix
            return
        row = costs[k]
        for s in range(S):
            if used[s]:
                continue
            value = prefix + row[s]
            lb = value
            for j in range(k + 1, K):
                lb += row_min[j]
            if lb > best_val:
                continue
            assign[k] = s
            if lb == best_val and assign[:k + 1] > best[:k + 1]:
                continue
            used[s] = True
            descend(k + 1, value)
            used[s] = False

    descend(0, 0.0)
    return best, nodes


def optimize_discrete(problem: PlacementProblem, exhaustive: bool | None = None) -> PlacementSolution:
    """Assign kernels to distinct slots minimizing total movement energy.

    With at most 8 kernels and 12 slots the search is exhaustive (branch and
    bound seeded by the heuristic) and returns the global optimum, ties going
    to the lexicographically smallest slot vector.  Larger instances use
    greedy insertion in descending traffic order followed by local search
    over swaps, moves to free slots, ejection chains and 3-cycles.
    ``exhaustive`` forces either path.

    Kernels without traffic occupy no slot and are reported unplaced.
    """
    if problem.slots is None:
        raise DomainError("discrete placement needs slots")
    traffic = problem.traffic.sum(axis=1)
    live = [k for k in range(len(problem.kernels)) if traffic[k] > 0]
    n_slots = problem.slots.shape[0]
    if len(live) > n_slots:
        raise DomainError(f"infeasible: {len(live)} kernels but only {n_slots} slots")

    full = slot_costs(problem)
    costs = full[live].tolist()
    if exhaustive is None:
        exhaustive = len(live) <= EXHAUSTIVE_MAX_KERNELS and n_slots <= EXHAUSTIVE_MAX_SLOTS
    iterations = 0
    assign = []
    if live:
        order = sorted(range(len(live)), key=lambda i: (-traffic[live[i]], i))
        assign = _local_search(costs, _greedy(costs, order))
        if exhaustive:
            assign, iterations = _branch_and_bound(costs, assign)

    status, positions, slots = {}, {}, {}
    for kern in problem.kernels:
        status[kern.id], positions[kern.id], slots[kern.id] = "unplaced", None, None
    for i, k in enumerate(live):
        kid = problem.kernels[k].id
        status[kid] = "placed"
        slots[kid] = assign[i]
        positions[kid] = tuple(problem.slots[assign[i]].tolist())
    objective = objective_energy(problem, positions)
    return PlacementSolution(problem.kernel_ids, positions, objective, iterations, True, status,
                             "exhaustive" if exhaustive else "greedy+swap", slots=slots,
                             history=[objective], seed=problem.seed)


def random_problem(seed: int, n_objects: int = 3, n_kernels: int = 2, n_slots: int = 0,
                   beta: float = 2.0, alpha: float = 1e-12, extent: float = 1.0,
                   planar: bool = False) -> PlacementProblem:
    """Reproducible random instance inside ``[0, extent]**3``.

    Object positions and slot positions are uniform in the box; traffic is
    uniform in [1, 100) bits with every kernel trading with every object.
    ``planar=True`` pins all z coordinates to 0 (the box keeps its extent).
    """
    seed = int(seed) & (2 ** 64 - 1)
    rng = np.random.default_rng(seed)

    def draw(n):
        pts = rng.uniform(0.0, extent, size=(n, 3))
        if planar:
            pts[:, 2] = 0.0
        return pts

    obj_pos = draw(n_objects)
    objects = [DataObject(f"d{i}", obj_pos[i], 64.0, 1.0) for i in range(n_objects)]
    traffic = rng.uniform(1.0, 100.0, size=(n_kernels, n_objects))
    kernels = [ComputeKernel(f"k{k}", {f"d{i}": traffic[k, i] for i in range(n_objects)})
               for k in range(n_kernels)]
    slots = draw(n_slots) if n_slots else None
    profile = TechProfile("random", 1e-12, alpha, beta)
    region = ((0.0, 0.0, 0.0), (extent, extent, extent))
    return PlacementProblem(objects, kernels, profile, region, slots, seed=seed)
