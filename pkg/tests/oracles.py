"""Independent reference computations used by the tests.

None of these import the code under test.  They trade speed for obviousness:
bisection, brute-force enumeration, pure-Python loops, central differences.
"""

import itertools
import math


def bisect(f, lo, hi, iters=200):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dist(a, b):
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def pair_energy(alpha, bits, d, beta, eps):
    return alpha * bits * max(d, eps) ** beta


def kernel_energy(pos, objects, traffic, alpha, beta, eps=1e-9):
    """objects: list of positions; traffic: list of bits, same order."""
    return sum(pair_energy(alpha, n, dist(pos, p), beta, eps)
               for p, n in zip(objects, traffic) if n > 0)


def central_difference(f, x, h):
    x = list(x)
    grad = []
    for i in range(len(x)):
        xp, xm = list(x), list(x)
        xp[i] += h
        xm[i] -= h
        grad.append((f(xp) - f(xm)) / (2 * h))
    return grad


def line_search_1d(f, lo, hi, step):
    """Grid minimum of ``f`` on [lo, hi]; returns (x, f(x))."""
    n = int(round((hi - lo) / step))
    best = min(((lo + i * step) for i in range(n + 1)), key=f)
    return best, f(best)


def brute_force_assignment(costs):
    """Every injective kernel->slot map in lexicographic order.

    Returns the lexicographically first assignment of minimum total, where the
    total is accumulated in kernel order.
    """
    K, S = len(costs), len(costs[0])
    best, best_val = None, math.inf
    for perm in itertools.permutations(range(S), K):
        total = 0.0
        for k, s in enumerate(perm):
            total += costs[k][s]
        if total < best_val:
            best, best_val = perm, total
    return list(best), best_val


def slot_cost_matrix(objects, traffic_rows, slots, alpha, beta, eps=1e-9):
    return [[kernel_energy(s, objects, row, alpha, beta, eps) for s in slots] for row in traffic_rows]


def subset_dp_assignment(costs):
    """Exact minimum over injective maps by dynamic programming on used-slot sets.

    Totals are accumulated in kernel order like :func:`brute_force_assignment`;
    among equal totals the lexicographically smaller prefix is kept.  Covers
    instances too large to enumerate (8 kernels over 12 slots).
    """
    K, S = len(costs), len(costs[0])
    layer = {0: (0.0, ())}
    for k in range(K):
        nxt = {}
        for mask, (total, prefix) in layer.items():
            for s in range(S):
                if mask >> s & 1:
                    continue
                cand = (total + costs[k][s], prefix + (s,))
                key = mask | 1 << s
                if key not in nxt or cand < nxt[key]:
                    nxt[key] = cand
        layer = nxt
    total, best = min(layer.values())
    return list(best), total
