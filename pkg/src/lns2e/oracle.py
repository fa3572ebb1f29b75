"""Exact solver for tiny instances by exhaustive enumeration.

Enumerates every set partition of the customers into routes, every
assignment of routes to satellites, and the optimal visiting order of each
route; the first level is enumerated over the same structure the heuristic
uses (full-truckload back-and-forth trips plus one residual delivery per
satellite, single visits for the location-routing variant).  Used as the
ground truth for property tests; far too slow beyond ~7 customers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .instance import Instance, InfeasibleError, VARIANT_2EVRP
from .solution import EPS, Route, Solution


class TooLargeError(ValueError):
    """Instance exceeds the enumeration limits."""


@dataclass(frozen=True)
class TinyLimit:
    max_customers: int = 7
    max_satellites: int = 3


def _set_partitions(items):
    """All partitions of ``items`` into nonempty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [first]] + part[i + 1:]
        yield part + [[first]]


def _best_order(d, home, block):
    """Cheapest closed tour home -> block -> home (direction canonicalized)."""
    if len(block) == 1:
        return 2.0 * d[home][block[0]], list(block)
    best_cost, best_perm = None, None
    for perm in permutations(block):
        if perm[0] > perm[-1]:
            continue    # reversed tour costs the same
        cost = d[home][perm[0]]
        for a, b in zip(perm, perm[1:]):
            cost += d[a][b]
        cost += d[perm[-1]][home]
        if best_cost is None or cost < best_cost:
            best_cost, best_perm = cost, list(perm)
    return best_cost, best_perm


def exact_solve(inst: Instance, limit: TinyLimit = TinyLimit()):
    """Globally optimal (cost, Solution) for a tiny instance.

    Raises TooLargeError beyond the enumeration limit and InfeasibleError
    when no feasible solution exists.
    """
    if inst.n_customers > limit.max_customers:
        raise TooLargeError(f"{inst.n_customers} customers > "
                            f"limit {limit.max_customers}")
    if inst.n_satellites > limit.max_satellites:
        raise TooLargeError(f"{inst.n_satellites} satellites > "
                            f"limit {limit.max_satellites}")

    fl = inst.fleet
    d2 = inst.d2
    sats = inst.satellites
    customers = list(inst.customer_ids())
    sat_ids = list(inst.satellite_ids())
    tsp2 = {}
    l1_cache = {}
    best_cost = None
    best_pick = None

    for part in _set_partitions(customers):
        if len(part) > fl.level2_count:
            continue
        loads = [sum(inst.demand[c] for c in blk) for blk in part]
        if any(load > fl.level2_capacity + EPS for load in loads):
            continue
        for assign in product(sat_ids, repeat=len(part)):
            thr = {s: 0.0 for s in sat_ids}
            counts = {s: 0 for s in sat_ids}
            for s, load in zip(assign, loads):
                thr[s] += load
                counts[s] += 1
            if any(counts[s] > inst.cf_limit(s) for s in sat_ids):
                continue
            if inst.variant != VARIANT_2EVRP and any(
                    thr[s] > sats[s - 1].capacity + EPS for s in sat_ids):
                continue
            cost = 0.0
            for s, blk in zip(assign, part):
                key = (s, frozenset(blk))
                if key not in tsp2:
                    tsp2[key] = _best_order(d2, s, sorted(blk))
                cost += tsp2[key][0] + fl.level2_fixed_cost
            used = sorted(set(assign))
            for s in used:
                cost += sats[s - 1].opening_cost + sats[s - 1].handling_cost * thr[s]
            if best_cost is not None and cost >= best_cost:
                continue    # first level can only add cost
            l1_key = tuple(sorted((s, thr[s]) for s in used))
            if l1_key not in l1_cache:
                l1_cache[l1_key] = _best_first_level(inst, l1_key)
            l1 = l1_cache[l1_key]
            if l1 is None:
                continue
            cost += l1[0]
            if best_cost is None or cost < best_cost - EPS:
                best_cost = cost
                best_pick = (tuple(zip(assign, (tuple(b) for b in part))), l1_key)

    if best_cost is None:
        raise InfeasibleError(f"no feasible solution for {inst.name!r}")

    sol = _build_solution(inst, best_pick, tsp2, l1_cache)
    return best_cost / inst.objective_rescale, sol


def _best_first_level(inst, items):
    """Cheapest truck routes covering ``items`` ((satellite, qty) pairs)."""
    fl = inst.fleet
    d1 = inst.d1
    q1 = fl.level1_capacity
    fulls = []
    residuals = []
    for s, qty in items:
        if inst.variant == VARIANT_2EVRP:
            if qty <= EPS:
                continue
            n_full = int(qty // q1)
            resid = qty - n_full * q1
            fulls += [(s, q1)] * n_full
            if resid > EPS * max(1.0, q1):
                residuals.append((s, resid))
        else:
            if qty > q1 + EPS:
                return None
            residuals.append((s, qty))

    base = sum(2.0 * d1[0][s] + fl.level1_fixed_cost for s, _ in fulls)
    full_routes = [([s], {s: q}) for s, q in fulls]
    best = None
    for part in _set_partitions(residuals):
        if len(part) + len(fulls) > fl.level1_count:
            continue
        if any(sum(q for _, q in blk) > q1 + EPS for blk in part):
            continue
        cost = base
        ordered = []
        for blk in part:
            c, order = _best_order(d1, 0, [s for s, _ in blk])
            cost += c + fl.level1_fixed_cost
            ordered.append((order, dict(blk)))
        if best is None or cost < best[0] - EPS:
            best = (cost, full_routes + ordered)
    return best


def _build_solution(inst, pick, tsp2, l1_cache):
    (assignment, l1_key) = pick
    sol = Solution(inst)
    sol.open_sats = [False] * (1 + inst.n_satellites)
    for s, blk in assignment:
        sol.open_sats[s] = True
        order = tsp2[(s, frozenset(blk))][1]
        r = Route(2, s, list(order))
        sol.routes2.append(r)
    for visits, deliveries in l1_cache[l1_key][1]:
        sol.routes1.append(Route(1, 0, list(visits), sum(deliveries.values()),
                                 dict(deliveries)))
    sol.resync()
    return sol
