"""Main solver loop: destroy -> repair -> local search -> first-level rebuild.

Each iteration ruins part of the incumbent's second level, repairs and
locally improves it, then reconstructs the first level from scratch (the
first-level subproblem is small).  Strictly better full-cost solutions
replace the incumbent; after ``i_max`` non-improving iterations the search
restarts from a fresh initial solution, keeping the best solution found.
A grace counter ``g`` keeps the satellite open/closed mask stable for at
least ``g_max`` iterations between changes.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .destroy_repair import Params, UnrepairableError, destroy, repair
from .instance import Instance, InfeasibleError, VARIANT_2EVRP, errors_only, validate_instance
from .local_search import GranularNeighbourhood, local_search, two_opt
from .solution import EPS, Route, Solution


@dataclass
class RunStats:
    seed: int
    cost: float
    wall_time: float
    time_to_best: float
    iterations: int
    restarts: int
    hit_target: bool = False


# ---------------------------------------------------------------------------
# first level

def rebuild_first_level(sol: Solution, rng, toggles: dict | None = None) -> bool:
    """Reconstruct the truck routes for the current satellite throughputs.

    Satellites needing more than a truckload are split into full-truckload
    back-and-forth trips plus one residual delivery; residuals are placed by
    cheapest insertion and improved with 2-opt and relocate/swap.  Returns
    False when the available trucks cannot cover the throughput.
    """
    inst = sol.inst
    fl = inst.fleet
    q1 = fl.level1_capacity
    is_vrp = inst.variant == VARIANT_2EVRP
    routes: list[Route] = []
    items: list[tuple[int, float]] = []
    for s in inst.satellite_ids():
        if not sol.routes_at[s]:
            continue
        dem = sol.throughput[s]
        if is_vrp:
            if dem <= EPS:
                continue        # nothing to haul; no visit required
            fulls = int(dem // q1)
            resid = dem - fulls * q1
            if resid <= EPS * max(1.0, q1):
                resid = 0.0
            for _ in range(fulls):
                routes.append(Route(1, 0, [s], q1, {s: q1}))
            if resid > 0.0:
                items.append((s, resid))
        else:
            if dem > q1 + EPS:
                return False    # split deliveries are not allowed here
            items.append((s, dem))      # zero-demand satellites still get a visit

    order = list(items)
    rng.shuffle(order)
    built = _l1_insert_all(inst, [r.copy() for r in routes], order)
    if built is None:
        order = sorted(items, key=lambda it: (-it[1], it[0]))
        built = _l1_insert_all(inst, routes, order)
        if built is None:
            return False
    sol.routes1 = built
    sol.cost1 = sum(_route1_cost(inst, r) for r in built) \
        + fl.level1_fixed_cost * len(built)
    _l1_improve(sol, toggles)
    return True


def _route1_cost(inst, route):
    d = inst.d1
    prev = 0
    total = 0.0
    for s in route.visits:
        total += d[prev][s]
        prev = s
    return total + d[prev][0]


def _l1_insert_all(inst, routes, order):
    d = inst.d1
    q1 = inst.fleet.level1_capacity
    f1 = inst.fleet.level1_fixed_cost
    for s, qty in order:
        best = None
        best_route = None
        best_pos = 0
        for r in routes:
            if r.load + qty > q1 + EPS or s in r.visits:
                continue
            v = r.visits
            prev = 0
            for pos in range(len(v) + 1):
                nxt = 0 if pos == len(v) else v[pos]
                delta = d[prev][s] + d[s][nxt] - d[prev][nxt]
                if best is None or delta < best:
                    best, best_route, best_pos = delta, r, pos
                prev = nxt
        if len(routes) < inst.fleet.level1_count:
            delta = 2.0 * d[0][s] + f1
            if best is None or delta < best:
                best, best_route = delta, None
        if best is None:
            return None
        if best_route is None:
            routes.append(Route(1, 0, [s], qty, {s: qty}))
        else:
            best_route.visits.insert(best_pos, s)
            best_route.load += qty
            best_route.deliveries[s] = qty
    return routes


def _l1_improve(sol: Solution, toggles: dict | None):
    t = toggles or {}
    if t.get("two_opt", True):
        for r in sol.routes1:
            two_opt(sol, r)
    restart = True
    while restart:
        restart = False
        if t.get("relocate", True) and _l1_relocate(sol):
            restart = True
            continue
        if t.get("swap", True) and _l1_swap(sol):
            restart = True
    if t.get("two_opt", True):
        for r in sol.routes1:
            two_opt(sol, r)


def _l1_relocate(sol: Solution) -> bool:
    inst = sol.inst
    d = inst.d1
    q1 = inst.fleet.level1_capacity
    f1 = inst.fleet.level1_fixed_cost
    routes = sol.routes1
    for ra in routes:
        va = ra.visits
        if len(va) == 0:
            continue
        for i, s in enumerate(va):
            qty = ra.deliveries[s]
            prev = 0 if i == 0 else va[i - 1]
            nxt = 0 if i == len(va) - 1 else va[i + 1]
            gain = d[prev][nxt] - d[prev][s] - d[s][nxt]
            if len(va) == 1:
                gain -= f1
            for rb in routes:
                if rb is ra or s in rb.visits or rb.load + qty > q1 + EPS:
                    continue
                vb = rb.visits
                p = 0
                for pos in range(len(vb) + 1):
                    n = 0 if pos == len(vb) else vb[pos]
                    delta = gain + d[p][s] + d[s][n] - d[p][n]
                    if delta < -EPS:
                        del va[i]
                        del ra.deliveries[s]
                        ra.load -= qty
                        vb.insert(pos, s)
                        rb.deliveries[s] = qty
                        rb.load += qty
                        sol.cost1 += delta
                        if not va:
                            routes.remove(ra)
                        return True
                    p = n
    return False


def _l1_swap(sol: Solution) -> bool:
    inst = sol.inst
    d = inst.d1
    q1 = inst.fleet.level1_capacity
    routes = sol.routes1
    for ia in range(len(routes) - 1):
        ra = routes[ia]
        va = ra.visits
        for ib in range(ia + 1, len(routes)):
            rb = routes[ib]
            vb = rb.visits
            for i, s1 in enumerate(va):
                q_1 = ra.deliveries[s1]
                if s1 in vb:
                    continue
                pa = 0 if i == 0 else va[i - 1]
                na = 0 if i == len(va) - 1 else va[i + 1]
                for j, s2 in enumerate(vb):
                    if s2 in va:
                        continue
                    q_2 = rb.deliveries[s2]
                    if (ra.load - q_1 + q_2 > q1 + EPS
                            or rb.load - q_2 + q_1 > q1 + EPS):
                        continue
                    pb = 0 if j == 0 else vb[j - 1]
                    nb = 0 if j == len(vb) - 1 else vb[j + 1]
                    delta = (d[pa][s2] + d[s2][na] - d[pa][s1] - d[s1][na]
                             + d[pb][s1] + d[s1][nb] - d[pb][s2] - d[s2][nb])
                    if delta < -EPS:
                        va[i], vb[j] = s2, s1
                        del ra.deliveries[s1]
                        del rb.deliveries[s2]
                        ra.deliveries[s2] = q_2
                        rb.deliveries[s1] = q_1
                        ra.load += q_2 - q_1
                        rb.load += q_1 - q_2
                        sol.cost1 += delta
                        return True
    return False


# ---------------------------------------------------------------------------
# main loop

def _initial_solution(inst, params, rng, nbhd):
    for _ in range(10):
        sol = Solution(inst)
        pool = list(inst.customer_ids())
        try:
            sol = repair(sol, pool, rng)
        except UnrepairableError:
            continue
        local_search(sol, nbhd, params.toggles)
        if rebuild_first_level(sol, rng, params.toggles):
            sol.resync()
            return sol
    raise InfeasibleError("could not construct a feasible initial solution")


def solve(inst: Instance, params: Params | None = None,
          trace: list | None = None) -> tuple[Solution, RunStats]:
    """Run the full search on ``inst``; deterministic given params.seed.

    Returns the best solution found and run statistics.  ``trace`` (a list,
    when given) collects ("mask_change" | "restart", iteration) events.
    """
    params = (params or Params()).validate()
    bad = errors_only(validate_instance(inst))
    if bad:
        raise InfeasibleError("; ".join(d.message for d in bad))

    rng = random.Random(params.seed)
    nbhd = GranularNeighbourhood(inst, params.tau)
    t0 = time.perf_counter()
    deadline = t0 + params.time_max

    S = _initial_solution(inst, params, rng, nbhd)
    best = S.copy()
    best_raw = best.raw_cost()
    t_best = time.perf_counter() - t0

    rescale = inst.objective_rescale
    target_raw = None
    if params.target is not None:
        target_raw = (params.target + params.target_tol) * rescale

    iters = 0
    restarts = 0
    g = 0
    stop = target_raw is not None and best_raw <= target_raw
    while not stop:
        nonimp = 0
        while nonimp < params.i_max:
            if time.perf_counter() >= deadline or \
                    (params.max_iters is not None and iters >= params.max_iters):
                stop = True
                break
            temp = S.copy()
            pool = []
            changed = destroy(temp, pool, params, g, rng)
            if changed:
                g = 0
                if trace is not None:
                    trace.append(("mask_change", iters))
            ok = True
            try:
                temp = repair(temp, pool, rng)
            except UnrepairableError:
                ok = False
            if ok:
                local_search(temp, nbhd, params.toggles)
                ok = rebuild_first_level(temp, rng, params.toggles)
            improved = False
            if ok:
                temp.resync()
                if temp.raw_cost() < S.raw_cost() - EPS:
                    S = temp
                    improved = True
                    if S.raw_cost() < best_raw - EPS:
                        best = S.copy()
                        best_raw = best.raw_cost()
                        t_best = time.perf_counter() - t0
                        if target_raw is not None and best_raw <= target_raw:
                            stop = True
            nonimp = 0 if improved else nonimp + 1
            g += 1
            iters += 1
            if stop:
                break
        if stop:
            break
        if params.toggles.get("restart", True):
            restarts += 1
            if trace is not None:
                trace.append(("restart", iters))
            S = _initial_solution(inst, params, rng, nbhd)
            g = 0
            if S.raw_cost() < best_raw - EPS:
                best = S.copy()
                best_raw = best.raw_cost()
                t_best = time.perf_counter() - t0
                if target_raw is not None and best_raw <= target_raw:
                    break

    wall = time.perf_counter() - t0
    stats = RunStats(seed=params.seed, cost=best.total_cost(), wall_time=wall,
                     time_to_best=t_best, iterations=iters, restarts=restarts,
                     hit_target=(target_raw is not None and best_raw <= target_raw))
    return best, stats
