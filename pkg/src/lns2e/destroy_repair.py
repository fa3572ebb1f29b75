"""Ruin operators and the randomized cheapest-insertion repair.

All destroy operators work on the second level only and move customers into
a removal pool; ``repair`` re-inserts the pooled customers.  The two
satellite operators (close one / reopen all) are gated behind the grace
period and are the only operators that touch the open/closed mask.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .instance import Instance, VARIANT_2EVRP
from .solution import EPS, Solution


class UnrepairableError(RuntimeError):
    """No feasible insertion position even after the demand-sorted pass."""


OPERATOR_NAMES = ("related", "biased", "route", "single", "close", "open",
                  "restart", "two_opt", "two_opt_star", "relocate", "swap",
                  "swap2")


def all_toggles() -> dict:
    return {name: True for name in OPERATOR_NAMES}


@dataclass
class Params:
    """Solver parameters; the defaults are the calibrated compromise values."""

    p1: float = 0.20            # max share removed by related-node removal
    p2: float = 0.35            # max share removed by biased removal
    p3: float = 0.25            # route-removal intensity
    p4_hat: float = 0.50        # probability of removing single-node routes
    p5_hat: float = 0.20        # probability of closing a satellite
    tau: int = 25               # granular neighbourhood size
    g_max: int = 30             # grace period (iterations) between mask changes
    i_max: int = 2000           # non-improving iterations before a restart
    time_max: float = 60.0      # wall-clock budget in seconds
    seed: int = 0
    max_iters: int | None = None    # optional hard iteration cap (testing)
    target: float | None = None     # stop early when best <= target + target_tol
    target_tol: float = 1e-6
    toggles: dict = field(default_factory=all_toggles)

    def validate(self):
        for name in ("p1", "p2", "p3", "p4_hat", "p5_hat"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0,1]")
        if self.tau < 1 or self.g_max < 1 or self.i_max < 1:
            raise ValueError("tau, g_max and i_max must be >= 1")
        return self


# ---------------------------------------------------------------------------
# destroy operators (5.1 order)

def related_node_removal(sol: Solution, pool: list, params: Params, rng):
    """Remove a random seed customer plus a random number of its closest ones."""
    inst = sol.inst
    routed = [c for c in inst.customer_ids() if c in sol.route_of]
    if not routed:
        return
    seed = rng.choice(routed)
    cap = max(1, math.ceil(params.p1 * inst.n_customers))
    count = min(rng.randint(1, cap), len(routed))
    dseed = inst.d2[seed]
    rest = sorted((c for c in routed if c != seed), key=lambda c: (dseed[c], c))
    for c in [seed] + rest[:count - 1]:
        sol.remove2(c)
        pool.append(c)


def biased_node_removal(sol: Solution, pool: list, params: Params, rng):
    """Remove a random share of customers, biased towards high removal gains."""
    inst = sol.inst
    share = rng.uniform(0.0, params.p2)
    count = int(share * inst.n_customers)
    if count == 0:
        return
    d = inst.d2
    gains = {}
    for c in inst.customer_ids():
        r = sol.route_of.get(c)
        if r is not None:
            gains[c] = _edge_gain(d, r, c)
    for _ in range(min(count, len(gains))):
        total = sum(gains.values())
        custs = list(gains)
        if total <= EPS:
            pick = custs[rng.randrange(len(custs))]
        else:
            x = rng.random() * total
            acc = 0.0
            pick = custs[-1]
            for c in custs:
                acc += gains[c]
                if x <= acc:
                    pick = c
                    break
        r = sol.route_of[pick]
        v = r.visits
        pos = v.index(pick)
        neighbours = [v[i] for i in (pos - 1, pos + 1) if 0 <= i < len(v)]
        sol.remove2(pick)
        pool.append(pick)
        del gains[pick]
        for c in neighbours:    # only the two splice neighbours change gain
            if c in gains:
                gains[c] = _edge_gain(d, sol.route_of[c], c)


def _edge_gain(d, route, c):
    v = route.visits
    pos = v.index(c)
    prev = route.home if pos == 0 else v[pos - 1]
    nxt = route.home if pos == len(v) - 1 else v[pos + 1]
    return max(0.0, d[prev][c] + d[c][nxt] - d[prev][nxt])


def random_route_removal(sol: Solution, pool: list, params: Params, rng):
    """Remove a few whole routes chosen uniformly."""
    inst = sol.inst
    hi = math.ceil(params.p3 * inst.total_demand / inst.fleet.level2_capacity)
    k = min(rng.randint(0, hi), len(sol.routes2))
    if k == 0:
        return
    for r in rng.sample(sol.routes2, k):
        pool.extend(sol.remove_route2(r))


def remove_single_node_routes(sol: Solution, pool: list, params: Params, rng):
    """With probability p4, dissolve every route that serves one customer."""
    if rng.random() >= params.p4_hat:
        return
    for r in [r for r in sol.routes2 if len(r.visits) == 1]:
        pool.extend(sol.remove_route2(r))


def close_satellite(sol: Solution, pool: list, params: Params, g: int, rng) -> bool:
    """Temporarily close one random satellite if enough capacity remains.

    Returns True when the mask changed (the caller resets the grace counter).
    """
    if g <= params.g_max or rng.random() >= params.p5_hat:
        return False
    inst = sol.inst
    open_ids = [s for s in inst.satellite_ids() if sol.open_sats[s]]
    s = open_ids[rng.randrange(len(open_ids))]
    remaining = [x for x in open_ids if x != s]
    if not remaining:
        return False
    if inst.variant == VARIANT_2EVRP:
        cap = sum(inst.cf_limit(x) for x in remaining) * inst.fleet.level2_capacity
    else:
        cap = sum(inst.satellites[x - 1].capacity for x in remaining)
    if cap < inst.total_demand:
        return False
    for r in list(sol.routes_at[s]):
        pool.extend(sol.remove_route2(r))
    sol.open_sats[s] = False
    return True


def open_all_satellites(sol: Solution, params: Params, g: int, rng) -> bool:
    """Make every satellite available again (probability p5/|S|, gated on g)."""
    inst = sol.inst
    if g <= params.g_max or rng.random() >= params.p5_hat / inst.n_satellites:
        return False
    changed = not all(sol.open_sats[1:])
    for s in inst.satellite_ids():
        sol.open_sats[s] = True
    return changed


def destroy(sol: Solution, pool: list, params: Params, g: int, rng) -> bool:
    """Run the enabled destroy operators in their fixed order.

    Returns True when the satellite mask changed.
    """
    t = params.toggles
    if t.get("related", True):
        related_node_removal(sol, pool, params, rng)
    if t.get("biased", True):
        biased_node_removal(sol, pool, params, rng)
    if t.get("route", True):
        random_route_removal(sol, pool, params, rng)
    if t.get("single", True):
        remove_single_node_routes(sol, pool, params, rng)
    changed = False
    if t.get("close", True):
        changed |= close_satellite(sol, pool, params, g, rng)
    if t.get("open", True):
        changed |= open_all_satellites(sol, params, g, rng)
    return changed


# ---------------------------------------------------------------------------
# repair

def repair(sol: Solution, pool: list, rng) -> Solution:
    """Reinsert every pooled customer at its cheapest feasible position.

    Customers are tried in uniform random order; if some customer ends up
    with no feasible position the whole repair is restarted with the pool
    sorted by decreasing demand.  Raises UnrepairableError when even that
    fails.  Returns the repaired solution and empties the pool.
    """
    if not pool:
        return sol
    backup = sol.copy()
    order = list(pool)
    rng.shuffle(order)
    if _insert_all(sol, order):
        pool.clear()
        return sol
    order = sorted(pool, key=lambda c: (-sol.inst.demand[c], c))
    if _insert_all(backup, order):
        pool.clear()
        return backup
    raise UnrepairableError(f"{len(pool)} customers could not be reinserted")


def _insert_all(sol: Solution, order) -> bool:
    for c in order:
        if not _insert_cheapest(sol, c):
            return False
    return True


def _insert_cheapest(sol: Solution, c: int) -> bool:
    """Globally cheapest feasible insertion of customer ``c``.

    Scan order (fixes ties deterministically): existing routes by index and
    position, then a fresh route at each open satellite by satellite index.
    """
    inst = sol.inst
    d = inst.d2
    dc = inst.demand[c]
    q2 = inst.fleet.level2_capacity
    lrpsd = inst.variant != VARIANT_2EVRP
    sats = inst.satellites
    best = None
    best_route = None
    best_pos = 0
    for r in sol.routes2:
        if r.load + dc > q2 + EPS:
            continue
        s = r.home
        if lrpsd and sol.throughput[s] + dc > sats[s - 1].capacity + EPS:
            continue
        h = sats[s - 1].handling_cost * dc
        v = r.visits
        dcl = d[c]
        prev = s
        for pos in range(len(v) + 1):
            nxt = s if pos == len(v) else v[pos]
            delta = d[prev][c] + dcl[nxt] - d[prev][nxt] + h
            if best is None or delta < best:
                best = delta
                best_route = r
                best_pos = pos
            prev = nxt
    new_sat = None
    if len(sol.routes2) < inst.fleet.level2_count:
        f2 = inst.fleet.level2_fixed_cost
        for s in inst.satellite_ids():
            if not sol.open_sats[s]:
                continue
            if len(sol.routes_at[s]) >= inst.cf_limit(s):
                continue
            if lrpsd and sol.throughput[s] + dc > sats[s - 1].capacity + EPS:
                continue
            delta = 2.0 * d[s][c] + f2 + sats[s - 1].handling_cost * dc
            if not sol.routes_at[s]:
                delta += sats[s - 1].opening_cost
            if best is None or delta < best:
                best = delta
                new_sat = s
    if best is None:
        return False
    if new_sat is not None:
        sol.new_route2(new_sat, c)
    else:
        sol.insert2(best_route, best_pos, c)
    return True
