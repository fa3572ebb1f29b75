"""Enumerative improvement of the second level.

Pipeline: 2-opt inside each route, 2-opt* between routes of the same
satellite, then relocate / swap(1,1) / swap(2,1) restricted to each node's
granular neighbourhood, repeated until no improving move exists anywhere.
All moves are first-improvement: the scan restarts after each acceptance.
Only strictly improving moves are taken, so the loop terminates.
"""

from __future__ import annotations

import math

import numpy as np

from . import _fastls
from .instance import Instance
from .solution import EPS, Route, Solution


class GranularNeighbourhood:
    """Per-node lists of the tau Euclidean-closest satellites and customers.

    A pair of nodes is an eligible move pair when either node appears in the
    other's list.  ``cust_partners``/``sat_partners`` hold the resulting
    symmetric candidate sets, split by node type, sorted by node index.
    """

    def __init__(self, inst: Instance, tau: int):
        self.inst = inst
        self.tau = tau
        ids = list(inst.satellite_ids()) + list(inst.customer_ids())
        pts = inst.coords[ids]
        diff = pts[:, None, :] - pts[None, :, :]
        dmat = np.sqrt((diff ** 2).sum(axis=2))
        np.fill_diagonal(dmat, np.inf)
        n = len(ids)
        k = min(tau, n - 1)
        self.neighbours = {}
        order_key = np.argsort(dmat, axis=1, kind="stable")
        for row, node in enumerate(ids):
            self.neighbours[node] = [ids[j] for j in order_key[row, :k]]

        eligible = {node: set(lst) for node, lst in self.neighbours.items()}
        for node, lst in self.neighbours.items():
            for other in lst:
                eligible[other].add(node)
        self.cust_partners = {}
        self.sat_partners = {}
        ns = inst.n_satellites
        for node in inst.customer_ids():
            part = sorted(eligible[node] - {node})
            self.cust_partners[node] = tuple(p for p in part if p > ns)
            self.sat_partners[node] = tuple(p for p in part if p <= ns)
        self.pair_partners = {}
        for node in inst.customer_ids():
            self.pair_partners[node] = frozenset(self.cust_partners[node])

        # padded arrays for the compiled kernels
        nn = inst.n_nodes
        pmax = max((len(v) for v in self.cust_partners.values()), default=1) or 1
        smax = max((len(v) for v in self.sat_partners.values()), default=1) or 1
        self.cust_part_np = np.zeros((nn, pmax), dtype=np.int64)
        self.cust_plen_np = np.zeros(nn, dtype=np.int64)
        self.sat_part_np = np.zeros((nn, smax), dtype=np.int64)
        self.sat_plen_np = np.zeros(nn, dtype=np.int64)
        for node in inst.customer_ids():
            cp = self.cust_partners[node]
            self.cust_part_np[node, :len(cp)] = cp
            self.cust_plen_np[node] = len(cp)
            sp = self.sat_partners[node]
            self.sat_part_np[node, :len(sp)] = sp
            self.sat_plen_np[node] = len(sp)


# ---------------------------------------------------------------------------
# 2-opt

def two_opt(sol: Solution, route) -> bool:
    """Reverse route segments while an improving reversal exists."""
    d = sol.inst.d1 if route.level == 1 else sol.inst.d2
    v = route.visits
    home = route.home
    improved = False
    restart = True
    while restart:
        restart = False
        m = len(v)
        for i in range(m - 1):
            prev = home if i == 0 else v[i - 1]
            d_prev = d[prev]
            vi = v[i]
            for j in range(i + 1, m):
                nxt = home if j == m - 1 else v[j + 1]
                delta = d_prev[v[j]] + d[vi][nxt] - d_prev[vi] - d[v[j]][nxt]
                if delta < -EPS:
                    v[i:j + 1] = v[i:j + 1][::-1]
                    if route.level == 1:
                        sol.cost1 += delta
                    else:
                        sol.cost2 += delta
                    improved = True
                    restart = True
                    break
            if restart:
                break
    return improved


# ---------------------------------------------------------------------------
# 2-opt* (tail exchange between routes of one satellite)

def two_opt_star(sol: Solution, sat: int) -> bool:
    """Exchange route tails (or head/reversed-head) among routes at ``sat``."""
    inst = sol.inst
    d = inst.d2
    q2 = inst.fleet.level2_capacity
    improved = False
    restart = True
    while restart:
        restart = False
        routes = sol.routes_at[sat]
        for a in range(len(routes) - 1):
            for b in range(a + 1, len(routes)):
                if _two_opt_star_pair(sol, routes[a], routes[b], d, q2):
                    improved = True
                    restart = True
                    break
            if restart:
                break
    return improved


def _two_opt_star_pair(sol, r1, r2, d, q2) -> bool:
    home = r1.home
    v1, v2 = r1.visits, r2.visits
    m1, m2 = len(v1), len(v2)
    dem = sol.inst.demand
    pre1 = [0.0] * (m1 + 1)
    for i, c in enumerate(v1):
        pre1[i + 1] = pre1[i] + dem[c]
    pre2 = [0.0] * (m2 + 1)
    for j, c in enumerate(v2):
        pre2[j + 1] = pre2[j] + dem[c]

    f2 = sol.inst.fleet.level2_fixed_cost
    for i in range(m1 + 1):
        a = home if i == 0 else v1[i - 1]
        b = home if i == m1 else v1[i]
        for j in range(m2 + 1):
            c = home if j == 0 else v2[j - 1]
            e = home if j == m2 else v2[j]
            base = d[a][b] + d[c][e]
            # tails exchanged: head1+tail2 / head2+tail1
            edge = d[a][e] + d[c][b] - base
            bonus = f2 if (i == 0 and j == m2) or (j == 0 and i == m1) else 0.0
            if edge - bonus < -EPS:
                l1n = pre1[i] + r2.load - pre2[j]
                l2n = pre2[j] + r1.load - pre1[i]
                if l1n <= q2 + EPS and l2n <= q2 + EPS:
                    n1 = v1[:i] + v2[j:]
                    n2 = v2[:j] + v1[i:]
                    _apply_star(sol, r1, r2, n1, n2, l1n, l2n, edge)
                    return True
            # heads joined: head1+reversed(head2) / reversed(tail1)+tail2
            edge = d[a][c] + d[b][e] - base
            bonus = f2 if (i == 0 and j == 0) or (i == m1 and j == m2) else 0.0
            if edge - bonus < -EPS:
                l1n = pre1[i] + pre2[j]
                l2n = (r1.load - pre1[i]) + (r2.load - pre2[j])
                if l1n <= q2 + EPS and l2n <= q2 + EPS:
                    n1 = v1[:i] + v2[:j][::-1]
                    n2 = v1[i:][::-1] + v2[j:]
                    _apply_star(sol, r1, r2, n1, n2, l1n, l2n, edge)
                    return True
    return False


def _apply_star(sol, r1, r2, n1, n2, l1n, l2n, delta):
    r1.visits, r2.visits = n1, n2
    r1.load, r2.load = l1n, l2n
    for c in n1:
        sol.route_of[c] = r1
    for c in n2:
        sol.route_of[c] = r2
    sol.cost2 += delta
    if not n1:
        sol._drop_empty_route2(r1)
    if not n2:
        sol._drop_empty_route2(r2)


# ---------------------------------------------------------------------------
# granular relocate / swap

def _positions(sol):
    pos_of = {}
    for r in sol.routes2:
        for i, c in enumerate(r.visits):
            pos_of[c] = (r, i)
    return pos_of


def _relocate_scan(sol: Solution, nbhd: GranularNeighbourhood) -> bool:
    inst = sol.inst
    d = inst.d2
    dem = inst.demand
    q2 = inst.fleet.level2_capacity
    f2 = inst.fleet.level2_fixed_cost
    opening = inst.opening
    handling = inst.handling
    hh = inst.has_handling
    lrpsd = inst.variant == "2elrpsd"
    caps = inst.sat_capacity
    thr = sol.throughput
    routes_at = sol.routes_at
    cust_partners = nbhd.cust_partners
    sat_partners = nbhd.sat_partners
    pos_of = _positions(sol)
    neg = -EPS
    for c in inst.customer_ids():
        r1, pos = pos_of[c]
        v = r1.visits
        home1 = r1.home
        prev = home1 if pos == 0 else v[pos - 1]
        nxt = home1 if pos == len(v) - 1 else v[pos + 1]
        drow = d[c]
        gain = d[prev][nxt] - d[prev][c] - drow[nxt]
        if len(v) == 1:
            gain -= f2
            if len(routes_at[home1]) == 1:
                gain -= opening[home1]
        if gain > -2 * EPS and not hh:
            continue    # removing c saves nothing: no insertion can win
        dc = dem[c]
        h1 = handling[home1]
        for a in cust_partners[c]:
            r2, apos = pos_of[a]
            if r2 is r1:
                hd = 0.0
            else:
                if r2.load + dc > q2 + EPS:
                    continue
                home2 = r2.home
                if lrpsd and home2 != home1 and \
                        thr[home2] + dc > caps[home2] + EPS:
                    continue
                hd = dc * (handling[home2] - h1) if hh else 0.0
            va = r2.visits
            p_a = r2.home if apos == 0 else va[apos - 1]
            n_a = r2.home if apos == len(va) - 1 else va[apos + 1]
            if p_a != c:    # insert before the anchor
                if gain + d[p_a][c] + drow[a] - d[p_a][a] + hd < neg:
                    _apply_relocate(sol, c, r2, a, before=True)
                    return True
            if n_a != c:    # insert after the anchor
                if gain + drow[a] + drow[n_a] - d[a][n_a] + hd < neg:
                    _apply_relocate(sol, c, r2, a, before=False)
                    return True
        for s in sat_partners[c]:
            here = routes_at[s]
            if not here:
                continue
            samesat = s == home1
            if not samesat and lrpsd and thr[s] + dc > caps[s] + EPS:
                continue
            hd = 0.0 if samesat or not hh else dc * (handling[s] - h1)
            ds = d[s]
            for r2 in here:
                if r2 is not r1 and r2.load + dc > q2 + EPS:
                    continue
                v2 = r2.visits
                first = v2[0]
                last = v2[-1]
                if first != c and gain + ds[c] + drow[first] - ds[first] + hd < neg:
                    _apply_relocate_at(sol, c, r2, 0)
                    return True
                if last != c and gain + d[last][c] + drow[s] - d[last][s] + hd < neg:
                    _apply_relocate_at(sol, c, r2, len(v2))
                    return True
    return False


def _apply_relocate(sol, c, r2, anchor, before):
    sol.remove2(c)
    apos = r2.visits.index(anchor)
    sol.insert2(r2, apos if before else apos + 1, c)


def _apply_relocate_at(sol, c, r2, pos):
    r1 = sol.route_of[c]
    if r1 is r2 and r1.visits.index(c) < pos:
        pos -= 1
    sol.remove2(c)
    sol.insert2(r2, pos, c)


def _swap11_scan(sol: Solution, nbhd: GranularNeighbourhood) -> bool:
    inst = sol.inst
    d = inst.d2
    dem = inst.demand
    q2 = inst.fleet.level2_capacity
    handling = inst.handling
    hh = inst.has_handling
    lrpsd = inst.variant == "2elrpsd"
    caps = inst.sat_capacity
    thr = sol.throughput
    cust_partners = nbhd.cust_partners
    pos_of = _positions(sol)
    neg = -EPS
    for c1 in inst.customer_ids():
        r1, p1pos = pos_of[c1]
        v1 = r1.visits
        home1 = r1.home
        prev1 = home1 if p1pos == 0 else v1[p1pos - 1]
        next1 = home1 if p1pos == len(v1) - 1 else v1[p1pos + 1]
        d1v = dem[c1]
        dr1 = d[c1]
        h1 = handling[home1]
        for c2 in cust_partners[c1]:
            if c2 <= c1:
                continue
            r2, p2pos = pos_of[c2]
            d2v = dem[c2]
            if r2 is not r1:
                if (r1.load - d1v + d2v > q2 + EPS
                        or r2.load - d2v + d1v > q2 + EPS):
                    continue
                if lrpsd and home1 != r2.home:
                    if thr[home1] - d1v + d2v > caps[home1] + EPS:
                        continue
                    if thr[r2.home] - d2v + d1v > caps[r2.home] + EPS:
                        continue
            v2 = r2.visits
            home2 = r2.home
            prev2 = home2 if p2pos == 0 else v2[p2pos - 1]
            next2 = home2 if p2pos == len(v2) - 1 else v2[p2pos + 1]
            dr2 = d[c2]
            if next1 == c2:         # adjacent in the same route
                delta = (d[prev1][c2] + dr1[next2]
                         - d[prev1][c1] - dr2[next2])
            elif next2 == c1:
                delta = (d[prev2][c1] + dr2[next1]
                         - d[prev2][c2] - dr1[next1])
            else:
                delta = (d[prev1][c2] + dr2[next1] - d[prev1][c1] - dr1[next1]
                         + d[prev2][c1] + dr1[next2] - d[prev2][c2] - dr2[next2])
            if hh:
                delta += (d2v - d1v) * (h1 - handling[home2])
            if delta < neg:
                v1[p1pos] = c2
                v2[p2pos] = c1
                sol.route_of[c1], sol.route_of[c2] = r2, r1
                if r2 is not r1:
                    r1.load += d2v - d1v
                    r2.load += d1v - d2v
                    thr[home1] += d2v - d1v
                    thr[home2] += d1v - d2v
                sol.cost2 += delta
                return True
    return False


def _swap21_scan(sol: Solution, nbhd: GranularNeighbourhood) -> bool:
    inst = sol.inst
    d = inst.d2
    dem = inst.demand
    q2 = inst.fleet.level2_capacity
    handling = inst.handling
    hh = inst.has_handling
    lrpsd = inst.variant == "2elrpsd"
    caps = inst.sat_capacity
    thr = sol.throughput
    cust_partners = nbhd.cust_partners
    pair_partners = nbhd.pair_partners
    pos_of = _positions(sol)
    neg = -EPS
    for u in inst.customer_ids():
        r1, upos = pos_of[u]
        v1 = r1.visits
        if upos == len(v1) - 1:
            continue
        w = v1[upos + 1]
        home1 = r1.home
        prev1 = home1 if upos == 0 else v1[upos - 1]
        next1 = home1 if upos == len(v1) - 2 else v1[upos + 2]
        duw = dem[u] + dem[w]
        h1 = handling[home1]
        du = d[u]
        dw = d[w]
        seen_u = pair_partners[u]
        for c2 in cust_partners[u] + tuple(
                c for c in cust_partners[w] if c not in seen_u):
            if c2 == u or c2 == w:
                continue
            r2, p2pos = pos_of[c2]
            if r2 is r1:
                continue
            d2v = dem[c2]
            if (r1.load - duw + d2v > q2 + EPS
                    or r2.load - d2v + duw > q2 + EPS):
                continue
            home2 = r2.home
            if lrpsd and home1 != home2:
                if thr[home1] - duw + d2v > caps[home1] + EPS:
                    continue
                if thr[home2] - d2v + duw > caps[home2] + EPS:
                    continue
            v2 = r2.visits
            prev2 = home2 if p2pos == 0 else v2[p2pos - 1]
            next2 = home2 if p2pos == len(v2) - 1 else v2[p2pos + 1]
            dc2 = d[c2]
            out1 = (d[prev1][c2] + dc2[next1]
                    - d[prev1][u] - du[w] - dw[next1])
            base2 = d[prev2][c2] + dc2[next2]
            in_uw = d[prev2][u] + du[w] + dw[next2] - base2
            in_wu = d[prev2][w] + dw[u] + du[next2] - base2
            delta = out1 + (in_uw if in_uw <= in_wu else in_wu)
            if hh:
                delta += (duw - d2v) * (handling[home2] - h1)
            if delta < neg:
                pair = [u, w] if in_uw <= in_wu else [w, u]
                del v1[upos:upos + 2]
                v1.insert(upos, c2)
                v2[p2pos:p2pos + 1] = pair
                sol.route_of[u] = sol.route_of[w] = r2
                sol.route_of[c2] = r1
                r1.load += d2v - duw
                r2.load += duw - d2v
                thr[home1] += d2v - duw
                thr[home2] += duw - d2v
                sol.cost2 += delta
                return True
    return False


# ---------------------------------------------------------------------------
# driver

_ALL_ON = {"two_opt": True, "two_opt_star": True, "relocate": True,
           "swap": True, "swap2": True}

USE_FAST = _fastls.HAVE_NUMBA     # flip off to force the pure-Python scans


def local_search(sol: Solution, nbhd: GranularNeighbourhood,
                 toggles: dict | None = None) -> Solution:
    """Run the full pipeline to a local optimum (in place)."""
    t = _ALL_ON if toggles is None else toggles
    if USE_FAST and sol.routes2:
        return _local_search_fast(sol, nbhd, t)
    return _local_search_python(sol, nbhd, t)


def _local_search_python(sol, nbhd, t) -> Solution:
    while True:
        improved = False
        if t.get("two_opt", True):
            for r in list(sol.routes2):
                improved |= two_opt(sol, r)
        if t.get("two_opt_star", True):
            for s in sol.inst.satellite_ids():
                if len(sol.routes_at[s]) > 1:
                    improved |= two_opt_star(sol, s)
        while True:
            if t.get("relocate", True) and _relocate_scan(sol, nbhd):
                improved = True
                continue
            if t.get("swap", True) and _swap11_scan(sol, nbhd):
                improved = True
                continue
            if t.get("swap2", True) and _swap21_scan(sol, nbhd):
                improved = True
                continue
            break
        if not improved:
            return sol


def _local_search_fast(sol, nbhd, t) -> Solution:
    """Array-encode the routes, run the compiled kernels, decode, resync."""
    inst = sol.inst
    nr = len(sol.routes2)
    width = inst.n_customers + 2
    routes = np.zeros((nr, width), dtype=np.int64)
    rlen = np.zeros(nr, dtype=np.int64)
    rhome = np.zeros(nr, dtype=np.int64)
    rload = np.zeros(nr, dtype=np.float64)
    for i, r in enumerate(sol.routes2):
        rlen[i] = len(r.visits)
        routes[i, :rlen[i]] = r.visits
        rhome[i] = r.home
        rload[i] = r.load
    thr = np.asarray(sol.throughput, dtype=np.float64)
    handling = np.asarray(inst.handling, dtype=np.float64)
    opening = np.asarray(inst.opening, dtype=np.float64)
    caps = np.asarray([c if c != math.inf else 1e18 for c in inst.sat_capacity],
                      dtype=np.float64)
    _fastls.run_local_search(
        routes, rlen, rhome, rload, inst.d2_np, np.asarray(inst.demand),
        thr, nbhd.cust_part_np, nbhd.cust_plen_np, nbhd.sat_part_np,
        nbhd.sat_plen_np, handling, opening, caps,
        float(inst.fleet.level2_capacity), float(inst.fleet.level2_fixed_cost),
        inst.variant == "2elrpsd", inst.has_handling,
        t.get("two_opt", True), t.get("two_opt_star", True),
        t.get("relocate", True), t.get("swap", True), t.get("swap2", True),
        inst.n_satellites, 1 + inst.n_satellites, inst.n_nodes)
    new_routes = []
    for i in range(nr):
        if rlen[i] > 0:
            new_routes.append(Route(2, int(rhome[i]),
                                    [int(c) for c in routes[i, :rlen[i]]]))
    sol.routes2 = new_routes
    sol.resync()
    return sol
