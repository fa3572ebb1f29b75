"""Solution representation, objective evaluation and feasibility checking.

A solution holds second-level routes (satellite -> customers -> satellite),
first-level routes (depot -> satellites -> depot, with explicit per-satellite
delivery quantities since a satellite's demand may be split over trucks), and
an open/closed availability mask over the satellites.

Cost model, shared by both problem variants (unused terms are zero):

    raw = sum(level-1 route distance + f1)
        + sum(level-2 route distance + f2)
        + sum over used satellites of opening cost
        + sum over satellites of handling cost * freight through the satellite
    reported objective = raw / objective_rescale

A satellite is *used* when it hosts at least one second-level route; only
used satellites pay their opening cost.  The open/closed mask is the search
state that says where routes may be placed, and always covers the used set.

The incremental cost fields are maintained by every mutating operation and
are re-checked against a from-scratch evaluation in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .instance import Instance, UNBOUNDED, VARIANT_2ELRPSD, VARIANT_2EVRP

EPS = 1e-9


class Route:
    """One vehicle itinerary: home -> visits... -> home.

    Level-1 routes visit satellites and carry ``deliveries`` (satellite ->
    quantity); level-2 routes visit customers and carry their summed demand
    in ``load``.
    """

    __slots__ = ("level", "home", "visits", "load", "deliveries")

    def __init__(self, level, home, visits, load=0.0, deliveries=None):
        self.level = level
        self.home = home
        self.visits = visits
        self.load = load
        self.deliveries = deliveries    # dict sat -> qty, level 1 only

    def copy(self):
        return Route(self.level, self.home, list(self.visits), self.load,
                     dict(self.deliveries) if self.deliveries else None)

    def __repr__(self):
        return f"Route(L{self.level} @{self.home}: {self.visits})"


def route_distance(inst: Instance, route: Route) -> float:
    d = inst.d1 if route.level == 1 else inst.d2
    prev = route.home
    total = 0.0
    for v in route.visits:
        total += d[prev][v]
        prev = v
    return total + d[prev][route.home]


class Solution:
    __slots__ = ("inst", "routes1", "routes2", "open_sats", "route_of",
                 "routes_at", "throughput", "cost1", "cost2")

    def __init__(self, inst: Instance):
        self.inst = inst
        self.routes1: list[Route] = []
        self.routes2: list[Route] = []
        self.open_sats = [True] * (1 + inst.n_satellites)   # index by sat id
        self.route_of: dict[int, Route] = {}                # customer -> route
        self.routes_at: list[list[Route]] = [[] for _ in range(1 + inst.n_satellites)]
        self.throughput = [0.0] * (1 + inst.n_satellites)
        self.cost1 = 0.0
        self.cost2 = 0.0

    # -- basics -------------------------------------------------------------
    def copy(self) -> "Solution":
        s = Solution.__new__(Solution)
        s.inst = self.inst
        s.routes1 = [r.copy() for r in self.routes1]
        s.routes2 = []
        s.open_sats = list(self.open_sats)
        s.route_of = {}
        s.routes_at = [[] for _ in range(1 + self.inst.n_satellites)]
        s.throughput = list(self.throughput)
        s.cost1 = self.cost1
        s.cost2 = self.cost2
        for r in self.routes2:
            nr = r.copy()
            s.routes2.append(nr)
            s.routes_at[nr.home].append(nr)
            for c in nr.visits:
                s.route_of[c] = nr
        return s

    def raw_cost(self) -> float:
        return self.cost1 + self.cost2

    def total_cost(self) -> float:
        return (self.cost1 + self.cost2) / self.inst.objective_rescale

    def used(self, sat: int) -> bool:
        return bool(self.routes_at[sat])

    def used_satellites(self) -> list[int]:
        return [s for s in self.inst.satellite_ids() if self.routes_at[s]]

    # -- level-2 incremental mutations ---------------------------------------
    def new_route2(self, sat: int, cust: int) -> Route:
        inst = self.inst
        delta = 2.0 * inst.d2[sat][cust] + inst.fleet.level2_fixed_cost
        if not self.routes_at[sat]:
            delta += inst.satellites[sat - 1].opening_cost
        h = inst.satellites[sat - 1].handling_cost
        d = inst.demand[cust]
        r = Route(2, sat, [cust], d)
        self.routes2.append(r)
        self.routes_at[sat].append(r)
        self.route_of[cust] = r
        self.throughput[sat] += d
        self.cost2 += delta + h * d
        return r

    def insert2(self, route: Route, pos: int, cust: int):
        inst = self.inst
        d2 = inst.d2
        v = route.visits
        prev = route.home if pos == 0 else v[pos - 1]
        nxt = route.home if pos == len(v) else v[pos]
        d = inst.demand[cust]
        self.cost2 += (d2[prev][cust] + d2[cust][nxt] - d2[prev][nxt]
                       + inst.satellites[route.home - 1].handling_cost * d)
        v.insert(pos, cust)
        route.load += d
        self.route_of[cust] = route
        self.throughput[route.home] += d

    def remove2(self, cust: int) -> Route:
        """Remove a customer from its route; drops the route if it empties."""
        inst = self.inst
        route = self.route_of.pop(cust)
        v = route.visits
        pos = v.index(cust)
        d2 = inst.d2
        prev = route.home if pos == 0 else v[pos - 1]
        nxt = route.home if pos == len(v) - 1 else v[pos + 1]
        d = inst.demand[cust]
        self.cost2 += (d2[prev][nxt] - d2[prev][cust] - d2[cust][nxt]
                       - inst.satellites[route.home - 1].handling_cost * d)
        del v[pos]
        route.load -= d
        self.throughput[route.home] -= d
        if not v:
            self._drop_empty_route2(route)
        return route

    def _drop_empty_route2(self, route: Route):
        inst = self.inst
        self.routes2.remove(route)
        self.routes_at[route.home].remove(route)
        self.cost2 -= inst.fleet.level2_fixed_cost
        if not self.routes_at[route.home]:
            self.cost2 -= inst.satellites[route.home - 1].opening_cost

    def remove_route2(self, route: Route) -> list[int]:
        """Remove a whole route; returns its customers."""
        custs = list(route.visits)
        for c in custs:
            self.remove2(c)
        return custs

    # -- from-scratch recomputation ------------------------------------------
    def resync(self):
        """Recompute incremental fields and indexes from the route structures."""
        inst = self.inst
        thr = [0.0] * (1 + inst.n_satellites)
        self.route_of = {}
        self.routes_at = [[] for _ in range(1 + inst.n_satellites)]
        c2 = 0.0
        for r in self.routes2:
            r.load = sum(inst.demand[c] for c in r.visits)
            thr[r.home] += r.load
            self.routes_at[r.home].append(r)
            for c in r.visits:
                self.route_of[c] = r
            c2 += route_distance(inst, r) + inst.fleet.level2_fixed_cost
        for s in inst.satellite_ids():
            if self.routes_at[s]:
                c2 += inst.satellites[s - 1].opening_cost
            c2 += inst.satellites[s - 1].handling_cost * thr[s]
        c1 = 0.0
        for r in self.routes1:
            r.load = sum(r.deliveries.values()) if r.deliveries else 0.0
            c1 += route_distance(inst, r) + inst.fleet.level1_fixed_cost
        self.throughput = thr
        self.cost1 = c1
        self.cost2 = c2


def evaluate(sol: Solution) -> float:
    """From-scratch objective (reported units); updates the solution cache."""
    sol.resync()
    return sol.total_cost()


def satellite_throughput(sol: Solution) -> dict[int, float]:
    """Freight through each satellite, recomputed from the level-2 routes."""
    out = {s: 0.0 for s in sol.inst.satellite_ids()}
    for r in sol.routes2:
        out[r.home] += sum(sol.inst.demand[c] for c in r.visits)
    return out


# ---------------------------------------------------------------------------
# splice deltas (reported-objective units)

def delta_remove(sol: Solution, cust: int) -> float:
    """Exact objective change of removing ``cust`` from its current route."""
    inst = sol.inst
    route = sol.route_of[cust]
    v = route.visits
    pos = v.index(cust)
    d2 = inst.d2
    prev = route.home if pos == 0 else v[pos - 1]
    nxt = route.home if pos == len(v) - 1 else v[pos + 1]
    delta = (d2[prev][nxt] - d2[prev][cust] - d2[cust][nxt]
             - inst.satellites[route.home - 1].handling_cost * inst.demand[cust])
    if len(v) == 1:
        delta -= inst.fleet.level2_fixed_cost
        if len(sol.routes_at[route.home]) == 1:
            delta -= inst.satellites[route.home - 1].opening_cost
    return delta / inst.objective_rescale


def delta_insert(sol: Solution, cust: int, route: Route, pos: int) -> float:
    """Exact objective change of splicing ``cust`` into ``route`` at ``pos``."""
    if not 0 <= pos <= len(route.visits):
        raise IndexError(f"illegal insertion position {pos}")
    inst = sol.inst
    d2 = inst.d2
    v = route.visits
    prev = route.home if pos == 0 else v[pos - 1]
    nxt = route.home if pos == len(v) else v[pos]
    delta = (d2[prev][cust] + d2[cust][nxt] - d2[prev][nxt]
             + inst.satellites[route.home - 1].handling_cost * inst.demand[cust])
    return delta / inst.objective_rescale


# ---------------------------------------------------------------------------
# feasibility

class ViolationKind(Enum):
    CUSTOMER_COVERAGE = "CustomerCoverage"
    VEHICLE_COUNT_L1 = "VehicleCountL1"
    VEHICLE_COUNT_L2 = "VehicleCountL2"
    PER_SATELLITE_CF = "PerSatelliteCF"
    CAPACITY_L1 = "CapacityL1"
    CAPACITY_L2 = "CapacityL2"
    FLOW_BALANCE = "FlowBalance"
    SATELLITE_CAPACITY = "SatelliteCapacity"
    CLOSED_SATELLITE_USED = "ClosedSatelliteUsed"
    SPLIT_DELIVERY_L2 = "SplitDeliveryL2"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str
    nodes: tuple = field(default_factory=tuple)

    def __str__(self):
        return f"{self.kind.value}: {self.detail}"


def check_feasibility(sol: Solution) -> list[Violation]:
    """All constraint violations of ``sol``; empty list means feasible."""
    inst = sol.inst
    fl = inst.fleet
    out = []

    seen = {}
    for r in sol.routes2:
        for c in r.visits:
            seen[c] = seen.get(c, 0) + 1
    for c in inst.customer_ids():
        k = seen.get(c, 0)
        if k == 0:
            out.append(Violation(ViolationKind.CUSTOMER_COVERAGE,
                                 f"customer {c} not visited", (c,)))
        elif k > 1:
            out.append(Violation(ViolationKind.SPLIT_DELIVERY_L2,
                                 f"customer {c} visited {k} times", (c,)))

    if len(sol.routes2) > fl.level2_count:
        out.append(Violation(ViolationKind.VEHICLE_COUNT_L2,
                             f"{len(sol.routes2)} city-freighter routes > v2 = "
                             f"{fl.level2_count:g}"))
    if len(sol.routes1) > fl.level1_count:
        out.append(Violation(ViolationKind.VEHICLE_COUNT_L1,
                             f"{len(sol.routes1)} truck routes > v1 = "
                             f"{fl.level1_count:g}"))

    thr = {s: 0.0 for s in inst.satellite_ids()}
    for s in inst.satellite_ids():
        here = [r for r in sol.routes2 if r.home == s]
        if here and not sol.open_sats[s]:
            out.append(Violation(ViolationKind.CLOSED_SATELLITE_USED,
                                 f"closed satellite {s} hosts routes", (s,)))
        if len(here) > inst.cf_limit(s):
            out.append(Violation(ViolationKind.PER_SATELLITE_CF,
                                 f"satellite {s} hosts {len(here)} routes > "
                                 f"limit {inst.cf_limit(s):g}", (s,)))
        thr[s] = sum(inst.demand[c] for r in here for c in r.visits)
        if inst.variant == VARIANT_2ELRPSD and thr[s] > inst.satellites[s - 1].capacity + EPS:
            out.append(Violation(ViolationKind.SATELLITE_CAPACITY,
                                 f"satellite {s} throughput {thr[s]:g} > capacity "
                                 f"{inst.satellites[s - 1].capacity:g}", (s,)))

    for r in sol.routes2:
        load = sum(inst.demand[c] for c in r.visits)
        if load > fl.level2_capacity + EPS:
            out.append(Violation(ViolationKind.CAPACITY_L2,
                                 f"route at satellite {r.home} loaded {load:g} > Q2 = "
                                 f"{fl.level2_capacity:g}", tuple(r.visits)))

    delivered = {s: 0.0 for s in inst.satellite_ids()}
    visits_l1 = {s: 0 for s in inst.satellite_ids()}
    for r in sol.routes1:
        qty = 0.0
        for s in r.visits:
            q = (r.deliveries or {}).get(s, 0.0)
            delivered[s] += q
            visits_l1[s] += 1
            qty += q
            if not sol.open_sats[s]:
                out.append(Violation(ViolationKind.CLOSED_SATELLITE_USED,
                                     f"truck route visits closed satellite {s}", (s,)))
        if qty > fl.level1_capacity + EPS:
            out.append(Violation(ViolationKind.CAPACITY_L1,
                                 f"truck route loaded {qty:g} > Q1 = "
                                 f"{fl.level1_capacity:g}", tuple(r.visits)))

    for s in inst.satellite_ids():
        if abs(delivered[s] - thr[s]) > EPS * max(1.0, thr[s]):
            out.append(Violation(ViolationKind.FLOW_BALANCE,
                                 f"satellite {s}: delivered {delivered[s]:g} != "
                                 f"outgoing {thr[s]:g}", (s,)))
        elif (inst.variant == VARIANT_2ELRPSD and sol.routes_at[s]
              and visits_l1[s] != 1):
            out.append(Violation(ViolationKind.FLOW_BALANCE,
                                 f"satellite {s} visited by {visits_l1[s]} trucks "
                                 "(exactly one required)", (s,)))
    return out


# ---------------------------------------------------------------------------
# solution files

def write_solution(sol: Solution, name: str | None = None) -> str:
    """Text form: header, one line per route, and the set of open satellites."""
    lines = [f"SOLUTION {name or sol.inst.name} {sol.total_cost():.6f}"]
    for r in sol.routes1:
        d = " ".join(f"{s}:{r.deliveries.get(s, 0):g}" for s in r.visits)
        lines.append(f"L1 {r.home} : {' '.join(map(str, r.visits))} | {d}")
    for r in sol.routes2:
        lines.append(f"L2 {r.home} : {' '.join(map(str, r.visits))}")
    open_used = [s for s in sol.inst.satellite_ids() if sol.routes_at[s]]
    lines.append("OPEN " + " ".join(map(str, open_used)))
    return "\n".join(lines) + "\n"


def parse_solution(text: str, inst: Instance) -> tuple[Solution, str, float]:
    """Read a solution file; returns (solution, instance name, stated cost)."""
    sol = Solution(inst)
    name, stated = inst.name, float("nan")
    open_line = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "SOLUTION":
            name = parts[1]
            stated = float(parts[2])
        elif parts[0] in ("L1", "L2"):
            level = 1 if parts[0] == "L1" else 2
            home = int(parts[1])
            if parts[2] != ":":
                raise ValueError(f"solution line {ln}: expected ':'")
            rest = parts[3:]
            deliveries = None
            if "|" in rest:
                bar = rest.index("|")
                deliveries = {}
                for item in rest[bar + 1:]:
                    s, q = item.split(":")
                    deliveries[int(s)] = float(q)
                rest = rest[:bar]
            visits = [int(v) for v in rest]
            load = (sum(deliveries.values()) if deliveries
                    else sum(inst.demand[c] for c in visits))
            r = Route(level, home, visits, load, deliveries)
            if level == 1:
                sol.routes1.append(r)
            else:
                sol.routes2.append(r)
                sol.routes_at[home].append(r)
                for c in visits:
                    sol.route_of[c] = r
        elif parts[0] == "OPEN":
            open_line = [int(s) for s in parts[1:]]
        else:
            raise ValueError(f"solution line {ln}: unknown record {parts[0]!r}")
    if open_line is not None:
        sol.open_sats = [False] * (1 + inst.n_satellites)
        for s in open_line:
            sol.open_sats[s] = True
    sol.resync()
    return sol, name, stated
