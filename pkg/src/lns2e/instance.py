"""Problem data for two-echelon routing.

Node indexing convention used everywhere in this package:
    0                  -> the depot
    1 .. S             -> satellites
    S+1 .. S+C         -> customers

Level-1 edges connect nodes in {depot} | satellites, level-2 edges connect
satellites with customers and customers with each other (never two
satellites).  Distances are either full-precision Euclidean ("euclid") or
``ceil(euclid * scale [* level1_factor])`` ("ceil"), the integer convention
used by the location-routing benchmark files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNBOUNDED = math.inf

VARIANT_2EVRP = "2evrp"
VARIANT_2ELRPSD = "2elrpsd"


class IllegalPairError(ValueError):
    """Raised when a node pair is not part of the requested level's edge set."""


class InfeasibleError(RuntimeError):
    """The instance admits no feasible solution (or none could be built)."""


@dataclass(frozen=True)
class Satellite:
    x: float
    y: float
    handling_cost: float = 0.0      # per freight unit moved through the satellite
    opening_cost: float = 0.0       # one-off cost when the satellite is used (LRPSD)
    capacity: float = UNBOUNDED     # max freight through the satellite (LRPSD)
    max_city_freighters: float = UNBOUNDED  # per-satellite vehicle limit


@dataclass(frozen=True)
class Customer:
    x: float
    y: float
    demand: float


@dataclass(frozen=True)
class Fleet:
    level1_count: float             # number of trucks, UNBOUNDED for LRPSD
    level1_capacity: float
    level1_fixed_cost: float = 0.0
    level1_dist_multiplier: float = 1.0
    level2_count: float = UNBOUNDED
    level2_capacity: float = 0.0
    level2_fixed_cost: float = 0.0


@dataclass(frozen=True)
class DistanceConvention:
    kind: str = "euclid"            # "euclid" or "ceil"
    scale: int = 1                  # 100 for Prodhon-style files, 10 for Nguyen-style
    level1_factor: int = 1          # 2 for LRPSD (applied inside the ceil)

    def __post_init__(self):
        if self.kind not in ("euclid", "ceil"):
            raise ValueError(f"unknown distance kind {self.kind!r}")
        if self.kind == "euclid" and (self.scale != 1 or self.level1_factor != 1):
            raise ValueError("euclid convention requires scale=1, level1_factor=1")
        if self.scale < 1 or self.level1_factor < 1:
            raise ValueError("scale and level1_factor must be positive")


@dataclass
class Instance:
    """Immutable two-echelon problem instance (do not mutate after creation)."""

    name: str
    variant: str                    # VARIANT_2EVRP or VARIANT_2ELRPSD
    depot: tuple[float, float]
    satellites: list[Satellite]
    customers: list[Customer]
    fleet: Fleet
    distance_convention: DistanceConvention = field(default_factory=DistanceConvention)
    per_satellite_cf_limit_active: bool = True
    objective_rescale: float = 1.0  # reported objective = raw cost / rescale
    notes: list[str] = field(default_factory=list, compare=False, repr=False)

    # derived, filled in __post_init__
    n_satellites: int = field(init=False, compare=False, repr=False)
    n_customers: int = field(init=False, compare=False, repr=False)
    n_nodes: int = field(init=False, compare=False, repr=False)
    demand: list[float] = field(init=False, compare=False, repr=False)
    total_demand: float = field(init=False, compare=False, repr=False)
    coords: np.ndarray = field(init=False, compare=False, repr=False)
    _d1: list = field(init=False, compare=False, repr=False, default=None)
    _d2: list = field(init=False, compare=False, repr=False, default=None)

    def __post_init__(self):
        self.n_satellites = len(self.satellites)
        self.n_customers = len(self.customers)
        self.n_nodes = 1 + self.n_satellites + self.n_customers
        pts = [self.depot]
        pts += [(s.x, s.y) for s in self.satellites]
        pts += [(c.x, c.y) for c in self.customers]
        self.coords = np.asarray(pts, dtype=float)
        self.demand = [0.0] * (1 + self.n_satellites) + [c.demand for c in self.customers]
        self.total_demand = float(sum(c.demand for c in self.customers))
        # flat per-satellite arrays indexed by node id (index 0 unused)
        self.handling = [0.0] + [s.handling_cost for s in self.satellites]
        self.opening = [0.0] + [s.opening_cost for s in self.satellites]
        self.sat_capacity = [UNBOUNDED] + [s.capacity for s in self.satellites]
        self.has_handling = any(s.handling_cost != 0.0 for s in self.satellites)

    # -- node id helpers ---------------------------------------------------
    def satellite_ids(self):
        return range(1, 1 + self.n_satellites)

    def customer_ids(self):
        return range(1 + self.n_satellites, self.n_nodes)

    def is_satellite(self, node: int) -> bool:
        return 1 <= node <= self.n_satellites

    def is_customer(self, node: int) -> bool:
        return self.n_satellites < node < self.n_nodes

    def satellite(self, node: int) -> Satellite:
        return self.satellites[node - 1]

    # per-satellite city-freighter cap, already folded with the global count
    def cf_limit(self, sat_id: int) -> float:
        v2 = self.fleet.level2_count
        if not self.per_satellite_cf_limit_active:
            return v2
        return min(self.satellites[sat_id - 1].max_city_freighters, v2)

    # -- distances ---------------------------------------------------------
    def _build_matrices(self):
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        euc = np.sqrt((diff ** 2).sum(axis=2))
        conv = self.distance_convention
        if conv.kind == "euclid":
            d2 = euc
            mult = self.fleet.level1_dist_multiplier
            d1 = euc if mult == 1.0 else euc * mult
        else:
            # ceil applied AFTER multiplication by scale (and level-1 factor)
            d2 = np.ceil(euc * conv.scale)
            d1 = np.ceil(euc * conv.scale * conv.level1_factor)
        # plain nested lists: scalar lookups are much faster than ndarray indexing
        self._d2_np = d2
        self._d1_np = d1
        self._d2 = d2.tolist()
        self._d1 = d1.tolist()

    @property
    def d1(self) -> list:
        if self._d1 is None:
            self._build_matrices()
        return self._d1

    @property
    def d2(self) -> list:
        if self._d2 is None:
            self._build_matrices()
        return self._d2

    @property
    def d1_np(self) -> np.ndarray:
        if self._d1 is None:
            self._build_matrices()
        return self._d1_np

    @property
    def d2_np(self) -> np.ndarray:
        if self._d2 is None:
            self._build_matrices()
        return self._d2_np

    def legal_pair(self, a: int, b: int, level: int) -> bool:
        if a == b or not (0 <= a < self.n_nodes and 0 <= b < self.n_nodes):
            return False
        if level == 1:
            return a <= self.n_satellites and b <= self.n_satellites
        if level == 2:
            if a == 0 or b == 0:
                return False
            return not (self.is_satellite(a) and self.is_satellite(b))
        return False


def distance(inst: Instance, a: int, b: int, level: int) -> float:
    """Travel cost between nodes ``a`` and ``b`` on the given level.

    Raises IllegalPairError if (a, b) is not an edge of that level.
    """
    if not inst.legal_pair(a, b, level):
        raise IllegalPairError(f"nodes ({a},{b}) are not a legal level-{level} pair")
    return inst.d1[a][b] if level == 1 else inst.d2[a][b]


@dataclass(frozen=True)
class Diagnostic:
    severity: str   # "error" or "warning"
    message: str


def validate_instance(inst: Instance) -> list[Diagnostic]:
    """Structural checks; returns one diagnostic per violated invariant."""
    out = []
    err = lambda m: out.append(Diagnostic("error", m))
    warn = lambda m: out.append(Diagnostic("warning", m))

    if inst.n_satellites < 1:
        err("instance has no satellites")
    if inst.n_customers < 1:
        err("instance has no customers")
    if inst.variant not in (VARIANT_2EVRP, VARIANT_2ELRPSD):
        err(f"unknown variant {inst.variant!r}")
    for i, s in enumerate(inst.satellites, start=1):
        if s.handling_cost < 0:
            err(f"satellite {i}: negative handling cost")
        if s.opening_cost < 0:
            err(f"satellite {i}: negative opening cost")
        if s.capacity <= 0:
            err(f"satellite {i}: nonpositive capacity")
    for i, c in enumerate(inst.customers):
        if c.demand < 0:
            err(f"customer node {1 + inst.n_satellites + i}: negative demand")
        elif c.demand > inst.fleet.level2_capacity:
            err(f"customer node {1 + inst.n_satellites + i}: demand {c.demand:g} "
                f"exceeds Q2 = {inst.fleet.level2_capacity:g}")
    fl = inst.fleet
    if fl.level1_capacity <= 0 or fl.level2_capacity <= 0:
        err("vehicle capacities must be positive")
    if fl.level1_capacity < fl.level2_capacity:
        warn("Q1 < Q2: trucks smaller than city freighters (suspect capacity swap)")

    total = inst.total_demand
    if inst.variant == VARIANT_2EVRP:
        if fl.level1_count * fl.level1_capacity < total:
            err(f"total demand {total:g} exceeds v1*Q1 = "
                f"{fl.level1_count * fl.level1_capacity:g}: globally infeasible")
        if fl.level2_count * fl.level2_capacity < total:
            err(f"total demand {total:g} exceeds v2*Q2 = "
                f"{fl.level2_count * fl.level2_capacity:g}: globally infeasible")
    else:
        if sum(s.capacity for s in inst.satellites) < total:
            err("sum of satellite capacities below total demand: globally infeasible")
    return out


def errors_only(diags: list[Diagnostic]) -> list[Diagnostic]:
    return [d for d in diags if d.severity == "error"]
