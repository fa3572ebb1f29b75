"""Instance file parsers and writers.

The *canonical* format is this package's own line-oriented text format:

    # comments allowed anywhere ('#' to end of line)
    2EVRP <name>            (or 2ELRPSD <name>)
    FLEET <v1> <Q1> <f1> <mult1> <v2> <Q2> <f2>     ('inf' for unbounded counts)
    DIST euclid|ceil <scale> <l1factor>
    RESCALE <factor>        (optional, default 1; reported cost = raw / factor)
    PERSAT on|off           (optional; per-satellite city-freighter limit active)
    DEPOT <x> <y>
    SATELLITES <n>
    <x> <y> <h> <f> <k> <vmax>                       (n lines; 'inf' allowed)
    CUSTOMERS <m>
    <x> <y> <d>                                      (m lines)

The benchmark *dialects* below mirror the field layouts of the historical
instance families, including their documented quirks.  The exact byte layout
of the historical files is not standardised, so these readers define one
concrete layout per family and apply the documented corrections:

orlib-set2-3 / set5 (2E-VRP, plain Euclidean):
    lines starting with '!' are comments
    v1 Q1 v2 Q2
    depot_x depot_y
    n_satellites            followed by n lines:  x y
    n_customers             followed by m lines:  x y demand
  Files whose Q1 < Q2 (trucks smaller than city freighters) are corrected by
  swapping the two capacities; a warning note is recorded on the instance.

set6: same as orlib-set2-3 but satellite lines read  x y h  (handling cost).

orlib-set4 (2E-VRP, real and possibly negative coordinates):
    v1 Q1 v2 Q2 v2_per_satellite
    ... then as orlib-set2-3 ...
  Coordinates are shifted to be nonnegative and multiplied by 100 (rounded to
  integers); the resulting x100 objective inflation is recorded as an
  objective rescale factor of 100 on the instance.

prodhon / nguyen (2E-LRPSD, ceil-scaled integer distances, factor 2 on the
first level; scale 100 for prodhon, 10 for nguyen):
    n_customers
    n_satellites
    depot_x depot_y
    x y                     (n_satellites lines)
    x y                     (n_customers lines)
    Q1                      (truck capacity; missing in one known file -> 5000)
    Q2
    k_s                     (n_satellites values: satellite capacities)
    d_c                     (n_customers values: demands)
    f_s                     (n_satellites values: opening costs)
    F2                      (fixed cost per city freighter -- note the order:
    F1                       second level first, then first level)
"""

from __future__ import annotations

import math

from .instance import (
    UNBOUNDED,
    Customer,
    DistanceConvention,
    Fleet,
    Instance,
    Satellite,
    VARIANT_2ELRPSD,
    VARIANT_2EVRP,
)

DIALECTS = ("canonical", "orlib-set2-3", "orlib-set4", "set5", "set6",
            "prodhon", "nguyen")


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class _Tokens:
    """Whitespace tokens with line tracking, comments stripped."""

    def __init__(self, text, comment_chars="#!"):
        self.items = []     # (token, line_no)
        for ln, raw in enumerate(text.splitlines(), start=1):
            for ch in comment_chars:
                cut = raw.find(ch)
                if cut >= 0:
                    raw = raw[:cut]
            for tok in raw.split():
                self.items.append((tok, ln))
        self.pos = 0

    def __len__(self):
        return len(self.items) - self.pos

    @property
    def line(self):
        if self.pos < len(self.items):
            return self.items[self.pos][1]
        return self.items[-1][1] if self.items else 0

    def next(self, what="value"):
        if self.pos >= len(self.items):
            raise ParseError(f"unexpected end of file, expected {what}",
                             self.items[-1][1] if self.items else 0)
        tok, _ = self.items[self.pos]
        self.pos += 1
        return tok

    def number(self, what="number"):
        tok = self.next(what)
        if tok.lower() in ("inf", "infinity"):
            return UNBOUNDED
        try:
            return float(tok)
        except ValueError:
            raise ParseError(f"expected {what}, got {tok!r}", self.line) from None

    def integer(self, what="integer"):
        val = self.number(what)
        if val == UNBOUNDED:
            return val
        if val != int(val):
            raise ParseError(f"expected integer {what}, got {val!r}", self.line)
        return int(val)


def parse_instance(content: str, dialect: str, name: str = "",
                   per_satellite_cf_limit: bool | None = None) -> Instance:
    """Parse ``content`` in the given dialect into an Instance.

    ``name`` overrides the instance name for dialects whose files do not
    carry one.  ``per_satellite_cf_limit`` forces the Set 4a/4b reading of
    the per-satellite vehicle limit (None keeps the dialect default).
    """
    if dialect == "canonical":
        inst = _parse_canonical(content)
    elif dialect in ("orlib-set2-3", "set5"):
        inst = _parse_vrp_plain(content, name, with_handling=False)
    elif dialect == "set6":
        inst = _parse_vrp_plain(content, name, with_handling=True)
    elif dialect == "orlib-set4":
        inst = _parse_set4(content, name)
    elif dialect == "prodhon":
        inst = _parse_lrp(content, name, scale=100)
    elif dialect == "nguyen":
        inst = _parse_lrp(content, name, scale=10)
    else:
        raise ParseError(f"unknown dialect {dialect!r}")
    if per_satellite_cf_limit is not None:
        inst.per_satellite_cf_limit_active = per_satellite_cf_limit
    return inst


# ---------------------------------------------------------------------------
# canonical

def _parse_canonical(content: str) -> Instance:
    toks = _Tokens(content, comment_chars="#")
    head = toks.next("2EVRP/2ELRPSD header")
    if head.upper() == "2EVRP":
        variant = VARIANT_2EVRP
    elif head.upper() == "2ELRPSD":
        variant = VARIANT_2ELRPSD
    else:
        raise ParseError(f"expected header 2EVRP or 2ELRPSD, got {head!r}", toks.line)
    name = toks.next("instance name")

    fleet = None
    conv = DistanceConvention()
    rescale = 1.0
    persat = None
    depot = None
    satellites, customers = None, None

    while len(toks):
        key = toks.next("section keyword").upper()
        if key == "FLEET":
            fleet = Fleet(
                level1_count=toks.number("v1"),
                level1_capacity=toks.number("Q1"),
                level1_fixed_cost=toks.number("f1"),
                level1_dist_multiplier=toks.number("mult1"),
                level2_count=toks.number("v2"),
                level2_capacity=toks.number("Q2"),
                level2_fixed_cost=toks.number("f2"),
            )
        elif key == "DIST":
            kind = toks.next("euclid|ceil").lower()
            conv = DistanceConvention(kind=kind, scale=toks.integer("scale"),
                                      level1_factor=toks.integer("l1factor"))
        elif key == "RESCALE":
            rescale = toks.number("rescale factor")
        elif key == "PERSAT":
            persat = toks.next("on|off").lower() == "on"
        elif key == "DEPOT":
            depot = (toks.number("depot x"), toks.number("depot y"))
        elif key == "SATELLITES":
            n = toks.integer("satellite count")
            satellites = [Satellite(x=toks.number("x"), y=toks.number("y"),
                                    handling_cost=toks.number("h"),
                                    opening_cost=toks.number("f"),
                                    capacity=toks.number("k"),
                                    max_city_freighters=toks.number("vmax"))
                          for _ in range(n)]
        elif key == "CUSTOMERS":
            m = toks.integer("customer count")
            customers = [Customer(x=toks.number("x"), y=toks.number("y"),
                                  demand=toks.number("d"))
                         for _ in range(m)]
        else:
            raise ParseError(f"unknown keyword {key!r}", toks.line)

    for label, val in (("FLEET", fleet), ("DEPOT", depot),
                       ("SATELLITES", satellites), ("CUSTOMERS", customers)):
        if val is None:
            raise ParseError(f"missing {label} section")
    if persat is None:
        persat = any(s.max_city_freighters != UNBOUNDED for s in satellites)
    return Instance(name=name, variant=variant, depot=depot,
                    satellites=satellites, customers=customers, fleet=fleet,
                    distance_convention=conv,
                    per_satellite_cf_limit_active=persat,
                    objective_rescale=rescale)


def _fmt(v: float) -> str:
    if v == UNBOUNDED:
        return "inf"
    if v == int(v):
        return str(int(v))
    return repr(v)


def write_canonical(inst: Instance) -> str:
    """Render an instance in the canonical format (round-trips exactly)."""
    fl = inst.fleet
    conv = inst.distance_convention
    out = [
        f"{'2EVRP' if inst.variant == VARIANT_2EVRP else '2ELRPSD'} {inst.name}",
        f"FLEET {_fmt(fl.level1_count)} {_fmt(fl.level1_capacity)} "
        f"{_fmt(fl.level1_fixed_cost)} {_fmt(fl.level1_dist_multiplier)} "
        f"{_fmt(fl.level2_count)} {_fmt(fl.level2_capacity)} {_fmt(fl.level2_fixed_cost)}",
        f"DIST {conv.kind} {conv.scale} {conv.level1_factor}",
        f"RESCALE {_fmt(inst.objective_rescale)}",
        f"PERSAT {'on' if inst.per_satellite_cf_limit_active else 'off'}",
        f"DEPOT {_fmt(inst.depot[0])} {_fmt(inst.depot[1])}",
        f"SATELLITES {inst.n_satellites}",
    ]
    for s in inst.satellites:
        out.append(f"{_fmt(s.x)} {_fmt(s.y)} {_fmt(s.handling_cost)} "
                   f"{_fmt(s.opening_cost)} {_fmt(s.capacity)} "
                   f"{_fmt(s.max_city_freighters)}")
    out.append(f"CUSTOMERS {inst.n_customers}")
    for c in inst.customers:
        out.append(f"{_fmt(c.x)} {_fmt(c.y)} {_fmt(c.demand)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# 2E-VRP dialects

def _parse_vrp_plain(content, name, with_handling):
    toks = _Tokens(content, comment_chars="!#")
    v1 = toks.integer("v1")
    q1 = toks.number("Q1")
    v2 = toks.integer("v2")
    q2 = toks.number("Q2")
    depot = (toks.number("depot x"), toks.number("depot y"))
    notes = []
    if q1 < q2:
        # capacity swap in the historical 50-customer files: trucks are by
        # design the larger vehicles
        q1, q2 = q2, q1
        notes.append(f"capacity swap corrected: file had Q1={q2:g} < Q2={q1:g}")
    ns = toks.integer("satellite count")
    satellites = []
    for _ in range(ns):
        x, y = toks.number("x"), toks.number("y")
        h = toks.number("h") if with_handling else 0.0
        satellites.append(Satellite(x=x, y=y, handling_cost=h))
    nc = toks.integer("customer count")
    customers = [Customer(x=toks.number("x"), y=toks.number("y"),
                          demand=toks.number("demand")) for _ in range(nc)]
    fleet = Fleet(level1_count=v1, level1_capacity=q1,
                  level2_count=v2, level2_capacity=q2)
    return Instance(name=name, variant=VARIANT_2EVRP, depot=depot,
                    satellites=satellites, customers=customers, fleet=fleet,
                    per_satellite_cf_limit_active=False, notes=notes)


def _parse_set4(content, name):
    toks = _Tokens(content, comment_chars="!#")
    v1 = toks.integer("v1")
    q1 = toks.number("Q1")
    v2 = toks.integer("v2")
    q2 = toks.number("Q2")
    v2s = toks.number("v2 per satellite")
    depot = [toks.number("depot x"), toks.number("depot y")]
    ns = toks.integer("satellite count")
    sat_xy = [[toks.number("x"), toks.number("y")] for _ in range(ns)]
    nc = toks.integer("customer count")
    cust = [[toks.number("x"), toks.number("y"), toks.number("demand")]
            for _ in range(nc)]

    # normalise: shift coordinates to be nonnegative, scale by 100 and round;
    # the objective inflates by 100 which is recorded as the rescale factor
    lo = min(min(depot), min(min(p[:2]) for p in sat_xy + cust))
    shift = math.ceil(-lo) if lo < 0 else 0.0
    tr = lambda v: float(round((v + shift) * 100))
    notes = [f"coordinates shifted by {shift:g} and scaled x100; "
             "objective rescale factor 100"]
    satellites = [Satellite(x=tr(x), y=tr(y), max_city_freighters=v2s)
                  for x, y in sat_xy]
    customers = [Customer(x=tr(x), y=tr(y), demand=d) for x, y, d in cust]
    fleet = Fleet(level1_count=v1, level1_capacity=q1,
                  level2_count=v2, level2_capacity=q2)
    return Instance(name=name, variant=VARIANT_2EVRP,
                    depot=(tr(depot[0]), tr(depot[1])),
                    satellites=satellites, customers=customers, fleet=fleet,
                    per_satellite_cf_limit_active=True,
                    objective_rescale=100.0, notes=notes)


# ---------------------------------------------------------------------------
# 2E-LRPSD dialects

def _parse_lrp(content, name, scale):
    toks = _Tokens(content, comment_chars="!#")
    nc = toks.integer("customer count")
    ns = toks.integer("satellite count")
    # one known file omits the truck capacity: detect it from the token count
    expected = 2 + 2 + 2 * ns + 2 * nc + 2 + ns + nc + ns + 2
    notes = []
    q1_missing = False
    if len(toks) + 2 == expected - 1:
        q1_missing = True
        notes.append("first-level vehicle capacity missing from file; "
                     "defaulted to 5000")
    elif len(toks) + 2 != expected:
        raise ParseError(f"expected {expected - 2} further values, "
                         f"found {len(toks)}", toks.line)
    depot = (toks.number("depot x"), toks.number("depot y"))
    sat_xy = [(toks.number("x"), toks.number("y")) for _ in range(ns)]
    cust_xy = [(toks.number("x"), toks.number("y")) for _ in range(nc)]
    q1 = 5000.0 if q1_missing else toks.number("Q1")
    q2 = toks.number("Q2")
    caps = [toks.number("satellite capacity") for _ in range(ns)]
    demands = [toks.number("demand") for _ in range(nc)]
    open_costs = [toks.number("opening cost") for _ in range(ns)]
    f2 = toks.number("F2")     # second-level fixed cost comes first
    f1 = toks.number("F1")

    satellites = [Satellite(x=x, y=y, opening_cost=f, capacity=k)
                  for (x, y), k, f in zip(sat_xy, caps, open_costs)]
    customers = [Customer(x=x, y=y, demand=d)
                 for (x, y), d in zip(cust_xy, demands)]
    fleet = Fleet(level1_count=UNBOUNDED, level1_capacity=q1,
                  level1_fixed_cost=f1, level2_count=UNBOUNDED,
                  level2_capacity=q2, level2_fixed_cost=f2)
    conv = DistanceConvention(kind="ceil", scale=scale, level1_factor=2)
    return Instance(name=name, variant=VARIANT_2ELRPSD, depot=depot,
                    satellites=satellites, customers=customers, fleet=fleet,
                    distance_convention=conv,
                    per_satellite_cf_limit_active=False, notes=notes)
