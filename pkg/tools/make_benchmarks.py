#!/usr/bin/env python3
"""Regenerate the bundled benchmark instance files under benchmarks/.

Sets 2 and 3 are rebuilt from the classic Christofides/Eilon CVRP base data
(E-n22-k4, E-n33-k4, E-n51-k5) using the documented construction: the
customers named in the instance suffix double as satellite sites (customers
keep their demands), the city-freighter capacity equals the base capacity and
trucks carry 2.5x as much.  Naming conventions across subsets:

  set2a/set3a  E-n22/E-n33 based, satellite ids are customer numbers
  set2b        E-n51 based, satellite ids are customer numbers
  set2c        same file names as 2b, but ids are customer numbers + 1 and
               the raw files carry the historical Q1/Q2 swap
  set3b        E-n51 based with the depot moved to (0, 0)
  set3c        same satellites as 3b (ids shifted by +1), original depot

The remaining families (Sets 4-6, Nguyen, Prodhon) cannot be rebuilt from
published data; small synthetic exemplar files in each dialect are generated
instead so every parser path stays exercised.  Tiny oracle-certified fixture
instances round the data out.

Run from the repository root:  python3 tools/make_benchmarks.py
"""

import csv
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lns2e import (  # noqa: E402
    Customer, DistanceConvention, Fleet, Instance, Satellite, UNBOUNDED,
    VARIANT_2ELRPSD, VARIANT_2EVRP, exact_solve, write_canonical,
)

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "benchmarks"

# --------------------------------------------------------------------------
# Christofides/Eilon base CVRP data: (x, y, demand); depot separate.

EN22_DEPOT = (145, 215)
EN22_Q = 6000
EN22 = [
    (151, 264, 1100), (159, 261, 700), (130, 254, 800), (128, 252, 1400),
    (163, 247, 2100), (146, 246, 400), (161, 242, 800), (142, 239, 100),
    (163, 236, 500), (148, 232, 600), (128, 231, 1200), (156, 217, 1300),
    (129, 214, 1300), (146, 208, 300), (164, 208, 900), (141, 206, 2100),
    (147, 193, 1000), (164, 193, 900), (129, 189, 2500), (155, 185, 1800),
    (139, 182, 700),
]

EN33_DEPOT = (292, 495)
EN33_Q = 8000
EN33 = [
    (298, 427, 700), (309, 445, 400), (307, 464, 400), (336, 475, 1200),
    (320, 439, 40), (321, 437, 80), (322, 437, 2000), (323, 433, 900),
    (324, 433, 600), (323, 429, 750), (314, 435, 1500), (311, 442, 150),
    (304, 427, 250), (293, 421, 1600), (296, 418, 450), (261, 384, 700),
    (297, 410, 550), (315, 407, 650), (314, 406, 200), (321, 391, 400),
    (321, 398, 300), (314, 394, 1300), (313, 378, 700), (304, 382, 750),
    (295, 402, 1400), (283, 406, 4000), (279, 399, 600), (271, 401, 1000),
    (264, 414, 500), (277, 439, 2500), (290, 434, 1700), (319, 433, 1100),
]

EN51_DEPOT = (30, 40)
EN51_Q = 160
EN51 = [
    (37, 52, 7), (49, 49, 30), (52, 64, 16), (20, 26, 9), (40, 30, 21),
    (21, 47, 15), (17, 63, 19), (31, 62, 23), (52, 33, 11), (51, 21, 5),
    (42, 41, 19), (31, 32, 29), (5, 25, 23), (12, 42, 21), (36, 16, 10),
    (52, 41, 15), (27, 23, 3), (17, 33, 41), (13, 13, 9), (57, 58, 28),
    (62, 42, 8), (42, 57, 8), (16, 57, 16), (8, 52, 10), (7, 38, 28),
    (27, 68, 7), (30, 48, 15), (43, 67, 14), (58, 48, 6), (58, 27, 19),
    (37, 69, 11), (38, 46, 12), (46, 10, 23), (61, 33, 26), (62, 63, 17),
    (63, 69, 6), (32, 22, 9), (45, 35, 15), (59, 15, 14), (5, 6, 7),
    (10, 17, 27), (21, 10, 13), (5, 64, 11), (30, 15, 16), (39, 10, 10),
    (32, 39, 5), (25, 32, 25), (25, 55, 17), (48, 28, 18), (56, 37, 10),
]

# satellite customer-numbers per instance name (1-based customer index)
SET2A = {
    "E-n22-k4": [(6, 17), (8, 14), (9, 19), (10, 14), (11, 12), (12, 16)],
    "E-n33-k4": [(1, 9), (2, 13), (3, 17), (4, 5), (7, 25), (14, 22)],
}
SET3A = {
    "E-n22-k4": [(13, 14), (13, 16), (13, 17), (14, 19), (17, 19), (19, 21)],
    "E-n33-k4": [(16, 22), (16, 24), (19, 26), (22, 26), (24, 28), (25, 28)],
}
SET2B = [(11, 19), (11, 19, 27, 47), (2, 17), (2, 4, 17, 46), (27, 47),
         (32, 37), (4, 46), (6, 12), (6, 12, 32, 37)]
SET3B = [(12, 18), (12, 41), (12, 43), (39, 41), (40, 41), (40, 43)]
SET3C = [(13, 19), (13, 42), (13, 44), (40, 42), (41, 42), (41, 44)]


def build_2evrp(name, depot, base, q2, sat_custs, trucks, cfs):
    """Satellites sit on the named customers (which keep their demands)."""
    sats = [Satellite(x=float(base[i - 1][0]), y=float(base[i - 1][1]))
            for i in sat_custs]
    custs = [Customer(x=float(x), y=float(y), demand=float(d))
             for x, y, d in base]
    fleet = Fleet(level1_count=trucks, level1_capacity=2.5 * q2,
                  level2_count=cfs, level2_capacity=float(q2))
    return Instance(name=name, variant=VARIANT_2EVRP,
                    depot=(float(depot[0]), float(depot[1])),
                    satellites=sats, customers=custs, fleet=fleet,
                    per_satellite_cf_limit_active=False)


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"  wrote {path.relative_to(ROOT)}")


def raw_orlib(inst, swap_caps=False):
    """Render in the orlib-set2-3 dialect (optionally with the Q1/Q2 swap)."""
    fl = inst.fleet
    q1, q2 = fl.level1_capacity, fl.level2_capacity
    if swap_caps:
        q1, q2 = q2, q1
    lines = [f"! {inst.name}",
             f"{int(fl.level1_count)} {q1:g} {int(fl.level2_count)} {q2:g}",
             f"{inst.depot[0]:g} {inst.depot[1]:g}",
             str(inst.n_satellites)]
    lines += [f"{s.x:g} {s.y:g}" for s in inst.satellites]
    lines.append(str(inst.n_customers))
    lines += [f"{c.x:g} {c.y:g} {c.demand:g}" for c in inst.customers]
    return "\n".join(lines) + "\n"


def gen_set23():
    for subset, table in (("set2a", SET2A), ("set3a", SET3A)):
        for base_name, combos in table.items():
            depot, base, q2 = ((EN22_DEPOT, EN22, EN22_Q)
                               if base_name == "E-n22-k4"
                               else (EN33_DEPOT, EN33, EN33_Q))
            for sat_custs in combos:
                name = f"{base_name}-s{'-'.join(map(str, sat_custs))}"
                inst = build_2evrp(name, depot, base, q2, sat_custs, 3, 4)
                write(OUT / subset / f"{name}.txt", write_canonical(inst))

    for sat_custs in SET2B:
        name = f"E-n51-k5-s{'-'.join(map(str, sat_custs))}"
        trucks = 3 if len(sat_custs) == 2 else 4
        inst = build_2evrp(name, EN51_DEPOT, EN51, EN51_Q, sat_custs, trucks, 5)
        write(OUT / "set2b" / f"{name}.txt", write_canonical(inst))
        # 2c: same file name, satellite ids shifted by one, swapped capacities
        shifted = tuple(i - 1 for i in sat_custs)
        inst_c = build_2evrp(name, EN51_DEPOT, EN51, EN51_Q, shifted, trucks, 5)
        write(OUT / "raw" / "set2c" / f"{name}.dat", raw_orlib(inst_c, swap_caps=True))
        write(OUT / "set2c" / f"{name}.txt", write_canonical(inst_c))

    for named, actual in zip(SET3C, SET3B):
        name_b = f"E-n51-k5-s{'-'.join(map(str, actual))}"
        inst_b = build_2evrp(name_b, (0, 0), EN51, EN51_Q, actual, 3, 5)
        write(OUT / "set3b" / f"{name_b}.txt", write_canonical(inst_b))
        name_c = f"E-n51-k5-s{'-'.join(map(str, named))}"
        inst_c = build_2evrp(name_c, EN51_DEPOT, EN51, EN51_Q, actual, 3, 5)
        write(OUT / "set3c" / f"{name_c}.txt", write_canonical(inst_c))


# --------------------------------------------------------------------------
# synthetic exemplars for the dialects whose real files are not rebuildable

def gen_exemplars():
    rng = random.Random(20240917)
    ex = OUT / "raw" / "exemplars"

    # set 4 style: real, partly negative coordinates + per-satellite CF limit
    pts = [(round(rng.uniform(-40, 60), 2), round(rng.uniform(-30, 70), 2))
           for _ in range(13)]
    lines = ["! synthetic orlib-set4 exemplar", "3 750 6 300 2",
             f"{pts[0][0]} {pts[0][1]}", "3"]
    lines += [f"{x} {y}" for x, y in pts[1:4]]
    lines.append("9")
    lines += [f"{x} {y} {rng.randint(20, 120)}" for x, y in pts[4:]]
    write(ex / "set4_sample.dat", "\n".join(lines) + "\n")

    # set 5 style (plain) and set 6 style (satellite handling costs)
    pts = [(rng.randint(0, 100), rng.randint(0, 100)) for _ in range(14)]
    lines = ["! synthetic set5 exemplar", "4 2500 8 1000",
             f"{pts[0][0]} {pts[0][1]}", "3"]
    lines += [f"{x} {y}" for x, y in pts[1:4]]
    lines.append("10")
    lines += [f"{x} {y} {rng.randint(50, 400)}" for x, y in pts[4:]]
    write(ex / "set5_sample.dat", "\n".join(lines) + "\n")

    pts = [(rng.randint(0, 100), rng.randint(0, 100)) for _ in range(14)]
    lines = ["! synthetic set6 exemplar", "3 12500 50 5000",
             f"{pts[0][0]} {pts[0][1]}", "4"]
    lines += [f"{x} {y} {round(rng.uniform(0, 0.1), 3)}" for x, y in pts[1:5]]
    lines.append("9")
    lines += [f"{x} {y} {rng.randint(100, 1200)}" for x, y in pts[5:]]
    write(ex / "set6_sample.dat", "\n".join(lines) + "\n")

    # prodhon / nguyen style LRPSD files (trailing F2 then F1)
    def lrp_lines(n_cust, n_sat, q1_line):
        out = [str(n_cust), str(n_sat), f"{rng.randint(0, 50)} {rng.randint(0, 50)}"]
        out += [f"{rng.randint(0, 50)} {rng.randint(0, 50)}" for _ in range(n_sat)]
        out += [f"{rng.randint(0, 50)} {rng.randint(0, 50)}" for _ in range(n_cust)]
        if q1_line:
            out.append("5000")
        out.append("1500")
        out += [str(rng.choice([3000, 4000, 5000])) for _ in range(n_sat)]
        out += [str(rng.randint(0, 125)) for _ in range(n_cust)]
        out += [str(rng.randint(5000, 15000)) for _ in range(n_sat)]
        out += ["50", "100"]    # F2 first, then F1
        return "\n".join(out) + "\n"

    write(ex / "prodhon_sample.dat", lrp_lines(8, 3, q1_line=True))
    write(ex / "prodhon_missing_q1.dat", lrp_lines(8, 3, q1_line=False))
    write(ex / "nguyen_sample.dat", lrp_lines(8, 3, q1_line=True))


# --------------------------------------------------------------------------
# tiny oracle-certified fixtures

def tiny_instance(idx, rng):
    n_cust = rng.randint(1, 6)
    n_sat = rng.randint(1, 2)
    variant = VARIANT_2EVRP if idx % 2 == 0 else VARIANT_2ELRPSD
    custs = [Customer(float(rng.randint(0, 100)), float(rng.randint(0, 100)),
                      float(rng.randint(1, 10))) for _ in range(n_cust)]
    total = sum(c.demand for c in custs)
    q2 = float(max(10, math.ceil(max(c.demand for c in custs) * 1.5)))
    if variant == VARIANT_2EVRP:
        sats = [Satellite(float(rng.randint(0, 100)), float(rng.randint(0, 100)))
                for _ in range(n_sat)]
        fleet = Fleet(level1_count=3, level1_capacity=2.5 * q2,
                      level2_count=n_cust, level2_capacity=q2)
        conv = DistanceConvention()
    else:
        cap = float(math.ceil(total * 0.8) + 5)
        sats = [Satellite(float(rng.randint(0, 100)), float(rng.randint(0, 100)),
                          opening_cost=float(rng.randint(20, 120)), capacity=cap)
                for _ in range(n_sat)]
        if cap * n_sat < total:     # keep the instance feasible
            sats[0] = Satellite(sats[0].x, sats[0].y,
                                opening_cost=sats[0].opening_cost, capacity=total)
        fleet = Fleet(level1_count=UNBOUNDED, level1_capacity=max(cap, total),
                      level1_fixed_cost=30.0, level2_count=UNBOUNDED,
                      level2_capacity=q2, level2_fixed_cost=10.0)
        conv = DistanceConvention(kind="ceil", scale=10, level1_factor=2)
    return Instance(name=f"tiny{idx:02d}", variant=variant, depot=(50.0, 50.0),
                    satellites=sats, customers=custs, fleet=fleet,
                    distance_convention=conv,
                    per_satellite_cf_limit_active=False)


def gen_tiny():
    rng = random.Random(7)
    rows = []
    for idx in range(8):
        inst = tiny_instance(idx, rng)
        opt, _ = exact_solve(inst)
        write(OUT / "tiny" / f"{inst.name}.txt", write_canonical(inst))
        rows.append((inst.name, opt))
    with open(OUT / "tiny" / "tiny_bks.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["set", "instance", "bks", "optimal"])
        for name, opt in rows:
            w.writerow(["tiny", name, f"{opt:.6f}", 1])
    print(f"  wrote {OUT / 'tiny' / 'tiny_bks.csv'}")


if __name__ == "__main__":
    gen_set23()
    gen_exemplars()
    gen_tiny()
    print("done")
