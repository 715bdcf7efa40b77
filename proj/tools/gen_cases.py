#!/usr/bin/env python3
"""Regenerates the JSON cases under data/.  Deterministic by construction."""
import json
import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "data")


def sg(id, bus, a, b, c, s, pmin, pmax, ru, rd, tu, td, hg, u0=0, p0=0.0,
       eps=0.05):
    return {"id": id, "bus": bus, "a": a, "b": b, "c": c, "s": s,
            "Pmin": pmin, "Pmax": pmax, "RU": ru, "RD": rd, "TU": tu,
            "TD": td, "Hg": hg, "eps_g": eps, "u0": u0, "p0": p0}


def es(id, bus, pe, pc, emin, emax, k, hemax, e0):
    return {"id": id, "bus": bus, "Pe_max": pe, "Pc_max": pc, "Emin": emin,
            "Emax": emax, "k": k, "He_max": hemax, "e0": e0,
            "eps_d": 0.05, "eps_c": 0.05}


def res(id, bus, kind, pmax, forecast, err_mean, err_std, h, h_std,
        mppt=None):
    T = len(forecast)
    return {"id": id, "bus": bus, "kind": kind, "Pmax": pmax,
            "forecast": forecast, "err_mean": err_mean, "err_std": err_std,
            "inertia_forecast": [h] * T, "inertia_err_mean": [0.0] * T,
            "inertia_err_std": [h_std] * T, "eps_h": 0.05,
            "mppt": mppt if mppt else [min(pmax, f * 1.1) for f in forecast]}


def write(name, case):
    path = os.path.join(OUT, name)
    with open(path, "w") as f:
        json.dump(case, f, indent=2)
        f.write("\n")
    print("wrote", path)


def single():
    return {
        "schema_version": 1,
        "params": {"f0": 60.0, "fmax_prime": 0.5, "dfmax": 0.55,
                   "Hmin": 3.5, "Psys": 100.0, "T": 1, "mva_base": 100.0},
        "network": {"buses": ["B1"], "slack_bus": "B1", "lines": []},
        "sgs": [sg("G1", "B1", 0.01, 20.0, 5.0, 10.0, 10.0, 100.0,
                   100.0, 100.0, 1, 1, 4.0)],
        "ess": [], "ress": [],
        "load": {"B1": [50.0]},
    }


def desk():
    T = 4
    return {
        "schema_version": 1,
        "params": {"f0": 60.0, "fmax_prime": 0.5, "dfmax": 0.55,
                   "Hmin": 3.5, "Psys": 230.0, "T": T, "mva_base": 100.0},
        "network": {
            "buses": ["B1", "B2", "B3"], "slack_bus": "B1",
            "lines": [
                {"from": "B1", "to": "B2", "B": 10.0, "Fmax": 500.0},
                {"from": "B2", "to": "B3", "B": 10.0, "Fmax": 500.0},
                {"from": "B1", "to": "B3", "B": 10.0, "Fmax": 500.0},
            ]},
        "sgs": [
            sg("G1", "B1", 0.02, 15.0, 20.0, 40.0, 20.0, 150.0, 80.0, 80.0,
               2, 2, 5.0, u0=1, p0=80.0),
            sg("G2", "B2", 0.03, 25.0, 15.0, 30.0, 15.0, 100.0, 60.0, 60.0,
               1, 1, 4.0),
            sg("G3", "B3", 0.05, 40.0, 10.0, 20.0, 5.0, 60.0, 60.0, 60.0,
               1, 1, 2.5),
        ],
        "ess": [es("E1", "B2", 30.0, 30.0, 5.0, 60.0, 0.95, 6.0, 30.0)],
        "ress": [
            res("PV1", "B3", "PV", 60.0, [20.0, 30.0, 35.0, 25.0],
                [1.0, 1.5, 1.5, 1.0], [2.0, 3.0, 3.0, 2.0], 0.5, 0.05,
                mppt=[22.0, 33.0, 38.0, 27.0]),
            res("WT1", "B1", "WT", 50.0, [15.0, 10.0, 12.0, 18.0],
                [-0.5, -0.5, -0.5, -0.5], [2.5, 2.0, 2.0, 2.5], 1.0, 0.1,
                mppt=[17.0, 12.0, 14.0, 20.0]),
        ],
        "load": {"B1": [60.0, 70.0, 80.0, 65.0],
                 "B2": [50.0, 60.0, 70.0, 55.0],
                 "B3": [40.0, 50.0, 55.0, 45.0]},
    }


def peaker():
    # Cheap low-inertia baseload vs expensive high-inertia peaker.  The
    # cost-only schedule is inertia deficient; the requirement forces the
    # peaker online.
    return {
        "schema_version": 1,
        "params": {"f0": 60.0, "fmax_prime": 0.5, "dfmax": 0.55,
                   "Hmin": 3.5, "Psys": 100.0, "T": 2, "mva_base": 100.0},
        "network": {"buses": ["B1"], "slack_bus": "B1", "lines": []},
        "sgs": [
            sg("G1", "B1", 0.01, 10.0, 5.0, 10.0, 10.0, 100.0, 100.0, 100.0,
               1, 1, 2.0, u0=1, p0=50.0),
            sg("G2", "B1", 0.02, 50.0, 30.0, 60.0, 5.0, 50.0, 50.0, 50.0,
               1, 1, 8.0),
        ],
        "ess": [], "ress": [],
        "load": {"B1": [60.0, 70.0]},
    }


def binding():
    # The inertia requirement binds through the storage inertia constant,
    # which competes with discharge headroom, so chi > 0 at fixed commitment.
    return {
        "schema_version": 1,
        "params": {"f0": 60.0, "fmax_prime": 0.5, "dfmax": 0.55,
                   "Hmin": 3.5, "Psys": 100.0, "T": 1, "mva_base": 100.0},
        "network": {"buses": ["B1"], "slack_bus": "B1", "lines": []},
        "sgs": [sg("G1", "B1", 0.02, 20.0, 10.0, 0.0, 10.0, 100.0,
                   150.0, 150.0, 1, 1, 3.0, u0=1, p0=90.0)],
        "ess": [es("E1", "B1", 40.0, 40.0, 0.0, 80.0, 0.95, 8.0, 60.0)],
        "ress": [],
        "load": {"B1": [135.0]},
    }


def congested():
    return {
        "schema_version": 1,
        "params": {"f0": 60.0, "fmax_prime": 0.5, "dfmax": 0.55,
                   "Hmin": 3.5, "Psys": 100.0, "T": 1, "mva_base": 100.0},
        "network": {"buses": ["B1", "B2"], "slack_bus": "B1",
                    "lines": [{"from": "B1", "to": "B2", "B": 10.0,
                               "Fmax": 30.0}]},
        "sgs": [
            sg("G1", "B1", 0.01, 10.0, 0.0, 0.0, 0.0, 100.0, 200.0, 200.0,
               1, 1, 5.0, u0=1, p0=30.0),
            sg("G2", "B2", 0.02, 30.0, 0.0, 0.0, 0.0, 100.0, 200.0, 200.0,
               1, 1, 5.0, u0=1, p0=50.0),
        ],
        "ess": [], "ress": [],
        "load": {"B2": [80.0]},
    }


def grid118():
    # Structural-scale case: 118 buses, 28 SGs, 8 PVs, 2 WTs, 10 ESs, T=24.
    T = 24
    buses = [f"b{i:03d}" for i in range(1, 119)]
    lines = []
    for i in range(117):  # chain
        lines.append({"from": buses[i], "to": buses[i + 1], "B": 8.0,
                      "Fmax": 600.0})
    for i in range(0, 110, 9):  # chords
        lines.append({"from": buses[i], "to": buses[i + 7], "B": 5.0,
                      "Fmax": 400.0})
    shape = [0.72, 0.68, 0.65, 0.64, 0.66, 0.72, 0.81, 0.90, 0.95, 0.97,
             0.98, 0.99, 1.00, 0.99, 0.97, 0.96, 0.97, 0.99, 1.00, 0.98,
             0.93, 0.87, 0.80, 0.75]
    load = {}
    for k, b in enumerate(buses):
        base = 28.0 + 14.0 * math.sin(0.37 * (k + 1)) ** 2
        load[b] = [round(base * s, 3) for s in shape]
    total_peak = sum(v[12] for v in load.values())

    sgs = []
    for i in range(28):
        bus = buses[(i * 4 + 1) % 118]
        big = i % 3 == 0
        pmax = 320.0 if big else 160.0
        sgs.append(sg(f"G{i+1:02d}", bus,
                      a=round(0.004 + 0.0007 * i, 5),
                      b=round(14.0 + 1.3 * i, 3),
                      c=round(60.0 + 5.0 * (i % 7), 3),
                      s=round(300.0 + 40.0 * (i % 5), 3),
                      pmin=pmax * 0.25, pmax=pmax,
                      ru=pmax * 0.5, rd=pmax * 0.5,
                      tu=4 if big else 2, td=4 if big else 2,
                      hg=5.0 if big else 3.2,
                      u0=1 if i < 10 else 0,
                      p0=pmax * 0.5 if i < 10 else 0.0))

    ess = [es(f"E{j+1:02d}", buses[(j * 11 + 5) % 118], 50.0, 50.0, 10.0,
              200.0, 0.95, 6.0, 100.0) for j in range(10)]

    pv_shape = [max(0.0, math.sin(math.pi * (t - 6) / 12.0)) for t in
                range(T)]
    raw = []
    for k in range(8):
        raw.append(("PV", f"PV{k+1}", buses[(k * 13 + 3) % 118],
                    [90.0 * s for s in pv_shape]))
    for k in range(2):
        raw.append(("WT", f"WT{k+1}", buses[(k * 29 + 8) % 118],
                    [130.0 * (0.45 + 0.2 * math.sin(0.5 * t + k))
                     for t in range(T)]))
    # Normalize so baseline RES energy is 25% of demand, with enough rated
    # capacity that eta scaling up to 0.40 keeps mppt below Pmax.
    demand = sum(sum(v) for v in load.values())
    raw_energy = sum(sum(fc) for _, _, _, fc in raw)
    boost = 0.25 * demand / raw_energy
    ress = []
    for kind, rid, bus, fc0 in raw:
        fc = [round(boost * f, 3) for f in fc0]
        mppt = [round(f * 1.15, 3) for f in fc]
        pmax = round(max(mppt) * 2.0, 3)
        h, hstd = (0.6, 0.05) if kind == "PV" else (1.2, 0.1)
        sgn = 0.04 if kind == "PV" else -0.03
        ress.append(res(rid, bus, kind, pmax, fc,
                        [round(sgn * f, 3) for f in fc],
                        [round(0.08 * f + 0.5, 3) for f in fc], h, hstd,
                        mppt=mppt))

    return {
        "schema_version": 1,
        "params": {"f0": 60.0, "fmax_prime": 0.5, "dfmax": 0.55,
                   "Hmin": 3.5, "Psys": round(total_peak, 3), "T": T,
                   "mva_base": 100.0},
        "network": {"buses": buses, "slack_bus": buses[0], "lines": lines},
        "sgs": sgs, "ess": ess, "ress": ress, "load": load,
    }


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    write("single.json", single())
    write("desk.json", desk())
    write("peaker.json", peaker())
    write("binding.json", binding())
    write("congested.json", congested())
    write("grid118.json", grid118())
