#!/usr/bin/env python3
"""Convert a powersimdata grid (bus.csv, branch.csv, plant.csv) to .pds.

Every bus of the chosen interconnect becomes a vertex labelled with its bus
id. A bus with nonzero load (Pd or Qd) or at least one plant is
non-propagating. Branches (lines and transformers) become edges; parallel
branches collapse to one edge.
"""

import argparse
import csv
import sys
from pathlib import Path


def read_rows(path, interconnect):
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            if interconnect == "USA" or row["interconnect"] == interconnect:
                yield row


def convert(data_dir, interconnect):
    data_dir = Path(data_dir)
    buses = list(read_rows(data_dir / "bus.csv", interconnect))
    index = {row["bus_id"]: i for i, row in enumerate(buses)}

    injecting = set()
    for row in buses:
        if float(row["Pd"]) != 0.0 or float(row["Qd"]) != 0.0:
            injecting.add(row["bus_id"])
    for row in read_rows(data_dir / "plant.csv", interconnect):
        injecting.add(row["bus_id"])

    edges = set()
    for row in read_rows(data_dir / "branch.csv", interconnect):
        u, v = index[row["from_bus_id"]], index[row["to_bus_id"]]
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return buses, injecting, sorted(edges)


def write_pds(out, buses, injecting, edges, interconnect):
    out.write(f"# powersimdata usa_tamu, interconnect {interconnect}\n")
    out.write(f"# non-propagating: buses with load or generation ({len(injecting)})\n")
    out.write(f"p pds {len(buses)} {len(edges)}\n")
    for i, row in enumerate(buses):
        if row["bus_id"] in injecting:
            out.write(f"v {i} N\n")
    for i, row in enumerate(buses):
        out.write(f"l {i} {row['bus_id']}\n")
    for u, v in edges:
        out.write(f"e {u} {v}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("data_dir", help="directory with bus.csv, branch.csv, plant.csv")
    ap.add_argument("interconnect", choices=["Texas", "Western", "Eastern", "USA"])
    ap.add_argument("-o", "--output", help="output .pds path (default: stdout)")
    args = ap.parse_args()

    buses, injecting, edges = convert(args.data_dir, args.interconnect)
    print(
        f"{args.interconnect}: n={len(buses)} m={len(edges)} "
        f"propagating={len(buses) - len(injecting)}",
        file=sys.stderr,
    )
    if args.output:
        with open(args.output, "w") as out:
            write_pds(out, buses, injecting, edges, args.interconnect)
    else:
        write_pds(sys.stdout, buses, injecting, edges, args.interconnect)


if __name__ == "__main__":
    main()
