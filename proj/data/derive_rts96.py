#!/usr/bin/env python3
"""Writes case73_rts96.m: the three-area RTS-96 network from
case73_ieee_rts.m with every area dispatched like the single-area RTS-79
(case24_ieee_rts.m).

Unit order inside each area is the same in both files, so unit k of an area
takes Pg and Vg from unit k of RTS-79. Bus 113 stays the only slack. The
bus-13 units of areas 2 and 3 share the RTS-79 slack output from a solved
AC power flow (PF_TOL 1e-10), so each area is balanced on its own.
"""
import re
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
RTS79_BUS13_MW = 187.2464154906797  # solved RTS-79 slack output at bus 13


def matrix(text, name):
    m = re.search(r"mpc\." + name + r"\s*=\s*\[(.*?)\];", text, re.S)
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%")[0].strip().rstrip(";").strip()
        if line:
            rows.append(line.split())
    return m, rows


def main():
    rts79 = (HERE / "case24_ieee_rts.m").read_text()
    rts96 = (HERE / "case73_ieee_rts.m").read_text()
    _, gen79 = matrix(rts79, "gen")
    span, gen96 = matrix(rts96, "gen")
    per_area = len(gen79)
    if len(gen96) != 3 * per_area:
        sys.exit("unexpected generator count")
    lines = []
    for k, row in enumerate(gen96):
        area, unit = divmod(k, per_area)
        src = gen79[unit]
        if int(row[0]) % 100 != int(src[0]):
            sys.exit(f"unit order mismatch at generator {k + 1}")
        pg = float(src[1])
        if area > 0 and int(src[0]) == 13:
            pg = RTS79_BUS13_MW / 3.0
        row = list(row)
        row[1] = repr(round(pg, 10))
        row[5] = src[5]
        lines.append("\t" + "\t".join(row) + ";")
    body = "\n" + "\n".join(lines) + "\n"
    out = rts96[: span.start(1)] + body + rts96[span.end(1):]
    out = out.replace("function mpc = pglib_opf_case73_ieee_rts", "function mpc = case73_rts96", 1)
    header = ("% Derived by derive_rts96.py: RTS-79 dispatch replicated in all three\n"
              "% areas of the PGLib RTS-96 network; see that script.\n")
    (HERE / "case73_rts96.m").write_text(header + out)


if __name__ == "__main__":
    main()
