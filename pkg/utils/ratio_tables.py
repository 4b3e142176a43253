#!/usr/bin/env python3
"""
ratio_tables.py  —  proportion of positive coefficients of δ and g
▪️ builds each form once at the largest X, then sweeps the cutoffs
▪️ writes rows form,X,R_tot,R_fund (3 decimals below 10⁴, 6 from there on)
Usage:
  python utils/ratio_tables.py --output tables.csv --X-list 10,100,1000,10000,100000
  python utils/ratio_tables.py --output tables.csv --huge      # adds X = 10⁶
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import time

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from tqdm import tqdm  # noqa: E402

from halfweight import settings  # noqa: E402
from halfweight.forms import delta_form, g_form  # noqa: E402
from halfweight.signs import r_plus_fund, r_plus_tot, render_ratio, table_digits  # noqa: E402

FORMS = {"delta": delta_form, "g": g_form}
DEFAULT_XS = "10,100,1000,10000,100000"
HUGE_X = 1_000_000


def table_rows(name: str, xs: list[int]) -> list[dict]:
    t0 = time.perf_counter()
    f = FORMS[name](max(xs))
    rows = []
    for X in tqdm(xs, desc=name, ncols=80, disable=not sys.stderr.isatty()):
        digits = table_digits(X)
        rows.append(
            {
                "form": name,
                "X": X,
                "R_tot": render_ratio(r_plus_tot(f, X).ratio, digits),
                "R_fund": render_ratio(r_plus_fund(f, X).ratio, digits),
            }
        )
    logging.info("%s: %d rows in %.1fs", name, len(rows), time.perf_counter() - t0)
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--output", default="tables.csv")
    ap.add_argument("--X-list", dest="X_list", default=DEFAULT_XS)
    ap.add_argument("--forms", default="delta,g")
    ap.add_argument("--huge", action="store_true", help=f"also X = {HUGE_X}")
    args = ap.parse_args()
    settings.configure_logging()

    try:
        xs = sorted({int(x) for x in args.X_list.split(",") if x.strip()})
        names = [n for n in args.forms.split(",") if n]
        unknown = [n for n in names if n not in FORMS]
        if unknown:
            raise ValueError(f"unknown form(s) {unknown}, choose from {list(FORMS)}")
        if args.huge:
            logging.warning("X = %d needs several GB of memory and a long run", HUGE_X)
            if HUGE_X not in xs:
                xs.append(HUGE_X)
        elif xs and xs[-1] > settings.DEFAULT_PREC:
            raise ValueError(f"X = {xs[-1]} is above {settings.DEFAULT_PREC}; pass --huge")
        if not xs:
            raise ValueError("empty --X-list")
        rows = [row for name in names for row in table_rows(name, xs)]
    except ValueError as e:
        sys.exit(f"❌ {e}")

    with open(args.output, "w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=["form", "X", "R_tot", "R_fund"])
        w.writeheader()
        w.writerows(rows)
    print(f"✔️  saved {len(rows)} rows → {args.output}")


if __name__ == "__main__":
    main()
