"""Generate the channalyse demo data set under fixtures/channalyse/.

A small retail constellation: sale rows across shops, payment modes, staff,
products and dates, plus warehouse purchase rows sharing the product and date
dimensions.  The sale rows are constructed so that, restricted to
position="manager", categ="C1" and year=2000, every (pay_class, branch_desc)
cell aggregates to a fixed target triple (total_sales, tax_amount, quantity).
Extra rows fail at least one of those three restrictions each, so they never
leak into the restricted display; they populate other slices of the cube.

Deterministic: running it twice produces identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "fixtures" / "channalyse"

SCHEMA = {
    "name": "channalyse",
    "dimensions": [
        {
            "name": "shop",
            "key": "shopID",
            "attributes": [
                "shopID", "channel_class", "branch_desc",
                "city", "county", "state", "zone",
            ],
            "hierarchies": [
                {"name": "h_shop_channel", "params": ["shopID", "channel_class", "branch_desc"]},
                {"name": "h_shop_administrative", "params": ["shopID", "city", "county", "state"]},
                {"name": "h_shop_zone", "params": ["shopID", "city", "zone"]},
            ],
        },
        {
            "name": "payment",
            "key": "paymentID",
            "attributes": ["paymentID", "pay_class"],
            "hierarchies": [
                {"name": "h_payment", "params": ["paymentID", "pay_class"]},
            ],
        },
        {
            "name": "person",
            "key": "personID",
            "attributes": ["personID", "position"],
            "hierarchies": [
                {"name": "h_person_position", "params": ["personID", "position"]},
            ],
        },
        {
            "name": "product",
            "key": "prodID",
            "attributes": ["prodID", "type", "categ"],
            "hierarchies": [
                {"name": "h_product_category", "params": ["prodID", "type", "categ"]},
            ],
        },
        {
            "name": "date",
            "key": "dateID",
            "attributes": ["dateID", "day", "month", "quarter", "year"],
            "hierarchies": [
                {"name": "h_date_gregorian", "params": ["dateID", "day", "month", "quarter", "year"]},
            ],
        },
        {
            "name": "stock",
            "key": "warehouseID",
            "attributes": ["warehouseID", "city", "county", "state", "zone"],
            "hierarchies": [
                {"name": "h_stock_administrative", "params": ["warehouseID", "city", "county", "state"]},
                {"name": "h_stock_zone", "params": ["warehouseID", "city", "zone"]},
            ],
        },
    ],
    "facts": [
        {
            "name": "sale",
            "measures": [
                {"name": "total_sales"},
                {"name": "tax_amount"},
                {"name": "quantity"},
            ],
            "dimensions": ["shop", "payment", "person", "product", "date"],
        },
        {
            "name": "purchase",
            "measures": [{"name": "qty_purchased"}, {"name": "cost"}],
            "dimensions": ["stock", "product", "date"],
        },
    ],
}

# city -> (county, state, zone), shared by shops and warehouses
GEO = {
    "Lyon": ("Rhone", "ARA", "South-East"),
    "Paris": ("Seine", "IDF", "North"),
    "Marseille": ("BDR", "PACA", "South-East"),
    "Lille": ("Nord", "HDF", "North"),
    "Toulouse": ("HG", "Occitanie", "South-West"),
    "Bordeaux": ("Gironde", "NA", "South-West"),
    "Nantes": ("LA", "PDL", "West"),
    "Nice": ("AM", "PACA", "South-East"),
}

SHOPS = [
    # (shopID, channel_class, branch_desc, city); row order fixes display order
    ("s1", "CH1", "BR1", "Lyon"),
    ("s2", "CH2", "BR1", "Paris"),
    ("s3", "CH3", "BR2", "Marseille"),
    ("s4", "CH4", "BR2", "Lille"),
    ("s5", "CH5", "BR3", "Toulouse"),
    ("s6", "CH6", "BR3", "Bordeaux"),
    ("s7", "CH7", "BR4", "Nantes"),
    ("s8", "CH8", "BR4", "Nice"),
]

PAYMENTS = [
    ("p1", "PC1"), ("p2", "PC2"), ("p3", "PC3"),
    ("p4", "PC1"), ("p5", "PC2"), ("p6", "PC3"),
]

PERSONS = [
    ("e1", "manager"), ("e2", "clerk"), ("e3", "manager"), ("e4", "trainee"),
]

PRODUCTS = [
    ("pr1", "T1", "C1"), ("pr2", "T2", "C1"),
    ("pr3", "T3", "C2"), ("pr4", "T4", "C2"),
    ("pr5", "T5", "C3"), ("pr6", "T6", "C3"),
]

DATES = [
    ("d1", "1998-02-10"), ("d2", "1998-05-20"), ("d3", "1998-11-05"),
    ("d4", "1999-03-15"), ("d5", "1999-07-04"), ("d6", "1999-10-30"),
    ("d7", "2000-01-15"), ("d8", "2000-04-22"), ("d9", "2000-08-09"),
]

WAREHOUSES = [("w1", "Lyon"), ("w2", "Paris"), ("w3", "Toulouse")]

# Target cells of the restricted display: (pay_class, branch_desc) -> row
# triples summing to the target (total_sales, tax_amount, quantity); the
# quantity of every individual sale row is 1, so row count = target quantity.
CELLS = [
    ("PC1", "BR1", [(29, 3, 1), (29, 3, 1)]),
    ("PC1", "BR2", [(23, 3, 1), (22, 2, 1), (22, 2, 1)]),
    ("PC1", "BR3", [(58, 6, 1)]),
    ("PC1", "BR4", [(34, 4, 1), (34, 3, 1)]),
    ("PC2", "BR1", [(20, 2, 1), (20, 2, 1), (20, 2, 1)]),
    ("PC2", "BR2", [(19, 2, 1), (18, 2, 1), (18, 2, 1)]),
    ("PC2", "BR3", [(50, 5, 1)]),
    ("PC2", "BR4", [(22, 3, 1), (22, 2, 1), (21, 2, 1)]),
    ("PC3", "BR1", [(45, 5, 1)]),
    ("PC3", "BR2", [(50, 5, 1)]),
    ("PC3", "BR3", [(52, 5, 1)]),
    ("PC3", "BR4", [(32, 3, 1), (32, 3, 1)]),
]

# Rows that each fail at least one of the three display restrictions
# (position=manager, categ=C1, year=2000): they fill in the other years and
# categories for the PC1/BR1 slice, plus a few non-manager sales elsewhere.
EXTRA_SALES = [
    # (shop, payment, person, product, date, total_sales, tax_amount, quantity)
    ("s1", "p1", "e1", "pr1", "d1", 40, 4, 2),
    ("s1", "p1", "e1", "pr1", "d4", 35, 4, 1),
    ("s1", "p1", "e1", "pr3", "d1", 42, 4, 2),
    ("s1", "p1", "e1", "pr3", "d4", 38, 4, 1),
    ("s1", "p1", "e1", "pr4", "d7", 44, 5, 2),
    ("s1", "p1", "e1", "pr5", "d2", 30, 3, 1),
    ("s1", "p1", "e1", "pr6", "d5", 33, 3, 1),
    ("s1", "p1", "e1", "pr5", "d8", 36, 4, 2),
    ("s3", "p2", "e2", "pr1", "d7", 28, 3, 1),
    ("s7", "p6", "e4", "pr2", "d9", 26, 3, 1),
    ("s5", "p4", "e2", "pr4", "d3", 24, 2, 1),
    ("s8", "p5", "e4", "pr6", "d6", 27, 3, 1),
]

PURCHASES = [
    # (stock, product, date, qty_purchased, cost)
    ("w1", "pr1", "d1", 100, "250.5"),
    ("w1", "pr2", "d4", 80, "199.25"),
    ("w2", "pr3", "d2", 60, "120.75"),
    ("w2", "pr4", "d5", 90, "310.5"),
    ("w2", "pr1", "d7", 50, "99.5"),
    ("w3", "pr5", "d3", 70, "140.25"),
    ("w3", "pr6", "d6", 40, "75.5"),
    ("w3", "pr2", "d8", 55, "112.75"),
    ("w1", "pr5", "d9", 65, "130.25"),
]


def sale_rows() -> list[tuple[str, str, str, str, str, int, int, int]]:
    shops_by_branch: dict[str, list[str]] = {}
    for sid, _, br, _ in SHOPS:
        shops_by_branch.setdefault(br, []).append(sid)
    payments_by_class: dict[str, list[str]] = {}
    for pid, pc in PAYMENTS:
        payments_by_class.setdefault(pc, []).append(pid)
    managers = [pid for pid, pos in PERSONS if pos == "manager"]
    c1_products = [pid for pid, _, c in PRODUCTS if c == "C1"]
    year_2000 = [did for did, day in DATES if day.startswith("2000")]

    rows = []
    for ci, (pc, br, parts) in enumerate(CELLS):
        for ri, (ts, tax, qty) in enumerate(parts):
            k = ci + ri
            rows.append((
                shops_by_branch[br][k % 2],
                payments_by_class[pc][k % 2],
                managers[k % 2],
                c1_products[k % 2],
                year_2000[k % 3],
                ts, tax, qty,
            ))
    rows.extend(EXTRA_SALES)
    return rows


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def main() -> None:
    data = OUT / "data"
    data.mkdir(parents=True, exist_ok=True)
    (OUT / "channalyse.json").write_text(
        json.dumps(SCHEMA, indent=2) + "\n", encoding="utf-8"
    )

    write_csv(
        data / "shop.csv",
        ["shopID", "channel_class", "branch_desc", "city", "county", "state", "zone"],
        [(sid, ch, br, city, *GEO[city][:2], GEO[city][2]) for sid, ch, br, city in SHOPS],
    )
    write_csv(data / "payment.csv", ["paymentID", "pay_class"], PAYMENTS)
    write_csv(data / "person.csv", ["personID", "position"], PERSONS)
    write_csv(data / "product.csv", ["prodID", "type", "categ"], PRODUCTS)
    write_csv(
        data / "date.csv",
        ["dateID", "day", "month", "quarter", "year"],
        [
            (did, day, day[:7], f"{day[:4]}-Q{(int(day[5:7]) + 2) // 3}", day[:4])
            for did, day in DATES
        ],
    )
    write_csv(
        data / "stock.csv",
        ["warehouseID", "city", "county", "state", "zone"],
        [(wid, city, *GEO[city][:2], GEO[city][2]) for wid, city in WAREHOUSES],
    )
    write_csv(
        data / "sale.csv",
        ["shop_id", "payment_id", "person_id", "product_id", "date_id",
         "total_sales", "tax_amount", "quantity"],
        sale_rows(),
    )
    write_csv(
        data / "purchase.csv",
        ["stock_id", "product_id", "date_id", "qty_purchased", "cost"],
        PURCHASES,
    )
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
