"""Regenerates the bundled CSV files in this directory.

Run from anywhere: python3 data/build_bundled_data.py
Output is deterministic; the files are checked in.
"""

from pathlib import Path

HERE = Path(__file__).resolve().parent
YEARS = range(1994, 2017)
PRESTUDY = range(1994, 1999)
BEFORE = range(1999, 2008)
AFTER = range(2008, 2017)
AFTER_EARLY = range(2008, 2014)

NAMES = {
    "MO": "Missouri", "AR": "Arkansas", "IL": "Illinois", "IA": "Iowa", "KS": "Kansas",
    "KY": "Kentucky", "NE": "Nebraska", "OK": "Oklahoma", "TN": "Tennessee",
}

# Resident population in thousands at 1995, 2000, 2005, 2010, 2016 (census
# estimates, rounded). Other years are linear in between; 1994 extends the
# 1995-2000 slope.
POP_ANCHORS = {
    "MO": (5324, 5597, 5791, 5989, 6093),
    "AR": (2484, 2673, 2779, 2916, 2988),
    "IL": (11830, 12420, 12674, 12831, 12802),
    "IA": (2842, 2926, 2965, 3046, 3134),
    "KS": (2565, 2688, 2745, 2853, 2907),
    "KY": (3860, 4042, 4173, 4339, 4437),
    "NE": (1637, 1711, 1761, 1826, 1907),
    "OK": (3278, 3451, 3548, 3751, 3924),
    "TN": (5256, 5689, 5991, 6346, 6651),
}
ANCHOR_YEARS = (1995, 2000, 2005, 2010, 2016)

# Age-adjusted firearm homicide rates per 100,000: prestudy, before, after.
STATE_RATES = {
    "MO": (6.1, 4.7, 6.1),
    "AR": (7.3, 5.1, 5.5),
    "IL": (7.1, 5.1, 5.2),
    "IA": (1.2, 0.9, 1.2),
    "KS": (4.2, 3.0, 3.0),
    "KY": (4.1, 3.3, 3.7),
    "NE": (2.2, 1.8, 2.4),
    "OK": (4.8, 3.8, 4.8),
    "TN": (6.9, 5.5, 5.4),
}

UPPER = ("AR", "IL", "TN")
LOWER = ("IA", "KS", "KY", "NE", "OK")

# Group-level period rates: prestudy, before, after, and the 2008-2013 value.
GROUP_RATES = {
    "Missouri": (("MO",), 6.1, 4.7, 6.1, 5.5),
    "Upper Controls": (UPPER, 7.1, 5.2, 5.3, 5.0),
    "Lower Controls": (LOWER, 3.5, 2.7, 3.2, 2.9),
    "All Controls": (UPPER + LOWER, 5.6, 4.2, 4.4, None),
}


def population(state, year):
    pts = list(zip(ANCHOR_YEARS, POP_ANCHORS[state]))
    if year <= pts[0][0]:
        (y0, p0), (y1, p1) = pts[0], pts[1]
    else:
        for (y0, p0), (y1, p1) in zip(pts, pts[1:]):
            if year <= y1:
                break
    value = p0 + (p1 - p0) * (year - y0) / (y1 - y0)
    return int(round(value * 1000))


def period_rate(rates, year):
    prestudy, before, after = rates
    if year in PRESTUDY:
        return prestudy
    if year in BEFORE:
        return before
    return after


def fmt(x):
    return repr(round(x, 12))


def write_state_panel():
    lines = ["unit,year,rate,deaths,population"]
    for code in sorted(STATE_RATES, key=lambda c: NAMES[c]):
        for year in YEARS:
            rate = period_rate(STATE_RATES[code], year)
            pop = population(code, year)
            deaths = int(round(rate * pop / 1e5))
            lines.append(f"{NAMES[code]},{year},{rate},{deaths},{pop}")
    (HERE / "missouri_region.csv").write_text("\n".join(lines) + "\n")


def write_group_panel():
    lines = ["unit,year,rate,deaths,population"]
    for name, (members, pre, bef, aft, early) in sorted(GROUP_RATES.items()):
        pops = {y: sum(population(m, y) for m in members) for y in YEARS}
        late_rate = aft
        if early is not None:
            # The 2014-2016 rate that keeps the 2008-2016 weighted mean at `aft`.
            w_all = sum(pops[y] for y in AFTER)
            w_early = sum(pops[y] for y in AFTER_EARLY)
            late_rate = (aft * w_all - early * w_early) / (w_all - w_early)
        for year in YEARS:
            if year in PRESTUDY:
                rate = pre
            elif year in BEFORE:
                rate = bef
            elif early is not None and year in AFTER_EARLY:
                rate = early
            elif early is not None:
                rate = late_rate
            else:
                rate = aft
            deaths = int(round(rate * pops[year] / 1e5))
            lines.append(f"{name},{year},{fmt(rate)},{deaths},{pops[year]}")
    (HERE / "group_periods.csv").write_text("\n".join(lines) + "\n")


# Contiguous states plus DC; shared land or river borders only (the two
# Four Corners point contacts are left out).
ADJACENCY = {
    "AL": "FL GA MS TN", "AZ": "CA NV UT NM", "AR": "LA MS MO OK TN TX",
    "CA": "AZ NV OR", "CO": "KS NE NM OK UT WY", "CT": "MA NY RI", "DE": "MD NJ PA",
    "DC": "MD VA", "FL": "AL GA", "GA": "AL FL NC SC TN", "ID": "MT NV OR UT WA WY",
    "IL": "IN IA KY MO WI", "IN": "IL KY MI OH", "IA": "IL MN MO NE SD WI",
    "KS": "CO MO NE OK", "KY": "IL IN MO OH TN VA WV", "LA": "AR MS TX", "ME": "NH",
    "MD": "DE PA VA WV DC", "MA": "CT NH NY RI VT", "MI": "IN OH WI", "MN": "IA ND SD WI",
    "MS": "AL AR LA TN", "MO": "AR IL IA KS KY NE OK TN", "MT": "ID ND SD WY",
    "NE": "CO IA KS MO SD WY", "NV": "AZ CA ID OR UT", "NH": "ME MA VT",
    "NJ": "DE NY PA", "NM": "AZ CO OK TX", "NY": "CT MA NJ PA VT", "NC": "GA SC TN VA",
    "ND": "MN MT SD", "OH": "IN KY MI PA WV", "OK": "AR CO KS MO NM TX",
    "OR": "CA ID NV WA", "PA": "DE MD NJ NY OH WV", "RI": "CT MA", "SC": "GA NC",
    "SD": "IA MN MT ND NE WY", "TN": "AL AR GA KY MS MO NC VA", "TX": "AR LA NM OK",
    "UT": "AZ CO ID NV WY", "VT": "MA NH NY", "VA": "KY MD NC TN WV DC",
    "WA": "ID OR", "WV": "KY MD OH PA VA", "WI": "IL IA MI MN", "WY": "CO ID MT NE SD UT",
}
FULL_NAMES = {
    "AL": "Alabama", "AZ": "Arizona", "AR": "Arkansas", "CA": "California", "CO": "Colorado",
    "CT": "Connecticut", "DE": "Delaware", "DC": "District of Columbia", "FL": "Florida",
    "GA": "Georgia", "ID": "Idaho", "IL": "Illinois", "IN": "Indiana", "IA": "Iowa",
    "KS": "Kansas", "KY": "Kentucky", "LA": "Louisiana", "ME": "Maine", "MD": "Maryland",
    "MA": "Massachusetts", "MI": "Michigan", "MN": "Minnesota", "MS": "Mississippi",
    "MO": "Missouri", "MT": "Montana", "NE": "Nebraska", "NV": "Nevada",
    "NH": "New Hampshire", "NJ": "New Jersey", "NM": "New Mexico", "NY": "New York",
    "NC": "North Carolina", "ND": "North Dakota", "OH": "Ohio", "OK": "Oklahoma",
    "OR": "Oregon", "PA": "Pennsylvania", "RI": "Rhode Island", "SC": "South Carolina",
    "SD": "South Dakota", "TN": "Tennessee", "TX": "Texas", "UT": "Utah", "VT": "Vermont",
    "VA": "Virginia", "WA": "Washington", "WV": "West Virginia", "WI": "Wisconsin",
    "WY": "Wyoming",
}


def write_adjacency():
    edges = set()
    for a, others in ADJACENCY.items():
        for b in others.split():
            if a not in ADJACENCY[b].split():
                raise SystemExit(f"asymmetric edge {a}-{b}")
            edges.add(tuple(sorted((FULL_NAMES[a], FULL_NAMES[b]))))
    lines = ["unit_a,unit_b"] + [f"{a},{b}" for a, b in sorted(edges)]
    (HERE / "us_adjacency.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    write_state_panel()
    write_group_panel()
    write_adjacency()
