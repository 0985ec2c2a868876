#!/usr/bin/env python3
"""Write a synthetic quarterly macro panel in raw levels.

The columns carry the mnemonics understood by the S, M and L presets, so the
file can stand in for a real quarterly database extract. Series are driven by
three persistent latent factors with heavy-tailed shocks and one large
crisis-style outlier quarter.
"""

import argparse
import csv

import numpy as np

# mnemonic -> (transformation code, level or starting value)
SERIES = {
    "GDPC1": (5, 3500.0),
    "PCECC96": (5, 2200.0),
    "FPIx": (5, 450.0),
    "GCEC1": (5, 1000.0),
    "INDPRO": (5, 25.0),
    "CUMFNS": (1, 82.0),
    "PAYEMS": (5, 54000.0),
    "CE16OV": (5, 65000.0),
    "UNRATE": (2, 5.5),
    "AWHMAN": (1, 40.0),
    "CES0600000007": (2, 40.5),
    "CLAIMSx": (5, 300000.0),
    "GDPCTPI": (6, 17.0),
    "CPIAUCSL": (6, 29.5),
    "PPIACO": (6, 31.0),
    "WPSID61": (6, 30.0),
    "WPSID62": (6, 28.0),
    "COMPRNFB": (5, 40.0),
    "ULCNFB": (5, 20.0),
    "CES0600000008": (6, 2.3),
    "FEDFUNDS": (2, 3.5),
    "BAA10YM": (1, 0.9),
    "GS10TB3Mx": (1, 1.2),
    "CPF3MTB3Mx": (1, 0.3),
    "M2REAL": (5, 1400.0),
    "BUSLOANSx": (5, 400.0),
    "CONSUMERx": (5, 300.0),
    "S.P.500": (5, 58.0),
}


def quarters(start_year, end_year, end_quarter):
    out = []
    for y in range(start_year, end_year + 1):
        for q in range(1, 5):
            if y == end_year and q > end_quarter:
                break
            out.append(f"{y}-{3 * q - 2:02d}-01")
    return out


def simulate(dates, seed):
    rng = np.random.default_rng(seed)
    t = len(dates)
    # Factors: real activity, inflation, financial conditions.
    phi = np.array([[0.6, 0.0, -0.1], [0.05, 0.9, 0.0], [0.1, 0.0, 0.7]])
    f = np.zeros((t, 3))
    for i in range(1, t):
        shock = rng.standard_t(4, size=3) * np.array([0.6, 0.25, 0.5])
        f[i] = phi @ f[i - 1] + shock
    crisis = dates.index("2020-04-01") if "2020-04-01" in dates else None
    if crisis is not None:
        f[crisis, 0] -= 8.0
        f[crisis + 1, 0] += 6.0

    loadings = {}
    for name in SERIES:
        loadings[name] = rng.normal(0.0, 1.0, size=3)
    loadings["GDPC1"] = np.array([1.0, 0.0, 0.2])
    loadings["UNRATE"] = np.array([-0.4, 0.0, -0.1])
    loadings["CPIAUCSL"] = np.array([0.1, 1.0, 0.0])
    loadings["FEDFUNDS"] = np.array([0.3, 0.8, 0.1])

    table = {}
    for name, (code, start) in SERIES.items():
        lam = loadings[name]
        common = f @ lam
        noise = rng.normal(0.0, 0.3, size=t)
        if code == 5:
            growth = 0.005 + 0.006 * (common + noise)
            table[name] = start * np.exp(np.cumsum(growth))
        elif code == 6:
            inflation = 0.008 + 0.004 * (f[:, 1] + 0.3 * noise)
            table[name] = start * np.exp(np.cumsum(inflation))
        elif code == 2:
            table[name] = start + np.cumsum(0.15 * (common + noise - common.mean()))
        else:
            table[name] = start + 0.5 * common + 0.2 * noise
    # Keep the unemployment rate and policy rate in plausible ranges.
    table["UNRATE"] = np.clip(table["UNRATE"] - table["UNRATE"].mean() + 6.0, 2.5, 15.0)
    table["FEDFUNDS"] = np.clip(table["FEDFUNDS"] - table["FEDFUNDS"].min() + 0.1, 0.05, 20.0)
    return table


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="data/macro_quarterly.csv")
    parser.add_argument("--seed", type=int, default=20220401)
    args = parser.parse_args()

    dates = quarters(1960, 2022, 1)
    table = simulate(dates, args.seed)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date"] + list(SERIES))
        for i, d in enumerate(dates):
            w.writerow([d] + [f"{table[n][i]:.6f}" for n in SERIES])


if __name__ == "__main__":
    main()
