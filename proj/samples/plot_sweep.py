"""Plot a cavdd sweep CSV: cavity coupling against the free-space value.

    cavdd preset fig2a --out fig2a.csv
    python3 samples/plot_sweep.py fig2a.csv --out fig2a.png
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv")
    ap.add_argument("--out", default=None, help="image file (default: CSV name with .png)")
    ap.add_argument("--term", default="0,1,1,0", help="u,v,a,b of the term to plot")
    args = ap.parse_args()

    meta = []
    with open(args.csv) as f:
        for line in f:
            if not line.startswith("#"):
                break
            meta.append(line[1:].strip())
    df = pd.read_csv(args.csv, comment="#")

    u, v, a, b = (int(x) for x in args.term.split(","))
    if all(c in df.columns for c in "uvab"):
        df = df[(df.u == u) & (df.v == v) & (df.a == a) & (df.b == b)]
    if df.empty:
        raise SystemExit(f"no rows for term {args.term}")

    direction = "21" if "v21" in df.columns else "12"
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(df.sweep_value, df[f"v{direction}"], label="cavity")
    if f"vw{direction}_free" in df.columns:
        ax.plot(df.sweep_value, df[f"vw{direction}_free"], "--", label="free space")
    if f"v{direction}_mode" in df.columns:
        ax.plot(df.sweep_value, df[f"v{direction}_mode"], ":", label="mode part")
    sweep = next((m for m in meta if m.startswith("sweep ")), "sweep")
    ax.set_xlabel(sweep.replace("sweep ", ""))
    ax.set_ylabel("V")
    ax.set_yscale("symlog", linthresh=1.0)
    ax.legend()
    title = next((m for m in meta if m.startswith("preset")), None)
    if title:
        ax.set_title(title.split(":")[0])
    fig.tight_layout()
    fig.savefig(args.out or args.csv.rsplit(".", 1)[0] + ".png", dpi=150)


if __name__ == "__main__":
    main()
