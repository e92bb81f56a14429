"""Which form degrees admit a hypoelliptic Kohn or horizontal Laplacian, and what the counting constants are.

Run: python3 demos/hypoellipticity_tables.py
"""
from heisenspec.cli import weyl_table
from heisenspec.io import emit_table
from heisenspec.levi import GeometryParams, condition_X, condition_Y, kohn_mu_spectrum, y_witness_band

print("Kohn Laplacian on (0,q)-forms: Y(q) holds unless q is kappa or n - kappa")
for n in range(1, 5):
    for kappa in range(n // 2 + 1):
        g = GeometryParams(n, kappa)
        row = []
        for q in range(n + 1):
            band = y_witness_band(g, q)
            row.append("ok " if band is None else "-- ")
        print(f"  n={n} kappa={kappa}: q=0..{n}: {''.join(row)}")

g = GeometryParams(3, 1)
print("\nmu-values of the Kohn Laplacian for n=3, kappa=1 (a value of modulus n means failure):")
for q in range(4):
    print(f"  q={q}: {kohn_mu_spectrum(g, q).values.tolist()}  Y={condition_Y(g, q)}")

print("\nHorizontal forms on a 7-dimensional contact manifold (n=3): X(k) fails for n <= k <= d-n")
print("  " + " ".join(f"k={k}:{'ok' if condition_X(6, 3, k) else '--'}" for k in range(7)))

print("\nCounting constants gamma_{2k} (the k = n row has no constant):")
records, excluded = weyl_table("gamma", 2)
print(emit_table(records, "csv", excluded, ["n", "k"]).decode())
