"""Count eigenvalues of the sublaplacian on the Heisenberg nilmanifold and compare with the Weyl law.

With ``--write-csv`` the counting functions go to ``counting_N<size>.csv``
(eigenvalue, count) in the working directory, ready for plotting.
Run: python3 demos/nilmanifold_weyl_law.py [--write-csv]
"""
import csv
import sys

from heisenspec.nilmanifold import nilcheck

report = nilcheck((24, 32, 48), (10.0, 65.0))
print("N   eigenvalues  exponent  constant(free)  constant(exponent 2)")
for N, cnt, f in zip(report.sizes, report.counts, report.fits):
    print(f"{N:<3} {cnt:>11}  {f.exponent:8.4f}  {f.constant:14.6f}  {f.fixed_constant:20.6f}")
print(f"\nextrapolated to N -> infinity: {report.fixed.limit:.6f} (free slope: {report.free.limit:.6f})")
for name, value in report.candidates.items():
    print(f"  {name:<12} predicts {value:.6f}; deviation {report.deviations[name]:.1%}")
print(f"adopted prefactor: {report.adopted}")

if "--write-csv" in sys.argv:
    for N, sample in zip(report.sizes, report.samples):
        with open(f"counting_N{N}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eigenvalue", "count"])
            w.writerows((f"{lam:.12g}", i + 1) for i, lam in enumerate(sample.eigenvalues))
