"""How the product-ansatz truncation error scales with the expansion order.

The group element e^{A+B} is approximated by an ordered product of
exponentials whose correction factors are built from nested commutators.
Keeping corrections through order r leaves an error O(s^{r+1}) when both
generators are scaled by s.  This script fits those slopes numerically
for the minimal non-commuting pair (X, Z), then shows the same mechanism
improving a product-formula step: appending the leading correction to a
single Trotter step at fixed t upgrades the error from O(1/m) to
O(1/m^2).
"""

from cartansim import AlgebraElement, run_scaling_check, truncation_slope

a = AlgebraElement.from_label_dict({"X": 1.0})
b = AlgebraElement.from_label_dict({"Z": 1.0})

print("truncation error of the order-r product, generators scaled by s:")
print(f"{'order':>5} {'fitted slope':>12} {'expected':>8}")
for order in (1, 2, 3, 4):
    rep = truncation_slope(a, b, order)
    slope = "saturated" if rep.saturated else f"{rep.slope:12.3f}"
    print(f"{order:>5} {slope:>12} {order + 1:>8}")

print("\nsample of the raw (s, error) points behind the order-2 fit:")
rep = truncation_slope(a, b, 2)
for s, err in rep.points[:: max(1, len(rep.points) // 5)]:
    print(f"  s = {s:8.1e}   error = {err:8.2e}")

out = run_scaling_check(a, b, output_dir="runs/scaling")
tr = out["trotter"]
print(f"\nproduct formula at t = {tr['t']}, m steps:")
print(f"{'m':>3} {'plain step':>12} {'corrected':>12}")
for m, e_plain, e_corr in zip(tr["ms"], tr["uncorrected"], tr["corrected"]):
    print(f"{m:>3} {e_plain:>12.3e} {e_corr:>12.3e}")
print(f"fitted slopes in 1/m: plain {tr['slope_uncorrected']:.3f}, "
      f"corrected {tr['slope_corrected']:.3f}")
print("artifacts: runs/scaling/scaling.csv, runs/scaling/scaling.json")
