"""A tour of the exact Pauli-string algebra.

Strings are stored as (x, z) bit masks, so products, commutators, and
trace inner products are integer bit manipulations -- no matrices, no
floating-point error.  This script multiplies and brackets a few
strings, builds weighted sums, and cross-checks one bracket against a
dense kron computation.
"""

import numpy as np

from cartansim import (
    AlgebraElement,
    bracket,
    bracket_strings,
    commutes,
    hs_inner,
    parse_label,
    pauli_mul,
    to_dense,
)

# -- single strings ----------------------------------------------------------

p = parse_label("XZY")
q = parse_label("ZII")
print(f"p = {p.label}   q = {q.label}")

rho, r = pauli_mul(p, q)
print(f"p * q = i^{rho} * {r.label}")

print(f"commute? {commutes(p, q)}")
c, out = bracket_strings(p, q)
print(f"bb(p, q) = -i[p, q] = {c:+g} * {out.label}")

partner = parse_label("YYI")
print(f"{p.label} and {partner.label} commute? {commutes(p, partner)}"
      f" -> bracket {bracket_strings(p, partner)}")

# -- weighted sums -----------------------------------------------------------

h = AlgebraElement.from_label_dict({"XX": 1.0, "ZI": 1.0, "IZ": 1.0})
field = AlgebraElement.from_label_dict({"ZI": 0.5, "IZ": -0.5})
print(f"\nH        = {h}")
print(f"H + f    = {h + field}")
print(f"bb(H, f) = {bracket(h, field)}")
print(f"<H, H>   = {hs_inner(h, h):g}  (= 2^n * sum of squared coefficients)")

# -- the same bracket, the slow dense way -------------------------------------

a, b = to_dense(h), to_dense(field)
dense_bracket = -1j * (a @ b - b @ a)
algebra_bracket = to_dense(bracket(h, field))
print(f"\ndense cross-check: max deviation "
      f"{np.max(np.abs(dense_bracket - algebra_bracket)):.2e}")
