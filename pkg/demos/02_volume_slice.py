"""Slice scans: v along the line alpha = (t, 2g - t).

For n = 2 the weight space is one-dimensional, which makes the sign and
wall structure easy to see.  (-1)^g v is nonnegative on the whole slice
and v vanishes (to second order) at the integer wall t = 1, ..., 2g-1.
"""

from fractions import Fraction

from flatvol import WeightVector, evaluate, scan

print("genus 1, slice (t, 2-t), 19 samples:")
print(f"{'t':>6} {'v':>12} {'volhat':>12} flag")
for row in scan(1, steps=19):
    vh = f"{row.volhat:.6f}" if row.volhat is not None else ""
    print(f"{str(row.t):>6} {str(row.value):>12} {vh:>12} {row.flag}")

# closed form on (0, 1): v(t, 2-t) = -t (1-t)^2 / 24, mirrored on (1, 2)
print("\nclosed-form check at t = 1/3:")
t = Fraction(1, 3)
v = evaluate(WeightVector(1, (t, 2 - t))).value
print("  engine:", v, " formula:", -t * (1 - t) ** 2 / 24)

print("\ngenus 2, slice (t, 4-t), 11 samples; (-1)^2 v >= 0 throughout:")
print(f"{'t':>6} {'v':>22} {'volhat':>12}")
for row in scan(2, steps=11):
    vh = f"{row.volhat:.6f}" if row.volhat is not None else ""
    print(f"{str(row.t):>6} {str(row.value):>22} {vh:>12}")

# near a wall v drops quadratically, so volhat (which divides by q ~ eps)
# stays bounded while both factors vanish
print("\nquadratic vanishing at the genus-1 wall t = 1:")
for eps in (Fraction(1, 10), Fraction(1, 40), Fraction(1, 160)):
    v = evaluate(WeightVector(1, (1 + eps, 1 - eps))).value
    print(f"  eps={str(eps):>6}: |v|/eps^2 = {abs(v) / eps**2}")
