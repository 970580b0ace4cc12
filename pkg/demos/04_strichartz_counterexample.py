"""A traveling wave that defeats the L^4 Strichartz bound.

K_rho(y) = 1/(y + i rho) has only positive frequencies, so the half-wave
flow just slides it along; its L^4 norm never disperses.  Tensored with a
Gaussian in x, the space-time L^4 norm stays of size rho^{-3/4} while the
H^{s/2} norm grows like rho^{-(1+s)/2}.  Their ratio therefore grows like
rho^{-(1/4 - s/2)} and blows up as rho -> 0 whenever s < 1/2.
"""

from hwlab import illposedness as ip

rhos = (0.2, 0.1, 0.05)
print("rho    ||K||_2^2 * rho/pi   ||K||_4^4 * 2 rho^3/pi")
for rho in rhos:
    l2, l4 = ip.k_rho_lebesgue(rho)
    print(f"{rho:<6} {l2 * rho / 3.141592653589793:.5f}              {l4 * 2 * rho**3 / 3.141592653589793:.6f}")

print()
for s in (0.3, 0.5):
    rep = ip.strichartz_failure(rhos, s)
    ratios = ", ".join(f"{r.ratio:.4f}" for r in rep.rows)
    print(f"s={s}: ratios {ratios}; slope {rep.slope:.4f} (predicted {rep.predicted:.3f})")
