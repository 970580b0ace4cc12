"""Which Sobolev index can the ladder reach?

The ladder closes when five linear inequalities in (s, sigma', sigma, nu)
hold for some gamma in (0, 1).  For each gamma we minimize s over the
polytope, then minimize over gamma.  The optimum sits where four of the five
constraints are tight, and along that vertex s(gamma) = (1 - g + g^2)/(1 + g),
which is smallest at g = sqrt(3) - 1.
"""

from hwlab import exponents as ex

coarse = ex.scan(0.05)
print("gamma    s        sigma'   sigma    nu      tight")
for t in coarse[::2]:
    print(f"{t.gamma:.3f}  {t.s:.5f}  {t.sigma_p:.5f}  {t.sigma:.5f}  {t.nu:.5f}  {t.active}")

best = ex.optimize_over_gamma(1e-4)
exact = ex.analytic_optimum()
print()
print(f"grid optimum   gamma={best.gamma:.4f}  s={best.s:.8f}")
print(f"closed form    gamma={exact.gamma:.8f}  s={exact.s:.8f}")
print(f"LP at gamma*   s={ex.minimize_s(exact.gamma).s:.12f}")
print(f"margin below 13/28: {13 / 28 - exact.s:.2e}")
