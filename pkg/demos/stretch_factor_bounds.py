"""Stretch factors against the bounds |phi|^(1/4) <= lambda <= exp(K |phi|)."""

import math

from thurston import bounds
from thurston import hypgeom as hg
from thurston.construction import ThurstonRep
from thurston.words import cyclic_norm, parse_word

for mu in (4.0, 9.0):
    rep = ThurstonRep.from_mu(mu)
    K = bounds.k_constant(mu)
    print(f"\nmu = {mu}: K = {K:.6f}, displacement of rho(T_A) = {hg.teich_displacement(hg.rep_of_word(rep, parse_word('a'))):.6f}")
    for text in ("aB", "aBaB", "abAB", "aabAB", "abbbAAB"):
        r = bounds.audit_element(rep, parse_word(text))
        print(f"  {text:8s} |phi|={r.cyclic_norm:2d}  {r.lower_bound:.4f} <= {r.log_lambda:.4f} <= {r.upper_bound:.4f}")

# a b^-1 sits on the upper bound: its matrix is symmetric, so the axis passes
# through the base point and both generators push along it
rep = ThurstonRep.from_mu(4.0)
w = parse_word("aB")
ll = hg.log_stretch_factor(hg.rep_of_word(rep, w))
print("\nSalem window for lambda(aB):", bounds.salem_power_window(ll, w, rep))
print("Salem window for sqrt(lambda(aB)):", bounds.salem_power_window(ll / 2, w, rep))

audit = bounds.audit_corpus(ThurstonRep.from_mu(9.0), 2000, seed=0)
print("\ncorpus at mu = 9:", audit.summary())
print("ratio ceiling K =", bounds.k_constant(9.0), " floor of log lambda / log|phi|:",
      min(r.log_lambda / math.log(r.cyclic_norm) for r in audit.reports if r.cyclic_norm > 1))
