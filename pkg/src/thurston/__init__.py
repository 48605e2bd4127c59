"""Random walks and stretch factors in Thurston's construction.

Two multicurves A, B with intersection matrix N generate a subgroup
<T_A, T_B> of the mapping class group.  Thurston's representation sends it
into PSL(2, R), where pseudo-Anosov classes become hyperbolic matrices whose
eigenvalues are the stretch factors.
"""

__version__ = "0.1.0"
