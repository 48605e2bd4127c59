"""When do two multitwists generate a free group?

Walks through a handful of intersection matrices, printing mu, the
configuration-graph shape and both freeness tests.
"""

from thurston.construction import (
    IntersectionData,
    build_representation,
    config_graph,
    dynkin_recognize,
    leininger_is_free,
    suff_free_check,
)

# A single pair of curves meeting once spans a path with two vertices, so the
# twists satisfy a braid relation.  Meeting twice gives a double edge.
examples = {
    "meet once": IntersectionData([[1]]),
    "meet twice": IntersectionData([[2]]),
    "two copies of each, meeting once": IntersectionData([[1]], [2], [2]),
    "path on 4 curves": IntersectionData([[1, 1], [1, 0]]),
    "fork D5": IntersectionData([[1, 1, 1], [0, 0, 1]]),
    "4-cycle": IntersectionData([[1, 1], [1, 1]]),
    "triangular": IntersectionData([[1, 2], [0, 1]]),
}

print(f"{'data':36s} {'mu':>8s}  {'shape':14s} free  ping-pong")
for name, data in examples.items():
    rep = build_representation(data)
    shape = dynkin_recognize(config_graph(data))
    print(f"{name:36s} {rep.mu:8.4f}  {str(shape):14s} {leininger_is_free(data)!s:5s} {suff_free_check(data)}")

# mu >= 4 exactly when the graph is not one of the Dynkin trees, and mu = 4
# is decided by an exact determinant, which switches on the extra excluded
# family <T_A T_B> in the word classifier.
rep = build_representation(IntersectionData([[2]]))
print("\nmu_is_four for N = [[2]]:", rep.mu_is_four)
print("rho(T_A) =", rep.mat_a.tolist(), " rho(T_B) =", rep.mat_b.tolist())
