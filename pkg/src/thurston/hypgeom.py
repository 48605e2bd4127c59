"""Overflow-free SL(2, R) products and hyperbolic-plane geometry.

A :class:`ScaledMat` represents ``exp(log_scale) * m`` where ``m`` has largest
absolute entry 1.  Long cocycle products grow like ``exp(c n)`` and overflow
doubles after a few hundred steps, so the scale lives in its own accumulator.

Distances are reported in Teichmueller units: the displacement of the base
point ``i`` under ``g`` is ``log ||g||_op``, half the curvature -1 hyperbolic
distance.  With that convention the translation length of a hyperbolic ``g``
equals ``log`` of its largest eigenvalue.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .construction import ThurstonRep
from .errors import MathPreconditionError
from .words import ElementClass, Word, random_reduced_word

PARABOLIC_TOL = 1e-6

# Largest observed |translation_length_estimate - log_stretch_factor| over the
# calibration corpus estimate_corpus(20240601, 100_000): words of length <= 100
# at mu in {4, 9}, hyperbolic with log_stretch_factor >= 1.  Regenerate with
# demos/calibrate_translation_constant.py.
TRANSLATION_ESTIMATE_C = 0.029012291147460623


class NotHyperbolic(MathPreconditionError):
    pass


class IdentityInput(MathPreconditionError):
    pass


class ClassifierDisagreement(MathPreconditionError):
    pass


class IsomClass(str, enum.Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True, slots=True)
class ScaledMat:
    a: float
    b: float
    c: float
    d: float
    log_scale: float = 0.0

    @classmethod
    def from_matrix(cls, m, log_scale: float = 0.0) -> "ScaledMat":
        (a, b), (c, d) = np.asarray(m, dtype=float).tolist()
        return _normalized(a, b, c, d, log_scale)

    @property
    def m(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def to_array(self) -> np.ndarray:
        """The represented matrix; raises OverflowError for huge scales."""
        return math.exp(self.log_scale) * self.m

    def __matmul__(self, other: "ScaledMat") -> "ScaledMat":
        return mat_mul(self, other)


IDENTITY = ScaledMat(1.0, 0.0, 0.0, 1.0, 0.0)


def _normalized(a: float, b: float, c: float, d: float, log_scale: float) -> ScaledMat:
    s = max(abs(a), abs(b), abs(c), abs(d))
    if s == 0.0:
        return ScaledMat(0.0, 0.0, 0.0, 0.0, 0.0)
    if s == 1.0:
        return ScaledMat(a, b, c, d, log_scale)
    return ScaledMat(a / s, b / s, c / s, d / s, log_scale + math.log(s))


def mat_mul(x: ScaledMat, y: ScaledMat) -> ScaledMat:
    return _normalized(
        x.a * y.a + x.b * y.c,
        x.a * y.b + x.b * y.d,
        x.c * y.a + x.d * y.c,
        x.c * y.b + x.d * y.d,
        x.log_scale + y.log_scale,
    )


def mat_inverse(x: ScaledMat) -> ScaledMat:
    """Inverse of a determinant-one matrix via its adjugate (scale unchanged)."""
    return ScaledMat(x.d, -x.b, -x.c, x.a, x.log_scale)


def syllable_matrix(rep: ThurstonRep, base: str, exp: int) -> ScaledMat:
    """rho(T_A^exp) or rho(T_B^exp), both unipotent shears."""
    t = exp * rep.sqrt_mu
    if base == "a":
        return _normalized(1.0, -t, 0.0, 1.0, 0.0)
    return _normalized(1.0, 0.0, t, 1.0, 0.0)


def rep_of_word(rep: ThurstonRep, w: Word) -> ScaledMat:
    g = IDENTITY
    for base, exp in w.syllables:
        g = mat_mul(g, syllable_matrix(rep, base, exp))
    return g


def trace_abs(g: ScaledMat) -> float:
    """log |tr g| (``-inf`` for trace zero)."""
    t = abs(g.a + g.d)
    return g.log_scale + math.log(t) if t > 0 else -math.inf


def _abs_trace(g: ScaledMat) -> float:
    lt = trace_abs(g)
    return math.exp(lt) if lt < 700 else math.inf


def is_plus_minus_identity(g: ScaledMat, tol: float = PARABOLIC_TOL) -> bool:
    if g.log_scale > 1.0:
        return False
    s = math.exp(g.log_scale)
    a, b, c, d = s * g.a, s * g.b, s * g.c, s * g.d
    if abs(b) > tol or abs(c) > tol:
        return False
    return (abs(a - 1) <= tol and abs(d - 1) <= tol) or (abs(a + 1) <= tol and abs(d + 1) <= tol)


def classify_matrix(g: ScaledMat, tol: float = PARABOLIC_TOL) -> IsomClass:
    if is_plus_minus_identity(g, tol):
        return IsomClass.IDENTITY
    t = _abs_trace(g)
    if t < 2.0 - tol:
        return IsomClass.ELLIPTIC
    if t > 2.0 + tol:
        return IsomClass.HYPERBOLIC
    return IsomClass.PARABOLIC


def log_stretch_factor(g: ScaledMat, tol: float = PARABOLIC_TOL) -> float:
    """log of the larger eigenvalue (|tr| + sqrt(tr^2 - 4)) / 2 of a hyperbolic g."""
    if classify_matrix(g, tol) is not IsomClass.HYPERBOLIC:
        raise NotHyperbolic("matrix is not hyperbolic")
    return _log_lambda_from_log_trace(trace_abs(g))


def _log_lambda_from_log_trace(lt: float) -> float:
    u = 4.0 * math.exp(-2.0 * lt)  # 4 / tr^2 < 1
    return lt + math.log1p(math.sqrt(max(0.0, 1.0 - u))) - math.log(2.0)


def teich_displacement(g: ScaledMat) -> float:
    """log ||g||_op, using ||g||^2 + ||g||^-2 = ||g||_F^2 for det g = 1."""
    f2 = g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d
    lx = 2.0 * g.log_scale + math.log(f2 / 2.0)  # log(F^2 / 2)
    if lx <= 0.0:
        return 0.0
    # 0.5 * arccosh(x) = 0.5 * (log x + log(1 + sqrt(1 - x^-2)))
    return 0.5 * (lx + math.log1p(math.sqrt(-math.expm1(-2.0 * lx))))


def gromov_product(g: ScaledMat, h: ScaledMat) -> float:
    """(g.o | h.o)_o at the base point, in Teichmueller units."""
    cross = teich_displacement(mat_mul(mat_inverse(g), h))
    return 0.5 * (teich_displacement(g) + teich_displacement(h) - cross)


def translation_length_estimate(g: ScaledMat) -> float:
    """Maher-Tiozzo style estimate d(o, g o) - 2 (g o | g^-1 o)_o, clipped at 0."""
    gi = mat_inverse(g)
    return max(0.0, teich_displacement(g) - 2.0 * gromov_product(g, gi))


def fixed_points(g: ScaledMat, tol: float = PARABOLIC_TOL) -> tuple[float, ...]:
    """Fixed points on the boundary R u {inf} of the upper half plane.

    Solves ``c z^2 + (d - a) z - b = 0``; ``math.inf`` stands for the point at
    infinity.  Hyperbolic elements give two points, parabolic one, elliptic none.
    """
    kind = classify_matrix(g, tol)
    if kind is IsomClass.IDENTITY:
        raise IdentityInput("the identity fixes every boundary point")
    if kind is IsomClass.ELLIPTIC:
        return ()
    a, b, c, d = g.a, g.b, g.c, g.d
    if abs(c) < 1e-14:
        if kind is IsomClass.PARABOLIC:
            return (math.inf,)
        return (b / (d - a), math.inf)
    if kind is IsomClass.PARABOLIC:
        return ((a - d) / (2.0 * c),)
    disc = math.sqrt(max(0.0, (d - a) ** 2 + 4.0 * b * c))
    z1 = ((a - d) - disc) / (2.0 * c)
    z2 = ((a - d) + disc) / (2.0 * c)
    return tuple(sorted((z1, z2)))


def boundary_separation(x: float, y: float) -> float:
    """Distance between boundary points, measured on the circle via arctan."""
    def angle(z):
        return math.pi / 2 if math.isinf(z) else math.atan(z)
    diff = abs(angle(x) - angle(y))
    return min(diff, math.pi - diff)


_EXPECTED = {
    ElementClass.IDENTITY: IsomClass.IDENTITY,
    ElementClass.CONJ_A: IsomClass.PARABOLIC,
    ElementClass.CONJ_B: IsomClass.PARABOLIC,
    ElementClass.CONJ_AB: IsomClass.PARABOLIC,
    ElementClass.PSEUDO_ANOSOV: IsomClass.HYPERBOLIC,
}


def expected_matrix_class(cls: ElementClass) -> IsomClass:
    """Isometry type that a free-group element class must have under rho."""
    return _EXPECTED[cls]


def check_coherence(cls: ElementClass, g: ScaledMat, tol: float = PARABOLIC_TOL) -> IsomClass:
    """Raise :class:`ClassifierDisagreement` unless word and matrix types agree."""
    kind = classify_matrix(g, tol)
    if kind is not _EXPECTED[cls]:
        raise ClassifierDisagreement(f"word class {cls.value} but matrix is {kind.value}")
    return kind


HP_DPS = 60


def hp_matrix(mu: float, w: Word) -> "mpmath.matrix":
    """rho(w) evaluated with ``HP_DPS`` significant digits."""
    with mpmath.workdps(HP_DPS):
        s = mpmath.sqrt(mpmath.mpf(mu))
        m = mpmath.eye(2)
        for base, exp in w.syllables:
            t = exp * s
            m = m * (mpmath.matrix([[1, -t], [0, 1]]) if base == "a" else mpmath.matrix([[1, 0], [t, 1]]))
        return m


def hp_log_stretch_factor(m) -> "mpmath.mpf":
    with mpmath.workdps(HP_DPS):
        t = abs(m[0, 0] + m[1, 1])
        return mpmath.log((t + mpmath.sqrt(t * t - 4)) / 2)


def hp_displacement(m) -> "mpmath.mpf":
    with mpmath.workdps(HP_DPS):
        f2 = sum(m[i, j] ** 2 for i in range(2) for j in range(2))
        return mpmath.acosh(f2 / 2) / 2


def estimate_corpus(seed: int, count: int, mus=(4.0, 9.0), max_len: int = 100, min_log_lambda: float = 1.0):
    """Yield ``(word, mu, log_lambda, estimate)`` for ``count`` hyperbolic elements.

    Word ``i`` uses its own stream ``SeedSequence([seed, i])``, has a uniform
    length in [1, max_len] and is evaluated at ``mus[i % len(mus)]``.  Words
    whose image is not hyperbolic with ``log_lambda >= min_log_lambda`` are
    skipped.
    """
    reps = [ThurstonRep.from_mu(mu) for mu in mus]
    found = index = 0
    while found < count:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), index])))
        rep = reps[index % len(reps)]
        index += 1
        w = random_reduced_word(rng, int(rng.integers(1, max_len + 1)))
        g = rep_of_word(rep, w)
        if classify_matrix(g) is not IsomClass.HYPERBOLIC:
            continue
        ll = log_stretch_factor(g)
        if ll < min_log_lambda:
            continue
        found += 1
        yield w, rep.mu, ll, translation_length_estimate(g)
