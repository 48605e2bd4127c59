"""Closed-form stretch-factor bounds, the Salem power window, volume bound.

For pseudo-Anosov phi in <T_A, T_B> with cyclically reduced length |phi|:

    log lambda <= K |phi|,          K = log((sqrt(mu) + sqrt(4 + mu)) / 2)
    log lambda >= (1/4) log |phi|   (when <T_A, T_B> is free)

The upper bound is attained (e.g. by every power of a b^-1), so comparisons
that land within rounding distance of equality are re-evaluated in 60-digit
arithmetic before a pass/fail flag is set.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import hypgeom as hg
from .construction import ThurstonRep
from .errors import InputError, MathPreconditionError
from .words import ElementClass, Word, classify_element, cyclic_norm, cyclic_reduce, random_reduced_word


class MuBelowFour(MathPreconditionError):
    pass


class NotPseudoAnosov(MathPreconditionError):
    pass


class NonpositiveSalemLog(InputError):
    pass


class GenusBelowTwo(InputError):
    pass


_TIE_RTOL = 1e-9


def k_constant(mu: float) -> float:
    """Displacement of a generator twist at the base point, log((sqrt(mu)+sqrt(4+mu))/2)."""
    if mu < 4:
        raise MuBelowFour(f"mu = {mu} < 4; <T_A, T_B> cannot be free")
    return math.log((math.sqrt(mu) + math.sqrt(4.0 + mu)) / 2.0)


def _hp_log_lambda_and_k(mu: float, core: Word) -> tuple[mpmath.mpf, mpmath.mpf]:
    with mpmath.workdps(hg.HP_DPS):
        log_lambda = hg.hp_log_stretch_factor(hg.hp_matrix(mu, core))
        s = mpmath.sqrt(mpmath.mpf(mu))
        return log_lambda, mpmath.log((s + mpmath.sqrt(4 + mpmath.mpf(mu))) / 2)


@dataclass(frozen=True)
class BoundReport:
    word: Word
    cyclic_norm: int
    log_lambda: float
    lower_bound: float | None
    upper_bound: float
    pass_lower: bool | None
    pass_upper: bool


def audit_element(rep: ThurstonRep, w: Word, free_group: bool = True) -> BoundReport:
    """Check both stretch-factor bounds for a pseudo-Anosov word.

    The lower bound is only asserted under ``free_group``; otherwise the
    corresponding fields are ``None``.
    """
    if classify_element(w, rep.mu_is_four) is not ElementClass.PSEUDO_ANOSOV:
        raise NotPseudoAnosov(f"{w} is not pseudo-Anosov")
    core, _ = cyclic_reduce(w)
    n = cyclic_norm(w)
    K = k_constant(rep.mu)
    log_lambda = hg.log_stretch_factor(hg.rep_of_word(rep, core))
    upper = K * n
    lower = 0.25 * math.log(n) if free_group else None

    pass_upper = log_lambda <= upper
    pass_lower = None if lower is None else lower <= log_lambda
    near_upper = abs(log_lambda - upper) <= _TIE_RTOL * max(1.0, upper)
    near_lower = lower is not None and abs(log_lambda - lower) <= _TIE_RTOL * max(1.0, lower)
    if near_upper or near_lower:
        hp_lambda, hp_k = _hp_log_lambda_and_k(rep.mu, core)
        with mpmath.workdps(hg.HP_DPS):
            if near_upper:
                pass_upper = bool(hp_lambda <= hp_k * n + mpmath.mpf(10) ** -45)
            if near_lower:
                pass_lower = bool(mpmath.log(n) / 4 <= hp_lambda + mpmath.mpf(10) ** -45)
    return BoundReport(w, n, log_lambda, lower, upper, pass_lower, pass_upper)


@dataclass(frozen=True)
class SalemWindow:
    k_min: float | None
    k_max: float

    def contains(self, k: float, rtol: float = 1e-12) -> bool:
        """Membership up to a relative rounding slack.

        The upper end is attained exactly by elements such as a b^-1, where
        the computed ``k_max`` can land one ulp below the true power.
        """
        lo = 0.0 if self.k_min is None else self.k_min
        return lo * (1 - rtol) <= k <= self.k_max * (1 + rtol)


def salem_power_window(log_salem: float, w: Word, rep: ThurstonRep, free_group: bool = True) -> SalemWindow:
    """Range of powers k for which lambda^k can be the stretch factor of ``w``.

    ``k_max = K |w| / log lambda`` always; ``k_min = log|w| / (4 log lambda)``
    only when the group is free.
    """
    if not log_salem > 0:
        raise NonpositiveSalemLog("log of a Salem number must be positive")
    if classify_element(w, rep.mu_is_four) is not ElementClass.PSEUDO_ANOSOV:
        raise NotPseudoAnosov(f"{w} is not pseudo-Anosov")
    n = cyclic_norm(w)
    k_max = k_constant(rep.mu) * n / log_salem
    k_min = math.log(n) / (4.0 * log_salem) if free_group else None
    return SalemWindow(k_min, k_max)


def volume_upper_bound(genus: int, entropy: float) -> float:
    """Kojima-McShane bound -3 pi chi(S) h = 3 pi (2g - 2) h."""
    if genus < 2:
        raise GenusBelowTwo("genus must be at least 2")
    if entropy < 0:
        raise InputError("entropy must be nonnegative")
    return 3.0 * math.pi * (2 * genus - 2) * entropy


@dataclass
class CorpusAudit:
    reports: list[BoundReport] = field(repr=False)
    violations: list[BoundReport]
    sampled: int

    @property
    def ratios(self) -> np.ndarray:
        """log lambda / |phi| for every audited word."""
        return np.array([r.log_lambda / r.cyclic_norm for r in self.reports])

    def summary(self) -> dict:
        r = self.ratios
        return {
            "audited": len(self.reports),
            "sampled": self.sampled,
            "violations": len(self.violations),
            "ratio_min": float(r.min()) if len(r) else None,
            "ratio_mean": float(r.mean()) if len(r) else None,
            "ratio_max": float(r.max()) if len(r) else None,
        }


def corpus_word(seed: int, index: int, max_len: int) -> Word:
    """The ``index``-th corpus word: uniform length in [1, max_len], uniform reduced word."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))
    length = int(rng.integers(1, max_len + 1))
    return random_reduced_word(rng, length)


def audit_corpus(
    rep: ThurstonRep, count: int, seed: int, max_len: int = 200, free_group: bool = True
) -> CorpusAudit:
    """Audit ``count`` pseudo-Anosov words drawn with :func:`corpus_word`.

    Words that are not pseudo-Anosov are skipped; sampling continues until
    ``count`` words have been audited.
    """
    reports, violations = [], []
    index = 0
    while len(reports) < count:
        w = corpus_word(seed, index, max_len)
        index += 1
        if classify_element(w, rep.mu_is_four) is not ElementClass.PSEUDO_ANOSOV:
            continue
        r = audit_element(rep, w, free_group)
        reports.append(r)
        if not r.pass_upper or r.pass_lower is False:
            violations.append(r)
    return CorpusAudit(reports, violations, index)


AUDIT_HEADER = ["word", "cyclic_norm", "log_lambda", "lower", "upper", "pass_lower", "pass_upper"]


def write_audit_csv(path, reports) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(AUDIT_HEADER)
        for r in reports:
            writer.writerow([
                str(r.word),
                r.cyclic_norm,
                repr(r.log_lambda),
                "" if r.lower_bound is None else repr(r.lower_bound),
                repr(r.upper_bound),
                "" if r.pass_lower is None else str(r.pass_lower).lower(),
                str(r.pass_upper).lower(),
            ])
