"""Reproducible random walks on <T_A, T_B> and their aggregate statistics.

Each trajectory draws its increments from its own PCG64 stream seeded with
``SeedSequence([seed, traj_index])``, so results do not depend on how
trajectories are scheduled.  The walk position is tracked twice: as a reduced
word (authoritative for classification) and as a scaled matrix (for
displacement and stretch factors).
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import mpmath
import numpy as np

from . import hypgeom as hg
from .construction import ThurstonRep
from .errors import InputError, MeasureError
from .words import (
    AbelianImage,
    ElementClass,
    Word,
    WordBuffer,
    abelianize,
    classify_element,
    parse_word,
    word_norm,
)


class BadProbabilitySum(MeasureError):
    pass


class EmptySupport(MeasureError):
    pass


class UnreducedAtom(MeasureError):
    pass


class ExplicitlyUnsupported(MeasureError):
    pass


class InsufficientTrajectories(InputError):
    pass


class NonElementarityUnverified(UserWarning):
    """No pair of pseudo-Anosov products with disjoint fixed points was found."""


PROB_SUM_TOL = 1e-9
FIXED_POINT_SEPARATION = 1e-6


@dataclass(frozen=True)
class MeasureSpec:
    atoms: tuple[tuple[Word, float], ...]

    @property
    def words(self) -> list[Word]:
        return [w for w, _ in self.atoms]

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms], dtype=float)

    @classmethod
    def from_dict(cls, obj) -> "MeasureSpec":
        if not isinstance(obj, dict) or "atoms" not in obj:
            raise InputError('measure must be an object with an "atoms" list')
        atoms = obj["atoms"]
        if not isinstance(atoms, list):
            raise ExplicitlyUnsupported("only finitely supported measures given as a list of atoms are supported")
        out = []
        for atom in atoms:
            try:
                text, prob = atom["word"], float(atom["prob"])
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"malformed atom {atom!r}") from exc
            w = parse_word(text)
            if len(text.strip()) != word_norm(w):
                raise UnreducedAtom(f"atom {text!r} is not a reduced word")
            out.append((w, prob))
        return cls(tuple(out))

    @classmethod
    def from_mapping(cls, mapping: dict[str, float]) -> "MeasureSpec":
        return cls.from_dict({"atoms": [{"word": k, "prob": v} for k, v in mapping.items()]})

    @classmethod
    def load(cls, path) -> "MeasureSpec":
        try:
            obj = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read measure file {path}: {exc}") from exc
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        return {"atoms": [{"word": str(w), "prob": p} for w, p in self.atoms]}


def uniform_measure() -> MeasureSpec:
    """Simple random walk: 1/4 on each of a, a^-1, b, b^-1."""
    return MeasureSpec.from_mapping({"a": 0.25, "A": 0.25, "b": 0.25, "B": 0.25})


def _products(words: Sequence[Word], max_len: int) -> Iterator[Word]:
    for k in range(1, max_len + 1):
        for combo in itertools.product(words, repeat=k):
            w = combo[0]
            for x in combo[1:]:
                w = w * x
            yield w


def find_nonelementary_witness(spec: MeasureSpec, rep: ThurstonRep, max_len: int = 3):
    """Two pseudo-Anosov products of at most ``max_len`` atoms with disjoint fixed points."""
    found: list[tuple[Word, tuple[float, ...]]] = []
    seen = set()
    for w in _products(spec.words, max_len):
        if w.syllables in seen:
            continue
        seen.add(w.syllables)
        if classify_element(w, rep.mu_is_four) is not ElementClass.PSEUDO_ANOSOV:
            continue
        g = hg.rep_of_word(rep, w)
        if hg.classify_matrix(g) is not hg.IsomClass.HYPERBOLIC:
            continue
        pts = hg.fixed_points(g)
        for other, other_pts in found:
            if all(hg.boundary_separation(x, y) >= FIXED_POINT_SEPARATION for x in pts for y in other_pts):
                return other, w
        found.append((w, pts))
    return None


def validate_measure(spec: MeasureSpec, rep: ThurstonRep) -> tuple[MeasureSpec, list[NonElementarityUnverified]]:
    """Check and normalize a finitely supported measure.

    Probabilities summing to 1 within 1e-9 are rescaled exactly onto the simplex;
    anything else raises.  Returns the normalized spec and a (possibly empty)
    list of warnings.
    """
    if not spec.atoms:
        raise EmptySupport("measure has no atoms")
    keys = [w.syllables for w in spec.words]
    if len(set(keys)) != len(keys):
        raise InputError("measure atoms must be distinct")
    probs = spec.probs
    if not np.all(np.isfinite(probs)) or (probs <= 0).any() or (probs > 1).any():
        raise BadProbabilitySum("atom probabilities must lie in (0, 1]")
    total = math.fsum(probs)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise BadProbabilitySum(f"probabilities sum to {total}, not 1")
    normalized = MeasureSpec(tuple((w, float(p / total)) for w, p in spec.atoms))
    warns = []
    if find_nonelementary_witness(normalized, rep) is None:
        warns.append(NonElementarityUnverified("no non-elementarity certificate among products of <= 3 atoms"))
    return normalized, warns


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    trajectories: int = 1
    seed: int = 0
    record_stride: int = 1

    def __post_init__(self):
        for name in ("steps", "trajectories", "record_stride"):
            if int(getattr(self, name)) < 1:
                raise InputError(f"{name} must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise InputError("seed must be a 64-bit unsigned integer")

    def recorded_steps(self) -> list[int]:
        ns = list(range(self.record_stride, self.steps + 1, self.record_stride))
        if not ns or ns[-1] != self.steps:
            ns.append(self.steps)
        return ns


@dataclass(frozen=True, slots=True)
class StepRecord:
    traj: int
    n: int
    word_norm: int
    cyclic_norm: int
    element_class: ElementClass
    log_lambda: float | None
    displacement: float
    near_parabolic: bool = False


def trajectory_rng(seed: int, traj_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(traj_index)])))


def _walk(rep: ThurstonRep, spec: MeasureSpec, config: WalkConfig, traj_index: int):
    """Yield ``(n, buffer, matrix)`` at every recorded step of one trajectory."""
    rng = trajectory_rng(config.seed, traj_index)
    probs = spec.probs
    if len(probs) == 1:
        draws = [0] * config.steps
    else:
        draws = rng.choice(len(probs), size=config.steps, p=probs).tolist()
    atom_syls = [w.syllables for w in spec.words]
    mats = [hg.rep_of_word(rep, w) for w in spec.words]
    atom_mats = [(g.a, g.b, g.c, g.d, g.log_scale) for g in mats]
    recorded = set(config.recorded_steps())

    buf = WordBuffer()
    a, b, c, d, L = 1.0, 0.0, 0.0, 1.0, 0.0
    log = math.log
    for n, k in enumerate(draws, start=1):
        buf.multiply(atom_syls[k])
        xa, xb, xc, xd, xl = atom_mats[k]
        a, b, c, d = a * xa + b * xc, a * xb + b * xd, c * xa + d * xc, c * xb + d * xd
        s = max(abs(a), abs(b), abs(c), abs(d))
        a, b, c, d = a / s, b / s, c / s, d / s
        L += xl + log(s)
        if n in recorded:
            yield n, buf, hg.ScaledMat(a, b, c, d, L)


def _record(traj: int, n: int, buf: WordBuffer, g: hg.ScaledMat, mu_is_four: bool) -> StepRecord:
    cls = buf.classify(mu_is_four)
    log_lambda = None
    near_parabolic = False
    if cls is ElementClass.PSEUDO_ANOSOV:
        if hg.classify_matrix(g) is hg.IsomClass.HYPERBOLIC:
            log_lambda = hg.log_stretch_factor(g)
        else:
            # word says pseudo-Anosov, trace within tolerance of 2
            log_lambda, near_parabolic = 0.0, True
    return StepRecord(
        traj=traj,
        n=n,
        word_norm=buf.norm,
        cyclic_norm=buf.cyclic_norm(),
        element_class=cls,
        log_lambda=log_lambda,
        displacement=hg.teich_displacement(g),
        near_parabolic=near_parabolic,
    )


def sample_trajectory(rep: ThurstonRep, spec: MeasureSpec, config: WalkConfig, traj_index: int) -> list[StepRecord]:
    return [_record(traj_index, n, buf, g, rep.mu_is_four) for n, buf, g in _walk(rep, spec, config, traj_index)]


def trajectory_words(rep: ThurstonRep, spec: MeasureSpec, config: WalkConfig, traj_index: int) -> list[Word]:
    """Positions omega_n at the recorded steps, as words (same stream as the records)."""
    return [buf.to_word() for _, buf, _ in _walk(rep, spec, config, traj_index)]


def _trajectory_job(args):
    return sample_trajectory(*args)


def run_walk(
    rep: ThurstonRep, spec: MeasureSpec, config: WalkConfig, threads: int = 1
) -> list[StepRecord]:
    """All trajectories, flattened in trajectory-index order."""
    jobs = [(rep, spec, config, t) for t in range(config.trajectories)]
    if threads <= 1 or config.trajectories == 1:
        results = [_trajectory_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_trajectory_job, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    return [r for traj in results for r in traj]


# -- aggregation ---------------------------------------------------------------


def _by_traj(records: Iterable[StepRecord]) -> dict[int, list[StepRecord]]:
    out: dict[int, list[StepRecord]] = {}
    for r in sorted(records, key=lambda r: (r.traj, r.n)):
        out.setdefault(r.traj, []).append(r)
    return out


def _at_step(records: Iterable[StepRecord], n: int) -> list[StepRecord]:
    return sorted((r for r in records if r.n == n), key=lambda r: r.traj)


@dataclass(frozen=True)
class DriftEstimate:
    value: float
    std_error: float
    n_used: int
    trajectories_used: int


def drift_estimate(records: Sequence[StepRecord], n: int | None = None) -> DriftEstimate:
    """Mean of displacement(n)/n over trajectories, at the final step by default."""
    records = list(records)
    if n is None:
        n = max(r.n for r in records)
    rows = _at_step(records, n)
    if len(rows) < 2:
        raise InsufficientTrajectories("drift estimate needs at least two trajectories")
    x = np.array([r.displacement / n for r in rows])
    return DriftEstimate(float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x))), n, len(x))


@dataclass(frozen=True)
class FKPoint:
    n: int
    mean_n: float
    running_min: float


def fk_upper_bounds(records: Sequence[StepRecord]) -> list[FKPoint]:
    """(1/n) E log||omega_n|| per recorded n, with its running minimum.

    By subadditivity the infimum over n is the Furstenberg-Kesten limit, so
    the running minimum is an upper-bound estimate for the drift.
    """
    grouped = _by_traj(records)
    if len(grouped) < 2:
        raise InsufficientTrajectories("need at least two trajectories")
    per_n: dict[int, list[float]] = {}
    for rows in grouped.values():
        for r in rows:
            per_n.setdefault(r.n, []).append(r.displacement)
    out = []
    best = math.inf
    for n in sorted(per_n):
        mean_n = float(np.mean(per_n[n])) / n
        best = min(best, mean_n)
        out.append(FKPoint(n, mean_n, best))
    return out


@dataclass(frozen=True)
class SpectralRow:
    n: int
    fraction_pa: float
    mean_abs_deviation: float  # nan when no trajectory is pseudo-Anosov at n


def spectral_report(records: Sequence[StepRecord], drift: float) -> list[SpectralRow]:
    per_n: dict[int, list[StepRecord]] = {}
    for r in records:
        per_n.setdefault(r.n, []).append(r)
    out = []
    for n in sorted(per_n):
        rows = per_n[n]
        pa = sorted(
            (r for r in rows if r.element_class is ElementClass.PSEUDO_ANOSOV), key=lambda r: r.traj
        )
        dev = float(np.mean([abs(r.log_lambda / n - drift) for r in pa])) if pa else math.nan
        out.append(SpectralRow(n, len(pa) / len(rows), dev))
    return out


def last_non_pa(trajectory: Sequence[StepRecord]) -> int:
    """Largest recorded n at which the walk is not pseudo-Anosov (0 if none)."""
    bad = [r.n for r in trajectory if r.element_class is not ElementClass.PSEUDO_ANOSOV]
    return max(bad, default=0)


def last_non_pa_by_traj(records: Sequence[StepRecord]) -> dict[int, int]:
    return {t: last_non_pa(rows) for t, rows in _by_traj(records).items()}


def bers_violations(
    rep: ThurstonRep, spec: MeasureSpec, config: WalkConfig, records: Sequence[StepRecord], rtol: float = 1e-9
) -> list[StepRecord]:
    """Pseudo-Anosov records with log_lambda > displacement.

    Equality holds whenever the axis of omega_n passes through the base
    point, so double-precision values can be one ulp on the wrong side.
    Records within ``rtol`` of a tie are re-evaluated from the position word
    in high precision and kept only if the inequality really fails there.
    """
    suspects = [
        r for r in records
        if r.element_class is ElementClass.PSEUDO_ANOSOV and not r.near_parabolic and r.log_lambda > r.displacement
    ]
    out = []
    steps = config.recorded_steps()
    words_by_traj: dict[int, list[Word]] = {}
    for r in suspects:
        if r.log_lambda - r.displacement > rtol * max(1.0, r.displacement):
            out.append(r)
            continue
        if r.traj not in words_by_traj:
            words_by_traj[r.traj] = trajectory_words(rep, spec, config, r.traj)
        m = hg.hp_matrix(rep.mu, words_by_traj[r.traj][steps.index(r.n)])
        with mpmath.workdps(hg.HP_DPS):
            if hg.hp_log_stretch_factor(m) > hg.hp_displacement(m) + mpmath.mpf(10) ** -45:
                out.append(r)
    return out


def abelian_track(words: Iterable[Word]) -> list[AbelianImage]:
    return [abelianize(w) for w in words]


# -- CSV -----------------------------------------------------------------------

CSV_HEADER = ["traj", "n", "word_norm", "cyclic_norm", "class", "log_lambda", "displacement"]


def write_walk_csv(path, records: Iterable[StepRecord]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([
                r.traj,
                r.n,
                r.word_norm,
                r.cyclic_norm,
                r.element_class.value,
                "" if r.log_lambda is None else repr(r.log_lambda),
                repr(r.displacement),
            ])


def read_walk_csv(path) -> list[StepRecord]:
    out = []
    try:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != CSV_HEADER:
                raise InputError(f"unexpected walk CSV header {reader.fieldnames}")
            for row in reader:
                out.append(StepRecord(
                    traj=int(row["traj"]),
                    n=int(row["n"]),
                    word_norm=int(row["word_norm"]),
                    cyclic_norm=int(row["cyclic_norm"]),
                    element_class=ElementClass(row["class"]),
                    log_lambda=float(row["log_lambda"]) if row["log_lambda"] else None,
                    displacement=float(row["displacement"]),
                ))
    except (OSError, KeyError, ValueError) as exc:
        raise InputError(f"cannot read walk CSV {path}: {exc}") from exc
    return out
