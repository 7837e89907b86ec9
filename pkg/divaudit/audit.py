"""
Triangle-inequality audits of powered divergences.

A :class:`TriangleCertificate` stores a triple of distributions together with
the three powered divergences d12, d23, d13; ``margin = d13 - d12 - d23 > 0``
witnesses that ``D**alpha`` is not a metric.

Two deterministic constructions search a one-parameter family for a witness:

- multinomial: the binary triple (P_{1/2-t}, P_{1/2}, P_{1/2+t}) under the
  Jensen-Shannon divergence (bits), optionally lifted into a larger simplex;
- cauchy: the scale triple ((0, e^-t), (0, 1), (0, e^t)) under a smooth
  generator.

``random_audit`` complements them with seeded random triples of interior
points.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .cauchy import CauchyParams, F_cauchy, f_div_cauchy, scale_triple
from .distributions import EMBED_EPS, Multinomial, binary_point, embed, make_multinomial, random_simplex
from .divergences import LN2, batch_kernel, jsd, jsd_rows
from .exceptions import DomainError, NumericalError, SearchFailure
from .generator import GeneratorBase, get_generator
from .protocols import PairMeasure

logger = logging.getLogger(__name__)

FAMILIES = ("multinomial", "cauchy")

# recomputed d-values must match the stored ones this closely
VERIFY_TOL = 1e-12

# random_audit counts a triple as violating only above this slack
VIOLATION_SLACK = 1e-12

EMBED_MAX_RETRIES = 40
AUDIT_CHUNK_SIZE = 4096

Point = Union[Multinomial, CauchyParams]


# ------------------------------------------------------------------------------------------------
# Configuration and certificates
# ------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class SearchConfig:
    """Parameters of the grid-then-refine search over the family parameter t.

    Attributes:
        t_min, t_max: Search interval.
        grid_size: Number of geometrically spaced grid points.
        refine_tol: Absolute tolerance on t for the golden-section refinement.
        margin_floor: Smallest margin accepted as a violation.
    """

    t_min: float = 1e-6
    t_max: float = 0.49
    grid_size: int = 256
    refine_tol: float = 1e-9
    margin_floor: float = 1e-10

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max) or not math.isfinite(self.t_max):
            raise DomainError(f"need 0 < t_min < t_max; got t_min={self.t_min!r}, t_max={self.t_max!r}")
        if self.grid_size < 8:
            raise DomainError(f"grid_size must be at least 8; got {self.grid_size!r}")
        if not self.refine_tol > 0:
            raise DomainError(f"refine_tol must be positive; got {self.refine_tol!r}")
        if not self.margin_floor >= 0:
            raise DomainError(f"margin_floor must be non-negative; got {self.margin_floor!r}")

    @classmethod
    def multinomial(cls, **overrides) -> SearchConfig:
        return cls(**{"t_min": 1e-6, "t_max": 0.49, "grid_size": 256, **overrides})

    @classmethod
    def cauchy(cls, **overrides) -> SearchConfig:
        return cls(**{"t_min": 1e-6, "t_max": 5.0, "grid_size": 48, "refine_tol": 1e-7, **overrides})

    def grid(self) -> np.ndarray:
        return np.geomspace(self.t_min, self.t_max, self.grid_size)


@dataclass(frozen=True)
class TriangleCertificate:
    """A triple with d13 > d12 + d23 for d = D**alpha.

    ``generator`` names the generator of a Cauchy certificate; multinomial
    certificates always use the Jensen-Shannon divergence in bits and store "js".
    """

    family: str
    points: tuple[Point, Point, Point]
    alpha: float
    d12: float
    d23: float
    d13: float
    margin: float
    generator: str = "js"
    search_meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"family must be one of {FAMILIES}; got {self.family!r}")
        if len(self.points) != 3:
            raise DomainError(f"a certificate needs exactly 3 points; got {len(self.points)}")
        p1, p2, p3 = self.points
        if p1 == p2 or p2 == p3 or p1 == p3:
            raise DomainError("certificate points must be pairwise distinct")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive; got {self.alpha!r}")

    @property
    def is_violation(self) -> bool:
        return self.margin > 0

    def recompute(self, gen: Optional[GeneratorBase] = None) -> tuple[float, float, float]:
        """(d12, d23, d13) recomputed from the stored points"""
        distance = _distance_for(self.family, gen or get_generator(self.generator))
        p1, p2, p3 = self.points
        return (
            distance(p1, p2) ** self.alpha,
            distance(p2, p3) ** self.alpha,
            distance(p1, p3) ** self.alpha,
        )

    def verify(self, tol: float = VERIFY_TOL, gen: Optional[GeneratorBase] = None) -> bool:
        """Sound iff margin > 0, margin = d13 - d12 - d23, and every d-value recomputes within ``tol``"""
        if self.margin != self.d13 - self.d12 - self.d23 or not self.margin > 0:
            return False
        recomputed = self.recompute(gen)
        stored = (self.d12, self.d23, self.d13)
        return all(abs(a - b) <= tol for a, b in zip(recomputed, stored))

    def to_json(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "points": [p.to_json() for p in self.points],
            "alpha": self.alpha,
            "d12": self.d12,
            "d23": self.d23,
            "d13": self.d13,
            "margin": self.margin,
            "generator": self.generator,
            "search_meta": dict(self.search_meta),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> TriangleCertificate:
        try:
            family = data["family"]
            if family == "multinomial":
                points = tuple(Multinomial.from_json(p) for p in data["points"])
            elif family == "cauchy":
                points = tuple(CauchyParams.from_json(p) for p in data["points"])
            else:
                raise DomainError(f"family must be one of {FAMILIES}; got {family!r}")
            return cls(
                family=family,
                points=points,
                alpha=float(data["alpha"]),
                d12=float(data["d12"]),
                d23=float(data["d23"]),
                d13=float(data["d13"]),
                margin=float(data["margin"]),
                generator=data.get("generator", "js"),
                search_meta=dict(data.get("search_meta", {})),
            )
        except (KeyError, TypeError) as e:
            raise DomainError(f"malformed certificate: {e!r}") from e


def _distance_for(family: str, gen: GeneratorBase) -> Callable[[Any, Any], float]:
    if family == "multinomial":
        return lambda P, Q: float(jsd(P, Q))
    return lambda a, b: f_div_cauchy(gen, a, b)


def _certify(
    family: str,
    points: tuple[Point, Point, Point],
    alpha: float,
    distance: Callable[[Any, Any], float],
    generator: str,
    meta: dict[str, Any],
) -> TriangleCertificate:
    p1, p2, p3 = points
    d12 = distance(p1, p2) ** alpha
    d23 = distance(p2, p3) ** alpha
    d13 = distance(p1, p3) ** alpha
    return TriangleCertificate(family, points, alpha, d12, d23, d13, d13 - d12 - d23, generator, meta)


# ------------------------------------------------------------------------------------------------
# Search
# ------------------------------------------------------------------------------------------------
def _check_alpha(alpha: float) -> None:
    if not (math.isfinite(alpha) and alpha > 0):
        raise DomainError(f"alpha must be positive; got {alpha!r}")


def _binary_triple(t: float) -> tuple[Multinomial, Multinomial, Multinomial]:
    return binary_point(0.5 - t), binary_point(0.5), binary_point(0.5 + t)


def F_multinomial(alpha: float, t: float) -> float:
    """f(t)^alpha - 2 g(t)^alpha with f(t) = JSD(P_{1/2-t}:P_{1/2+t}) and g(t) = JSD(P_{1/2-t}:P_{1/2})"""
    _check_alpha(alpha)
    if not (0 < t < 0.5):
        raise DomainError(f"t must lie in (0, 1/2); got {t!r}")
    lo, mid, hi = _binary_triple(t)
    return float(jsd(lo, hi)) ** alpha - 2 * float(jsd(lo, mid)) ** alpha


def F_multinomial_grid(alpha: float, ts: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """Vectorised ``F_multinomial`` over many t"""
    _check_alpha(alpha)
    t = np.asarray(ts, dtype=float)
    if t.ndim != 1 or not np.all((t > 0) & (t < 0.5)):
        raise DomainError("every t must lie in (0, 1/2)")
    lo = np.stack([0.5 - t, 0.5 + t], axis=1)
    mid = np.full_like(lo, 0.5)
    hi = lo[:, ::-1]
    f = jsd_rows(lo, hi) / LN2
    g = jsd_rows(lo, mid) / LN2
    return f**alpha - 2 * g**alpha


def _maximize(F: Callable[[float], float], cfg: SearchConfig, label: str) -> tuple[float, float]:
    """Grid scan, then golden-section refinement around the best grid point.

    Returns ``(t, F(t))`` for the best point seen. Points where F cannot be
    evaluated are skipped.
    """
    ts = cfg.grid()
    values = np.empty_like(ts)
    for i, t in enumerate(ts):
        try:
            values[i] = F(float(t))
        except NumericalError as e:
            logger.warning("%s: skipping t=%r (%s)", label, float(t), e)
            values[i] = -math.inf

    i = int(np.argmax(values))
    best_t, best_F = float(ts[i]), float(values[i])
    logger.debug("%s: grid max F=%.6g at t=%.6g", label, best_F, best_t)
    if not math.isfinite(best_F):
        return best_t, best_F

    lo, hi = float(ts[max(i - 1, 0)]), float(ts[min(i + 1, len(ts) - 1)])
    res = minimize_scalar(lambda t: -F(t), bounds=(lo, hi), method="bounded", options={"xatol": cfg.refine_tol})
    logger.debug("%s: refined on [%.6g, %.6g] to t=%.6g, F=%.6g", label, lo, hi, res.x, -res.fun)
    if res.success and -res.fun > best_F:
        return float(res.x), float(-res.fun)
    return best_t, best_F


def find_jsd_violation(alpha: float, cfg: Optional[SearchConfig] = None, n: int = 2) -> TriangleCertificate:
    """Certificate that JSD**alpha violates the triangle inequality.

    Args:
        alpha: Exponent; violations exist for every alpha > 1/2.
        cfg: Search configuration, ``SearchConfig.multinomial()`` by default.
        n: Simplex size. For n >= 3 the binary triple is lifted with ``embed``,
            halving eps from ``EMBED_EPS`` until the lifted margin clears the floor.

    Raises:
        SearchFailure: No t in the search interval has F(t) > margin_floor.
    """
    _check_alpha(alpha)
    cfg = cfg or SearchConfig.multinomial()
    if cfg.t_max >= 0.5:
        raise DomainError(f"t_max must be below 1/2 for the multinomial family; got {cfg.t_max!r}")
    if n < 2:
        raise DomainError(f"n must be at least 2; got {n!r}")

    t, best = _maximize(lambda t: F_multinomial(alpha, t), cfg, f"jsd^{alpha}")
    if not best > cfg.margin_floor:
        raise SearchFailure(
            f"no violation of JSD^{alpha} found on t in [{cfg.t_min}, {cfg.t_max}]", max_margin=best, t_at_max=t
        )

    distance = _distance_for("multinomial", get_generator("js"))
    meta: dict[str, Any] = {"t": t, "grid_size": cfg.grid_size, "refine_tol": cfg.refine_tol}
    cert = _certify("multinomial", _binary_triple(t), alpha, distance, "js", meta)
    if n == 2:
        logger.info("JSD^%s violated at t=%.6g with margin %.6g", alpha, t, cert.margin)
        return cert

    eps = EMBED_EPS
    for _ in range(EMBED_MAX_RETRIES):
        points = tuple(embed(P, n, eps) for P in cert.points)
        lifted = _certify("multinomial", points, alpha, distance, "js", {**meta, "n": n, "eps": eps})
        if lifted.margin > cfg.margin_floor:
            logger.info("JSD^%s violated in dimension %d at t=%.6g, eps=%.3g, margin %.6g", alpha, n, t, eps, lifted.margin)
            return lifted
        eps /= 2
    raise SearchFailure(
        f"embedded margin stayed below {cfg.margin_floor} after {EMBED_MAX_RETRIES} retries",
        max_margin=lifted.margin,
        t_at_max=t,
    )


def find_cauchy_violation(
    gen: GeneratorBase, alpha: float, cfg: Optional[SearchConfig] = None
) -> TriangleCertificate:
    """Certificate on the scale triple ((0, e^-t), (0, 1), (0, e^t)) that D_f**alpha is not a metric.

    The generator must be C^2 around 1 with f''(1) > 0.
    """
    _check_alpha(alpha)
    if not gen.smooth_at_1:
        raise DomainError(f"generator {gen.name!r} is not C^2 around 1")
    if not gen.curvature_at_1 > 0:
        raise DomainError(f"generator {gen.name!r} needs f''(1) > 0; got {gen.curvature_at_1!r}")
    cfg = cfg or SearchConfig.cauchy()

    t, best = _maximize(lambda t: F_cauchy(gen, alpha, t), cfg, f"cauchy {gen.name}^{alpha}")
    if not best > cfg.margin_floor:
        raise SearchFailure(
            f"no violation of D_{gen.name}^{alpha} found on t in [{cfg.t_min}, {cfg.t_max}]",
            max_margin=best,
            t_at_max=t,
        )

    meta = {"t": t, "grid_size": cfg.grid_size, "refine_tol": cfg.refine_tol}
    cert = _certify("cauchy", scale_triple(t), alpha, _distance_for("cauchy", gen), gen.name, meta)
    if not cert.margin > cfg.margin_floor:
        raise SearchFailure(
            f"margin {cert.margin!r} at t={t!r} did not survive recomputation", max_margin=cert.margin, t_at_max=t
        )
    logger.info("D_%s^%s violated at t=%.6g with margin %.6g", gen.name, alpha, t, cert.margin)
    return cert


def amplify_certificate(cert: TriangleCertificate, beta: float) -> TriangleCertificate:
    """Certificate for exponent alpha*beta on the same triple.

    For x, y >= 0 and beta >= 1, x^beta + y^beta <= (x + y)^beta, so
    d13 > d12 + d23 implies d13^beta > d12^beta + d23^beta.
    """
    if not (math.isfinite(beta) and beta >= 1):
        raise DomainError(f"beta must be at least 1; got {beta!r}")
    if not cert.is_violation:
        raise DomainError(f"can only amplify a violation; margin is {cert.margin!r}")
    if beta == 1:
        return cert
    d12, d23, d13 = cert.d12**beta, cert.d23**beta, cert.d13**beta
    meta = {**cert.search_meta, "amplified_from": cert.alpha, "beta": beta}
    return replace(cert, alpha=cert.alpha * beta, d12=d12, d23=d23, d13=d13, margin=d13 - d12 - d23, search_meta=meta)


# ------------------------------------------------------------------------------------------------
# Random audit
# ------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class AuditReport:
    measure: str
    alpha: float
    seed: int
    num_triples: int
    violations: int
    worst_margin: float
    worst_triple: tuple[Multinomial, Multinomial, Multinomial]

    def to_json(self) -> dict[str, Any]:
        return {
            "measure": self.measure,
            "alpha": self.alpha,
            "seed": self.seed,
            "num_triples": self.num_triples,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "worst_triple": [P.to_json() for P in self.worst_triple],
        }


def _pairwise(measure: Callable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    kernel = batch_kernel(measure)
    if kernel is not None:
        return kernel(a, b)
    return np.array([float(measure(make_multinomial(p), make_multinomial(q))) for p, q in zip(a, b)])


def _audit_chunk(
    measure: Callable, alpha: float, n: int, size: int, seq: np.random.SeedSequence
) -> tuple[int, float, np.ndarray]:
    rng = np.random.default_rng(seq)
    x, y, z = (random_simplex(rng, n, size) for _ in range(3))
    dxy = _pairwise(measure, x, y) ** alpha
    dyz = _pairwise(measure, y, z) ** alpha
    dxz = _pairwise(measure, x, z) ** alpha
    # each side against the sum of the other two
    margins = np.max(np.stack([dxz - dxy - dyz, dxy - dxz - dyz, dyz - dxy - dxz]), axis=0)
    i = int(np.argmax(margins))
    return int(np.count_nonzero(margins > VIOLATION_SLACK)), float(margins[i]), np.stack([x[i], y[i], z[i]])


def random_audit(
    divergence: PairMeasure,
    alpha: float,
    num_triples: int,
    seed: int,
    n: int = 3,
    workers: int = 1,
) -> AuditReport:
    """Count triangle violations of ``divergence**alpha`` on uniformly random interior triples.

    Triples are drawn in fixed-size chunks, each from its own sub-stream of
    ``SeedSequence(seed)``, so the report does not depend on ``workers``.
    Registered measures are evaluated row-vectorised; any other callable is
    called once per pair.
    """
    if not isinstance(divergence, PairMeasure):
        raise DomainError(f"divergence must be callable on two multinomials; got {divergence!r}")
    _check_alpha(alpha)
    if num_triples < 1:
        raise DomainError(f"num_triples must be at least 1; got {num_triples!r}")
    if workers < 1:
        raise DomainError(f"workers must be at least 1; got {workers!r}")

    sizes = [AUDIT_CHUNK_SIZE] * (num_triples // AUDIT_CHUNK_SIZE)
    if num_triples % AUDIT_CHUNK_SIZE:
        sizes.append(num_triples % AUDIT_CHUNK_SIZE)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))

    def run(k: int):
        return _audit_chunk(divergence, alpha, n, sizes[k], seqs[k])

    if workers == 1:
        results = [run(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(sizes))))

    violations = sum(r[0] for r in results)
    k = max(range(len(results)), key=lambda j: results[j][1])
    worst_margin, worst_rows = results[k][1], results[k][2]
    name = getattr(divergence, "__name__", type(divergence).__name__)
    logger.info("random audit of %s^%s: %d/%d violations, worst margin %.3g", name, alpha, violations, num_triples, worst_margin)
    return AuditReport(
        measure=name,
        alpha=alpha,
        seed=seed,
        num_triples=num_triples,
        violations=violations,
        worst_margin=worst_margin,
        worst_triple=tuple(make_multinomial(row) for row in worst_rows),
    )
