"""Per-item utility distributions on [0, 1].

Four families are supported: Uniform, Beta, TruncatedNormal (truncated to
[0, 1] and renormalised) and DiscreteFinite. A ``DistributionSpec`` is an
immutable, validated pydantic model that serialises to ``{family, params}``;
sampling, analytic means, CDFs and density bounds are module functions that
take the spec and, where randomness is involved, an explicit caller-owned
``np.random.Generator``.
"""
import logging
import math
from enum import Enum
from typing import Any, Dict, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, stats

from .rng import SeededRng

logger = logging.getLogger(__name__)

PROBABILITY_TOLERANCE = 1e-12


class Family(str, Enum):
    """Supported distribution families."""
    UNIFORM = "uniform"
    BETA = "beta"
    TRUNCATED_NORMAL = "truncated_normal"
    DISCRETE = "discrete"


_REQUIRED_PARAMS = {
    Family.UNIFORM: ("a", "b"),
    Family.BETA: ("shape1", "shape2"),
    Family.TRUNCATED_NORMAL: ("loc", "scale"),
    Family.DISCRETE: ("support", "probs"),
}


class DistributionSpec(BaseModel):
    """
    A utility law for one item, supported on [0, 1].

    Attributes:
        family: Distribution family.
        params: Family-specific parameters:
            uniform {a, b}, beta {shape1, shape2},
            truncated_normal {loc, scale}, discrete {support, probs}.
    """
    model_config = ConfigDict(frozen=True)

    family: Family = Field(..., description="Distribution family")
    params: Dict[str, Union[float, List[float]]] = Field(..., description="Family-specific parameters")

    @model_validator(mode="after")
    def _check_params(self) -> "DistributionSpec":
        required = _REQUIRED_PARAMS[self.family]
        missing = [name for name in required if name not in self.params]
        if missing:
            raise ValueError(f"{self.family.value} spec is missing params: {', '.join(missing)}")
        unknown = sorted(set(self.params) - set(required))
        if unknown:
            raise ValueError(f"{self.family.value} spec has unknown params: {', '.join(unknown)}")

        if self.family is Family.UNIFORM:
            a, b = self._scalar("a"), self._scalar("b")
            if not (0.0 <= a < b <= 1.0):
                raise ValueError(f"uniform spec needs 0 <= a < b <= 1, got a={a}, b={b}")
        elif self.family is Family.BETA:
            for name in required:
                if not self._scalar(name) > 0.0:
                    raise ValueError(f"beta spec needs {name} > 0, got {self.params[name]}")
        elif self.family is Family.TRUNCATED_NORMAL:
            if not math.isfinite(self._scalar("loc")):
                raise ValueError("truncated_normal spec needs a finite loc")
            if not self._scalar("scale") > 0.0:
                raise ValueError(f"truncated_normal spec needs scale > 0, got {self.params['scale']}")
        else:
            support, probs = self.params["support"], self.params["probs"]
            if not isinstance(support, list) or not isinstance(probs, list):
                raise ValueError("discrete spec needs list-valued support and probs")
            if not support or len(support) != len(probs):
                raise ValueError("discrete spec needs non-empty support and probs of equal length")
            if any(not (0.0 <= v <= 1.0) for v in support):
                raise ValueError("discrete support points must lie in [0, 1]")
            if any(later <= earlier for earlier, later in zip(support, support[1:])):
                raise ValueError("discrete support points must be strictly increasing")
            if any(p < 0.0 for p in probs):
                raise ValueError("discrete probabilities must be non-negative")
            if abs(math.fsum(probs) - 1.0) > PROBABILITY_TOLERANCE:
                raise ValueError(f"discrete probabilities must sum to 1, got {math.fsum(probs)!r}")
        return self

    def _scalar(self, name: str) -> float:
        value = self.params[name]
        if isinstance(value, list):
            raise ValueError(f"{self.family.value} param {name} must be a scalar")
        return float(value)

    @classmethod
    def uniform(cls, a: float, b: float) -> "DistributionSpec":
        return cls(family=Family.UNIFORM, params={"a": a, "b": b})

    @classmethod
    def beta(cls, shape1: float, shape2: float) -> "DistributionSpec":
        return cls(family=Family.BETA, params={"shape1": shape1, "shape2": shape2})

    @classmethod
    def truncated_normal(cls, loc: float, scale: float) -> "DistributionSpec":
        return cls(family=Family.TRUNCATED_NORMAL, params={"loc": loc, "scale": scale})

    @classmethod
    def discrete(cls, support: Sequence[float], probs: Sequence[float]) -> "DistributionSpec":
        return cls(family=Family.DISCRETE, params={"support": [float(v) for v in support],
                                                   "probs": [float(p) for p in probs]})

    def scalar(self, name: str) -> float:
        """Return the scalar parameter ``name`` as a float."""
        return self._scalar(name)


class PdfBounds(BaseModel):
    """
    Density bounds over the support (probability mass bounds for discrete laws).

    ``alpha == 0`` means the law is not PDF-bounded from below, for example a
    Beta with both shapes above 1 whose density vanishes at the endpoints.
    """
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., ge=0.0)
    beta: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _ordered(self) -> "PdfBounds":
        if self.alpha > self.beta:
            raise ValueError(f"alpha {self.alpha} exceeds beta {self.beta}")
        return self


def _truncnorm(spec: DistributionSpec):
    loc, scale = spec.scalar("loc"), spec.scalar("scale")
    return stats.truncnorm((0.0 - loc) / scale, (1.0 - loc) / scale, loc=loc, scale=scale)


def _frozen(spec: DistributionSpec):
    if spec.family is Family.UNIFORM:
        a, b = spec.scalar("a"), spec.scalar("b")
        return stats.uniform(loc=a, scale=b - a)
    if spec.family is Family.BETA:
        return stats.beta(spec.scalar("shape1"), spec.scalar("shape2"))
    if spec.family is Family.TRUNCATED_NORMAL:
        return _truncnorm(spec)
    raise ValueError(f"{spec.family.value} has no continuous scipy counterpart")


def sample_many(spec: DistributionSpec, rng: SeededRng, size: int) -> np.ndarray:
    """
    Draw ``size`` independent utilities from ``spec``.

    Args:
        spec: Validated distribution spec.
        rng: Caller-owned generator; the draw is deterministic given its state.
        size: Number of draws.

    Returns:
        np.ndarray: float64 array of draws, all inside the support.
    """
    if spec.family is Family.UNIFORM:
        draws = rng.uniform(spec.scalar("a"), spec.scalar("b"), size=size)
    elif spec.family is Family.BETA:
        draws = rng.beta(spec.scalar("shape1"), spec.scalar("shape2"), size=size)
    elif spec.family is Family.TRUNCATED_NORMAL:
        draws = _truncnorm(spec).rvs(size=size, random_state=rng)
    else:
        # inverse CDF over the cumulative masses
        draws = rng.choice(np.asarray(spec.params["support"], dtype=np.float64), size=size,
                           p=np.asarray(spec.params["probs"], dtype=np.float64))
    return np.clip(np.asarray(draws, dtype=np.float64), 0.0, 1.0)


def sample(spec: DistributionSpec, rng: SeededRng) -> float:
    """Draw a single utility from ``spec``."""
    return float(sample_many(spec, rng, 1)[0])


def cdf(spec: DistributionSpec, x: Union[float, np.ndarray]) -> np.ndarray:
    """Analytic cumulative distribution function evaluated at ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if spec.family is Family.DISCRETE:
        support = np.asarray(spec.params["support"], dtype=np.float64)
        cumulative = np.concatenate([[0.0], np.cumsum(spec.params["probs"])])
        return cumulative[np.searchsorted(support, x, side="right")]
    return _frozen(spec).cdf(x)


def mean(spec: DistributionSpec) -> float:
    """
    Mean of ``spec``.

    Exact for Uniform, Beta and DiscreteFinite; the truncated normal mean is
    integrated numerically over the renormalised density on [0, 1].
    """
    if spec.family is Family.UNIFORM:
        return (spec.scalar("a") + spec.scalar("b")) / 2.0
    if spec.family is Family.BETA:
        shape1, shape2 = spec.scalar("shape1"), spec.scalar("shape2")
        return shape1 / (shape1 + shape2)
    if spec.family is Family.TRUNCATED_NORMAL:
        dist = _truncnorm(spec)
        value, _ = integrate.quad(lambda x: x * dist.pdf(x), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=200)
        return float(value)
    return math.fsum(v * p for v, p in zip(spec.params["support"], spec.params["probs"]))


def _beta_density_bounds(shape1: float, shape2: float) -> PdfBounds:
    def endpoint_limit(own: float, other: float) -> float:
        if own < 1.0:
            return math.inf
        if own == 1.0:
            # 1 / B(1, other) == other
            return other
        return 0.0

    candidates_low = [endpoint_limit(shape1, shape2), endpoint_limit(shape2, shape1)]
    candidates_high = list(candidates_low)
    if (shape1 - 1.0) * (shape2 - 1.0) > 0.0:
        mode = (shape1 - 1.0) / (shape1 + shape2 - 2.0)
        interior = float(stats.beta.pdf(mode, shape1, shape2))
        if shape1 > 1.0:
            candidates_high.append(interior)
        else:
            candidates_low.append(interior)
    return PdfBounds(alpha=min(candidates_low), beta=max(candidates_high))


def pdf_bounds(spec: DistributionSpec) -> PdfBounds:
    """
    Lower and upper density bounds over the support.

    Args:
        spec: Validated distribution spec.

    Returns:
        PdfBounds: ``(alpha, beta)``; for DiscreteFinite the min/max point mass.
    """
    if spec.family is Family.UNIFORM:
        density = 1.0 / (spec.scalar("b") - spec.scalar("a"))
        return PdfBounds(alpha=density, beta=density)
    if spec.family is Family.BETA:
        return _beta_density_bounds(spec.scalar("shape1"), spec.scalar("shape2"))
    if spec.family is Family.TRUNCATED_NORMAL:
        dist = _truncnorm(spec)
        peak = float(dist.pdf(min(max(spec.scalar("loc"), 0.0), 1.0)))
        trough = float(min(dist.pdf(0.0), dist.pdf(1.0)))
        return PdfBounds(alpha=trough, beta=peak)
    probs = spec.params["probs"]
    return PdfBounds(alpha=float(min(probs)), beta=float(max(probs)))


def has_atom_at_one(spec: DistributionSpec) -> bool:
    """True when ``spec`` is DiscreteFinite and puts positive mass on the value 1."""
    if spec.family is not Family.DISCRETE:
        return False
    support: List[Any] = spec.params["support"]
    return support[-1] == 1.0 and spec.params["probs"][-1] > 0.0
