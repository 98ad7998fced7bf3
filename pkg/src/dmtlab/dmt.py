"""Analytic diversity-multiplexing tradeoffs.

Everything here is a pure function of its arguments. Diversity orders are
plain floats; an unbounded diversity order is ``math.inf`` (exported as
:data:`UNBOUNDED`), which compares greater than every finite value.

The baseline building block is :func:`g_closed`, the tradeoff of a coherent
no-feedback link whose power grows as ``SNR**p``. Feedback schemes stack it:
``b_star`` iterates it over the quantized power ladder and
``d_noisy_quantized`` solves the max-min problem for a noisy feedback link.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeError

UNBOUNDED = math.inf

# Relative slack when checking r against p*min(m, n); curve construction
# evaluates exactly on the endpoint.
_EDGE_RTOL = 1e-12

BISECTION_TOL = 1e-12


@dataclass(frozen=True)
class AntennaConfig:
    """Transmit (``m``) and receive (``n``) antenna counts."""

    m: int
    n: int

    def __post_init__(self):
        for name in ("m", "n"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise DomainError(f"{name} must be a positive integer, got {value!r}")

    @property
    def min_mn(self) -> int:
        return min(self.m, self.n)

    @property
    def max_mn(self) -> int:
        return max(self.m, self.n)

    @property
    def mn(self) -> int:
        return self.m * self.n


@dataclass(frozen=True)
class OverheadConfig:
    """Fading-block length ``L`` and the channel uses ``tau`` spent on training."""

    L: int
    tau: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise DomainError(f"block length L must be positive, got {self.L}")
        if self.tau < 0:
            raise DomainError(f"training slots tau must be nonnegative, got {self.tau}")


class CaseKind(str, enum.Enum):
    """The ten channel-knowledge/feedback models.

    ``hat`` on the receiver side means the receiver is trained over a noisy
    channel; ``tq`` is quantized (FDD) feedback and ``tc`` is reverse-link
    training (TDD); a trailing ``hat`` means that feedback is noisy.
    """

    CSIR = "csir"
    CSIR_HAT = "csir-hat"
    CSIR_TQ = "csir-tq"
    CSIR_HAT_TQ = "csir-hat-tq"
    CSIR_TQ_HAT = "csir-tq-hat"
    CSIR_HAT_TQ_HAT = "csir-hat-tq-hat"
    CSIR_TC = "csir-tc"
    CSIR_HAT_TC = "csir-hat-tc"
    CSIR_TC_HAT = "csir-tc-hat"
    CSIR_HAT_TC_HAT = "csir-hat-tc-hat"

    @property
    def min_k(self) -> int | None:
        """Smallest admissible number of feedback levels, or None if K is unused."""
        return _MIN_K.get(self)

    @property
    def duplex(self) -> str:
        if self in (CaseKind.CSIR, CaseKind.CSIR_HAT):
            return "none"
        return "fdd" if "tq" in self.value else "tdd"


_MIN_K = {
    CaseKind.CSIR_TQ: 1,
    CaseKind.CSIR_HAT_TQ: 2,
    CaseKind.CSIR_TQ_HAT: 2,
    CaseKind.CSIR_HAT_TQ_HAT: 2,
}

CHARACTERISTICS = {
    CaseKind.CSIR: "receiver knows channel; no feedback",
    CaseKind.CSIR_HAT: "receiver trained; no feedback",
    CaseKind.CSIR_TQ: "receiver knows channel; noiseless quantized feedback",
    CaseKind.CSIR_HAT_TQ: "receiver trained; noiseless quantized feedback",
    CaseKind.CSIR_TQ_HAT: "receiver knows channel; noisy quantized feedback",
    CaseKind.CSIR_HAT_TQ_HAT: "receiver trained; noisy quantized feedback",
    CaseKind.CSIR_TC: "receiver knows channel; noiseless reverse training",
    CaseKind.CSIR_HAT_TC: "receiver trained; noiseless reverse training",
    CaseKind.CSIR_TC_HAT: "receiver knows channel; noisy reverse training",
    CaseKind.CSIR_HAT_TC_HAT: "receiver trained; noisy reverse training",
}


@dataclass(frozen=True)
class FeedbackCase:
    """A case tag plus its number of feedback levels ``K`` where one applies."""

    kind: CaseKind
    K: int | None = None

    def __post_init__(self):
        kind = CaseKind(self.kind)
        object.__setattr__(self, "kind", kind)
        min_k = kind.min_k
        if min_k is None:
            # K carries no meaning for these cases; normalize it away.
            object.__setattr__(self, "K", None)
            return
        if self.K is None:
            raise DomainError(f"case {kind.value} needs a number of feedback levels K")
        if self.K < min_k:
            raise DomainError(f"case {kind.value} needs K >= {min_k}, got K={self.K}")

    @classmethod
    def parse(cls, name: str, K: int | None = None) -> FeedbackCase:
        try:
            kind = CaseKind(name)
        except ValueError:
            known = ", ".join(k.value for k in CaseKind)
            raise ValueError(f"unknown case {name!r}; expected one of: {known}") from None
        return cls(kind, K)

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def bounded(self) -> bool:
        return self.kind not in (CaseKind.CSIR_TC, CaseKind.CSIR_HAT_TC, CaseKind.CSIR_TC_HAT)


def _check_r(r: float, cfg: AntennaConfig) -> float:
    r = float(r)
    if not (0.0 <= r < cfg.min_mn):
        raise DomainError(f"multiplexing gain must satisfy 0 <= r < min(m,n) = {cfg.min_mn}, got r={r}")
    return r


def g_closed(r: float, p: float, cfg: AntennaConfig) -> float:
    """Tradeoff of a no-feedback coherent link with power exponent ``p``.

    The curve is the linear interpolation of the points
    ``(k*p, p*(m-k)*(n-k))`` for ``k = 0..min(m,n)``.

    Raises:
        DomainError: if ``p <= 0`` or ``r`` lies outside ``[0, p*min(m,n)]``.
    """
    r = float(r)
    p = float(p)
    if not p > 0.0:
        raise DomainError(f"power exponent must be positive, got p={p}")
    top = p * cfg.min_mn
    if r < 0.0 or r > top * (1.0 + _EDGE_RTOL):
        raise DomainError(f"need 0 <= r <= p*min(m,n) = {top}, got r={r}")
    r = min(r, top)
    k = min(int(math.floor(r / p)), cfg.min_mn - 1)
    d = p * (cfg.m - k) * (cfg.n - k) - (r - k * p) * (cfg.m + cfg.n - 2 * k - 1)
    return max(d, 0.0)


def g_oracle(r: float, p: float, cfg: AntennaConfig, grid_points: int = 401) -> float:
    """Brute-force minimum of the weighted exponent sum over a uniform alpha grid.

    Minimizes ``sum_i (2i - 1 + max(m,n) - min(m,n)) * alpha_i`` over ordered
    vectors ``alpha_1 >= ... >= alpha_s >= 0`` drawn from ``linspace(0, p,
    grid_points)`` subject to ``sum_i (p - alpha_i)^+ <= r``. The leading
    ``s - 1`` coordinates are enumerated exhaustively; for each prefix the
    smallest admissible grid value of the last coordinate is optimal (its
    weight is positive), so the result equals full enumeration of the grid.

    Rounding any continuous minimizer up onto the grid keeps it feasible, so
    the result exceeds :func:`g_closed` by at most ``m*n*p/(grid_points-1)``.
    """
    r = float(r)
    p = float(p)
    if not p > 0.0:
        raise DomainError(f"power exponent must be positive, got p={p}")
    if not (0.0 < r < p * cfg.min_mn):
        raise DomainError(f"oracle needs 0 < r < p*min(m,n) = {p * cfg.min_mn}, got r={r}")
    if grid_points < 2:
        raise DomainError(f"grid_points must be >= 2, got {grid_points}")
    s = cfg.min_mn
    if float(grid_points) ** (s - 1) > 5e7:
        raise SizeError(f"alpha grid of {grid_points}^{s - 1} prefixes is too large to enumerate")

    h = p / (grid_points - 1)
    weights = np.array([2 * i - 1 + cfg.max_mn - cfg.min_mn for i in range(1, s + 1)], dtype=float)

    if s == 1:
        prefix = np.zeros((1, 0), dtype=np.int64)
    else:
        axes = np.indices((grid_points,) * (s - 1)).reshape(s - 1, -1).T
        ordered = np.all(np.diff(axes, axis=1) <= 0, axis=1) if s > 2 else np.ones(len(axes), bool)
        prefix = axes[ordered]

    alpha_prefix = prefix * h
    slack = r - np.sum(p - alpha_prefix, axis=1)
    feasible = slack >= -1e-12
    # Smallest grid index j with p - j*h <= slack.
    need = np.ceil((p - slack) / h - 1e-9)
    last = np.maximum(need, 0.0).astype(np.int64)
    upper = prefix[:, -1] if s > 1 else np.full(len(prefix), grid_points - 1)
    feasible &= last <= upper
    if not np.any(feasible):
        raise DomainError("alpha grid admits no feasible point; increase grid_points")
    objective = alpha_prefix @ weights[:-1] + weights[-1] * last * h
    return float(np.min(objective[feasible]))


def _b_ladder(r: float, K: int, cfg: AntennaConfig) -> list[float]:
    """[B_0, ..., B_K] without argument checks."""
    values = [0.0]
    for _ in range(K):
        values.append(g_closed(r, 1.0 + values[-1], cfg))
    return values


def b_star(r: float, K: int, cfg: AntennaConfig) -> float:
    """Tradeoff with ``K`` levels of noiseless quantized power feedback.

    Defined by ``B_K(r) = G(r, 1 + B_{K-1}(r))`` starting from ``B_0 = 0``.
    """
    r = _check_r(r, cfg)
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    return _b_ladder(r, K, cfg)[-1]


def _equalization_feasible(t: float, ladder: list[float], mn: int) -> bool:
    # Greedy forward pass: the smallest admissible q_i leaves the most room for
    # the later terms, so t is attainable iff this pass respects every cap.
    s = 0.0
    for i in range(1, len(ladder) - 1):
        s = max(0.0, s + (t - ladder[i]) / mn)
        if s > 1.0 + ladder[i]:
            return False
    return True


def _equalized_value(ladder: list[float], mn: int) -> float:
    """Inner max-min value for the ladder [B_0..B_K], by bisection on the target."""
    lo = ladder[1]
    hi = mn * (1.0 + ladder[1]) + ladder[1]
    if _equalization_feasible(hi, ladder, mn):
        return hi
    while hi - lo > BISECTION_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if _equalization_feasible(mid, ladder, mn):
            lo = mid
        else:
            hi = mid
    return lo


def d_noisy_quantized(r: float, K: int, cfg: AntennaConfig) -> float:
    """Tradeoff with perfect receiver knowledge and ``K``-level noisy power feedback.

    Returns ``min(B_K, max_q min_i [mn*((q_i)^+ - (q_{i-1})^+) + B_i])`` over
    feedback power exponents ``q_j <= 1 + B_j`` with ``(q_0)^+ = 0``. The
    inner max-min is found by bisection on the common target value, each
    candidate checked with a greedy forward construction of ``q``.
    """
    r = _check_r(r, cfg)
    if K < 2:
        raise DomainError(f"noisy quantized feedback needs K >= 2, got K={K}")
    ladder = _b_ladder(r, K, cfg)
    return min(ladder[K], _equalized_value(ladder, cfg.mn))


def noisy_feedback_exponents(r: float, K: int, cfg: AntennaConfig) -> list[float]:
    """Feedback power exponents ``[q_0, ..., q_{K-1}]`` attaining the noisy-feedback tradeoff.

    ``q_0 = 0``; the rest is the largest feasible vector for the achieved
    target, built backwards from the top cap. It is strictly increasing, which
    an energy detector needs to tell the levels apart.
    """
    r = _check_r(r, cfg)
    if K < 2:
        raise DomainError(f"noisy quantized feedback needs K >= 2, got K={K}")
    ladder = _b_ladder(r, K, cfg)
    mn = cfg.mn
    target = min(ladder[K], _equalized_value(ladder, mn))
    q = [0.0] * K
    q[K - 1] = 1.0 + ladder[K - 1]
    for i in range(K - 1, 1, -1):
        q[i - 1] = min(1.0 + ladder[i - 1], q[i] - (target - ladder[i]) / mn)
    return q


def d_noisy_oracle(r: float, K: int, cfg: AntennaConfig, grid_points: int = 101) -> float:
    """Exhaustive grid search of the noisy-feedback max-min problem.

    Each ``q_j`` ranges over ``linspace(0, 1 + B_j, grid_points)``; negative
    exponents are never needed since only ``(q_j)^+`` enters. The result is a
    lower bound on the true optimum.
    """
    r = _check_r(r, cfg)
    if K < 2:
        raise DomainError(f"noisy quantized feedback needs K >= 2, got K={K}")
    if K > 4:
        raise SizeError(f"grid oracle is exponential in K; K <= 4 supported, got K={K}")
    if grid_points < 11:
        raise DomainError(f"grid_points must be >= 11, got {grid_points}")
    ladder = _b_ladder(r, K, cfg)
    mn = cfg.mn
    axes = [np.linspace(0.0, 1.0 + ladder[j], grid_points) for j in range(1, K)]
    q = np.meshgrid(*axes, indexing="ij", sparse=True)
    prev = 0.0
    worst = None
    for i in range(1, K):
        term = mn * (q[i - 1] - prev) + ladder[i]
        worst = term if worst is None else np.minimum(worst, term)
        prev = q[i - 1]
    return min(ladder[K], float(np.max(worst)))


def d_case(case: FeedbackCase, r: float, cfg: AntennaConfig) -> float:
    """Diversity order of ``case`` at multiplexing gain ``r``; ``math.inf`` when unbounded."""
    r = _check_r(r, cfg)
    kind = case.kind
    if kind in (CaseKind.CSIR, CaseKind.CSIR_HAT):
        return g_closed(r, 1.0, cfg)
    if kind is CaseKind.CSIR_TQ:
        return b_star(r, case.K, cfg)
    if kind in (CaseKind.CSIR_HAT_TQ, CaseKind.CSIR_HAT_TQ_HAT):
        return g_closed(r, 1.0 + g_closed(r, 1.0, cfg), cfg)
    if kind is CaseKind.CSIR_TQ_HAT:
        return d_noisy_quantized(r, case.K, cfg)
    if kind is CaseKind.CSIR_HAT_TC_HAT:
        return cfg.mn + g_closed(r, float(cfg.mn), cfg)
    return UNBOUNDED


def effective_multiplexing(r: float, oh: OverheadConfig, cfg: AntennaConfig) -> float:
    """Multiplexing gain seen by the data phase once ``tau`` of ``L`` uses go to training."""
    if oh.L - oh.tau < cfg.m + cfg.n:
        raise DomainError(f"need L - tau >= m + n = {cfg.m + cfg.n}, got L={oh.L}, tau={oh.tau}")
    scaled = float(r) * oh.L / (oh.L - oh.tau)
    if not (0.0 <= scaled < cfg.min_mn):
        raise DomainError(f"effective multiplexing gain {scaled} must lie in [0, {cfg.min_mn})")
    return scaled


def all_cases(K: int) -> list[FeedbackCase]:
    """The ten cases in table order, with ``K`` applied wherever it is used."""
    return [FeedbackCase(kind, K if kind.min_k is not None else None) for kind in CaseKind]

