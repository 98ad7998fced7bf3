"""Exact breakpoint representation of tradeoff curves d(r) on [0, min(m,n)).

Every finite case is built from compositions ``G(r, p(r))`` with ``p``
piecewise linear. On an interval where ``p`` is linear and ``floor(r/p)`` is
fixed, ``G(r, p(r)) = (m-k)(n-k) p(r) - (r - k p(r))(m+n-2k-1)`` is linear
in ``r``, so the composition only bends where ``p`` bends or where
``r = k p(r)``. Both are located in closed form, and breakpoints propagate
level by level through the feedback recursion.

The noisy quantized feedback curve uses the fact that the greedy feasibility
pass of the max-min problem unrolls to
``t* = min_{j<=i} [mn (1 + B_i) + sum_{l=j..i} B_l] / (i - j + 1)``,
a minimum of piecewise-linear functions of ``r``.
"""

from __future__ import annotations

import numpy as np

from .dmt import AntennaConfig, CaseKind, FeedbackCase, d_case, g_closed
from .errors import UnsupportedCaseError
from .piecewise import PiecewiseLinearCurve

DEFAULT_RESOLUTION = 201
FIDELITY_TOL = 1e-9


def compose_g(power: PiecewiseLinearCurve, cfg: AntennaConfig) -> PiecewiseLinearCurve:
    """The curve ``r -> G(r, power(r))`` for a piecewise-linear power exponent."""
    points = list(power.r)
    for r0, r1 in power.segments():
        p0, p1 = power(r0), power(r1)
        slope = (p1 - p0) / (r1 - r0)
        intercept = p0 - slope * r0
        for k in range(1, cfg.min_mn):
            denom = 1.0 - k * slope
            if denom == 0.0:
                continue
            crossing = k * intercept / denom
            if r0 < crossing < r1:
                points.append(crossing)
    return PiecewiseLinearCurve.from_function(lambda x: g_closed(x, power(x), cfg), points).simplify()


def b_star_curves(K: int, cfg: AntennaConfig) -> list[PiecewiseLinearCurve]:
    """Curves of the perfect-feedback recursion, ``[B_0, ..., B_K]``."""
    top = float(cfg.min_mn)
    levels = [PiecewiseLinearCurve.constant(0.0, 0.0, top)]
    for _ in range(K):
        levels.append(compose_g(levels[-1] + 1.0, cfg))
    return levels


def _noisy_quantized_curve(K: int, cfg: AntennaConfig) -> PiecewiseLinearCurve:
    levels = b_star_curves(K, cfg)
    mn = cfg.mn
    result = levels[K]
    for i in range(1, K):
        for j in range(1, i + 1):
            total = mn * (levels[i] + 1.0)
            for ell in range(j, i + 1):
                total = total + levels[ell]
            result = result.minimum(total * (1.0 / (i - j + 1)))
    return result


def _build(case: FeedbackCase, cfg: AntennaConfig) -> PiecewiseLinearCurve:
    top = float(cfg.min_mn)
    kind = case.kind
    unit = PiecewiseLinearCurve.constant(1.0, 0.0, top)
    if kind in (CaseKind.CSIR, CaseKind.CSIR_HAT):
        return compose_g(unit, cfg)
    if kind is CaseKind.CSIR_TQ:
        return b_star_curves(case.K, cfg)[-1]
    if kind in (CaseKind.CSIR_HAT_TQ, CaseKind.CSIR_HAT_TQ_HAT):
        return compose_g(compose_g(unit, cfg) + 1.0, cfg)
    if kind is CaseKind.CSIR_TQ_HAT:
        return _noisy_quantized_curve(case.K, cfg)
    if kind is CaseKind.CSIR_HAT_TC_HAT:
        return compose_g(PiecewiseLinearCurve.constant(float(cfg.mn), 0.0, top), cfg) + float(cfg.mn)
    raise UnsupportedCaseError(f"case {case.name} has unbounded diversity; no curve to draw")


def sample_grid(cfg: AntennaConfig, count: int = DEFAULT_RESOLUTION) -> np.ndarray:
    """``count`` evenly spaced multiplexing gains covering ``[0, min(m,n))``."""
    return np.linspace(0.0, float(cfg.min_mn), count, endpoint=False)


def curve(case: FeedbackCase, cfg: AntennaConfig, resolution: int = DEFAULT_RESOLUTION) -> PiecewiseLinearCurve:
    """Exact tradeoff curve of a bounded case.

    The breakpoint list is computed in closed form, then checked against the
    pointwise :func:`~dmtlab.dmt.d_case` at ``resolution`` grid points.

    Raises:
        UnsupportedCaseError: for the three cases with unbounded diversity.
    """
    result = _build(case, cfg)
    if resolution:
        grid = sample_grid(cfg, resolution)
        expected = np.array([d_case(case, x, cfg) for x in grid])
        err = np.abs(result(grid) - expected)
        worst = int(np.argmax(err / np.maximum(1.0, np.abs(expected))))
        if err[worst] > FIDELITY_TOL * max(1.0, abs(expected[worst])):
            raise RuntimeError(
                f"{case.name} curve deviates from pointwise value at r={grid[worst]}: "
                f"{result(grid[worst])} vs {expected[worst]}"
            )
    return result
