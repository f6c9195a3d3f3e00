"""Closed-form machinery for rose trees R(s, t, p).

Everything here is evaluated pointwise through the three-term recurrence
and compositions of it; no polynomial is ever expanded into coefficients.
The algebraic connectivity of R(s, t, p) is the first positive root of the
characteristic factor ``chi``, located by a sign-change scan plus bisection.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadParam, DegenerateEigenspace, DomainError, NoRoot
from .spectral import DEFAULT_TOL, Tolerances, _cluster_size, _normalise, eigen_symmetric, laplacian
from .tree import RoseParams, build_rose

SCAN_POINTS = 2048
SKIP = 1e-9
XTOL = 1e-13
ENDPOINT_TOL = 1e-10
UPPER_PAD = 1e-6


def eval_R(n: int, x):
    """R_n(x) from R_0 = 1, R_1 = 1 - x, R_n = (2 - x) R_{n-1} - R_{n-2}."""
    if n < 0:
        raise BadParam(f"R_n needs n >= 0, got {n}")
    prev, cur = 1.0, 1.0 - x
    if n == 0:
        return prev + 0.0 * x
    for _ in range(n - 1):
        prev, cur = cur, (2.0 - x) * cur - prev
    return cur


def eval_R_closed(n: int, x: float) -> float:
    """cos((n + 1/2) theta) / cos(theta / 2) with cos(theta) = 1 - x/2, for x in [0, 1]."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"closed form is only valid on [0, 1], got {x}")
    theta = math.acos(1.0 - x / 2.0)
    return math.cos((n + 0.5) * theta) / math.cos(theta / 2.0)


def eval_P(p: int, x):
    return x * x - (p + 2) * x + 1.0


def eval_Q(p: int, x):
    return (x - 3.0) * eval_P(p, x) + (1.0 - x)


def eval_h(s: int, x):
    """2 R_{s-1} + (x - 3) R_s"""
    if s < 1:
        raise BadParam(f"h_s needs s >= 1, got {s}")
    return 2.0 * eval_R(s - 1, x) + (x - 3.0) * eval_R(s, x)


def eval_fp(s: int, p: int, x):
    """2 R_{s-1} P + R_s Q: the cofactor of R_s in chi when t = s."""
    if s < 1:
        raise BadParam(f"f_p needs s >= 1, got {s}")
    return 2.0 * eval_R(s - 1, x) * eval_P(p, x) + eval_R(s, x) * eval_Q(p, x)


def eval_chi(s: int, t: int, p: int, x):
    """(R_s R_{t-1} + R_{s-1} R_t) P + Q R_s R_t"""
    if s < 1 or t < 1:
        raise BadParam(f"chi needs s, t >= 1, got ({s}, {t})")
    rs, rs1 = eval_R(s, x), eval_R(s - 1, x)
    rt, rt1 = eval_R(t, x), eval_R(t - 1, x)
    return (rs * rt1 + rs1 * rt) * eval_P(p, x) + eval_Q(p, x) * rs * rt


def r_of_s(s: int) -> float:
    """First positive root of R_s: 2 (1 - cos(pi / (2s + 1)))."""
    if s < 1:
        raise BadParam(f"r(s) needs s >= 1, got {s}")
    return 2.0 * (1.0 - math.cos(math.pi / (2 * s + 1)))


def threshold_f(s: int) -> float:
    """(r(s) - 1)^2 / r(s): the largest p keeping R(s, s, p) FED-true."""
    r = r_of_s(s)
    return (r - 1.0) ** 2 / r


def asymptotic_ratio(s: int) -> float:
    return threshold_f(s) / (4.0 / math.pi ** 2 * s * s)


def _bisect(f: Callable[[float], float], lo: float, hi: float, flo: float,
            xtol: float) -> float:
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def first_positive_root(f: Callable[[float], float], upper: float, *,
                        skip: float = SKIP, points: int = SCAN_POINTS,
                        xtol: float = XTOL) -> float:
    """Smallest root of ``f`` in ``(skip, upper]``.

    Scans ``skip, skip + h, ...`` with ``h = upper / points`` (plus ``upper``
    itself) for the first sign change, then bisects to ``xtol``.  With no
    sign change, ``upper`` is accepted when ``|f(upper)| <= 1e-10``.
    """
    if upper <= 0:
        raise BadParam(f"upper bound must be positive, got {upper}")
    step = upper / points
    xs = [skip + k * step for k in range(points) if skip + k * step < upper] + [upper]
    x_prev = xs[0]
    f_prev = f(x_prev)
    if f_prev == 0.0:
        return x_prev
    for x in xs[1:]:
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx < 0.0) != (f_prev < 0.0):
            return _bisect(f, x_prev, x, f_prev, xtol)
        x_prev, f_prev = x, fx
    if abs(f(upper)) <= ENDPOINT_TOL:
        return upper
    raise NoRoot(f"no sign change of f on ({skip}, {upper}]")


def _check_theory(s: int, t: int, p: int) -> None:
    if s < 3 or t < 3:
        raise BadParam(f"rose-tree theory assumes s, t >= 3, got ({s}, {t})")
    if p < 0:
        raise BadParam(f"p must be >= 0, got {p}")


def alpha_analytic(s: int, t: int, p: int) -> float:
    """Algebraic connectivity of R(s, t, p) as the first positive root of chi.

    alpha(s, t, p) <= r(min(s, t)), so the scan stops just past that value.
    """
    _check_theory(s, t, p)
    upper = r_of_s(min(s, t)) + UPPER_PAD
    return first_positive_root(lambda x: eval_chi(s, t, p, x), upper)


def root_of_h(s: int) -> float:
    """Unique root of h_s in (0, r(s)): the limit of alpha(s, s, p) as p grows."""
    if s < 3:
        raise BadParam(f"root_of_h needs s >= 3, got {s}")
    f = lambda x: eval_h(s, x)  # noqa: E731
    return _bisect(f, 0.0, r_of_s(s), f(0.0), 0.0)


class Prediction(str, enum.Enum):
    FED_TRUE = "FedTrue"
    FED_FALSE = "FedFalse"
    INDETERMINATE = "Indeterminate"


class Basis(str, enum.Enum):
    EXACT_THRESHOLD = "ExactThreshold"
    LOWER_BOUND = "LowerBound"
    UPPER_BOUND = "UpperBound"
    NUMERIC_FALLBACK = "NumericFallback"


@dataclass(frozen=True)
class RoseVerdict:
    prediction: Prediction
    basis: Basis
    alpha_analytic: float
    threshold_low: float
    threshold_high: float
    swapped: bool = False


def predict_fed_rose(s: int, t: int, p: int) -> RoseVerdict:
    """FED prediction for R(s, t, p) from thresholds alone (no eigensolve).

    ``s = t`` is decided exactly; for ``s < t`` only the two bounds
    ``f(s,s) - 1`` and ``f(t+2,t+2)`` are known and the gap is Indeterminate.
    """
    _check_theory(s, t, p)
    swapped = s > t
    if swapped:
        s, t = t, s
    alpha = alpha_analytic(s, t, p)
    if s == t:
        f = threshold_f(s)
        if abs(f - round(f)) < 1e-9:
            return RoseVerdict(Prediction.INDETERMINATE, Basis.NUMERIC_FALLBACK, alpha, f, f, swapped)
        pred = Prediction.FED_TRUE if p <= f else Prediction.FED_FALSE
        return RoseVerdict(pred, Basis.EXACT_THRESHOLD, alpha, f, f, swapped)
    low, high = threshold_f(s) - 1.0, threshold_f(t + 2)
    if p <= low:
        return RoseVerdict(Prediction.FED_TRUE, Basis.LOWER_BOUND, alpha, low, high, swapped)
    if p >= high:
        return RoseVerdict(Prediction.FED_FALSE, Basis.UPPER_BOUND, alpha, low, high, swapped)
    return RoseVerdict(Prediction.INDETERMINATE, Basis.NUMERIC_FALLBACK, alpha, low, high, swapped)


@dataclass(frozen=True)
class Claim1Residuals:
    alpha: float
    center: float
    attach: float
    neighbours: float
    left_branch: float
    right_branch: float
    leaf_spread: float

    @property
    def max(self) -> float:
        return max(self.center, self.attach, self.neighbours, self.left_branch,
                   self.right_branch, self.leaf_spread)


def verify_claim1(s: int, t: int, p: int, tol: Tolerances = DEFAULT_TOL) -> Claim1Residuals:
    """Check the star/branch relations of a numerically computed Fiedler vector.

    With ``p = 0`` there are no star leaves; the common leaf value is then
    taken as ``phi_c / (1 - alpha)``, which keeps every relation meaningful.
    """
    _check_theory(s, t, p)
    params = RoseParams(s, t, p)
    eig = eigen_symmetric(laplacian(build_rose(params)))
    if _cluster_size(eig.values, tol) > 1:
        raise DegenerateEigenspace(f"lambda_2 of R({s},{t},{p}) is not simple")
    a = float(eig.values[1])
    phi = np.concatenate([[0.0], _normalise(eig.vectors[:, 1], tol)])  # 1-based
    c, k = params.center, params.attach
    if p:
        star = phi[list(params.star_leaves)]
        hat = float(star.mean())
        spread = float(np.max(np.abs(star - hat)))
    else:
        hat, spread = phi[c] / (1.0 - a), 0.0
    R = [eval_R(i, a) for i in range(max(s, t) + 1)]
    left = max(abs(R[s] * phi[i] - R[i - 1] * phi[k]) for i in range(1, s + 1))
    right = max(abs(R[t] * phi[i + s + 1] - R[t - i] * phi[k]) for i in range(1, t + 1))
    return Claim1Residuals(
        alpha=a,
        center=abs((1.0 - a) * hat - phi[c]),
        attach=abs(eval_P(p, a) * hat - phi[k]),
        neighbours=abs(-eval_Q(p, a) * hat - (phi[s] + phi[s + 2])),
        left_branch=left,
        right_branch=right,
        leaf_spread=spread,
    )
