"""Characteristic functions whose real zeros are the bound-state energies.

Four double-well variants, all sharing one in-barrier at the center:

    m1: Dirac delta between two hard walls at -a and b
    m2: rectangular barrier of height v0 on [-b, b] between walls at -a and c
    m3: Dirac delta joining two half-harmonic wells (hw1 left, hw2 right)
    m4: rectangular barrier on (-a, a) joining two offset harmonic wells

Each characteristic function is written in a pole-free, spurious-root-free
form: gamma ratios are cleared into reciprocal-gamma products (entire in E,
and they keep the odd-parity roots that ratio forms lose at the symmetric
point), the rectangular-barrier factors are evaluated as entire functions
of v0 - E (so sweeps pass smoothly through E = v0 and sub/over-barrier
branches join without caller branching), and an E-continuous positive
rescale keeps values representable at large quantum numbers.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ModelMismatchError
from .specfun import recip_gamma_log

__all__ = [
    "UnitsConfig",
    "M1Params",
    "M2Params",
    "M3Params",
    "M4Params",
    "ModelParams",
    "CharacteristicEvaluation",
    "char_m1",
    "char_m2",
    "char_m3",
    "char_m4",
    "characteristic",
    "characteristic_fn",
    "model_kind",
    "sweep_param_name",
    "replace_param",
    "potential_on_grid",
    "delta_strength",
    "level_window_estimate",
]

_LN_SQRT2 = 0.5 * math.log(2.0)

# |log terms| above this trigger a common positive rescale before summation.
_LOG_RESCALE_THRESHOLD = 600.0

# Barrier factors switch to their power series when (2*half_width)^2*(v0-E)
# is below this, which joins the E<v0, E=v0 and E>v0 branches smoothly.
_BARRIER_SERIES_CUT = 1e-6


@dataclass(frozen=True)
class UnitsConfig:
    """Unit system constant u = 2*mu/hbar^2 in (eV Angstrom^2)^-1.

    u = 1 corresponds to mu ~ 4 electron masses; u = 0.2625 to mu = m_e.
    """

    u: float = 1.0

    def __post_init__(self) -> None:
        if not (self.u > 0.0 and math.isfinite(self.u)):
            raise ValueError(f"units constant u must be positive and finite, got {self.u}")


@dataclass(frozen=True)
class M1Params:
    """Delta spike of strength v0 (eV*Angstrom) between walls at -a and b."""

    v0: float
    a: float
    b: float

    def __post_init__(self) -> None:
        if self.v0 < 0.0:
            raise ValueError("m1 requires v0 >= 0 (repulsive in-barrier)")
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("m1 requires a > 0 and b > 0")


@dataclass(frozen=True)
class M2Params:
    """Rectangular barrier of height v0 (eV) on [-b, b], walls at -a and c."""

    v0: float
    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if self.v0 < 0.0:
            raise ValueError("m2 requires v0 >= 0 (repulsive in-barrier)")
        if not (self.a > self.b > 0.0):
            raise ValueError("m2 requires a > b > 0 (left well width a-b > 0)")
        if not (self.c > self.b):
            raise ValueError("m2 requires c > b (right well width c-b > 0)")


@dataclass(frozen=True)
class M3Params:
    """Delta spike of strength v0 (eV*Angstrom) joining half-harmonic wells."""

    v0: float
    hw1: float
    hw2: float

    def __post_init__(self) -> None:
        if self.v0 < 0.0:
            raise ValueError("m3 requires v0 >= 0 (repulsive in-barrier)")
        if not (self.hw1 > 0.0 and self.hw2 > 0.0):
            raise ValueError("m3 requires hw1 > 0 and hw2 > 0")


@dataclass(frozen=True)
class M4Params:
    """Rectangular barrier of height v0 (eV) on (-a, a) between harmonic wells.

    The wells are centered on the barrier edges: hw1 curvature in (x+a) for
    x <= -a and hw2 curvature in (x-a) for x >= a.
    """

    v0: float
    hw1: float
    hw2: float
    a: float

    def __post_init__(self) -> None:
        if self.v0 < 0.0:
            raise ValueError("m4 requires v0 >= 0 (repulsive in-barrier)")
        if not (self.hw1 > 0.0 and self.hw2 > 0.0):
            raise ValueError("m4 requires hw1 > 0 and hw2 > 0")
        if self.a < 0.0:
            raise ValueError("m4 requires a >= 0 (barrier half-width)")


ModelParams = M1Params | M2Params | M3Params | M4Params


@dataclass(frozen=True)
class CharacteristicEvaluation:
    """Value of a model's characteristic function at one energy.

    Derived wave numbers are recorded where meaningful for the model:
    k (free regions), p_or_q (barrier region; flagged when the branch is
    oscillatory, i.e. E above the barrier), nu_i and alpha_i (harmonic
    wells).
    """

    energy: float
    value: float
    k: float | None = None
    p_or_q: float | None = None
    p_or_q_imaginary: bool = False
    nu1: float | None = None
    nu2: float | None = None
    alpha1: float | None = None
    alpha2: float | None = None


def _require_positive_energy(energy: float) -> None:
    if not (energy > 0.0 and math.isfinite(energy)):
        raise DomainError(f"characteristic functions are defined for E > 0, got {energy!r}")


def _barrier_factors(w: float, half_width: float) -> tuple[float, float]:
    """Entire-in-w barrier factors C(w) = cosh(2L*sqrt(w)) and
    S(w) = sinh(2L*sqrt(w))/sqrt(w), continued through w <= 0.

    w = u*(v0 - E) and L = half_width.  For w < 0 these are cos and
    sin/sqrt(-w); near w = 0 both are evaluated by series, so a sweep in E
    crosses the top of the barrier smoothly and no spurious root appears
    at E = v0.  When the argument would overflow, both factors carry a
    common positive rescale exp(350 - s), which preserves signs, zeros and
    continuity in E.
    """
    width = 2.0 * half_width
    s2 = width * width * w
    if abs(s2) < _BARRIER_SERIES_CUT:
        c = 1.0 + s2 * (0.5 + s2 * (1.0 / 24.0 + s2 / 720.0))
        s = width * (1.0 + s2 * (1.0 / 6.0 + s2 * (1.0 / 120.0 + s2 / 5040.0)))
        return c, s
    if w > 0.0:
        root = math.sqrt(w)
        arg = width * root
        if arg <= 350.0:
            return math.cosh(arg), math.sinh(arg) / root
        big = 0.5 * math.exp(350.0)
        return big, big / root
    root = math.sqrt(-w)
    arg = width * root
    return math.cos(arg), math.sin(arg) / root


def char_m1(energy: float, params: M1Params, units: UnitsConfig) -> CharacteristicEvaluation:
    """Delta-between-walls level condition.

        F(E) = k sin(k(a+b)) + u v0 sin(ka) sin(kb),   k = sqrt(uE)

    The leading k restores dimensional consistency and reproduces the
    symmetric reduction k cot(ka) = -u v0 / 2 at a = b.  F is entire in E
    and its zeros on (0, inf) are exactly the spectrum.
    """
    _require_positive_energy(energy)
    u = units.u
    k = math.sqrt(u * energy)
    value = k * math.sin(k * (params.a + params.b)) + u * params.v0 * math.sin(
        k * params.a
    ) * math.sin(k * params.b)
    return CharacteristicEvaluation(energy=energy, value=value, k=k)


def char_m2(energy: float, params: M2Params, units: UnitsConfig) -> CharacteristicEvaluation:
    """Rectangular-barrier double-well level condition, pole free.

    With d1 = a-b, d2 = c-b, d = d1+d2, w = u(v0-E) and the entire barrier
    factors C(w), S(w) of half-width b:

        F(E) = k sin(kd) C(w) + [k^2 cos(kd) + u v0 sin(kd1) sin(kd2)] S(w)

    This is the opened matching determinant divided by p = sqrt(w), which
    removes the spurious root the raw determinant has at E = v0; the S(w)
    series at w ~ 0 is precisely the linear-interior-solution matching
    condition, and w < 0 continues the formula above the barrier.
    """
    _require_positive_energy(energy)
    u = units.u
    k = math.sqrt(u * energy)
    d1 = params.a - params.b
    d2 = params.c - params.b
    s1 = math.sin(k * d1)
    s2 = math.sin(k * d2)
    w = u * (params.v0 - energy)
    c_fac, s_fac = _barrier_factors(w, params.b)
    kd = k * (d1 + d2)
    # s1*s2 grouped so that swapping the two wells gives a bitwise
    # identical value (float multiplication commutes but not associates)
    value = k * math.sin(kd) * c_fac + (k * k * math.cos(kd) + u * params.v0 * (s1 * s2)) * s_fac
    return CharacteristicEvaluation(
        energy=energy,
        value=value,
        k=k,
        p_or_q=math.sqrt(abs(w)),
        p_or_q_imaginary=w < 0.0,
    )


def _signed_exp_sum(terms: list[tuple[int, float]]) -> float:
    """Sum sign*exp(log) over terms, under a common positive rescale.

    Terms with sign 0 are dead (an exact reciprocal-gamma zero).  When the
    largest live log exceeds the rescale threshold, every term is shifted
    by the same amount; the shift is continuous in the underlying energy,
    so rescaled characteristic values keep their signs, zeros and
    continuity.
    """
    live = [(s, l) for s, l in terms if s != 0]
    if not live:
        return 0.0
    peak = max(l for _, l in live)
    shift = peak - _LOG_RESCALE_THRESHOLD if peak > _LOG_RESCALE_THRESHOLD else 0.0
    return math.fsum(s * math.exp(l - shift) for s, l in live)


def _harmonic_orders(
    energy: float, hw1: float, hw2: float, u: float
) -> tuple[float, float, float, float]:
    nu1 = energy / hw1 - 0.5
    nu2 = energy / hw2 - 0.5
    alpha1 = math.sqrt(u * hw1)
    alpha2 = math.sqrt(u * hw2)
    return nu1, nu2, alpha1, alpha2


def char_m3(energy: float, params: M3Params, units: UnitsConfig) -> CharacteristicEvaluation:
    """Delta-in-harmonic-well level condition, pole free.

    Clearing the gamma-ratio matching condition into reciprocal-gamma
    factors h_i = 1/Gamma(-nu_i/2), j_i = 1/Gamma(1/2 - nu_i/2) and
    normalizing by the positive factor 2^(-(nu1+nu2)/2)/pi gives

        F(E) = -[ sqrt(2) (alpha2 h2 j1 + alpha1 h1 j2) + u v0 j1 j2 ]

    which is entire in E and, unlike the ratio form, keeps the odd-parity
    roots at hw1 = hw2 where D_nu(0) = 0 (there all three products vanish
    through the exact zeros of j).  Terms are combined in log space.
    """
    _require_positive_energy(energy)
    u = units.u
    nu1, nu2, alpha1, alpha2 = _harmonic_orders(energy, params.hw1, params.hw2, u)
    sh1, lh1 = recip_gamma_log(-0.5 * nu1)
    sh2, lh2 = recip_gamma_log(-0.5 * nu2)
    sj1, lj1 = recip_gamma_log(0.5 - 0.5 * nu1)
    sj2, lj2 = recip_gamma_log(0.5 - 0.5 * nu2)

    terms = [
        (sh2 * sj1, _LN_SQRT2 + math.log(alpha2) + lh2 + lj1),
        (sh1 * sj2, _LN_SQRT2 + math.log(alpha1) + lh1 + lj2),
    ]
    if params.v0 > 0.0:
        terms.append((sj1 * sj2, math.log(u * params.v0) + lj1 + lj2))
    value = -_signed_exp_sum(terms)
    return CharacteristicEvaluation(
        energy=energy, value=value, nu1=nu1, nu2=nu2, alpha1=alpha1, alpha2=alpha2
    )


def char_m4(energy: float, params: M4Params, units: UnitsConfig) -> CharacteristicEvaluation:
    """Barrier-in-harmonic-well level condition, pole free.

    With h_i, j_i as in char_m3, w = u(v0-E), and the entire barrier
    factors C(w), S(w) of half-width a:

        F(E) = sqrt(2) (alpha1 h1 j2 + alpha2 h2 j1) C(w)
             + [ w j1 j2 + 2 alpha1 alpha2 h1 h2 ] S(w)

    Derived by eliminating the interior sinh/cosh amplitudes between the
    two matching interfaces and clearing denominators; the w j1 j2 term
    carries q^2 = w through both branches, S(w) removes the spurious root
    at E = v0, and the sign of the S-group is fixed by the parity
    factorization at hw1 = hw2 and by the delta limit (a -> 0 with
    2 a v0 held fixed reproduces char_m3).  Terms combine in log space
    under the same positive rescale as char_m3.
    """
    _require_positive_energy(energy)
    u = units.u
    nu1, nu2, alpha1, alpha2 = _harmonic_orders(energy, params.hw1, params.hw2, u)
    sh1, lh1 = recip_gamma_log(-0.5 * nu1)
    sh2, lh2 = recip_gamma_log(-0.5 * nu2)
    sj1, lj1 = recip_gamma_log(0.5 - 0.5 * nu1)
    sj2, lj2 = recip_gamma_log(0.5 - 0.5 * nu2)

    w = u * (params.v0 - energy)
    c_fac, s_fac = _barrier_factors(w, params.a)

    def _with_factor(sign: int, log: float, factor: float) -> tuple[int, float]:
        if sign == 0 or factor == 0.0:
            return 0, -math.inf
        fsign = 1 if factor > 0.0 else -1
        return sign * fsign, log + math.log(abs(factor))

    terms = [
        _with_factor(sh1 * sj2, _LN_SQRT2 + math.log(alpha1) + lh1 + lj2, c_fac),
        _with_factor(sh2 * sj1, _LN_SQRT2 + math.log(alpha2) + lh2 + lj1, c_fac),
        _with_factor(sh1 * sh2, math.log(2.0 * alpha1 * alpha2) + lh1 + lh2, s_fac),
    ]
    if w != 0.0:
        wsign = 1 if w > 0.0 else -1
        terms.append(_with_factor(wsign * sj1 * sj2, math.log(abs(w)) + lj1 + lj2, s_fac))
    value = _signed_exp_sum(terms)
    return CharacteristicEvaluation(
        energy=energy,
        value=value,
        p_or_q=math.sqrt(abs(w)),
        p_or_q_imaginary=w < 0.0,
        nu1=nu1,
        nu2=nu2,
        alpha1=alpha1,
        alpha2=alpha2,
    )


def characteristic(
    energy: float, model: ModelParams, units: UnitsConfig
) -> CharacteristicEvaluation:
    """Evaluate the characteristic function of whichever model is given."""
    if isinstance(model, M1Params):
        return char_m1(energy, model, units)
    if isinstance(model, M2Params):
        return char_m2(energy, model, units)
    if isinstance(model, M3Params):
        return char_m3(energy, model, units)
    if isinstance(model, M4Params):
        return char_m4(energy, model, units)
    raise ModelMismatchError(f"unknown model type {type(model).__name__}")


def characteristic_fn(model: ModelParams, units: UnitsConfig):
    """Scalar E -> F(E) closure for the root finder."""

    def f(energy: float) -> float:
        return characteristic(energy, model, units).value

    return f


def model_kind(model: ModelParams) -> str:
    """Short tag 'm1'..'m4' for the model variant."""
    return {M1Params: "m1", M2Params: "m2", M3Params: "m3", M4Params: "m4"}[type(model)]


def sweep_param_name(model: ModelParams) -> str:
    """The well-width/asymmetry parameter each variant sweeps."""
    return {M1Params: "b", M2Params: "c", M3Params: "hw2", M4Params: "hw2"}[type(model)]


def replace_param(model: ModelParams, name: str, value: float) -> ModelParams:
    """New params with one field replaced (validates the result)."""
    if name not in {f.name for f in dataclasses.fields(model)}:
        raise ModelMismatchError(f"{model_kind(model)} has no parameter {name!r}")
    return dataclasses.replace(model, **{name: value})


def potential_on_grid(model: ModelParams, units: UnitsConfig, x: np.ndarray) -> np.ndarray:
    """Smooth part of V(x) in eV on the given positions (delta terms excluded).

    Harmonic arms are (u/4) hw^2 (x - x0)^2, which is (1/2) mu omega^2
    (x-x0)^2 expressed through u and hbar*omega.
    """
    x = np.asarray(x, dtype=np.float64)
    u = units.u
    if isinstance(model, M1Params):
        return np.zeros_like(x)
    if isinstance(model, M2Params):
        return np.where(np.abs(x) <= model.b, model.v0, 0.0)
    if isinstance(model, M3Params):
        curv = np.where(x < 0.0, model.hw1, model.hw2)
        return 0.25 * u * curv * curv * x * x
    if isinstance(model, M4Params):
        left = 0.25 * u * model.hw1 * model.hw1 * np.square(x + model.a)
        right = 0.25 * u * model.hw2 * model.hw2 * np.square(x - model.a)
        out = np.where(x <= -model.a, left, np.where(x >= model.a, right, model.v0))
        return out
    raise ModelMismatchError(f"unknown model type {type(model).__name__}")


def delta_strength(model: ModelParams) -> float:
    """Strength of the delta spike at x = 0 (0.0 for the rectangular models)."""
    if isinstance(model, (M1Params, M3Params)):
        return model.v0
    return 0.0


def potential_cell_average(
    model: ModelParams, units: UnitsConfig, x: np.ndarray, h: float
) -> np.ndarray:
    """Average of the smooth potential over each grid cell [x-h/2, x+h/2].

    For the rectangular-barrier models the step edges generally fall
    between nodes; pointwise sampling then carries an O(h) edge-placement
    error that Richardson extrapolation cannot cancel.  Averaging the
    exact piecewise integral restores smooth O(h^2) behavior.  The smooth
    models (m1, m3) keep pointwise values.
    """
    x = np.asarray(x, dtype=np.float64)
    u = units.u
    if isinstance(model, M2Params):
        lo = np.maximum(x - 0.5 * h, -model.b)
        hi = np.minimum(x + 0.5 * h, model.b)
        return model.v0 * np.maximum(0.0, hi - lo) / h
    if isinstance(model, M4Params):
        lo = x - 0.5 * h
        hi = x + 0.5 * h

        def quad_piece(center: float, hw: float, a: float, b: float) -> np.ndarray:
            # integral of (u/4) hw^2 (t - center)^2 over [a, b] (b >= a)
            coeff = 0.25 * u * hw * hw / 3.0
            return coeff * ((b - center) ** 3 - (a - center) ** 3)

        left = quad_piece(-model.a, model.hw1, lo, np.minimum(hi, -model.a))
        left = np.where(lo < -model.a, left, 0.0)
        right = quad_piece(model.a, model.hw2, np.maximum(lo, model.a), hi)
        right = np.where(hi > model.a, right, 0.0)
        mid = model.v0 * np.maximum(
            0.0, np.minimum(hi, model.a) - np.maximum(lo, -model.a)
        )
        return (left + mid + right) / h
    return potential_on_grid(model, units, x)


def level_window_estimate(model: ModelParams, units: UnitsConfig, n_levels: int) -> float:
    """Upper-bound estimate for the n-th level, for initial scan windows
    and oracle domain sizing.  Kept tight on purpose: scan cells scale
    with the window, and near-degenerate pairs are easiest to resolve on
    fine grids.  Callers auto-expand if it ever falls short.

    Bounds used: a positive delta spike is a rank-one perturbation, so
    E_n(v0) <= E_{n+1}(v0=0) (interlacing); a rectangular barrier is
    dominated by lifting the whole box floor to v0.
    """
    u = units.u
    if isinstance(model, M1Params):
        width = model.a + model.b
        return ((n_levels + 3) * math.pi / width) ** 2 / u + 1.0
    if isinstance(model, M2Params):
        full_box = ((n_levels + 2) * math.pi / (model.a + model.c)) ** 2 / u + model.v0
        return full_box + 1.0
    hmean = 2.0 * model.hw1 * model.hw2 / (model.hw1 + model.hw2)
    top = (n_levels + 2) * hmean + 3.0 * max(model.hw1, model.hw2)
    if isinstance(model, M4Params):
        top += min(0.5 * model.v0, (n_levels + 2) * max(model.hw1, model.hw2))
    return top
