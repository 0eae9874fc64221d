"""Independent finite-difference ground truth for the analytic solvers.

Central-difference discretization of psi'' + u(E - V)psi = 0 on a uniform
grid with hard Dirichlet ends gives a symmetric tridiagonal matrix whose
eigenvalues are located by Sturm-sequence multisection; Richardson
extrapolation over grids h and h/2 removes the leading O(h^2) error.
A two-sided RK4 shooting check quantifies the Wronskian-proportionality
property that makes 1D bound states non-degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, NonConvergenceError
from .models import (
    M1Params,
    M2Params,
    M3Params,
    ModelParams,
    UnitsConfig,
    delta_strength,
    level_window_estimate,
    model_kind,
    potential_cell_average,
    potential_on_grid,
)

__all__ = [
    "OracleConfig",
    "TridiagonalHamiltonian",
    "build_hamiltonian",
    "sturm_count",
    "lowest_eigenvalues",
    "oracle_levels",
    "wronskian_constancy",
    "default_e_top",
]

# Interior points when OracleConfig.n_points is left unset.
_DEFAULT_POINTS = {"m1": 4000, "m2": 4000, "m3": 6000, "m4": 6000}

# Probes per unconverged level and per multisection pass.
_PROBES_PER_LEVEL = 8


@dataclass(frozen=True)
class OracleConfig:
    """Grid controls for the finite-difference oracle.

    n_points: interior grid points (model-dependent default when None).
    turning_point_margin: harmonic domains extend at least this multiple of
        the classical turning point of the sizing energy (and always far
        enough that V at the walls is >= 4x the sizing energy).
    richardson: combine grids h and h/2 as (4 E(h/2) - E(h))/3.
    """

    n_points: int | None = None
    turning_point_margin: float = 2.0
    richardson: bool = True

    def __post_init__(self) -> None:
        if self.n_points is not None and self.n_points < 500:
            raise ConfigError(f"oracle n_points must be >= 500, got {self.n_points}")
        if self.turning_point_margin < 1.5:
            raise ConfigError(
                f"turning_point_margin must be >= 1.5, got {self.turning_point_margin}"
            )

    def resolve_points(self, model: ModelParams) -> int:
        return self.n_points if self.n_points is not None else _DEFAULT_POINTS[model_kind(model)]


@dataclass(frozen=True)
class TridiagonalHamiltonian:
    """Discretized Hamiltonian: diag[i] = 2/(u h^2) + V(x_i) (+ v0/h at the
    delta node), offdiag = -1/(u h^2), interior nodes x_i = x_min + (i+1) h."""

    diag: np.ndarray
    offdiag: np.ndarray
    x_min: float
    h: float
    model_tag: str
    delta_index: int | None = None

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    @property
    def x_max(self) -> float:
        return self.x_min + (self.size + 1) * self.h

    def interior_x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(1, self.size + 1)


@dataclass(frozen=True)
class _GridSpec:
    x_min: float
    h: float
    n_interior: int
    delta_index: int | None

    def refined(self) -> "_GridSpec":
        """Same domain at half the step (intervals doubled)."""
        di = None if self.delta_index is None else 2 * self.delta_index + 1
        return _GridSpec(self.x_min, 0.5 * self.h, 2 * self.n_interior + 1, di)


def default_e_top(model: ModelParams, units: UnitsConfig, n: int) -> float:
    """Domain-sizing energy before any analytic levels are known."""
    return level_window_estimate(model, units, n)


def _snap_m1_grid(params: M1Params, n_target: int) -> _GridSpec:
    """Grid over [-a, b] with n near n_target, chosen so a node sits as
    close to x = 0 as the geometry allows (the delta lands on that node)."""
    span = params.a + params.b
    best: tuple[float, int, float, int] | None = None
    for n in range(n_target, n_target + 241):
        h = span / (n + 1)
        pos = params.a / h
        idx = round(pos)
        if idx < 1 or idx > n:
            continue
        off = abs(pos - idx)
        if best is None or off < best[0] - 1e-15:
            best = (off, n, h, idx - 1)
            if off < 1e-9:
                break
    if best is None:
        raise ConfigError(
            "delta node would fall on a boundary; increase n_points for this m1 geometry"
        )
    _, n, h, delta_index = best
    return _GridSpec(-params.a, h, n, delta_index)


def _harmonic_reach(e_top: float, hw: float, u: float, margin: float) -> float:
    """Distance from a harmonic well's center beyond which V >= 4 e_top
    (and at least `margin` classical turning points of e_top)."""
    x_turn = 2.0 * math.sqrt(e_top / u) / hw
    return max(margin, 2.0) * x_turn


def _grid_spec(
    model: ModelParams, units: UnitsConfig, cfg: OracleConfig, e_top: float | None
) -> _GridSpec:
    n_target = cfg.resolve_points(model)
    if isinstance(model, M1Params):
        return _snap_m1_grid(model, n_target)
    if isinstance(model, M2Params):
        span = model.a + model.c
        return _GridSpec(-model.a, span / (n_target + 1), n_target, None)

    if e_top is None or not e_top > 0.0:
        raise ConfigError("harmonic models need a positive sizing energy e_top")
    margin = cfg.turning_point_margin
    reach1 = _harmonic_reach(e_top, model.hw1, units.u, margin)
    reach2 = _harmonic_reach(e_top, model.hw2, units.u, margin)
    if isinstance(model, M3Params):
        # Step chosen so that x = 0 is exactly a grid node (the delta node).
        h0 = (reach1 + reach2) / (n_target + 1)
        m_left = max(2, round(reach1 / h0))
        h = reach1 / m_left
        m_right = max(2, math.ceil(reach2 / h))
        return _GridSpec(-m_left * h, h, m_left + m_right - 1, m_left - 1)
    x_min = -model.a - reach1
    x_max = model.a + reach2
    return _GridSpec(x_min, (x_max - x_min) / (n_target + 1), n_target, None)


def _assemble(
    model: ModelParams, units: UnitsConfig, spec: _GridSpec
) -> TridiagonalHamiltonian:
    u = units.u
    x = spec.x_min + spec.h * np.arange(1, spec.n_interior + 1)
    kin = 2.0 / (u * spec.h * spec.h)
    diag = kin + potential_cell_average(model, units, x, spec.h)
    offdiag = np.full(spec.n_interior - 1, -1.0 / (u * spec.h * spec.h))
    v0 = delta_strength(model)
    if v0 != 0.0:
        if spec.delta_index is None:
            raise ConfigError("delta model without a delta node in the grid")
        diag[spec.delta_index] += v0 / spec.h
    return TridiagonalHamiltonian(
        diag=diag,
        offdiag=offdiag,
        x_min=spec.x_min,
        h=spec.h,
        model_tag=model_kind(model),
        delta_index=spec.delta_index,
    )


def build_hamiltonian(
    model: ModelParams,
    units: UnitsConfig,
    cfg: OracleConfig,
    e_top: float | None = None,
) -> TridiagonalHamiltonian:
    """Tridiagonal discretization of the model on its natural domain.

    Box models (m1, m2) use their walls exactly; harmonic models are
    truncated where V >= 4*e_top (e_top defaults to a variant-specific
    level-count estimate).  Delta spikes enter as v0/h on the diagonal at
    the node placed at x = 0.
    """
    if e_top is None:
        e_top = default_e_top(model, units, 6)
    return _assemble(model, units, _grid_spec(model, units, cfg, e_top))


def sturm_count(T: TridiagonalHamiltonian, energy: float) -> int:
    """Number of eigenvalues of T strictly below `energy`."""
    return int(_kernels.sturm_counts(T.diag, T.offdiag, np.array([energy]))[0])


def lowest_eigenvalues(T: TridiagonalHamiltonian, n: int, tol: float = 1e-10) -> list[float]:
    """First n eigenvalues, each bracketed by Sturm-count multisection to
    an interval of width <= tol; deterministic."""
    if n < 1 or n > T.size:
        raise ValueError(f"need 1 <= n <= {T.size}, got {n}")
    if not tol > 0.0:
        raise ValueError("tol must be positive")

    d = T.diag
    e = np.abs(T.offdiag)
    radius = np.zeros_like(d)
    radius[:-1] += e
    radius[1:] += e
    lo0 = float(np.min(d - radius))
    hi0 = float(np.max(d + radius))
    hi0 += max(1.0, abs(hi0)) * 1e-12  # strict count must include the top eigenvalue

    los = np.full(n, lo0)
    his = np.full(n, hi0)
    fractions = np.arange(1, _PROBES_PER_LEVEL) / _PROBES_PER_LEVEL

    for _ in range(300):
        open_levels = np.nonzero(his - los > tol)[0]
        if open_levels.size == 0:
            break
        probes = los[open_levels, None] + (his - los)[open_levels, None] * fractions[None, :]
        counts = _kernels.sturm_counts(T.diag, T.offdiag, probes.ravel())
        counts = counts.reshape(probes.shape)
        for row, j in enumerate(open_levels):
            want = j + 1
            below = counts[row] >= want
            first = int(np.argmax(below)) if below.any() else None
            if first is None:
                los[j] = probes[row, -1]
            elif first == 0:
                his[j] = probes[row, 0]
            else:
                los[j] = probes[row, first - 1]
                his[j] = probes[row, first]
    else:
        raise NonConvergenceError("eigenvalue multisection did not converge")
    return sorted(0.5 * (los[j] + his[j]) for j in range(n))


def oracle_levels(
    model: ModelParams,
    units: UnitsConfig,
    n: int,
    cfg: OracleConfig,
    e_top: float | None = None,
    tol: float = 1e-11,
) -> list[float]:
    """First n eigenvalues from the finite-difference oracle.

    With cfg.richardson, combines single-grid solutions at h and h/2 as
    (4 E(h/2) - E(h))/3, cancelling the O(h^2) term.  Harmonic domains are
    sized from e_top (1.5x the highest analytic level when the caller has
    one); if the solved levels reach past the sizing energy, the domain is
    grown and the solve repeated.
    """
    box_model = isinstance(model, (M1Params, M2Params))
    sizing = e_top if e_top is not None else default_e_top(model, units, n)
    for _ in range(5):
        spec = _grid_spec(model, units, cfg, sizing)
        coarse = lowest_eigenvalues(_assemble(model, units, spec), n, tol)
        if cfg.richardson:
            fine = lowest_eigenvalues(_assemble(model, units, spec.refined()), n, tol)
            levels = [(4.0 * f - c) / 3.0 for c, f in zip(coarse, fine)]
        else:
            levels = coarse
        if box_model or levels[-1] * 1.5 <= sizing:
            return levels
        sizing = levels[-1] * 2.0
    raise NonConvergenceError("oracle domain sizing did not stabilize")


def _shooting_breakpoints(model: ModelParams) -> list[float]:
    """Interior positions where the potential steps or a delta sits; the
    shooting integration is split there so each span stays smooth."""
    if isinstance(model, (M1Params, M3Params)):
        return [0.0]
    if isinstance(model, M2Params):
        return [-model.b, model.b]
    return [-model.a, model.a] if model.a > 0.0 else []


def _shooting_segments(
    model: ModelParams, units: UnitsConfig, cfg: OracleConfig, energy: float
) -> list[tuple[float, float, int]]:
    sizing = max(3.0 * energy, level_window_estimate(model, units, 1))
    spec = _grid_spec(model, units, cfg, sizing)
    x_lo = spec.x_min
    x_hi = spec.x_min + (spec.n_interior + 1) * spec.h
    cuts = [x_lo] + [b for b in _shooting_breakpoints(model) if x_lo < b < x_hi] + [x_hi]
    # 6x the matrix resolution: the two-sided mismatch is amplified through
    # the forbidden tails, making shooting the most step-sensitive consumer
    # of the grid (error falls as h^4).
    h_target = (x_hi - x_lo) / (6 * cfg.resolve_points(model))
    return [
        (s, e, max(4, round((e - s) / h_target))) for s, e in zip(cuts[:-1], cuts[1:])
    ]


def _segment_v_half(
    model: ModelParams, units: UnitsConfig, s: float, e: float, m: int
) -> np.ndarray:
    x = s + (e - s) / (2 * m) * np.arange(2 * m + 1)
    # One-sided limits at the span ends: sample just inside so step models
    # see the correct branch at their edges.
    x[0] = s + 1e-9 * (e - s)
    x[-1] = e - 1e-9 * (e - s)
    return potential_on_grid(model, units, x)


def _shoot(
    model: ModelParams,
    units: UnitsConfig,
    segments: list[tuple[float, float, int]],
    energy: float,
    from_left: bool,
) -> tuple[np.ndarray, np.ndarray]:
    total = sum(m for _, _, m in segments) + 1
    psi = np.empty(total)
    dpsi = np.empty(total)
    offsets = np.concatenate([[0], np.cumsum([m for _, _, m in segments])])
    v0 = delta_strength(model)
    u = units.u

    y1, y2 = 0.0, 1.0 if from_left else -1.0
    order = range(len(segments)) if from_left else range(len(segments) - 1, -1, -1)
    junction_fix: tuple[int, float] | None = None
    for k in order:
        s, e, m = segments[k]
        v_half = _segment_v_half(model, units, s, e, m)
        h_seg = (e - s) / m
        p, d = _kernels.integrate_schrodinger(v_half, h_seg, u, energy, y1, y2, from_left)
        lo = int(offsets[k])
        psi[lo : lo + m + 1] = p
        dpsi[lo : lo + m + 1] = d
        if junction_fix is not None:
            # The slice write above put the post-jump (0+) derivative on the
            # shared delta node; both directions store the 0- convention.
            dpsi[junction_fix[0]] = junction_fix[1]
            junction_fix = None
        if from_left:
            y1, y2 = float(p[-1]), float(d[-1])
            if v0 != 0.0 and k + 1 < len(segments) and segments[k + 1][0] == 0.0:
                junction_fix = (lo + m, y2)
                y2 += u * v0 * y1
        else:
            y1, y2 = float(p[0]), float(d[0])
            if v0 != 0.0 and s == 0.0:
                y2 -= u * v0 * y1
                dpsi[lo] = y2  # rewrite junction to the 0- convention
    return psi, dpsi


def wronskian_constancy(
    model: ModelParams,
    units: UnitsConfig,
    energy: float,
    cfg: OracleConfig,
) -> float:
    """Two-sided shooting residual at the given energy.

    Integrates one solution from each wall (fourth-order one-step scheme,
    spans split at potential steps, the delta derivative jump applied at
    its junction) and returns the max over interior nodes of
    |W| / max(|psi_L psi_R'|, |psi_R psi_L'|, floor) with
    W = psi_L psi_R' - psi_R psi_L'.  Near 0 at an eigenvalue (the two
    solutions are proportional), O(1) away from one.
    """
    segments = _shooting_segments(model, units, cfg, energy)
    psi_l, dpsi_l = _shoot(model, units, segments, energy, True)
    psi_r, dpsi_r = _shoot(model, units, segments, energy, False)
    cross_lr = (psi_l * dpsi_r)[1:-1]
    cross_rl = (psi_r * dpsi_l)[1:-1]
    wronskian = np.abs(cross_lr - cross_rl)
    scale = np.maximum(np.abs(cross_lr), np.abs(cross_rl))
    # The floor keeps nodes where both products vanish together (zeros of
    # psi or psi' of two proportional solutions) from dominating the max.
    floor = 1e-6 * float(np.max(scale))
    if floor == 0.0:
        return 1.0
    return float(np.max(wronskian / np.maximum(scale, floor)))
