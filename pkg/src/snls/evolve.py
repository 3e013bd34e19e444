"""Time evolution: exact free flow, Strang split-stepping, Duhamel machinery.

The linear group e^{it Laplacian} is exact in sine-coefficient space, so the
only stepping error is the Strang splitting commutator; the adaptive rule
bounds the nonlinear phase increment |u|^6 dt per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import functionals as fn
from .radial import RadialField, RadialGrid, SpectralField, from_spectral, to_spectral

__all__ = [
    "StepController",
    "Trajectory",
    "free_evolve",
    "nonlinear_phase",
    "strang_step",
    "evolve",
    "duhamel_residual",
    "duhamel_tail",
    "average_translate",
    "StepOverflowError",
]

S_CRITICAL = fn.S_CRITICAL


class StepOverflowError(RuntimeError):
    """A split step produced non-finite samples; the controller should halve dt."""


@dataclass(frozen=True)
class StepController:
    """Adaptive stepping knobs: dt = min(dt_max, theta / max(1e-12, sup|u|^6))."""

    dt_max: float = 0.01
    theta: float = 0.1
    snapshot_stride: float = 0.02
    boundary_mass_tol: float = 1e-6
    blowup_ceiling: float = 1e6
    sobolev_delta: float = 0.1
    cache_sc_plus1: bool = True

    def __post_init__(self):
        if not (0 < self.theta <= 1):
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if not (self.dt_max > 0):
            raise ValueError(f"dt_max must be positive, got {self.dt_max}")
        if not (self.snapshot_stride > 0):
            raise ValueError(f"snapshot_stride must be positive, got {self.snapshot_stride}")


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped frames plus cached per-frame scalar densities.

    densities keys: mass, energy, s_density (||u||_L15^15), H_sc_minus,
    H_sc, H_sc_plus1 (empty when not cached), boundary_mass, sup_abs.
    Immutable after a run; safe to share read-only across workers.
    """

    grid: RadialGrid
    times: np.ndarray
    frames: np.ndarray  # (n_frames, n) complex
    densities: dict
    provenance: dict = dc_field(default_factory=dict, compare=False)
    status: str = "ok"
    boundary_breach: bool = False

    def __post_init__(self):
        t = np.ascontiguousarray(self.times, dtype=float)
        f = np.ascontiguousarray(self.frames, dtype=np.complex128)
        if f.shape != (t.size, self.grid.n):
            raise ValueError("frames must have shape (len(times), grid.n)")
        if t.size >= 2 and not (np.diff(t) > 0).all():
            raise ValueError("times must be strictly increasing")
        for k, v in self.densities.items():
            if len(v) != t.size:
                raise ValueError(f"density series {k!r} has wrong length")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "frames", f)
        t.flags.writeable = False
        f.flags.writeable = False

    def field(self, m: int) -> RadialField:
        return RadialField(self.grid, self.frames[m])

    def frame_index(self, t: float) -> int:
        m = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[m] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"t = {t} is not a stored frame time")
        return m

    @property
    def t_span(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])


def free_evolve(field: RadialField, t: float) -> RadialField:
    """e^{it Laplacian}: multiply sine coefficients by exp(-i rho_k^2 t)."""
    if t == 0.0:
        return field
    spec = to_spectral(field)
    phase = np.exp(-1j * field.grid.frequencies**2 * t)
    return from_spectral(SpectralField(field.grid, spec.coeffs * phase))


def nonlinear_phase(field: RadialField, dt: float) -> RadialField:
    """Exact solution of i u_t = |u|^6 u: pointwise phase e^{-i|u|^6 dt}."""
    if dt == 0.0:
        return field
    u = field.values
    return RadialField(field.grid, u * np.exp(-1j * np.abs(u) ** 6 * dt))


def strang_step(field: RadialField, dt: float) -> RadialField:
    """Second-order split step: half nonlinear phase, free flow, half phase."""
    if dt == 0.0:
        return field
    u = nonlinear_phase(field, dt / 2.0)
    u = free_evolve(u, dt)
    u = nonlinear_phase(u, dt / 2.0)
    if not u.is_finite():
        raise StepOverflowError(f"non-finite samples after step dt = {dt}")
    return u


_DENSITY_KEYS = ("mass", "energy", "s_density", "H_sc_minus", "H_sc", "H_sc_plus1", "boundary_mass", "sup_abs")


def _frame_stats(field: RadialField, ctl: StepController) -> dict:
    g = field.grid
    c2 = np.abs(to_spectral(field).coeffs) ** 2
    rho = g.frequencies
    scale = 4.0 * np.pi * g.dr

    def sob(s):
        return float(np.sqrt(scale * (rho ** (2.0 * s) * c2).sum()))

    m = float(scale * c2.sum())
    grad2 = scale * (rho**2 * c2).sum()
    pot = fn.lebesgue_norm(field, 8.0) ** 8
    return {
        "mass": m,
        "energy": float(0.5 * grad2 + 0.125 * pot),
        "s_density": fn.s_density(field),
        "H_sc_minus": sob(S_CRITICAL - ctl.sobolev_delta),
        "H_sc": sob(S_CRITICAL),
        "H_sc_plus1": sob(S_CRITICAL + 1.0) if ctl.cache_sc_plus1 else np.nan,
        "boundary_mass": fn.boundary_mass(field),
        "sup_abs": field.sup_abs(),
    }


def _snapshot_times(t_a: float, t_b: float, stride: float, anchor: float | None = None) -> np.ndarray:
    """Snapshot boundaries anchor + k*stride inside (t_a, t_b], always ending at t_b.

    The anchor (default t_a) keeps resumed runs on the original grid.
    """
    anchor = t_a if anchor is None else anchor
    k = int(np.floor((t_a - anchor) / stride + 1e-9)) + 1
    out = []
    while True:
        t = anchor + stride * k
        if t >= t_b - 1e-12 * max(1.0, abs(t_b)):
            break
        if t > t_a + 1e-12 * max(1.0, abs(t_a)):
            out.append(t)
        k += 1
    out.append(t_b)
    return np.array(out)


def evolve(
    u0: RadialField,
    t_span,
    ctl: StepController,
    provenance: dict | None = None,
    on_frame=None,
    snap_anchor: float | None = None,
) -> Trajectory:
    """Adaptive split-step evolution with frames every snapshot_stride.

    Aborts with a partial trajectory on step-rejection cascade (status
    'dt_underflow') or when sup|u| exceeds the blow-up ceiling (status
    'blowup_abort').  A boundary-mass breach only sets a flag; the run
    continues.  on_frame(t, field, stats), when given, fires at every
    stored frame including the initial one.
    """
    t_a, t_b = float(t_span[0]), float(t_span[1])
    if not t_a < t_b:
        raise ValueError(f"need t_a < t_b, got {t_span}")

    snap_times = _snapshot_times(t_a, t_b, ctl.snapshot_stride, snap_anchor)

    times = [t_a]
    frames = [u0.values.copy()]
    stats = [_frame_stats(u0, ctl)]
    mass0 = stats[0]["mass"]
    if on_frame is not None:
        on_frame(t_a, u0, stats[0])

    status = "ok"
    breach = False
    u, t = u0, t_a
    for t_next in snap_times:
        while status == "ok":
            rem = t_next - t
            if rem <= 1e-12 * max(1.0, abs(t_next)):
                break
            sup = u.sup_abs()
            if sup > ctl.blowup_ceiling:
                status = "blowup_abort"
                break
            dt_raw = min(ctl.dt_max, ctl.theta / max(1e-12, sup**6))
            dt = min(dt_raw, rem)
            while True:
                try:
                    u = strang_step(u, dt)
                    break
                except StepOverflowError:
                    dt /= 2.0
                    if dt < 1e-12 * dt_raw:
                        status = "dt_underflow"
                        break
            if status != "ok":
                break
            t += dt
        if status != "ok":
            break
        t = float(t_next)
        st = _frame_stats(u, ctl)
        if mass0 > 0 and st["boundary_mass"] > ctl.boundary_mass_tol * mass0:
            breach = True
        times.append(t)
        frames.append(u.values.copy())
        stats.append(st)
        if on_frame is not None:
            on_frame(t, u, st)

    densities = {k: np.array([s[k] for s in stats]) for k in _DENSITY_KEYS}
    prov = dict(provenance or {})
    prov.setdefault("controller", {
        "dt_max": ctl.dt_max, "theta": ctl.theta, "snapshot_stride": ctl.snapshot_stride,
        "boundary_mass_tol": ctl.boundary_mass_tol, "blowup_ceiling": ctl.blowup_ceiling,
        "sobolev_delta": ctl.sobolev_delta,
    })
    return Trajectory(
        grid=u0.grid,
        times=np.array(times),
        frames=np.array(frames),
        densities=densities,
        provenance=prov,
        status=status,
        boundary_breach=breach,
    )


def _nonlinear_term(values: np.ndarray) -> np.ndarray:
    return np.abs(values) ** 6 * values


def _windowed_duhamel_coeffs(traj: Trajectory, sel: np.ndarray, t: float) -> np.ndarray:
    """Sine coefficients of int over the selected frames of e^{i(t-t')L} |u|^6 u dt'."""
    g = traj.grid
    rho2 = g.frequencies**2
    times = traj.times[sel]
    wts = np.zeros(sel.size)
    dt = np.diff(times)
    wts[:-1] += 0.5 * dt
    wts[1:] += 0.5 * dt
    acc = np.zeros(g.n, dtype=np.complex128)
    for wt, m, tm in zip(wts, sel, times):
        f = RadialField(g, _nonlinear_term(traj.frames[m]))
        acc += wt * to_spectral(f).coeffs * np.exp(-1j * rho2 * (t - tm))
    return acc


def duhamel_residual(traj: Trajectory, t: float, t_base: float | None = None,
                     include_nonlinearity: bool = True) -> float:
    """L2 norm of u(t) minus the integral-equation right-hand side.

    The right-hand side e^{i(t-t0)L} u(t0) - i int_{t0}^{t} e^{i(t-t')L}
    [|u|^6 u](t') dt' is evaluated by trapezoid quadrature over the stored
    frames; a small residual certifies the trajectory solves the
    integral equation at quadrature accuracy.  With
    include_nonlinearity=False the right-hand side is the bare linear
    flow (the check for nonlinearity-disabled runs).
    """
    t_base = traj.times[0] if t_base is None else t_base
    m_t = traj.frame_index(t)
    m_0 = traj.frame_index(t_base)
    if m_t - m_0 < 8:
        raise ValueError("need at least 8 frames before t for the Duhamel quadrature")
    g = traj.grid
    lin = to_spectral(traj.field(m_0)).coeffs * np.exp(-1j * g.frequencies**2 * (t - traj.times[m_0]))
    rhs = lin
    if include_nonlinearity:
        sel = np.arange(m_0, m_t + 1)
        rhs = lin - 1j * _windowed_duhamel_coeffs(traj, sel, t)
    resid = to_spectral(traj.field(m_t)).coeffs - rhs
    return float(np.sqrt(4.0 * np.pi * g.dr * (np.abs(resid) ** 2).sum()))


def duhamel_tail(traj: Trajectory, window, t: float) -> RadialField:
    """v(t) = int over the window of e^{i(t-t')L}[|u|^6 u](t') dt'.

    The window must not contain t (the kernel bound needs separation);
    window endpoints snap to stored frame times.  v solves the free
    equation in t exactly at the quadrature level.
    """
    a, b = float(window[0]), float(window[1])
    if not a < b:
        raise ValueError(f"window must be increasing, got {window}")
    if a < t < b:
        raise ValueError(f"t = {t} lies inside the window ({a}, {b}); separation required")
    m_a, m_b = traj.frame_index(a), traj.frame_index(b)
    if m_b - m_a < 1:
        raise ValueError("window must contain at least two frames")
    sel = np.arange(m_a, m_b + 1)
    coeffs = _windowed_duhamel_coeffs(traj, sel, t)
    return from_spectral(SpectralField(traj.grid, coeffs))


def _mollifier_multiplier(grid: RadialGrid, r_avg: float) -> np.ndarray:
    """3D Fourier transform of the unit-mass mollifier chi_{r_avg} on the rho grid."""
    sig = np.linspace(0.0, 1.0, 2049)
    prof = fn.cutoff_profile(sig) * sig**2
    i2 = np.trapezoid(prof, sig)
    rho = grid.frequencies
    out = np.empty(grid.n)
    for lo in range(0, grid.n, 512):
        hi = min(lo + 512, grid.n)
        x = rho[lo:hi, None] * (r_avg * sig[None, :])
        out[lo:hi] = np.trapezoid(prof[None, :] * np.sinc(x / np.pi), sig, axis=1) / i2
    return out


def average_translate(field: RadialField, r_avg: float) -> RadialField:
    """Convolve with the unit-mass mollifier of scale r_avg (spherical averaging).

    Implemented as the exact spectral multiplier of the 3D radial
    convolution; the Dirichlet image at r_max is the only deviation from
    free space, negligible for fields supported away from the boundary
    (hence the precondition r_avg < r_max/4).  |multiplier| <= 1, so L^p
    norms do not increase (Young).
    """
    if not (0 < r_avg < field.grid.r_max / 4.0):
        raise ValueError(f"r_avg must lie in (0, r_max/4), got {r_avg}")
    m = _mollifier_multiplier(field.grid, r_avg)
    spec = to_spectral(field)
    return from_spectral(SpectralField(field.grid, spec.coeffs * m))


def rebuild_trajectory(
    grid: RadialGrid,
    times: np.ndarray,
    frames: np.ndarray,
    ctl: StepController,
    provenance: dict | None = None,
    status: str = "ok",
) -> Trajectory:
    """Reconstruct a Trajectory (densities recomputed) from stored frames."""
    stats = [_frame_stats(RadialField(grid, frames[m]), ctl) for m in range(len(times))]
    densities = {k: np.array([s[k] for s in stats]) for k in _DENSITY_KEYS}
    mass0 = densities["mass"][0] if len(times) else 0.0
    breach = bool(mass0 > 0 and (densities["boundary_mass"] > ctl.boundary_mass_tol * mass0).any())
    return Trajectory(grid, np.asarray(times, dtype=float), np.asarray(frames, dtype=np.complex128),
                      densities, provenance=dict(provenance or {}), status=status, boundary_breach=breach)


def linear_trajectory(u0: RadialField, t_span, ctl: StepController) -> Trajectory:
    """Free-flow trajectory sampled like evolve (nonlinearity disabled)."""
    t_a, t_b = float(t_span[0]), float(t_span[1])
    if not t_a < t_b:
        raise ValueError(f"need t_a < t_b, got {t_span}")
    snap = np.concatenate(([t_a], _snapshot_times(t_a, t_b, ctl.snapshot_stride)))
    c0 = to_spectral(u0).coeffs
    rho2 = u0.grid.frequencies**2
    frames, stats = [], []
    for t in snap:
        f = from_spectral(SpectralField(u0.grid, c0 * np.exp(-1j * rho2 * (t - t_a))))
        frames.append(f.values)
        stats.append(_frame_stats(f, ctl))
    densities = {k: np.array([s[k] for s in stats]) for k in _DENSITY_KEYS}
    return Trajectory(u0.grid, snap, np.array(frames), densities, provenance={"linear": True})
