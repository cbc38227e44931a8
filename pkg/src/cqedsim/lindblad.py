"""Lindblad models and their time evolution.

Dissipator convention: D[O]rho = 2 O rho O^dag - {O^dag O, rho}, so a photon
mode with loss rate kappa loses occupation as exp(-2 kappa t).  This carries
a factor 2 relative to the other common convention and is used consistently
throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spaces import OperatorMatrix, SpaceDescriptor

__all__ = [
    "LindbladModel",
    "DensityState",
    "Trajectory",
    "StiffnessError",
    "IntegrationAccuracyError",
    "rhs",
    "evolve",
]


class StiffnessError(RuntimeError):
    """Raised when the adaptive step size underflows or the step budget is exhausted."""


class IntegrationAccuracyError(RuntimeError):
    """Raised when the trace drift of an integrated state exceeds the allowed bound."""


@dataclass(frozen=True)
class LindbladModel:
    """A Hamiltonian plus (rate, jump operator) pairs on one Hilbert space."""

    hamiltonian: OperatorMatrix
    dissipators: tuple[tuple[float, OperatorMatrix], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "dissipators", tuple(self.dissipators))
        if not self.hamiltonian.is_hermitian(1e-10):
            raise ValueError("hamiltonian is not Hermitian within tolerance")
        for rate, jump in self.dissipators:
            if rate < 0:
                raise ValueError(f"dissipator rate must be non-negative, got {rate}")
            if jump.space != self.hamiltonian.space:
                raise ValueError("jump operator lives on a different space than H")

    @property
    def space(self) -> SpaceDescriptor:
        return self.hamiltonian.space

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim


class DensityState:
    """Hermitian, unit-trace, (numerically) positive density matrix."""

    def __init__(
        self,
        matrix: OperatorMatrix,
        *,
        herm_tol: float = 1e-10,
        trace_tol: float = 1e-10,
        positivity_tol: float = 1e-8,
        check_positivity: bool = True,
    ):
        m = matrix.entries
        scale = max(1.0, float(np.abs(m).max(initial=0.0)))
        if np.abs(m - m.conj().T).max(initial=0.0) > herm_tol * scale:
            raise ValueError("density matrix is not Hermitian within tolerance")
        tr = np.trace(m)
        if abs(tr - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {tr} deviates from 1")
        if check_positivity:
            min_eig = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
            if min_eig < -positivity_tol:
                raise ValueError(f"density matrix has negative eigenvalue {min_eig}")
        self.matrix = matrix

    @property
    def space(self) -> SpaceDescriptor:
        return self.matrix.space

    @property
    def entries(self) -> np.ndarray:
        return self.matrix.entries

    @staticmethod
    def from_populations(space: SpaceDescriptor, populations) -> "DensityState":
        p = np.asarray(populations, dtype=float)
        p = p / p.sum()
        return DensityState(OperatorMatrix(space, np.diag(p).astype(complex)))

    @staticmethod
    def pure(space: SpaceDescriptor, vector) -> "DensityState":
        v = np.asarray(vector, dtype=complex)
        v = v / np.linalg.norm(v)
        return DensityState(OperatorMatrix(space, np.outer(v, v.conj())))


@dataclass
class Trajectory:
    """Time grid, optional stored states, and named expectation-value series."""

    times: np.ndarray
    states: list[DensityState] | None
    observables: dict[str, np.ndarray] = field(default_factory=dict)
    trace_drift: float = 0.0


def rhs(model: LindbladModel, rho: OperatorMatrix) -> OperatorMatrix:
    """-i[H, rho] + sum_n rate_n (2 J rho J^dag - {J^dag J, rho})."""
    if rho.space != model.space:
        raise ValueError("state space does not match model space")
    r = rho.entries
    h = model.hamiltonian.entries
    out = -1j * (h @ r - r @ h)
    for rate, jump in model.dissipators:
        j = jump.entries
        jd = j.conj().T
        k = jd @ j
        out += rate * (2.0 * (j @ r @ jd) - k @ r - r @ k)
    return OperatorMatrix(model.space, out)


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with PI step control
# ---------------------------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4


def _dopri_integrate(
    f, t0, y0, targets, rtol, atol, on_sample, max_steps, rebase=None, h_cap=np.inf
):
    """Integrate the matrix-valued ODE y' = f(tau, y), sampling at `targets`.

    ``f(tau, y, out)`` must fill ``out`` with the derivative, where ``tau`` is
    the time elapsed since the last accepted step (the generator may be
    expressed in a frame anchored there).  After each accepted step
    ``rebase((y5, k_last), h)`` maps the step-end arrays back to the lab
    frame, so accepted states are always lab-frame; the Hermitian part is
    then enforced.  Error control treats the complex state as 2 d^2 reals.
    """
    d = y0.shape[0]
    n_float = 2 * d * d

    kf = np.empty((7, n_float))
    k = [kf[s].view(complex).reshape(d, d) for s in range(7)]
    ys_f = np.empty(n_float)
    ys = ys_f.view(complex).reshape(d, d)
    err_f = np.empty(n_float)
    scale_f = np.empty(n_float)
    tmp = np.empty((d, d), dtype=complex)

    y = np.ascontiguousarray(y0, dtype=complex).copy()
    y_f = y.reshape(-1).view(float)

    t = t0
    f(0.0, y, k[0])

    span = targets[-1] - t0
    sc0 = atol + rtol * np.abs(y_f)
    d0 = float(np.sqrt(np.mean((y_f / sc0) ** 2)))
    d1 = float(np.sqrt(np.mean((kf[0] / sc0) ** 2)))
    h = min(span / 10.0, 0.01 * d0 / d1 if d1 > 1e-30 else span / 100.0, h_cap)
    h = max(h, 1e-12)

    err_prev = 1.0
    n_steps = 0

    idx = 0
    if targets[0] <= t0:
        on_sample(t0, y)
        idx = 1

    while idx < len(targets):
        target = targets[idx]
        while True:
            clamped = h >= target - t
            if clamped:
                h = target - t
            if h < 1e-13 * max(1.0, abs(t)):
                raise StiffnessError(f"step size underflow at t = {t:.6g}")
            n_steps += 1
            if n_steps > max_steps:
                raise StiffnessError(f"step budget {max_steps} exhausted at t = {t:.6g}")

            for s in range(1, 7):
                np.dot(_A[s], kf[:s], out=ys_f)
                ys_f *= h
                ys_f += y_f
                f(_C[s] * h, ys, k[s])
            # stage-7 input equals the 5th-order solution (FSAL): ys == y5

            np.dot(_E, kf, out=err_f)
            err_f *= h
            np.maximum(np.abs(y_f), np.abs(ys_f), out=scale_f)
            scale_f *= rtol
            scale_f += atol
            err_f /= scale_f
            err = float(np.sqrt(np.mean(err_f**2)))

            if err <= 1.0:
                t = target if clamped else t + h
                if rebase is not None:
                    rebase((ys, k[6]), h)
                np.conjugate(ys.T, out=tmp)
                np.add(ys, tmp, out=y)
                y *= 0.5
                kf[0] = kf[6]
                fac = 5.0 if err == 0.0 else 0.9 * err**-0.2 * err_prev**0.08
                h = min(h * min(5.0, max(0.2, fac)), h_cap)
                err_prev = max(err, 1e-10)
                if clamped:
                    break
            else:
                h = h * max(0.2, 0.9 * err**-0.2)
        on_sample(target, y)
        idx += 1


# ---------------------------------------------------------------------------
# Right-hand sides: dense lab frame, and a banded rotating frame
# ---------------------------------------------------------------------------

try:
    from ._kernels import rhs_kernel as _rhs_kernel
except ImportError:  # numba not installed: fall back to the numpy banded path
    _rhs_kernel = None


def _lab_frame_rhs(model: LindbladModel):
    h = model.hamiltonian.entries
    diss = []
    for rate, jump in model.dissipators:
        j = jump.entries
        jd = j.conj().T
        diss.append((rate, j, jd, jd @ j))

    def f(tau, r, out):
        acc = -1j * (h @ r - r @ h)
        for rate, j, jd, kk in diss:
            jr = j @ r
            acc += rate * (2.0 * (jr @ jd) - kk @ r - r @ kk)
        out[:] = acc

    return f, None, np.inf


def _bands_of(matrix: np.ndarray):
    """Nonzero offset diagonals of a matrix as (offset, start_row, values)."""
    m = matrix.shape[0]
    rows, cols = np.nonzero(np.abs(matrix) > 0.0)
    out = []
    for o in sorted(set(int(c) - int(r) for r, c in zip(rows, cols))):
        i0 = max(0, -o)
        n = m - abs(o)
        i = np.arange(i0, i0 + n)
        out.append((o, i0, matrix[i, i + o].copy()))
    return out


def _rotating_frame_rhs(model: LindbladModel):
    """Generator in the exact interaction picture of the Hamiltonian diagonal.

    Every operator element O_rc picks up the phase exp(i (E_r - E_c) tau)
    within a step; the frame is reset to the lab at each accepted step.
    Because the frame map leaves diagonal elements untouched, the trace stays
    a linear invariant and is conserved by the Runge-Kutta steps to roundoff.
    Returns (f, rebase, h_cap).
    """
    h = model.hamiltonian.entries
    d = h.shape[0]
    energies = np.real(np.diag(h))

    # Collect all banded terms with scales folded in:
    #   left:      out += w_b[a] * y[a + o, :]        (commutator -iH, -r K)
    #   right:     out[:, c + o] += w_b[c] * y[:, c]  (+iH, -r K)
    #   sandwich:  out[a, c] += w1[a] w2[c] y[a + o1, c + o2]   (2 r J y Jdag)
    left, right, pairs = [], [], []
    h_off = h - np.diag(np.diag(h))
    for o, i0, vals in _bands_of(h_off):
        left.append((o, i0, -1j * vals))
        right.append((o, i0, 1j * vals))
    for rate, jump in model.dissipators:
        j = jump.entries
        kk = j.conj().T @ j
        for o, i0, vals in _bands_of(kk):
            left.append((o, i0, -rate * vals))
            right.append((o, i0, -rate * vals))
        j_bands = _bands_of(j)
        for o1, i1, v1 in j_bands:
            for o2, i2, v2 in j_bands:
                pairs.append((o1, i1, 2.0 * rate * v1, o2, i2, v2.conj()))

    # Stack everything into (n_terms, d) weight/frequency arrays so the
    # per-evaluation phasing is one vectorized exp.
    bases, des = [], []

    def _add(o, i0, vals, flip=False):
        n = len(vals)
        base = np.zeros(d, dtype=complex)
        base[i0 : i0 + n] = vals
        de = np.zeros(d)
        idx = np.arange(i0, i0 + n)
        de[idx] = energies[idx] - energies[idx + o]
        if flip:
            de = -de
        bases.append(base)
        des.append(de)
        return o

    l_off = np.array([_add(o, i0, v) for o, i0, v in left], dtype=np.int64)
    r_off = np.array([_add(o, i0, v) for o, i0, v in right], dtype=np.int64)
    p_o1 = np.array([_add(o1, i1, v1) for o1, i1, v1, _, _, _ in pairs], dtype=np.int64)
    p_o2 = np.array(
        [_add(o2, i2, v2, flip=True) for _, _, _, o2, i2, v2 in pairs], dtype=np.int64
    )
    all_base = (
        np.array(bases).reshape(len(bases), d)
        if bases
        else np.zeros((0, d), dtype=complex)
    )
    all_de = np.array(des).reshape(len(des), d) if des else np.zeros((0, d))
    nl, nr, npair = len(left), len(right), len(pairs)

    if _rhs_kernel is not None:

        def f(tau, y, out):
            w = all_base * np.exp(1j * tau * all_de)
            _rhs_kernel(
                y,
                out,
                l_off,
                w[:nl],
                r_off,
                w[nl : nl + nr],
                p_o1,
                p_o2,
                w[nl + nr : nl + nr + npair],
                w[nl + nr + npair :],
                )

    else:
        tmp = np.empty((d, d), dtype=complex)
        tmp2 = np.empty((d, d), dtype=complex)

        def f(tau, y, out):
            w = all_base * np.exp(1j * tau * all_de)
            out[:] = 0.0
            for b in range(nl):
                o = l_off[b]
                i0 = max(0, -o)
                n = d - abs(o)
                wv = w[b, i0 : i0 + n]
                np.multiply(wv[:, None], y[i0 + o : i0 + o + n], out=tmp[:n])
                out[i0 : i0 + n] += tmp[:n]
            for b in range(nr):
                o = r_off[b]
                i0 = max(0, -o)
                n = d - abs(o)
                wv = w[nl + b, i0 : i0 + n]
                np.multiply(y[:, i0 : i0 + n], wv[None, :], out=tmp[:, :n])
                out[:, i0 + o : i0 + o + n] += tmp[:, :n]
            for p in range(npair):
                o1, o2 = p_o1[p], p_o2[p]
                w1 = w[nl + nr + p]
                w2 = w[nl + nr + npair + p]
                i1 = max(0, -o1)
                n1 = d - abs(o1)
                i2 = max(0, -o2)
                n2 = d - abs(o2)
                wv1 = w1[i1 : i1 + n1]
                wv2 = w2[i2 : i2 + n2]
                np.multiply(
                    y[i1 + o1 : i1 + o1 + n1, i2 + o2 : i2 + o2 + n2],
                    wv2[None, :],
                    out=tmp[:n1, :n2],
                )
                tmp[:n1, :n2] *= wv1[:, None]
                out[i1 : i1 + n1, i2 : i2 + n2] += tmp[:n1, :n2]

    def rebase(arrays, dt):
        u = np.exp(-1j * energies * dt)
        uc = u.conj()
        for a in arrays:
            a *= u[:, None]
            a *= uc[None, :]

    return f, rebase, np.inf


def evolve(
    model: LindbladModel,
    rho0: DensityState,
    t_grid,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    observables: dict[str, OperatorMatrix] | None = None,
    store_states: bool = True,
    rotating_frame: bool = False,
    max_steps: int = 20_000_000,
    trace_drift_tol: float = 1e-6,
) -> Trajectory:
    """Adaptive RK 5(4) integration of the master equation.

    No trace renormalization is applied; trace drift is reported on the
    returned trajectory and raises ``IntegrationAccuracyError`` past
    ``trace_drift_tol``.  With ``rotating_frame=True`` each step is taken in
    the interaction picture of the Hamiltonian's diagonal (fast coherent
    phases removed, trace exactly conserved) with the banded couplings
    applied in a fused single-pass kernel; states are mapped back to the lab
    frame at every accepted step, so all reported quantities are lab-frame
    either way.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if t_grid[0] != 0.0:
        raise ValueError("t_grid must start at 0")
    if rho0.space != model.space:
        raise ValueError("initial state space does not match model space")

    if rotating_frame:
        f, rebase, h_cap = _rotating_frame_rhs(model)
    else:
        f, rebase, h_cap = _lab_frame_rhs(model)

    obs = observables or {}
    for name, op in obs.items():
        if op.space != model.space:
            raise ValueError(f"observable {name!r} lives on a different space")
    obs_ops = {name: op.entries for name, op in obs.items()}

    times: list[float] = []
    states: list[DensityState] | None = [] if store_states else None
    series: dict[str, list[complex]] = {name: [] for name in obs_ops}
    max_drift = 0.0

    def on_sample(t, r):
        nonlocal max_drift
        tr = np.trace(r)
        drift = abs(tr.real - 1.0) + abs(tr.imag)
        max_drift = max(max_drift, drift)
        if drift > trace_drift_tol:
            raise IntegrationAccuracyError(
                f"trace drift {drift:.3e} exceeds {trace_drift_tol:.1e} at t = {t:.6g}"
            )
        times.append(float(t))
        if states is not None:
            states.append(
                DensityState(
                    OperatorMatrix(model.space, r.copy()),
                    trace_tol=10 * trace_drift_tol,
                    positivity_tol=1e-6,
                )
            )
        for name, op in obs_ops.items():
            # Tr(O rho) without forming the product matrix
            series[name].append(complex(np.einsum("ij,ji->", op, r)))

    if len(t_grid) == 1:
        on_sample(0.0, rho0.entries.astype(complex))
    else:
        _dopri_integrate(
            f,
            0.0,
            rho0.entries,
            t_grid,
            rel_tol,
            abs_tol,
            on_sample,
            max_steps,
            rebase=rebase,
            h_cap=h_cap,
        )

    return Trajectory(
        times=np.array(times),
        states=states,
        observables={name: np.array(vals) for name, vals in series.items()},
        trace_drift=max_drift,
    )
