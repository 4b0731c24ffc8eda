"""Equations of motion on every level of the reduction, plus the integrator.

Flat vector layouts used by the integrator:

* translation-reduced (10): ``(A1x, A1y, A1z, A2x, A2y, A2z, gw, gx, gy, gz)``
* invariant variety (8):    ``(k11, k12, k13, k22, k23, k33, r, delta)``
* unreduced (16):           ``g1, p1, g2, p2`` components in (w, x, y, z) order

The integrator is an embedded Dormand-Prince 5(4) pair with PI step-size
control.  Conservation is monitored, never enforced: the optional projection
hook renormalises group components and re-orthogonalises momenta after
accepted steps but is off by default so that drift stays a meaningful
diagnostic.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .phase_space import CollisionError, MassParams, PhaseState, Potential
from .quaternion import ImaginaryQuaternion, Quaternion, inner_product, quat_mul
from .reduction import (
    InvariantPoint,
    ReducedState,
    SIDE_LEFT,
    SIDE_RIGHT,
    casimir_C2_invariant,
    casimir_C3,
    casimir_C2_direct,
)

KIND_TWO_BODY = "two_body"
KIND_LAGRANGE = "lagrange"
KIND_LAGRANGE_ALTERED = "lagrange_altered"


class SingularityError(RuntimeError):
    """Integration failed near a potential singularity; carries the time."""

    def __init__(self, time: float, message: str = ""):
        self.time = time
        super().__init__(message or f"integration stopped near t = {time!r}")


@dataclass(frozen=True)
class FlowConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = math.inf
    projection: bool = False

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class HamiltonianKind:
    """Which Hamiltonian generates the flow, with its parameters."""

    tag: str
    masses: MassParams | None = None
    potential: Potential | None = None
    alpha: float | None = None
    gamma: float | None = None

    @classmethod
    def two_body(cls, masses: MassParams, potential: Potential) -> "HamiltonianKind":
        return cls(tag=KIND_TWO_BODY, masses=masses, potential=potential)

    @classmethod
    def lagrange(cls, alpha: float, gamma: float) -> "HamiltonianKind":
        cls._check_alpha(alpha)
        return cls(tag=KIND_LAGRANGE, alpha=alpha, gamma=gamma)

    @classmethod
    def lagrange_altered(cls, alpha: float, gamma: float) -> "HamiltonianKind":
        cls._check_alpha(alpha)
        return cls(tag=KIND_LAGRANGE_ALTERED, alpha=alpha, gamma=gamma)

    @staticmethod
    def _check_alpha(alpha: float) -> None:
        if not (0.0 < alpha <= 2.0):
            raise ValueError("alpha must lie in (0, 2]")

    def equivalent_two_body(self) -> tuple[MassParams, Potential]:
        """Equal masses 1/alpha with the linear potential: generates the same
        fully reduced flow as either spinning-top Hamiltonian."""
        if self.tag == KIND_TWO_BODY:
            return self.masses, self.potential
        m = 1.0 / self.alpha
        return MassParams(m, m), Potential.linear(self.gamma)


# ---------------------------------------------------------------------------
# right-hand sides (domain-typed)
# ---------------------------------------------------------------------------

def rhs_left(
    rs: ReducedState, m: MassParams, pot: Potential
) -> tuple[ImaginaryQuaternion, ImaginaryQuaternion, Quaternion]:
    """Hamiltonian vector field on the left-reduced space.

    A1' = +f(r) Im(gD),  A2' = -f(r) Im(gD),
    gD' = -(A1/m1) gD + gD (A2/m2),  with r = Re gD.
    """
    if rs.side != SIDE_LEFT:
        raise ValueError("rhs_left requires a left-reduced state")
    f = pot.f(rs.gD.w)
    gbar = rs.gD.imag()
    gdot = (quat_mul(rs.gD, (1.0 / m.m2) * rs.A2.as_quaternion())
            - quat_mul((1.0 / m.m1) * rs.A1.as_quaternion(), rs.gD))
    return f * gbar, (-f) * gbar, gdot


def rhs_right(
    rs: ReducedState, m: MassParams, pot: Potential
) -> tuple[ImaginaryQuaternion, ImaginaryQuaternion, Quaternion]:
    """Mirror flow on the right-reduced space (opposite Poisson sign).

    A1' = -f(r) Im(gD),  A2' = +f(r) Im(gD),
    gD' = +(A1/m1) gD - gD (A2/m2).
    """
    if rs.side != SIDE_RIGHT:
        raise ValueError("rhs_right requires a right-reduced state")
    f = pot.f(rs.gD.w)
    gbar = rs.gD.imag()
    gdot = (quat_mul((1.0 / m.m1) * rs.A1.as_quaternion(), rs.gD)
            - quat_mul(rs.gD, (1.0 / m.m2) * rs.A2.as_quaternion()))
    return (-f) * gbar, f * gbar, gdot


def rhs_full_reduced(pt: InvariantPoint, m: MassParams, pot: Potential) -> tuple[float, ...]:
    """The eight equations of motion on the invariant variety.

    Returned in the vector order (k11, k12, k13, k22, k23, k33, r, delta).
    """
    f = pot.f(pt.r)
    m1, m2 = m.m1, m.m2
    return (
        2.0 * f * pt.k13,
        f * (pt.k23 - pt.k13),
        f * pt.k33 - pt.r * (pt.k11 / m1 - pt.k12 / m2) - pt.delta / m2,
        -2.0 * f * pt.k23,
        -f * pt.k33 - pt.r * (pt.k12 / m1 - pt.k22 / m2) + pt.delta / m1,
        2.0 * pt.r * (pt.k23 / m2 - pt.k13 / m1),
        pt.k13 / m1 - pt.k23 / m2,
        (pt.k12 * pt.k13 - pt.k11 * pt.k23) / m1
        + (pt.k13 * pt.k22 - pt.k12 * pt.k23) / m2,
    )


def reconstruct_rhs(g1: Quaternion, R1: ImaginaryQuaternion, m1: float) -> Quaternion:
    """Position velocity g1' = g1 R1 / m1 recovered from the frame momentum."""
    return quat_mul(g1, (1.0 / m1) * R1.as_quaternion())


def evaluate_reduced_hamiltonian(kind: HamiltonianKind, x) -> float:
    """Reduced Hamiltonian of the given kind at a ReducedState or InvariantPoint."""
    if isinstance(x, ReducedState):
        a, b = x.A1.norm2(), x.A2.norm2()
        ab = x.A1.dot(x.A2)
        r = x.gD.w
    elif isinstance(x, InvariantPoint):
        a, b, ab, r = x.k11, x.k22, x.k12, x.r
    else:
        raise TypeError("expected ReducedState or InvariantPoint")
    if kind.tag == KIND_TWO_BODY:
        return a / (2.0 * kind.masses.m1) + b / (2.0 * kind.masses.m2) + kind.potential.v(r)
    if kind.tag == KIND_LAGRANGE:
        return ((1.0 + kind.alpha) / 4.0 * (a + b)
                + (1.0 - kind.alpha) / 2.0 * ab + kind.gamma * r)
    if kind.tag == KIND_LAGRANGE_ALTERED:
        return kind.alpha / 2.0 * (a + b) + kind.gamma * r
    raise ValueError(f"unknown hamiltonian kind {kind.tag!r}")


# ---------------------------------------------------------------------------
# flat-vector encodings and fast closures for the integrator
# ---------------------------------------------------------------------------

def reduced_to_vec(rs: ReducedState) -> tuple[float, ...]:
    return rs.A1.components() + rs.A2.components() + rs.gD.components()

def vec_to_reduced(v: Sequence[float], side: str = SIDE_LEFT) -> ReducedState:
    return ReducedState(
        A1=ImaginaryQuaternion(v[0], v[1], v[2]),
        A2=ImaginaryQuaternion(v[3], v[4], v[5]),
        gD=Quaternion(v[6], v[7], v[8], v[9]),
        side=side,
    )

def point_to_vec(pt: InvariantPoint) -> tuple[float, ...]:
    return pt.as_tuple()

def vec_to_point(v: Sequence[float]) -> InvariantPoint:
    return InvariantPoint.from_tuple(tuple(v))

def state_to_vec(s: PhaseState) -> tuple[float, ...]:
    return (s.g1.components() + s.p1.components()
            + s.g2.components() + s.p2.components())

def vec_to_state(v: Sequence[float]) -> PhaseState:
    return PhaseState(
        g1=Quaternion(*v[0:4]), p1=Quaternion(*v[4:8]),
        g2=Quaternion(*v[8:12]), p2=Quaternion(*v[12:16]),
    )


def make_reduced_rhs(m: MassParams, pot: Potential, side: str = SIDE_LEFT) -> Callable:
    """Flat 10-dimensional vector field for either reduced side."""
    im1, im2 = 1.0 / m.m1, 1.0 / m.m2
    force = pot.f
    sgn = 1.0 if side == SIDE_LEFT else -1.0

    def rhs(t, s):
        a1x, a1y, a1z, a2x, a2y, a2z, gw, gx, gy, gz = s
        f = sgn * force(gw)
        # (A1/m1) g with A1 imaginary
        px, py, pz = a1x * im1, a1y * im1, a1z * im1
        q1w = -(px * gx + py * gy + pz * gz)
        q1x = px * gw + py * gz - pz * gy
        q1y = py * gw + pz * gx - px * gz
        q1z = pz * gw + px * gy - py * gx
        # g (A2/m2)
        qx, qy, qz = a2x * im2, a2y * im2, a2z * im2
        q2w = -(gx * qx + gy * qy + gz * qz)
        q2x = gw * qx + gy * qz - gz * qy
        q2y = gw * qy + gz * qx - gx * qz
        q2z = gw * qz + gx * qy - gy * qx
        return (f * gx, f * gy, f * gz,
                -f * gx, -f * gy, -f * gz,
                sgn * (q2w - q1w), sgn * (q2x - q1x),
                sgn * (q2y - q1y), sgn * (q2z - q1z))

    return rhs


def make_invariant_rhs(m: MassParams, pot: Potential) -> Callable:
    """Flat 8-dimensional vector field on the invariant variety."""
    im1, im2 = 1.0 / m.m1, 1.0 / m.m2
    force = pot.f

    def rhs(t, s):
        k11, k12, k13, k22, k23, k33, r, de = s
        f = force(r)
        return (
            2.0 * f * k13,
            f * (k23 - k13),
            f * k33 - r * (k11 * im1 - k12 * im2) - de * im2,
            -2.0 * f * k23,
            -f * k33 - r * (k12 * im1 - k22 * im2) + de * im1,
            2.0 * r * (k23 * im2 - k13 * im1),
            k13 * im1 - k23 * im2,
            (k12 * k13 - k11 * k23) * im1 + (k13 * k22 - k12 * k23) * im2,
        )

    return rhs


def make_state_rhs(m: MassParams, pot: Potential) -> Callable:
    """Flat 16-dimensional vector field for the unreduced two-body flow.

    Positions move with g_i' = p_i / m_i; the momentum equations follow from
    p_i = g_i A_i and the reduced flow of the frame momenta A_i.
    """
    im1, im2 = 1.0 / m.m1, 1.0 / m.m2
    force = pot.f

    def rhs(t, s):
        g1 = Quaternion(*s[0:4])
        p1 = Quaternion(*s[4:8])
        g2 = Quaternion(*s[8:12])
        p2 = Quaternion(*s[12:16])
        gL = quat_mul(g1.inverse(), g2)
        f = force(gL.w)
        gbar = gL.imag().as_quaternion()
        r1 = quat_mul(g1.inverse(), p1)
        r2 = quat_mul(g2.inverse(), p2)
        p1dot = im1 * quat_mul(p1, r1) + f * quat_mul(g1, gbar)
        p2dot = im2 * quat_mul(p2, r2) - f * quat_mul(g2, gbar)
        return ((im1 * p1).components() + p1dot.components()
                + (im2 * p2).components() + p2dot.components())

    return rhs


def project_reduced(v: Sequence[float]) -> tuple[float, ...]:
    """Renormalise the group component to the unit sphere."""
    n = math.sqrt(v[6] ** 2 + v[7] ** 2 + v[8] ** 2 + v[9] ** 2)
    return tuple(v[:6]) + (v[6] / n, v[7] / n, v[8] / n, v[9] / n)


def project_state(v: Sequence[float]) -> tuple[float, ...]:
    """Renormalise positions and re-orthogonalise momenta."""
    out = []
    for i in (0, 8):
        g = Quaternion(*v[i:i + 4]).normalized()
        p = Quaternion(*v[i + 4:i + 8])
        p = p - inner_product(p, g) * g
        out.extend(g.components())
        out.extend(p.components())
    return tuple(out)


# ---------------------------------------------------------------------------
# embedded Runge-Kutta 5(4) with PI step control
# ---------------------------------------------------------------------------

_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (71 / 57600, -71 / 16695, 71 / 1920,
                                -17253 / 339200, 22 / 525, -1 / 40)
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9

_MIN_STEP_FACTOR = 1e-13


@dataclass
class Trajectory:
    ts: list = field(default_factory=list)
    ys: list = field(default_factory=list)
    n_accepted: int = 0
    n_rejected: int = 0

    @property
    def final(self):
        return self.ys[-1]

    def rows(self):
        return zip(self.ts, self.ys)


def integrate(
    rhs: Callable,
    y0: Sequence[float],
    t_end: float,
    cfg: FlowConfig = FlowConfig(),
    *,
    t0: float = 0.0,
    sample_dt: float | None = None,
    project: Callable | None = None,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` from t0 to t_end and record samples.

    With ``sample_dt`` set, accepted steps are clipped so the trajectory
    contains exact hits of the sample times; otherwise every accepted step is
    recorded.  The projection hook runs after accepted steps only when
    ``cfg.projection`` is on.  Raises :class:`SingularityError` when the step
    size underflows or the potential reports a collision.
    """
    atol, rtol = cfg.abs_tol, cfg.rel_tol
    do_project = cfg.projection and project is not None
    y = tuple(float(c) for c in y0)
    t = t0
    traj = Trajectory(ts=[t0], ys=[y])
    next_sample = t0 + sample_dt if sample_dt is not None else None

    try:
        k1 = rhs(t, y)
    except CollisionError as exc:
        raise SingularityError(t, f"collision at t = {t!r}: {exc}") from exc
    h_ctrl = _initial_step(rhs, t, y, k1, atol, rtol, cfg.max_step)
    err_prev = 1.0
    eps_end = 1e-12 * max(1.0, abs(t_end))

    while t < t_end - eps_end:
        h = min(h_ctrl, cfg.max_step, t_end - t)
        if next_sample is not None and t + h > next_sample:
            h = next_sample - t
        if h < _MIN_STEP_FACTOR * max(1.0, abs(t)):
            raise SingularityError(t, f"step size underflow at t = {t!r}")
        try:
            y2 = tuple(yi + h * (_A21 * a) for yi, a in zip(y, k1))
            k2 = rhs(t + _C2 * h, y2)
            y3 = tuple(yi + h * (_A31 * a + _A32 * b) for yi, a, b in zip(y, k1, k2))
            k3 = rhs(t + _C3 * h, y3)
            y4 = tuple(yi + h * (_A41 * a + _A42 * b + _A43 * c)
                       for yi, a, b, c in zip(y, k1, k2, k3))
            k4 = rhs(t + _C4 * h, y4)
            y5 = tuple(yi + h * (_A51 * a + _A52 * b + _A53 * c + _A54 * d)
                       for yi, a, b, c, d in zip(y, k1, k2, k3, k4))
            k5 = rhs(t + _C5 * h, y5)
            y6 = tuple(yi + h * (_A61 * a + _A62 * b + _A63 * c + _A64 * d + _A65 * e)
                       for yi, a, b, c, d, e in zip(y, k1, k2, k3, k4, k5))
            k6 = rhs(t + h, y6)
            ynew = tuple(yi + h * (_B1 * a + _B3 * c + _B4 * d + _B5 * e + _B6 * f)
                         for yi, a, c, d, e, f in zip(y, k1, k3, k4, k5, k6))
            k7 = rhs(t + h, ynew)
        except CollisionError as exc:
            raise SingularityError(t, f"collision near t = {t!r}: {exc}") from exc

        # weighted RMS error of the embedded pair
        acc = 0.0
        for yi, yn, a, c, d, e, f, g in zip(y, ynew, k1, k3, k4, k5, k6, k7):
            ee = h * (_E1 * a + _E3 * c + _E4 * d + _E5 * e + _E6 * f + _E7 * g)
            ay, an = abs(yi), abs(yn)
            sc = atol + rtol * (ay if ay > an else an)
            q = ee / sc
            acc += q * q
        err = math.sqrt(acc / len(y))

        if err <= 1.0:
            t += h
            y = ynew
            k1 = k7
            if do_project:
                y = project(y)
                try:
                    k1 = rhs(t, y)
                except CollisionError as exc:
                    raise SingularityError(t, f"collision at t = {t!r}: {exc}") from exc
            traj.n_accepted += 1
            record = sample_dt is None
            if next_sample is not None and t >= next_sample - 1e-14 * max(1.0, abs(t)):
                record = True
                next_sample += sample_dt
            if record or t >= t_end - eps_end:
                traj.ts.append(t)
                traj.ys.append(y)
            fac = 5.0 if err == 0.0 else 0.9 * err ** -0.14 * err_prev ** 0.08
            if err > 0.0:
                err_prev = err
            if h >= h_ctrl:  # keep the controller's belief when the step was clipped
                h_ctrl = h * min(5.0, max(0.2, fac))
        else:
            traj.n_rejected += 1
            h_ctrl = h * max(0.2, 0.9 * err ** -0.2)
    return traj


def _initial_step(rhs, t, y, k1, atol, rtol, max_step) -> float:
    sc = [atol + rtol * abs(yi) for yi in y]
    d0 = math.sqrt(sum((yi / s) ** 2 for yi, s in zip(y, sc)) / len(y))
    d1 = math.sqrt(sum((ki / s) ** 2 for ki, s in zip(k1, sc)) / len(y))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    return min(h, max_step)


# ---------------------------------------------------------------------------
# drift diagnostics and trajectory output
# ---------------------------------------------------------------------------

def relative_drift(traj: Trajectory, fn: Callable) -> float:
    """max_t |Q(t) - Q(0)| / max(1, |Q(0)|) over the recorded samples."""
    v0 = fn(traj.ys[0])
    scale = max(1.0, abs(v0))
    return max(abs(fn(y) - v0) for y in traj.ys) / scale


def drift_summary(traj: Trajectory, funcs: dict) -> dict:
    return {name: relative_drift(traj, fn) for name, fn in funcs.items()}


def invariants_reduced(m: MassParams, pot: Potential) -> dict:
    """H, C1, C2 as functions of a flat reduced vector."""
    def ham(v):
        rs = vec_to_reduced(v)
        return (rs.A1.norm2() / (2.0 * m.m1) + rs.A2.norm2() / (2.0 * m.m2)
                + pot.v(rs.gD.w))

    return {
        "H": ham,
        "C1": lambda v: v[6] ** 2 + v[7] ** 2 + v[8] ** 2 + v[9] ** 2,
        "C2": lambda v: casimir_C2_direct(vec_to_reduced(v)),
    }


def invariants_point(m: MassParams, pot: Potential) -> dict:
    """H, all three Casimirs, and the variety defect on flat invariant vectors."""
    def ham(v):
        return v[0] / (2.0 * m.m1) + v[3] / (2.0 * m.m2) + pot.v(v[6])

    return {
        "H": ham,
        "C1": lambda v: v[5] + v[6] ** 2,
        "C2": lambda v: casimir_C2_invariant(vec_to_point(v)),
        "C3": lambda v: casimir_C3(vec_to_point(v)),
        "variety": lambda v: vec_to_point(v).variety_defect(),
    }


def invariants_state(m: MassParams, pot: Potential) -> dict:
    from .phase_space import hamiltonian_2body, momentum_left, momentum_right

    return {
        "H": lambda v: hamiltonian_2body(vec_to_state(v), m, pot),
        "C2": lambda v: momentum_left(vec_to_state(v)).norm2(),
        "C3": lambda v: momentum_right(vec_to_state(v)).norm2(),
    }


def trajectory_csv(traj: Trajectory, labels: Sequence[str], extras: dict | None = None) -> str:
    """CSV text with time, state components and any extra column functions."""
    extras = extras or {}
    buf = io.StringIO()
    buf.write(",".join(["t", *labels, *extras.keys()]) + "\n")
    for t, y in traj.rows():
        cells = [repr(t)] + [repr(c) for c in y]
        cells += [repr(fn(y)) for fn in extras.values()]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
