"""Classification and reconstruction of relative equilibria.

A relative equilibrium (RE) is a motion that is the orbit of a one-parameter
subgroup; equivalently a fixed point of the fully reduced flow.  In the
conjugacy gauge used throughout, the generator pair is ``(xi j, eta j)`` with
nonnegative rates and the relative position has imaginary part along ``i``,
so the frame momenta take the planar form

    A1 = x1 j + y k,     A2 = x2 j - y k.

Families are indexed by the separation angle theta:

* ``singular0`` / ``singularPi``: coincident or antipodal particles moving on
  a common great circle; both rates free.
* ``acute`` / ``obtuse``: 0 < theta < pi, theta != pi/2; (x1, x2) are then
  determined uniquely by theta and eta.
* ``rightAngled``: theta = pi/2, equal masses only, with a line of solutions
  x1 + x2 = -2 m eta parameterised by the position angle phi1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import rhs_full_reduced
from .phase_space import MassParams, PhaseState, Potential
from .quaternion import ImaginaryQuaternion, Quaternion, quat_mul
from .reduction import hilbert_map, left_reduce

KIND_SINGULAR_0 = "singular0"
KIND_SINGULAR_PI = "singularPi"
KIND_ACUTE = "acute"
KIND_RIGHT_ANGLED = "rightAngled"
KIND_OBTUSE = "obtuse"

_SINGULAR_TOL = 1e-9
_RIGHT_ANGLE_TOL = 1e-9
_CONSISTENCY_TOL = 1e-9


class NoSolutionError(ValueError):
    """No relative equilibrium exists for the requested parameters."""


@dataclass(frozen=True)
class RelativeEquilibrium:
    """A classified relative equilibrium in the standard conjugacy gauge."""

    kind: str
    theta: float
    phi1: float
    phi2: float
    xi_mag: float
    eta_mag: float
    x1: float
    x2: float
    y: float
    zeta: float
    masses: MassParams
    potential: Potential
    state: PhaseState
    isosceles: bool = False
    phi1_branches: tuple[float, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "theta": self.theta,
            "phi1": self.phi1,
            "phi2": self.phi2,
            "xi_mag": self.xi_mag,
            "eta_mag": self.eta_mag,
            "x1": self.x1,
            "x2": self.x2,
            "y": self.y,
            "zeta": self.zeta,
            "isosceles": self.isosceles,
            "phi1_branches": list(self.phi1_branches),
            "masses": {"m1": self.masses.m1, "m2": self.masses.m2},
            "potential": self.potential.kind,
            "state": self.state.to_json_dict(),
        }


def phi_branches(theta: float, m: MassParams, attractive: bool) -> tuple[float, ...]:
    """All position-angle branches solving m1 sin 2phi1 = m2 sin 2phi2.

    Scans the window compatible with the sign of the force.  Away from
    theta = pi/2 a single root is expected, so callers flag any multiplicity
    instead of silently picking one.
    """
    if attractive:
        lo, hi = max(0.0, theta - math.pi / 2), min(theta, math.pi / 2)
    else:
        lo, hi = max(-math.pi / 2, theta - math.pi), min(0.0, theta - math.pi / 2)
    if hi <= lo:
        return ()

    def h(p):
        return m.m1 * math.sin(2 * p) - m.m2 * math.sin(2 * theta - 2 * p)

    sgn = 1.0 if attractive else -1.0
    grid = np.linspace(lo + 1e-12, hi - 1e-12, 721)
    vals = [h(p) for p in grid]
    roots = []
    for a, b, va, vb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if va == 0.0:
            roots.append(a)
        elif va * vb < 0.0:
            x0, x1v, f0, f1 = a, b, va, vb
            for _ in range(80):
                mid = 0.5 * (x0 + x1v)
                fm = h(mid)
                if f0 * fm <= 0.0:
                    x1v, f1 = mid, fm
                else:
                    x0, f0 = mid, fm
            roots.append(0.5 * (x0 + x1v))
    out = []
    for p in roots:
        if sgn * math.sin(2 * p) > 1e-12 and sgn * math.sin(2 * (theta - p)) > 1e-12:
            out.append(float(p))
    return tuple(out)


def _closed_form_x(theta: float, eta: float, m: MassParams, y: float) -> tuple[float, float]:
    cot2, csc2 = 1.0 / math.tan(2 * theta), 1.0 / math.sin(2 * theta)
    x1 = y * (cot2 + (m.m1 / m.m2) * csc2) - m.m1 * eta
    x2 = y * (cot2 + (m.m2 / m.m1) * csc2) - m.m2 * eta
    return x1, x2


def solve_re_linear_system(
    theta: float, eta_mag: float, m: MassParams, pot: Potential
) -> tuple[float, float, float]:
    """Solve the RE conditions for (x1, x2, y) as a numerically assembled
    linear system.

    The residual of the relative-position equation is affine in (x1, x2); the
    2x2 system is extracted by evaluating it with quaternion arithmetic at
    basis values, with no use of the closed forms.  Kept as an independent
    route for cross-checking them.
    """
    f = pot.f(math.cos(theta))
    y = f * math.sin(theta) / (2.0 * eta_mag)
    gL = Quaternion(math.cos(theta), math.sin(theta), 0.0, 0.0)
    eta = ImaginaryQuaternion(0.0, eta_mag, 0.0)

    def residual(x1: float, x2: float) -> tuple[float, float]:
        a1 = ImaginaryQuaternion(0.0, x1, y).as_quaternion()
        a2 = ImaginaryQuaternion(0.0, x2, -y).as_quaternion()
        lhs = 2.0 * eta.cross(gL.imag())
        rhs = (quat_mul((1.0 / m.m1) * a1, gL) - quat_mul(gL, (1.0 / m.m2) * a2)).imag()
        res = lhs + rhs
        if abs(res.x) > 1e-9 * max(1.0, abs(x1), abs(x2), abs(y)):
            raise RuntimeError("RE residual left the j-k plane")
        return res.y, res.z

    r0 = residual(0.0, 0.0)
    r1 = residual(1.0, 0.0)
    r2 = residual(0.0, 1.0)
    A = np.array([[r1[0] - r0[0], r2[0] - r0[0]],
                  [r1[1] - r0[1], r2[1] - r0[1]]])
    x = np.linalg.solve(A, [-r0[0], -r0[1]])
    return float(x[0]), float(x[1]), y


def solve_re(
    theta: float,
    eta_mag: float,
    m: MassParams,
    pot: Potential,
    *,
    phi1: float | None = None,
    xi_mag: float | None = None,
) -> RelativeEquilibrium:
    """Classify the relative equilibrium at separation angle theta.

    ``eta_mag`` must be positive except for the singular families, where both
    rates are free (``xi_mag`` defaults to zero there).  At theta = pi/2 the
    masses must be equal and the free line parameter is exposed as ``phi1``;
    elsewhere ``phi1``/``xi_mag`` must be left unset, as they are determined.
    """
    if theta < 0 or theta > math.pi:
        raise ValueError("theta must lie in [0, pi]")
    if min(abs(theta), abs(theta - math.pi)) <= _SINGULAR_TOL:
        return _solve_singular(theta, eta_mag, m, pot, xi_mag)
    if xi_mag is not None:
        raise ValueError("xi_mag is determined for non-singular kinds")
    if eta_mag <= 0:
        raise ValueError("eta_mag must be positive")
    f = pot.f(math.cos(theta))
    if f == 0.0:
        raise NoSolutionError("the force vanishes at this separation")
    if abs(theta - math.pi / 2) <= _RIGHT_ANGLE_TOL:
        return _solve_right_angled(eta_mag, m, pot, f, phi1)
    if phi1 is not None:
        raise ValueError("phi1 is determined away from theta = pi/2")
    return _solve_generic(theta, eta_mag, m, pot, f)


def _solve_generic(theta, eta_mag, m, pot, f) -> RelativeEquilibrium:
    y = f * math.sin(theta) / (2.0 * eta_mag)
    x1, x2 = _closed_form_x(theta, eta_mag, m, y)
    u1, u2 = x1 + m.m1 * eta_mag, x2 + m.m2 * eta_mag
    xi = math.hypot(u1, y) / m.m1
    phi1 = 0.5 * math.atan2(y, u1)
    phi2 = theta - phi1
    scale = max(1.0, abs(x1), abs(x2), abs(y))
    if (abs(math.hypot(u2, y) / m.m2 - xi) > _CONSISTENCY_TOL * scale
            or abs(m.m2 * xi * math.cos(2 * phi2) - u2) > _CONSISTENCY_TOL * scale
            or abs(m.m2 * xi * math.sin(2 * phi2) - y) > _CONSISTENCY_TOL * scale):
        raise RuntimeError("reconstruction of the position angles is inconsistent")
    zeta = m.m1 * math.sin(2 * phi1)
    kind = KIND_ACUTE if theta < math.pi / 2 else KIND_OBTUSE
    iso = m.equal and (abs(phi1 - theta / 2) <= 1e-9
                       or abs(phi1 - (theta - math.pi) / 2) <= 1e-9)
    re = RelativeEquilibrium(
        kind=kind, theta=theta, phi1=phi1, phi2=phi2,
        xi_mag=xi, eta_mag=eta_mag, x1=x1, x2=x2, y=y, zeta=zeta,
        masses=m, potential=pot, state=_PLACEHOLDER, isosceles=iso,
        phi1_branches=phi_branches(theta, m, attractive=f > 0),
    )
    return replace(re, state=reconstruct_re(re))


def _solve_right_angled(eta_mag, m, pot, f, phi1) -> RelativeEquilibrium:
    if abs(m.m1 - m.m2) > 1e-12 * max(m.m1, m.m2):
        raise NoSolutionError("right-angled relative equilibria require equal masses")
    mm = m.m1
    if phi1 is None:
        phi1 = math.pi / 4 if f > 0 else -math.pi / 4
    if f > 0 and not (0 < phi1 < math.pi / 2):
        raise ValueError("attractive right-angled REs have phi1 in (0, pi/2)")
    if f < 0 and not (-math.pi / 2 < phi1 < 0):
        raise ValueError("repulsive right-angled REs have phi1 in (-pi/2, 0)")
    y = f / (2.0 * eta_mag)
    zeta = mm * math.sin(2 * phi1)
    xi = y / zeta
    x1 = mm * (xi * math.cos(2 * phi1) - eta_mag)
    x2 = -2.0 * mm * eta_mag - x1
    theta = math.pi / 2
    re = RelativeEquilibrium(
        kind=KIND_RIGHT_ANGLED, theta=theta, phi1=phi1, phi2=theta - phi1,
        xi_mag=xi, eta_mag=eta_mag, x1=x1, x2=x2, y=y, zeta=zeta,
        masses=m, potential=pot, state=_PLACEHOLDER,
        isosceles=abs(phi1 - theta / 2) <= 1e-9 or abs(phi1 + theta / 2) <= 1e-9,
    )
    return replace(re, state=reconstruct_re(re))


def _solve_singular(theta, eta_mag, m, pot, xi_mag) -> RelativeEquilibrium:
    pot.f(1.0 if theta < 1.0 else -1.0)  # singular potentials reject these kinds
    if eta_mag < 0:
        raise ValueError("eta_mag must be nonnegative")
    xi = 0.0 if xi_mag is None else float(xi_mag)
    c = xi - eta_mag
    at_zero = theta < 1.0
    kind = KIND_SINGULAR_0 if at_zero else KIND_SINGULAR_PI
    phi2 = 0.0 if at_zero else math.pi
    re = RelativeEquilibrium(
        kind=kind, theta=0.0 if at_zero else math.pi, phi1=0.0, phi2=phi2,
        xi_mag=xi, eta_mag=eta_mag, x1=m.m1 * c, x2=m.m2 * c, y=0.0, zeta=0.0,
        masses=m, potential=pot, state=_PLACEHOLDER,
        isosceles=m.equal,
    )
    return replace(re, state=reconstruct_re(re))


def reconstruct_re(re: RelativeEquilibrium) -> PhaseState:
    """Rebuild the phase-space point of an RE from its angles and rates.

    Positions are g1 = exp(-i phi1), g2 = exp(i phi2); momenta come from
    differentiating the rigid motion exp(t xi j) q exp(-t eta j) at t = 0.
    """
    g1 = Quaternion(math.cos(re.phi1), -math.sin(re.phi1), 0.0, 0.0)
    g2 = Quaternion(math.cos(re.phi2), math.sin(re.phi2), 0.0, 0.0)
    xi = Quaternion(0.0, 0.0, re.xi_mag, 0.0)
    eta = Quaternion(0.0, 0.0, re.eta_mag, 0.0)
    p1 = re.masses.m1 * (quat_mul(xi, g1) - quat_mul(g1, eta))
    p2 = re.masses.m2 * (quat_mul(xi, g2) - quat_mul(g2, eta))
    return PhaseState(g1=g1, p1=p1, g2=g2, p2=p2)


def verify_re_fixed_point(re: RelativeEquilibrium) -> float:
    """Sup-norm of the fully reduced vector field at the RE's image."""
    pt = hilbert_map(left_reduce(re.state))
    return max(abs(c) for c in rhs_full_reduced(pt, re.masses, re.potential))


def lever_residual(re: RelativeEquilibrium) -> float:
    """Residual of the rate-balance relation 2 xi eta zeta = f sin(theta)."""
    f = re.potential.f(math.cos(re.theta))
    return 2.0 * re.xi_mag * re.eta_mag * re.zeta - f * math.sin(re.theta)


def zeta_of(theta: float, m: MassParams, pot: Potential) -> float:
    """The branch constant zeta = m1 sin 2phi1, a function of theta only."""
    return solve_re(theta, 1.0, m, pot).zeta


def re_from_tau(
    theta: float,
    tau: float,
    m: MassParams,
    pot: Potential,
    *,
    phi1: float | None = None,
) -> RelativeEquilibrium:
    """Pick the RE with rate asymmetry tau, where 2 e^tau eta^2 = f sin(theta)/zeta.

    Under this reparameterisation xi = e^tau eta, so tau = 0 is the simple
    rotation.  At theta = pi/2 the family coordinate phi1 must be supplied.
    """
    if abs(theta - math.pi / 2) <= _RIGHT_ANGLE_TOL:
        if phi1 is None:
            raise ValueError("the right-angled family needs phi1")
        f = pot.f(0.0)
        zeta = m.m1 * math.sin(2 * phi1)
    else:
        f = pot.f(math.cos(theta))
        zeta = zeta_of(theta, m, pot)
        if phi1 is not None:
            raise ValueError("phi1 is determined away from theta = pi/2")
    ratio = f * math.sin(theta) / zeta
    if ratio <= 0:
        raise ValueError("f sin(theta)/zeta must be positive for a real rate")
    eta = math.sqrt(ratio / (2.0 * math.exp(tau)))
    return solve_re(theta, eta, m, pot, phi1=phi1)


_PLACEHOLDER = PhaseState(
    g1=Quaternion(1.0), p1=Quaternion(), g2=Quaternion(1.0), p2=Quaternion()
)
