"""Linear stability of relative equilibria on the fully reduced space.

The flow is linearised at the image of an RE, where the frame momenta are
orthogonal to the relative position (k13 = k23 = 0).  Four eigenvalues of the
8x8 Jacobian vanish structurally because the generic symplectic leaves are
4-dimensional; the remaining quartet factors in closed form for both the
gravitational and the constant-force (spinning top) potentials:

* gravitational:  t^4 (c0 + c2 t^2 + t^4)  with the quartet
  z^2 = -(sqrt(k11)/m1 + sqrt(k22)/m2)^2 - (m1+m2) cot(th) csc^2(th)
  w^2 = -(sqrt(k11)/m1 - sqrt(k22)/m2)^2 - (m1+m2) cot(th) csc^2(th)
* constant force, theta != pi/2 (there k11 = k22 = |R|^2):
  t^4 (t^2 - 2 a g cos th)(t^2 + 4 a^2 |R|^2 - 8 a g cos th)
* constant force, theta = pi/2:
  t^4 (t^4 + 2 a^2 (k11 + k22) t^2 + a^4 (k11 - k22)^2)

For unequal masses the w-quartet of the gravitational problem changes from
imaginary to real across a fold in the obtuse family, located by the root of
c0 in cosh(tau) and corroborated by the degeneracy of the momentum pair as a
function of the family coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .phase_space import MassParams, Potential, momentum_left, momentum_right
from .reduction import InvariantPoint, hilbert_map, left_reduce
from .relequil import RelativeEquilibrium, re_from_tau

ZERO_EIG_TOL = 1e-8
REAL_PART_TOL = 1e-8

STABLE = "linearly_stable"
UNSTABLE = "linearly_unstable"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class LinearizationReport:
    """Jacobian at an RE in coordinates (k11, k12, k13, k22, k23, k33, r, delta)."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    zero_count: int
    classification: str


def jacobian_full_reduced(pt: InvariantPoint, m: MassParams, pot: Potential) -> np.ndarray:
    """Analytic Jacobian of the fully reduced vector field at any point."""
    m1, m2 = m.m1, m.m2
    f = pot.f(pt.r)
    fp = pot.fprime(pt.r)
    k11, k12, k13 = pt.k11, pt.k12, pt.k13
    k22, k23, k33 = pt.k22, pt.k23, pt.k33
    r = pt.r
    return np.array([
        [0, 0, 2 * f, 0, 0, 0, 2 * fp * k13, 0],
        [0, 0, -f, 0, f, 0, fp * (k23 - k13), 0],
        [-r / m1, r / m2, 0, 0, 0, f,
         fp * k33 - (k11 / m1 - k12 / m2), -1 / m2],
        [0, 0, 0, 0, -2 * f, 0, -2 * fp * k23, 0],
        [0, -r / m1, 0, r / m2, 0, -f,
         -fp * k33 - (k12 / m1 - k22 / m2), 1 / m1],
        [0, 0, -2 * r / m1, 0, 2 * r / m2, 0,
         2 * (k23 / m2 - k13 / m1), 0],
        [0, 0, 1 / m1, 0, -1 / m2, 0, 0, 0],
        [-k23 / m1, k13 / m1 - k23 / m2, k12 / m1 + k22 / m2,
         k13 / m2, -k11 / m1 - k12 / m2, 0, 0, 0],
    ], dtype=float)


def linearize(
    re: RelativeEquilibrium,
    m: MassParams | None = None,
    pot: Potential | None = None,
) -> LinearizationReport:
    """Linearise the fully reduced flow at a relative equilibrium."""
    m = m or re.masses
    pot = pot or re.potential
    pt = hilbert_map(left_reduce(re.state))
    scale = max(1.0, abs(pt.k11), abs(pt.k22), abs(pt.k33))
    if max(abs(pt.k13), abs(pt.k23)) > 1e-8 * scale:
        raise ValueError("not a relative equilibrium: k13, k23 must vanish")
    matrix = jacobian_full_reduced(pt, m, pot)
    eigs = np.linalg.eigvals(matrix)
    zero_count = int(np.sum(np.abs(eigs) < ZERO_EIG_TOL * max(1.0, np.abs(eigs).max())))
    return LinearizationReport(
        matrix=matrix,
        eigenvalues=eigs,
        zero_count=zero_count,
        classification=classify_stability_eigs(eigs),
    )


def classify_stability_eigs(
    eigs: np.ndarray,
    zero_tol: float = ZERO_EIG_TOL,
    re_tol: float = REAL_PART_TOL,
) -> str:
    """Stable: four structural zeros plus a nonzero imaginary quartet;
    unstable: any eigenvalue with positive real part; degenerate otherwise."""
    scale = max(1.0, float(np.abs(eigs).max()))
    if np.any(eigs.real > re_tol * scale):
        return UNSTABLE
    zeros = np.abs(eigs) < zero_tol * scale
    rest = eigs[~zeros]
    if int(zeros.sum()) == 4 and np.all(np.abs(rest.real) <= re_tol * scale):
        return STABLE
    return DEGENERATE


def classify_stability(report: LinearizationReport) -> str:
    return classify_stability_eigs(report.eigenvalues)


def _k_diag(re: RelativeEquilibrium) -> tuple[float, float]:
    return re.x1 ** 2 + re.y ** 2, re.x2 ** 2 + re.y ** 2


def charpoly_2body(re: RelativeEquilibrium) -> tuple[float, float]:
    """(c0, c2) of the nonzero quartet for the gravitational potential."""
    if re.potential.kind != "gravitational":
        raise ValueError("charpoly_2body applies to the gravitational potential")
    k11, k22 = _k_diag(re)
    m1, m2 = re.masses.m1, re.masses.m2
    th = re.theta
    q = (m1 + m2) * math.cos(th) / math.sin(th) ** 3
    c2 = 2.0 * (k11 / m1 ** 2 + k22 / m2 ** 2 + q)
    c0 = ((k11 / m1 ** 2 - k22 / m2 ** 2) ** 2
          + 2.0 * (math.cos(th) / math.sin(th) ** 3)
          * ((k11 / m1) * (1 + m2 / m1) + (k22 / m2) * (1 + m1 / m2))
          + q * q)
    return c0, c2


def closed_form_eigs_2body(
    re: RelativeEquilibrium,
) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    """The quartet (z, -z), (w, -w) of the gravitational linearisation."""
    k11, k22 = _k_diag(re)
    m1, m2 = re.masses.m1, re.masses.m2
    th = re.theta
    q = (m1 + m2) * math.cos(th) / math.sin(th) ** 3
    z2 = -(math.sqrt(k11) / m1 + math.sqrt(k22) / m2) ** 2 - q
    w2 = -(math.sqrt(k11) / m1 - math.sqrt(k22) / m2) ** 2 - q
    z = complex(z2) ** 0.5
    w = complex(w2) ** 0.5
    return (z, -z), (w, -w)


def z_radicand_identity(re: RelativeEquilibrium) -> tuple[float, float]:
    """Both sides of the closed form for c2/2 at a gravitational RE.

    c2/2 = k11/m1^2 + k22/m2^2 + (m1+m2) cot(th) csc^2(th)
         = (16 eta^4 cos^2 th sin^6 th + m1^2 + m2^2 + 2 m1 m2 cos 2 th)
           / (8 eta^2 sin^6 th cos^2 th),

    manifestly positive, so the z-quartet is always imaginary and nonzero.
    """
    k11, k22 = _k_diag(re)
    m1, m2 = re.masses.m1, re.masses.m2
    th, eta = re.theta, re.eta_mag
    lhs = (k11 / m1 ** 2 + k22 / m2 ** 2
           + (m1 + m2) * math.cos(th) / math.sin(th) ** 3)
    num = (16.0 * eta ** 4 * math.cos(th) ** 2 * math.sin(th) ** 6
           + m1 * m1 + m2 * m2 + 2.0 * m1 * m2 * math.cos(2 * th))
    rhs = num / (8.0 * eta ** 2 * math.sin(th) ** 6 * math.cos(th) ** 2)
    return lhs, rhs


def charpoly_lagrange(re: RelativeEquilibrium, alpha: float, gamma: float) -> tuple[float, float]:
    """(c0, c2) of the nonzero quartet for the constant-force potential."""
    k11, k22 = _k_diag(re)
    th = re.theta
    if abs(th - math.pi / 2) <= 1e-9:
        c2 = 2.0 * alpha ** 2 * (k11 + k22)
        c0 = alpha ** 4 * (k11 - k22) ** 2
        return c0, c2
    if abs(k11 - k22) > 1e-8 * max(1.0, k11, k22):
        raise ValueError("the factorisation away from pi/2 needs |A1| = |A2| "
                         "(equal masses)")
    rsq = k11  # = k22 away from theta = pi/2
    a = -2.0 * alpha * gamma * math.cos(th)
    b = 4.0 * alpha ** 2 * rsq - 8.0 * alpha * gamma * math.cos(th)
    return a * b, a + b


def closed_form_eigs_lagrange(
    re: RelativeEquilibrium, alpha: float, gamma: float
) -> tuple[tuple[complex, complex], tuple[complex, complex]]:
    """Eigenvalue quartet of the spinning-top linearisation."""
    k11, k22 = _k_diag(re)
    th = re.theta
    if abs(th - math.pi / 2) <= 1e-9:
        t2a = -alpha ** 2 * (math.sqrt(k11) + math.sqrt(k22)) ** 2
        t2b = -alpha ** 2 * (math.sqrt(k11) - math.sqrt(k22)) ** 2
    else:
        t2a = 2.0 * alpha * gamma * math.cos(th)
        t2b = -(4.0 * alpha ** 2 * k11 - 8.0 * alpha * gamma * math.cos(th))
    a = complex(t2a) ** 0.5
    b = complex(t2b) ** 0.5
    return (a, -a), (b, -b)


def spin_identity(re: RelativeEquilibrium, alpha: float, gamma: float) -> tuple[float, float]:
    """Both sides of 4 a^2 |R|^2 - 8 a g cos th = 4 eta^2 + a^2 g^2/eta^2 - 4 a g cos th,
    the positivity statement behind the hanging-top quartet being imaginary."""
    k11, _ = _k_diag(re)
    th, eta = re.theta, re.eta_mag
    lhs = 4.0 * alpha ** 2 * k11 - 8.0 * alpha * gamma * math.cos(th)
    rhs = (4.0 * eta ** 2 + alpha ** 2 * gamma ** 2 / eta ** 2
           - 4.0 * alpha * gamma * math.cos(th))
    return lhs, rhs


@dataclass(frozen=True)
class FoldResult:
    tau: float
    c0: float
    jacobian_det: float


def fold_locus(
    theta: float,
    m: MassParams,
    *,
    tau_max: float = 8.0,
    n_scan: int = 160,
    fd_step: float = 1e-5,
) -> FoldResult | None:
    """Locate the stability fold of the obtuse gravitational family at theta.

    Searches for the zero of c0 as a function of cosh(tau) (c0 is even in
    tau; the positive representative is returned).  The returned record also
    carries the normalised determinant of the finite-difference Jacobian of
    (|lambda|^2, |rho|^2) with respect to (theta, tau), which vanishes on the
    fold.  Returns None when c0 has no zero, as happens for equal masses.
    """
    if not (math.pi / 2 < theta < math.pi):
        raise ValueError("the fold lives in the obtuse family")
    pot = Potential.gravitational(m)

    def c0_of_tau(tau: float) -> float:
        return charpoly_2body(re_from_tau(theta, tau, m, pot))[0]

    taus = np.linspace(0.0, tau_max, n_scan)
    vals = [c0_of_tau(t) for t in taus]
    bracket = None
    for a, b, va, vb in zip(taus[:-1], taus[1:], vals[:-1], vals[1:]):
        if va == 0.0:
            bracket = (a, a)
            break
        if va * vb < 0.0:
            bracket = (a, b)
            break
    if bracket is None:
        return None
    if bracket[0] == bracket[1]:
        tau_star = bracket[0]
    else:
        ua, ub = math.cosh(bracket[0]), math.cosh(bracket[1])
        u_star = brentq(lambda u: c0_of_tau(math.acosh(u)), ua, ub,
                        xtol=1e-14, rtol=8.9e-16)
        tau_star = math.acosh(u_star)

    def momenta(th: float, ta: float) -> np.ndarray:
        s = re_from_tau(th, ta, m, pot).state
        return np.array([momentum_left(s).norm2(), momentum_right(s).norm2()])

    h = fd_step
    jac = np.column_stack([
        (momenta(theta + h, tau_star) - momenta(theta - h, tau_star)) / (2 * h),
        (momenta(theta, tau_star + h) - momenta(theta, tau_star - h)) / (2 * h),
    ])
    norms = np.linalg.norm(jac, axis=1)
    det_norm = abs(float(np.linalg.det(jac))) / float(norms[0] * norms[1])
    return FoldResult(tau=tau_star, c0=c0_of_tau(tau_star), jacobian_det=det_norm)
