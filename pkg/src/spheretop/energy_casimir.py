"""Sampling the energy-Casimir map over families of relative equilibria.

Each RE family is swept in the coordinates (theta, tau), where the
reparameterisation 2 e^tau eta^2 = f sin(theta)/zeta makes xi = e^tau eta;
tau = 0 is the simple rotation with equal momentum norms on both sides.  The
map records (H, |lambda|^2, |rho|^2) evaluated numerically on the
reconstructed states, which is exact to floating precision and avoids any
closed-form shortcut.  The resulting point clouds are the bifurcation
surfaces of the problem; a fold shows up where samples with equal momentum
pairs merge.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass

import numpy as np

from .phase_space import (
    MassParams,
    Potential,
    hamiltonian_2body,
    momentum_left,
    momentum_right,
)
from .relequil import RelativeEquilibrium, solve_re, zeta_of
from . import stability as _stability

EC_CSV_COLUMNS = ("family", "theta", "tau", "H", "lam2", "rho2", "stability")

FAMILY_GENERIC = "generic"
FAMILY_ISOSCELES = "isosceles"
FAMILY_ACUTE = "acute"
FAMILY_OBTUSE = "obtuse"
FAMILY_RIGHT_ANGLED = "rightAngled"
FAMILY_SINGULAR_0 = "singular0"
FAMILY_SINGULAR_PI = "singularPi"


@dataclass(frozen=True)
class ECSample:
    family: str
    theta: float
    tau: float
    H: float
    lam2: float
    rho2: float
    stability: str
    xi_mag: float
    eta_mag: float
    phi1: float
    gauge_flipped: bool = False


@dataclass(frozen=True)
class SurfaceResult:
    samples: tuple[ECSample, ...]
    failures: tuple[tuple[float, float, str], ...]


def ec_sample(
    theta: float,
    tau: float,
    m: MassParams,
    pot: Potential,
    *,
    family: str = FAMILY_GENERIC,
    phi1: float | None = None,
    classify: bool = True,
) -> ECSample:
    """One point of the energy-Casimir surface at family coordinates (theta, tau)."""
    gauge_flipped = False
    if abs(theta - math.pi / 2) <= 1e-9:
        if phi1 is None:
            raise ValueError("the right-angled family needs phi1")
        f = pot.f(0.0)
        zeta = m.m1 * math.sin(2 * phi1)
        if f * zeta < 0:
            # reflect the gauge instead of silently flipping a sign: shifting
            # the position angle by a quarter turn lands on the branch whose
            # zeta sign matches the force
            phi1 = phi1 - math.copysign(math.pi / 2, phi1)
            zeta = -zeta
            gauge_flipped = True
    else:
        f = pot.f(math.cos(theta))
        zeta = zeta_of(theta, m, pot)
    ratio = f * math.sin(theta) / zeta
    if ratio <= 0:
        raise ValueError("degenerate family coordinates: f sin(theta)/zeta <= 0")
    eta = math.sqrt(ratio / (2.0 * math.exp(tau)))
    re = solve_re(theta, eta, m, pot, phi1=phi1)
    return _sample_from_re(re, family, tau, classify, gauge_flipped)


def _sample_from_re(
    re: RelativeEquilibrium, family: str, tau: float, classify: bool, gauge_flipped: bool = False
) -> ECSample:
    label = ""
    if classify:
        label = _stability.linearize(re).classification
    return ECSample(
        family=family,
        theta=re.theta,
        tau=tau,
        H=hamiltonian_2body(re.state, re.masses, re.potential),
        lam2=momentum_left(re.state).norm2(),
        rho2=momentum_right(re.state).norm2(),
        stability=label,
        xi_mag=re.xi_mag,
        eta_mag=re.eta_mag,
        phi1=re.phi1,
        gauge_flipped=gauge_flipped,
    )


_POT_SPECS = {"gravitational": lambda m, extra: Potential.gravitational(m),
              "linear": lambda m, extra: Potential.linear(extra)}


def _potential_spec(pot: Potential) -> tuple[str, float]:
    if pot.kind == "gravitational":
        return ("gravitational", 0.0)
    if pot.kind == "linear":
        return ("linear", pot.gamma)
    raise ValueError("surface workers support the named potential kinds only")


def _surface_worker(args) -> tuple[int, tuple | None, tuple | None]:
    idx, family, theta, tau, m1, m2, pkind, pextra, phi1, classify = args
    m = MassParams(m1, m2)
    pot = _POT_SPECS[pkind](m, pextra)
    try:
        s = ec_sample(theta, tau, m, pot, family=family, phi1=phi1, classify=classify)
        return idx, s, None
    except Exception as exc:  # per-sample failures are data, not fatal
        return idx, None, (theta, tau, f"{type(exc).__name__}: {exc}")


def default_workers() -> int:
    return int(os.environ.get("SPHERETOP_WORKERS", "1"))


def ec_surface(
    family: str,
    theta_range: tuple[float, float],
    tau_range: tuple[float, float],
    grid: tuple[int, int],
    m: MassParams,
    pot: Potential,
    *,
    phi1: float | None = None,
    phi1_range: tuple[float, float] | None = None,
    classify: bool = True,
    workers: int | None = None,
) -> SurfaceResult:
    """Rectangular sweep of the energy-Casimir map over a family.

    For the right-angled family the first grid axis runs over phi1 instead of
    theta (supply ``phi1_range``).  Failures of individual samples are
    collected, not raised.  Sample evaluation is independent per grid node;
    with ``workers`` > 1 (default from SPHERETOP_WORKERS) a process pool is
    used and results are reassembled in grid order.
    """
    n_a, n_b = grid
    taus = np.linspace(tau_range[0], tau_range[1], n_b)
    if family == FAMILY_RIGHT_ANGLED:
        if phi1_range is None:
            raise ValueError("rightAngled surfaces need phi1_range")
        firsts = [(math.pi / 2, p) for p in np.linspace(*phi1_range, n_a)]
    else:
        firsts = [(t, phi1) for t in np.linspace(theta_range[0], theta_range[1], n_a)]
    pkind, pextra = _potential_spec(pot)
    jobs = []
    idx = 0
    for theta, p1 in firsts:
        for tau in taus:
            jobs.append((idx, family, float(theta), float(tau),
                         m.m1, m.m2, pkind, pextra, p1, classify))
            idx += 1

    workers = default_workers() if workers is None else workers
    results: list = [None] * len(jobs)
    if workers > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(workers) as pool:
            for i, s, err in pool.imap_unordered(_surface_worker, jobs, chunksize=64):
                results[i] = (s, err)
    else:
        for job in jobs:
            i, s, err = _surface_worker(job)
            results[i] = (s, err)

    samples, failures = [], []
    for s, err in results:
        if s is not None:
            samples.append(s)
        else:
            failures.append(err)
    return SurfaceResult(samples=tuple(samples), failures=tuple(failures))


def singular_thread(
    rate_range: tuple[float, float],
    n: int,
    m: MassParams,
    gamma: float,
    *,
    antipodal: bool = False,
    classify: bool = True,
) -> list[ECSample]:
    """Sample the coincident/antipodal thread of the constant-force problem.

    The thread is parameterised by the common circulation rate c = xi - eta;
    here it is swept with eta = 0, xi = c.
    """
    pot = Potential.linear(gamma)
    theta = math.pi if antipodal else 0.0
    family = FAMILY_SINGULAR_PI if antipodal else FAMILY_SINGULAR_0
    out = []
    for c in np.linspace(rate_range[0], rate_range[1], n):
        re = solve_re(theta, 0.0, m, pot, xi_mag=float(c))
        out.append(_sample_from_re(re, family, 0.0, classify))
    return out


def thread_detachment_point(alpha: float, gamma: float) -> float:
    """|R|^2 at which the upright thread's spin quartet changes reality:
    2 gamma / alpha (gyroscopic stabilisation threshold)."""
    return 2.0 * gamma / alpha


def ec_csv(samples) -> str:
    """CSV text for energy-Casimir samples; fixed column order."""
    buf = io.StringIO()
    buf.write(",".join(EC_CSV_COLUMNS) + "\n")
    for s in samples:
        buf.write(f"{s.family},{s.theta!r},{s.tau!r},{s.H!r},"
                  f"{s.lam2!r},{s.rho2!r},{s.stability}\n")
    return buf.getvalue()


PLOT_SCRIPT = """\
#!/usr/bin/env python3
\"\"\"Plot an energy-Casimir surface CSV produced by the ec-surface command.\"\"\"
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else "ec_surface.csv"
rows = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
fig = plt.figure()
ax = fig.add_subplot(projection="3d")
ax.scatter(rows["lam2"], rows["rho2"], rows["H"], s=2,
           c=np.where(rows["stability"] == "linearly_stable", "tab:blue", "tab:red"))
ax.set_xlabel("|lambda|^2")
ax.set_ylabel("|rho|^2")
ax.set_zlabel("H")
plt.show()
"""
