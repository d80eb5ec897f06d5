"""Wedge-supported test functions with evaluable Fourier transforms.

Two atom families:

* ``RapidityAtom`` -- semi-analytic: for a left-wedge base point x0 the
  positive-frequency transform is the closed form

      f+(zeta) = c * exp(i p(zeta).x0) * exp(-beta (zeta - i pi/2 - th0)^2),

  analytic on the closed strip and bounded there because
  |exp(i p(zeta).x0)| <= 1 for x0 in W_L.  Right-wedge atoms mirror this on
  the negative-frequency side: g-(zeta) = c exp(-i p(zeta).x0) Gauss(zeta).
  The other transform is always defined through the boundary identity
  f-(zeta) = f+(zeta + i pi).

* ``PositionBump`` -- honest position-space support: a smooth mollifier in
  a ball strictly inside the wedge, transformed by tensor Gauss-Legendre
  quadrature (valid at complex rapidity by compact support).

The suite cross-validates the two families; the wedge-locality theorem
machinery consumes only strip analyticity, boundedness and the boundary
identity.  Momentum convention: p(th) = m (cosh th, sinh th) with pairing
p.x = p0 x0 - p1 x1.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import QuadratureWarning, StripViolation

LEFT = "left"
RIGHT = "right"

_STRIP_SLACK = 1e-12


def wedge_margin(x0: float, x1: float, side: str) -> float:
    """Signed distance to the wedge boundary; positive strictly inside."""
    if side == LEFT:
        return (-x1 - abs(x0)) / math.sqrt(2.0)
    if side == RIGHT:
        return (x1 - abs(x0)) / math.sqrt(2.0)
    raise ValueError(f"unknown wedge side {side!r}")


def in_wedge(x0: float, x1: float, side: str) -> bool:
    return wedge_margin(x0, x1, side) > 0.0


def _check_window(side: str, plus: bool, zeta: complex):
    """Analyticity window guard.

    Left-wedge data: f+ certified for Im in [0, pi], f- for [-pi, 0].
    Right-wedge data: g- certified for Im in [0, pi], g+ for [-pi, 0]."""
    lam = complex(zeta).imag
    upper = (side == LEFT) == plus
    if upper and not (-_STRIP_SLACK <= lam <= math.pi + _STRIP_SLACK):
        raise StripViolation(f"Im zeta = {lam} outside certified [0, pi] window")
    if not upper and not (-math.pi - _STRIP_SLACK <= lam <= _STRIP_SLACK):
        raise StripViolation(f"Im zeta = {lam} outside certified [-pi, 0] window")


@dataclass(frozen=True)
class RapidityAtom:
    """Closed-form atom; parameters real for self-conjugate (f = f*) data."""

    side: str
    species: int
    x0: tuple[float, float]
    theta0: complex = 0.0
    beta: complex = 1.0
    coeff: complex = 1.0

    def _gauss(self, zeta: complex) -> complex:
        u = zeta - 1j * math.pi / 2.0 - self.theta0
        return cmath.exp(-self.beta * u * u)

    def _plane_wave(self, zeta: complex, mass: float) -> complex:
        # p(zeta).x0 with the Minkowski pairing
        pdotx = mass * (cmath.cosh(zeta) * self.x0[0] - cmath.sinh(zeta) * self.x0[1])
        sgn = 1j if self.side == LEFT else -1j
        return cmath.exp(sgn * pdotx)

    def fplus(self, zeta: complex, mass: float) -> complex:
        _check_window(self.side, True, zeta)
        if self.side == LEFT:
            return self.coeff * self._plane_wave(zeta, mass) * self._gauss(zeta)
        return self.fminus(zeta + 1j * math.pi, mass)

    def fminus(self, zeta: complex, mass: float) -> complex:
        _check_window(self.side, False, zeta)
        if self.side == RIGHT:
            return self.coeff * self._plane_wave(zeta, mass) * self._gauss(zeta)
        return self.fplus(zeta + 1j * math.pi, mass)

    def reflected(self) -> "RapidityAtom":
        """x -> conj(f(-x)): flips the wedge, conjugates the parameters."""
        side = RIGHT if self.side == LEFT else LEFT
        return RapidityAtom(side, self.species, (-self.x0[0], -self.x0[1]),
                            _conj(self.theta0), _conj(self.beta), _conj(self.coeff))

    def starred(self) -> "RapidityAtom":
        """x -> conj(f(x)): same wedge, conjugated parameters."""
        return replace(self, theta0=_conj(self.theta0), beta=_conj(self.beta),
                       coeff=_conj(self.coeff))

    def is_real(self) -> bool:
        return all(abs(complex(v).imag) == 0.0
                   for v in (self.theta0, self.beta, self.coeff))

    def support_check(self) -> tuple[bool, dict]:
        margin = wedge_margin(*self.x0, self.side)
        cert = {"kind": "rapidity-atom", "margin": margin,
                "bounded_sample": None}
        if margin <= 0.0:
            return False, cert
        # sample |f+| (left) or |g-| (right) boundedness on the strip
        worst = 0.0
        for j in range(21):
            for m in range(21):
                z = complex(-4.0 + 8.0 * j / 20.0, math.pi * m / 20.0)
                v = abs(self.fplus(z, 1.0)) if self.side == LEFT else abs(self.fminus(z, 1.0))
                worst = max(worst, v)
        cert["bounded_sample"] = worst
        return math.isfinite(worst), cert


def _conj(v: complex) -> complex:
    return complex(v).conjugate()


@dataclass(frozen=True)
class PositionBump:
    """Smooth mollifier c*exp(-1/(1 - r^2)) in a ball strictly inside a wedge."""

    side: str
    species: int
    center: tuple[float, float]
    radius: float = 0.8
    coeff: complex = 1.0
    quad_nodes: int = 96

    def profile(self, x0, x1):
        r2 = ((x0 - self.center[0]) ** 2 + (x1 - self.center[1]) ** 2) / self.radius ** 2
        out = np.zeros_like(np.asarray(r2, dtype=float))
        inside = r2 < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
        return self.coeff * out

    def _transform(self, zeta: complex, mass: float, sign: int, nodes: int) -> complex:
        """(1/2pi) integral of exp(sign * i p.x) f(x) over the support box."""
        x, w = np.polynomial.legendre.leggauss(nodes)
        x0 = self.center[0] + self.radius * x
        x1 = self.center[1] + self.radius * x
        w = w * self.radius
        X0, X1 = np.meshgrid(x0, x1, indexing="ij")
        W = np.outer(w, w)
        p0 = mass * cmath.cosh(zeta)
        p1 = mass * cmath.sinh(zeta)
        phase = np.exp(sign * 1j * (p0 * X0 - p1 * X1))
        vals = self.profile(X0, X1) * phase * W
        return complex(vals.sum()) / (2.0 * math.pi)

    def _checked_transform(self, zeta, mass, sign, tol=1e-8):
        coarse = self._transform(zeta, mass, sign, self.quad_nodes)
        fine = self._transform(zeta, mass, sign, 2 * self.quad_nodes)
        if abs(fine - coarse) > tol * max(1.0, abs(fine)):
            warnings.warn(f"bump transform node-doubling error {abs(fine - coarse):.2e}",
                          QuadratureWarning)
        return fine

    def fplus(self, zeta: complex, mass: float) -> complex:
        _check_window(self.side, True, zeta)
        return self._checked_transform(zeta, mass, +1)

    def fminus(self, zeta: complex, mass: float) -> complex:
        _check_window(self.side, False, zeta)
        return self._checked_transform(zeta, mass, -1)

    def reflected(self) -> "PositionBump":
        side = RIGHT if self.side == LEFT else LEFT
        return replace(self, side=side,
                       center=(-self.center[0], -self.center[1]), coeff=_conj(self.coeff))

    def starred(self) -> "PositionBump":
        return replace(self, coeff=_conj(self.coeff))

    def is_real(self) -> bool:
        return complex(self.coeff).imag == 0.0

    def support_check(self) -> tuple[bool, dict]:
        margin = wedge_margin(*self.center, self.side) - self.radius
        return margin > 0.0, {"kind": "position-bump", "margin": margin}


@dataclass(frozen=True)
class TestFunction:
    """Multi-species test function as a list of same-wedge atoms."""

    side: str
    atoms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        for a in self.atoms:
            if a.side != self.side:
                raise ValueError("atom wedge side disagrees with declared side")

    def species_present(self) -> set[int]:
        return {a.species for a in self.atoms}

    def b1_only(self) -> bool:
        return self.species_present() <= {1}

    def fplus(self, species: int, zeta: complex, mass: float) -> complex:
        return sum((a.fplus(zeta, mass) for a in self.atoms if a.species == species),
                   start=0.0 + 0.0j)

    def fminus(self, species: int, zeta: complex, mass: float) -> complex:
        return sum((a.fminus(zeta, mass) for a in self.atoms if a.species == species),
                   start=0.0 + 0.0j)

    def fplus_grid(self, species: int, nodes, mass: float):
        return np.array([self.fplus(species, complex(t), mass) for t in nodes])

    def fminus_grid(self, species: int, nodes, mass: float):
        return np.array([self.fminus(species, complex(t), mass) for t in nodes])

    def reflect(self) -> "TestFunction":
        side = RIGHT if self.side == LEFT else LEFT
        return TestFunction(side, tuple(a.reflected() for a in self.atoms))

    def star(self) -> "TestFunction":
        return TestFunction(self.side, tuple(a.starred() for a in self.atoms))

    def is_real(self) -> bool:
        return all(a.is_real() for a in self.atoms)

    def support_check(self) -> tuple[bool, list]:
        certs = []
        ok = True
        for a in self.atoms:
            good, cert = a.support_check()
            ok = ok and good
            certs.append(cert)
        return ok, certs


def left_atom(species=1, x0=(0.0, -1.0), theta0=0.0, beta=1.0, coeff=1.0) -> TestFunction:
    return TestFunction(LEFT, (RapidityAtom(LEFT, species, tuple(x0), theta0, beta, coeff),))


def right_atom(species=1, x0=(0.0, 1.0), theta0=0.0, beta=1.0, coeff=1.0) -> TestFunction:
    return TestFunction(RIGHT, (RapidityAtom(RIGHT, species, tuple(x0), theta0, beta, coeff),))
