"""Meromorphic two-particle scattering amplitudes built from sinh-blocks.

An amplitude is a signed product of blocks

    B_a(w) = (sinh w + i sin(pi a)) / (sinh w - i sin(pi a)),

each evaluated at w = zeta + i*shift.  Every block satisfies

    B_a(i pi - w) = B_a(w)          (crossing)
    B_a(-w)       = B_a(w)^-1       (unitarity / inversion)
    B_a(w + i pi) = B_a(w)^-1

so products with shift-paired blocks satisfy the S-matrix axioms
identically; numerics only confirm bookkeeping.  All poles and zeros of a
block lie on the imaginary axis, which makes exact pole/zero/residue
bookkeeping possible: locations are tracked as rational-like floats in
units of pi and merged with a 1e-12 tolerance (a pole coincident with a
zero of equal order cancels).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import NotASimplePole, OracleMismatch, PoleProximity

EPS_POLE = 1e-9          # evaluation guard distance to a pole
MERGE_TOL = 1e-11        # clustering tolerance for coincident locations, units of pi
CONTOUR_RADIUS = 1e-3
CONTOUR_NODES = 64
RESIDUE_RTOL = 1e-6


def in_strip(zeta: complex) -> bool:
    """Closed physical strip 0 <= Im zeta <= pi."""
    return 0.0 <= zeta.imag <= math.pi


def in_open_strip(zeta: complex) -> bool:
    return 0.0 < zeta.imag < math.pi


@dataclass(frozen=True)
class Block:
    """One factor B_a(zeta + i*shift)^exponent.

    ``a`` must be non-integer (integer a degenerates to B = 1 or has
    coincident numerator/denominator roots), ``exponent`` is +-1; repeated
    factors are expressed by repeating blocks in the amplitude.
    """

    a: float
    shift: float = 0.0
    exponent: int = 1

    def __post_init__(self):
        if self.a == 0.0 or float(self.a) == int(self.a):
            raise ValueError(f"degenerate block parameter a={self.a}")
        if self.exponent not in (-1, 1):
            raise ValueError(f"block exponent must be +-1, got {self.exponent}")

    @property
    def sin_pia(self) -> float:
        return math.sin(math.pi * self.a)

    def _half_integer(self) -> bool:
        # |sin(pi a)| == 1 exactly for a = k + 1/2; those roots are double.
        return abs(2.0 * self.a - round(2.0 * self.a)) < 1e-13 and round(2.0 * self.a) % 2 != 0


@dataclass(frozen=True)
class PoleData:
    """A pole (or zero, for the zero enumeration) in the closed strip."""

    location: complex
    order: int
    residue: complex | None = None
    channel: str = "other"      # 's' | 't' | 'other', assigned by the model layer

    def with_channel(self, channel: str) -> "PoleData":
        return PoleData(self.location, self.order, self.residue, channel)


@dataclass(frozen=True)
class Amplitude:
    """sign * prod_j B_{a_j}(zeta + i shift_j)^{e_j}; immutable."""

    sign: int = 1
    blocks: tuple[Block, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("amplitude sign must be +-1")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    def __call__(self, zeta: complex) -> complex:
        return eval_amplitude(self, zeta)

    def product(self, other: "Amplitude") -> "Amplitude":
        return Amplitude(self.sign * other.sign, self.blocks + other.blocks)

    def shifted(self, delta: float) -> "Amplitude":
        """The amplitude zeta -> A(zeta + i*delta)."""
        return Amplitude(self.sign, tuple(Block(b.a, b.shift + delta, b.exponent) for b in self.blocks))

    def canonical(self) -> "Amplitude":
        """Reduce every shift into (-pi/2, pi/2] using B(w + i pi) = B(w)^-1.

        Keeps pole bookkeeping and axiom pairing in a normal form; the
        function value is unchanged.
        """
        out = []
        for b in self.blocks:
            shift, exp = b.shift, b.exponent
            while shift > math.pi / 2 + 1e-12:
                shift -= math.pi
                exp = -exp
            while shift < -math.pi / 2 - 1e-12:
                shift += math.pi
                exp = -exp
            out.append(Block(b.a, shift, exp))
        out.sort(key=lambda b: (b.a, b.shift, b.exponent))
        return Amplitude(self.sign, tuple(out))


CONSTANT_ONE = Amplitude(1, ())


# ---------------------------------------------------------------------------
# evaluation


def _pole_distance(b: Block, w: complex) -> float:
    """Distance from w to the roots of the evaluated block's denominator."""
    fams = _root_families(b, "D" if b.exponent == 1 else "N")
    best = math.inf
    for y0, _order in fams:
        # roots at w = i*pi*(y0 + 2k)
        k = round((w.imag / math.pi - y0) / 2.0)
        for kk in (k - 1, k, k + 1):
            root = 1j * math.pi * (y0 + 2.0 * kk)
            best = min(best, abs(w - root))
    return best


def eval_block(b: Block, zeta: complex, eps_pole: float = EPS_POLE) -> complex:
    """B_a(zeta + i*shift)^exponent with a proximity guard on its poles."""
    w = complex(zeta) + 1j * b.shift
    if _pole_distance(b, w) < eps_pole:
        raise PoleProximity(f"evaluation within {eps_pole} of a pole of {b}")
    s = 1j * b.sin_pia
    sh = cmath.sinh(w)
    val = (sh + s) / (sh - s)
    return val if b.exponent == 1 else 1.0 / val


def eval_amplitude(a: Amplitude, zeta: complex, eps_pole: float = EPS_POLE) -> complex:
    """sign times the left-to-right product of block values."""
    out = complex(a.sign)
    for b in a.blocks:
        out *= eval_block(b, zeta, eps_pole)
    return out


# ---------------------------------------------------------------------------
# pole / zero enumeration

def _root_families(b: Block, which: str) -> list[tuple[float, int]]:
    """Root families of the block numerator ('N') or denominator ('D').

    Returned as (y0, order) with roots at w = i*pi*(y0 + 2k), k integer.
    sinh w = +- i sin(pi a) has all roots on the imaginary axis; they are
    simple except when |sin(pi a)| = 1 (cosh vanishes there too).
    """
    a = b.a
    if b._half_integer():
        if which == "D":
            return [(a % 2.0, 2)]
        return [((-a) % 2.0, 2)]
    if which == "D":
        return [(a % 2.0, 1), ((1.0 - a) % 2.0, 1)]
    return [((-a) % 2.0, 1), ((1.0 + a) % 2.0, 1)]


def _block_strip_events(b: Block) -> list[tuple[float, int]]:
    """(location y in units of pi, signed order) for one block, y in [0, 1].

    Positive order = pole of the block, negative = zero, after applying the
    block exponent.  Location refers to the zeta variable (shift removed).
    """
    t = b.shift / math.pi
    events: list[tuple[float, int]] = []
    for which, base_sign in (("D", 1), ("N", -1)):
        sgn = base_sign * b.exponent
        for y0, order in _root_families(b, which):
            # need y0 + 2k - t in [0, 1]
            kmin = math.floor((t - y0) / 2.0) - 1
            kmax = math.ceil((1.0 + t - y0) / 2.0) + 1
            for k in range(kmin, kmax + 1):
                y = y0 + 2.0 * k - t
                if -MERGE_TOL <= y <= 1.0 + MERGE_TOL:
                    events.append((min(max(y, 0.0), 1.0), sgn * order))
    return events


def _merged_events(a: Amplitude) -> list[tuple[float, int]]:
    """Cluster per-block events by location and sum signed orders."""
    events: list[tuple[float, int]] = []
    for b in a.blocks:
        events.extend(_block_strip_events(b))
    events.sort()
    merged: list[list[float]] = []
    for y, order in events:
        if merged and y - merged[-1][0] <= MERGE_TOL:
            merged[-1][1] += order
            # keep the first representative location to stay deterministic
        else:
            merged.append([y, order])
    return [(y, int(o)) for y, o in merged if o != 0]


def poles_in_strip(a: Amplitude) -> list[PoleData]:
    """All net poles with 0 <= Im zeta <= pi, sorted by Im; exact bookkeeping.

    Simple poles carry their analytic residue (leading-coefficient product);
    use :func:`residue` for the contour-oracle cross-check.
    """
    out = []
    for y, order in _merged_events(a):
        if order > 0:
            loc = 1j * math.pi * y
            res = _leading_coefficient(a, y)[1] if order == 1 else None
            out.append(PoleData(loc, order, res))
    return out


def zeros_in_strip(a: Amplitude) -> list[PoleData]:
    """Net zeros in the closed strip (order counted positively)."""
    return [PoleData(1j * math.pi * y, -order) for y, order in _merged_events(a) if order < 0]


# ---------------------------------------------------------------------------
# residues via leading Taylor coefficients

def _poly_leading(value: complex, d1: complex, d2: complex, order: int) -> complex:
    if order == 0:
        return value
    if order == 1:
        return d1
    return d2 / 2.0


def _block_leading(b: Block, y: float) -> tuple[int, complex]:
    """Block behaviour near zeta0 = i*pi*y: returns (m, c) with
    B^e ~ c * (zeta - zeta0)^m."""
    w0 = 1j * math.pi * (y + b.shift / math.pi)
    s = 1j * b.sin_pia
    sh, ch = cmath.sinh(w0), cmath.cosh(w0)

    def root_order(y0_orders: list[tuple[float, int]]) -> int:
        yw = (w0 / (1j * math.pi)).real
        for y0, order in y0_orders:
            frac = (yw - y0) / 2.0
            if abs(frac - round(frac)) * 2.0 <= MERGE_TOL:
                return order
        return 0

    mN = root_order(_root_families(b, "N"))
    mD = root_order(_root_families(b, "D"))
    cN = _poly_leading(sh + s, ch, sh, mN)
    cD = _poly_leading(sh - s, ch, sh, mD)
    m = b.exponent * (mN - mD)
    c = (cN / cD) ** b.exponent
    return m, c


def _leading_coefficient(a: Amplitude, y: float) -> tuple[int, complex]:
    """Net order m and leading Laurent coefficient c of A at zeta0 = i*pi*y:
    A(zeta) ~ c (zeta - zeta0)^m."""
    m_total, c_total = 0, complex(a.sign)
    for b in a.blocks:
        m, c = _block_leading(b, y)
        m_total += m
        c_total *= c
    return m_total, c_total


def regularized_value(a: Amplitude, zeta0: complex) -> complex:
    """lim (zeta - zeta0)^m A(zeta) with m the net order at zeta0.

    Equals A(zeta0) where A is regular; finite at cancelled pole/zero pairs."""
    return _leading_coefficient(a, zeta0.imag / math.pi)[1]


def contour_residue(a: Amplitude, zeta0: complex,
                    radius: float = CONTOUR_RADIUS, nodes: int = CONTOUR_NODES) -> complex:
    """(1/2 pi i) * closed contour integral of A on a circle around zeta0.

    Trapezoid rule on the periodic parametrization; exponentially accurate."""
    acc = 0.0 + 0.0j
    for j in range(nodes):
        phi = 2.0 * math.pi * j / nodes
        e = cmath.exp(1j * phi)
        acc += eval_amplitude(a, zeta0 + radius * e) * e
    return acc * radius / nodes


def residue(a: Amplitude, zeta0: complex,
            radius: float = CONTOUR_RADIUS, nodes: int = CONTOUR_NODES,
            rtol: float = RESIDUE_RTOL) -> complex:
    """Residue at a simple pole, analytic value cross-checked by contour.

    Raises NotASimplePole if the net order at zeta0 differs from 1 and
    OracleMismatch if the two routes disagree (bookkeeping bug, not noise).
    """
    y = zeta0.imag / math.pi
    if abs(zeta0.real) > 1e-12:
        raise NotASimplePole("all block-product poles are purely imaginary")
    order = 0
    for yy, oo in _merged_events(a):
        if abs(yy - y) <= 1e-9:
            order, y = oo, yy
            break
    if order != 1:
        raise NotASimplePole(f"net order {order} at Im zeta = {y}*pi")
    analytic = _leading_coefficient(a, y)[1]
    numeric = contour_residue(a, 1j * math.pi * y, radius, nodes)
    if abs(analytic - numeric) > rtol * max(abs(analytic), abs(numeric)):
        raise OracleMismatch(
            f"analytic residue {analytic} vs contour {numeric} at Im zeta = {y}*pi")
    return analytic


# ---------------------------------------------------------------------------
# axiom verification

def _pole_shadow_ok(a: Amplitude, pts: Iterable[complex], min_dist: float = 0.05) -> list[complex]:
    locs = [p.location for p in poles_in_strip(a)]
    out = []
    for z in pts:
        # the axiom checks evaluate at z, -z and i pi - z
        probes = (z, -z, 1j * math.pi - z)
        if all(abs(p - l) > min_dist for p in probes for l in locs):
            out.append(z)
    return out


def default_strip_samples(n: int = 100) -> list[complex]:
    """Deterministic low-discrepancy-ish lattice inside the open strip."""
    pts = []
    golden = 0.6180339887498949
    for j in range(n):
        x = -4.0 + 8.0 * ((j * golden) % 1.0)
        lam = math.pi * (0.08 + 0.84 * ((j * golden * golden) % 1.0))
        pts.append(x + 1j * lam)
    return pts


def verify_axioms(a: Amplitude, grid: Sequence[float], tol: float = 1e-10,
                  strip_samples: Sequence[complex] | None = None):
    """Unitarity, crossing, and inversion residuals; pass iff all <= tol.

    Returns a VerificationReport; failures are entries, never exceptions.
    """
    from .report import Check, VerificationReport

    if strip_samples is None:
        strip_samples = default_strip_samples()
    real_pts = _pole_shadow_ok(a, [complex(t, 0.0) for t in grid])
    strip_pts = _pole_shadow_ok(a, strip_samples)

    unit = max((abs(eval_amplitude(a, z) * eval_amplitude(a, z).conjugate() - 1.0)
                for z in real_pts), default=0.0)
    inv = max((abs(eval_amplitude(a, -z) * eval_amplitude(a, z) - 1.0)
               for z in real_pts), default=0.0)
    cross = max((abs(eval_amplitude(a, 1j * math.pi - z) - eval_amplitude(a, z))
                 for z in strip_pts), default=0.0)

    report = VerificationReport("amplitude-axioms")
    report.add(Check("unitarity_real_line", unit, tol))
    report.add(Check("inversion", inv, tol))
    report.add(Check("crossing_strip", cross, tol))
    return report


# ---------------------------------------------------------------------------
# serialization: bit-exact text round-trip

def to_text(a: Amplitude) -> str:
    lines = [f"sign {a.sign:+d}"]
    for b in a.blocks:
        lines.append(f"block {b.a!r} {b.shift!r} {b.exponent:d}")
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Amplitude:
    sign = 1
    blocks = []
    for line in text.strip().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "sign":
            sign = int(parts[1])
        elif parts[0] == "block":
            blocks.append(Block(float(parts[1]), float(parts[2]), int(parts[3])))
        else:
            raise ValueError(f"unknown record {parts[0]!r}")
    return Amplitude(sign, tuple(blocks))


def to_dict(a: Amplitude) -> dict:
    return {"sign": a.sign,
            "blocks": [{"a": b.a, "shift": b.shift, "exponent": b.exponent} for b in a.blocks]}


def from_dict(d: dict) -> Amplitude:
    return Amplitude(int(d.get("sign", 1)),
                     tuple(Block(float(b["a"]), float(b.get("shift", 0.0)),
                                 int(b.get("exponent", 1))) for b in d.get("blocks", [])))
