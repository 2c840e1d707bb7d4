"""Numerical moment functionals: 1-D arc moments assembled into N-dimensional
Vandermonde-squared integrals.

E_Gamma(p) factorizes over product domains once Delta(X)^2 is expanded as a
double determinant and each power sum is distributed over variables, so the
only quadrature ever performed is one-dimensional: adaptive Gauss-Kronrod on
open arcs (rays, lines, elbows) and the periodic trapezoid rule on circles.
Everything downstream is exact bookkeeping plus worst-case error propagation.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad as _scipy_quad

from .contours import ArcSeg, CircleSeg, Contour, HomologyClass, LineSeg, RaySeg
from .loopgen import Potential
from .momsolve import hn_dimension
from .symfunc import Partition, PowerSumPoly, compositions, partitions_in_box, reduce_length

MAX_VARS = 5
MAX_PARTS = 6
TAIL_CUTOFF = 1e-18


class QuadratureError(RuntimeError):
    def __init__(self, message, value=None, err=None):
        super().__init__(message)
        self.value = value
        self.err = err


def _quad_complex(f, a: float, b: float, tol: float):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for limit in (200, 800):
            val, err = _scipy_quad(
                f, a, b, epsabs=tol * 1e-2, epsrel=tol, limit=limit, complex_func=True
            )
            err_abs = abs(err)
            if err_abs <= max(tol * 1e-2, tol * abs(val)) * 10 + 1e-300:
                return val, err_abs
    raise QuadratureError(
        f"quadrature tolerance {tol} unreachable; achieved error {err_abs:.3e}",
        value=val,
        err=err_abs,
    )


def _ray_truncation(seg: RaySeg, weight, kpow: int) -> float:
    """Arc length at which |z|^k * |e^{-V}| falls below the tail cutoff."""
    logcut = math.log(TAIL_CUTOFF)

    def logmag(s: float) -> float:
        z = seg.point(s)
        try:
            w = weight(z)
        except (OverflowError, ValueError):
            return math.inf
        if w == 0:
            return -math.inf
        m = abs(w)
        base = math.log(m) if m > 0 else -math.inf
        return base + (kpow * math.log(abs(z)) if z != 0 and kpow else 0.0)

    peak = max(logmag(0.0), logmag(1.0))
    s = 1.0
    for _ in range(240):
        val = logmag(s)
        if math.isinf(val) and val > 0:
            raise QuadratureError(
                f"integrand blows up along ray angle {seg.angle:.4f}; inadmissible contour"
            )
        peak = max(peak, val)
        if val < peak + logcut:
            return s
        s *= 1.30
    raise QuadratureError(
        f"integrand does not decay along ray angle {seg.angle:.4f}; inadmissible contour?"
    )


def _trapezoid_circle(seg: CircleSeg, f, tol: float):
    """Periodic trapezoid rule with doubling; spectrally accurate on circles."""
    m = 64
    prev = None
    last_delta = math.inf
    while m <= 1 << 16:
        thetas = np.arange(m) * (2 * math.pi / m)
        total = 0j
        for th in thetas:
            z = seg.center + seg.radius * cmath.exp(1j * th)
            dz = 1j * seg.radius * cmath.exp(1j * th)
            total += f(z) * dz
        val = total * (2 * math.pi / m)
        if prev is not None:
            last_delta = abs(val - prev)
            if last_delta <= tol * max(1.0, abs(val)):
                return val, last_delta
        prev = val
        m *= 2
    raise QuadratureError(
        f"trapezoid rule did not converge to {tol}; last delta {last_delta:.3e}",
        value=prev,
        err=last_delta,
    )


def arc_moment(c: Contour, V: Potential, k: int, tol: float = 1e-12):
    """integral over the contour of x^k e^{-V(x)} dx, with an error estimate."""
    total = 0j
    err = 0.0
    for seg in c.segments:
        if isinstance(seg, CircleSeg):
            val, e = _trapezoid_circle(seg, lambda z: z ** k * V.exp_neg_V(z), tol)
        elif isinstance(seg, RaySeg):
            smax = _ray_truncation(seg, V.exp_neg_V, k)
            phase = cmath.exp(1j * seg.angle)

            def f(s, _p=phase):
                z = seg.point(s)
                return z ** k * V.exp_neg_V(z) * _p

            val, e = _quad_complex(f, 0.0, smax, tol)
            if seg.inward:
                val = -val
        elif isinstance(seg, LineSeg):
            dz = seg.z1 - seg.z0

            def f(t, _dz=dz, _z0=seg.z0):
                z = _z0 + t * _dz
                return z ** k * V.exp_neg_V(z) * _dz

            val, e = _quad_complex(f, 0.0, 1.0, tol)
        elif isinstance(seg, ArcSeg):

            def f(theta, _s=seg):
                z = _s.point(theta)
                dz = 1j * _s.radius * cmath.exp(1j * theta)
                return z ** k * V.exp_neg_V(z) * dz

            val, e = _quad_complex(f, seg.a0, seg.a1, tol)
        else:
            raise TypeError(f"unknown segment {seg!r}")
        total += val
        err += e
    return total, err


class MomentTable:
    """Lazy cache of 1-D arc moments m_j(k) with error estimates."""

    def __init__(self, arcs, V: Potential, tol: float = 1e-12, preset: dict | None = None):
        self.arcs = list(arcs)
        self.V = V
        self.tol = tol
        self.data: dict[tuple[int, int], tuple[complex, float]] = dict(preset or {})

    def moment(self, arc_index: int, k: int) -> tuple[complex, float]:
        key = (arc_index, k)
        if key not in self.data:
            self.data[key] = arc_moment(self.arcs[arc_index], self.V, k, self.tol)
        return self.data[key]


def _perm_signs(N: int):
    perms = list(itertools.permutations(range(N)))
    signs = []
    for p in perms:
        inv = sum(1 for i in range(N) for j in range(i + 1, N) if p[i] > p[j])
        signs.append(-1.0 if inv % 2 else 1.0)
    return perms, signs


def expectation(
    G: HomologyClass,
    p: PowerSumPoly,
    V: Potential,
    tol: float = 1e-12,
    table: MomentTable | None = None,
):
    """E_Gamma(p) = integral of p * Delta^2 * prod e^{-V}, with error estimate.

    The Vandermonde square is expanded over permutation pairs and each p_mu
    term over variable assignments, so the result is an exact combination of
    tabulated 1-D moments.  Complexity (N!)^2 N^len(mu); hard caps N <= 5 and
    len(mu) <= 6.
    """
    N = G.N
    if N > MAX_VARS:
        raise ValueError(f"N={N} exceeds the assembly cap N <= {MAX_VARS}")
    if isinstance(p.nvars, int) and p.nvars != N:
        raise ValueError(f"polynomial is for {p.nvars} variables, class has N={N}")
    if p.max_length() > N:
        # same function of N variables, exponentially cheaper to assemble
        p = reduce_length(p, N)
    if p.max_length() > MAX_PARTS:
        raise ValueError(f"partition length {p.max_length()} exceeds cap {MAX_PARTS}")
    if table is None:
        table = MomentTable(G.arc_basis, V, tol)
    perms, signs = _perm_signs(N)
    total = 0j
    err_total = 0.0
    for comp, ccoef in G.terms:
        if not ccoef:
            continue
        word: list[int] = []
        for arc_idx, cnt in enumerate(comp):
            word.extend([arc_idx] * cnt)
        comp_val = 0j
        comp_err = 0.0
        for mu, coeff in p.terms.items():
            cval = complex(coeff) if not hasattr(coeff, "to_complex") else coeff.to_complex()
            if not cval:
                continue
            ell = len(mu)
            term_val = 0j
            term_err = 0.0
            for assign in itertools.product(range(N), repeat=ell):
                adds = [0] * N
                for part, var in zip(mu, assign):
                    adds[var] += part
                for si, sigma in enumerate(perms):
                    for ti, tau in enumerate(perms):
                        sgn = signs[si] * signs[ti]
                        prod = 1.0 + 0j
                        emag = 0.0
                        pmag = 1.0
                        for i in range(N):
                            v, e = table.moment(word[i], sigma[i] + tau[i] + adds[i])
                            prod *= v
                            emag = emag * (abs(v) + e) + pmag * e
                            pmag *= abs(v)
                        term_val += sgn * prod
                        term_err += emag
            comp_val += cval * term_val
            comp_err += abs(cval) * term_err
        total += ccoef * comp_val
        err_total += abs(ccoef) * comp_err
    return total, err_total


def oracle_from_quadrature(
    G: HomologyClass,
    V: Potential,
    partitions,
    tol: float = 1e-12,
    table: MomentTable | None = None,
):
    """Tabulate E(p_nu) with error estimates (the empty partition gives Z).

    Returns (values, errors), both keyed by partition.
    """
    if table is None:
        table = MomentTable(G.arc_basis, V, tol)
    values: dict[Partition, complex] = {}
    errors: dict[Partition, float] = {}
    for nu in partitions:
        nu = Partition(tuple(nu))
        poly = PowerSumPoly.monomial(nu, G.N)
        val, err = expectation(G, poly, V, tol, table=table)
        values[nu] = val
        errors[nu] = err
    return values, errors


@dataclass
class MomentMatrix:
    """Numerical witness that classes -> functionals is an isomorphism."""

    N: int
    d: int
    rows: list  # compositions over the arc basis
    cols: list  # box partitions
    entries: list  # row-major complex values
    errors: list
    singular_values: list  # of the column-scaled matrix, descending

    @property
    def min_scaled_singular(self) -> float:
        return self.singular_values[-1]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "rows": [list(r) for r in self.rows],
            "cols": [list(c) for c in self.cols],
            "entries": [[[z.real, z.imag] for z in row] for row in self.entries],
            "errors": self.errors,
            "singular_values": self.singular_values,
            "min_scaled_singular": self.min_scaled_singular,
        }


def moment_matrix(V: Potential, N: int, tol: float = 1e-12, arcs=None, table=None) -> MomentMatrix:
    """Fill E_{gamma^n}(p_nu) over the full basis x box grid and report the
    singular values of the column-scaled matrix."""
    from .contours import basis_arcs

    arcs = list(arcs) if arcs is not None else basis_arcs(V)
    d = V.d
    size = hn_dimension(N, d)
    rows = compositions(N, d)
    cols = partitions_in_box(N, d - 1)
    assert len(rows) == len(cols) == size
    if table is None:
        table = MomentTable(arcs, V, tol)
    entries = []
    errors = []
    for comp in rows:
        G = HomologyClass.make(N, arcs, {comp: 1.0})
        row_vals = []
        row_errs = []
        for nu in cols:
            val, err = expectation(G, PowerSumPoly.monomial(nu, N), V, tol, table=table)
            row_vals.append(val)
            row_errs.append(err)
        entries.append(row_vals)
        errors.append(row_errs)
    A = np.array(entries, dtype=complex)
    scale = np.max(np.abs(A), axis=0)
    scale[scale == 0] = 1.0
    svals = np.linalg.svd(A / scale, compute_uv=False)
    return MomentMatrix(
        N=N,
        d=d,
        rows=rows,
        cols=cols,
        entries=entries,
        errors=errors,
        singular_values=[float(s) for s in svals],
    )
