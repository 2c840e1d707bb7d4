"""Gaussian Wick calculus and map generating series: the combinatorial side of
the loop equations.

Trace moments of the unit Gaussian matrix weight are sums over perfect
matchings of half-edges, each contributing N^(number of index loops); vertex
insertions from exp(N sum_k t_k Tr M^k / k) with propagator weight t/N turn
these into generating series counting (non-connected) maps graded by edge
count, with coefficients that are Laurent polynomials in N times monomials in
the couplings.  The recursion structure of those series is exactly the loop
equations, which is checked here with exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exact import CRational, MPoly
from .loopgen import Potential, q_polynomial
from .symfunc import Partition

HALF_EDGE_CAP = 16

NVARS = ("N",)


def n_poly(terms: dict[int, object]) -> MPoly:
    """Laurent polynomial in the symbol N."""
    return MPoly(NVARS, {(e,): CRational.coerce(c) for e, c in terms.items()})


def _pairings(items: list[int]):
    """All perfect matchings, first free element paired with each later one."""
    if not items:
        yield []
        return
    first = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for sub in _pairings(rest):
            yield [(first, items[i])] + sub


_GTM_CACHE: dict[tuple[int, ...], MPoly] = {}


def gaussian_trace_moment(powers: tuple[int, ...]) -> MPoly:
    """< prod_i Tr M^{k_i} > for the unit Gaussian weight e^{-Tr M^2 / 2}.

    Sums N^(cycles of gamma.pi) over perfect matchings pi of the half-edges,
    gamma being the product of the trace cycles; exact polynomial in N.
    """
    powers = tuple(int(k) for k in powers)
    if any(k < 1 for k in powers):
        raise ValueError("trace powers must be positive")
    key = tuple(sorted(powers))
    if key in _GTM_CACHE:
        return _GTM_CACHE[key]
    total = sum(powers)
    if total % 2:
        result = MPoly.zero(NVARS)
        _GTM_CACHE[key] = result
        return result
    if total > HALF_EDGE_CAP:
        raise ValueError(
            f"half-edge count {total} exceeds the enumeration cap {HALF_EDGE_CAP}"
        )
    gamma = list(range(total))
    pos = 0
    for k in powers:
        for i in range(k):
            gamma[pos + i] = pos + (i + 1) % k
        pos += k
    counts: dict[int, int] = {}
    for pairing in _pairings(list(range(total))):
        pi = list(range(total))
        for a, b in pairing:
            pi[a], pi[b] = b, a
        seen = [False] * total
        cycles = 0
        for start in range(total):
            if seen[start]:
                continue
            cycles += 1
            x = start
            while not seen[x]:
                seen[x] = True
                x = gamma[pi[x]]
        counts[cycles] = counts.get(cycles, 0) + 1
    result = n_poly(counts)
    _GTM_CACHE[key] = result
    return result


@dataclass
class MapSeries:
    """Truncated generating series in the propagator weight t.

    ``coeffs`` maps edge count e to a polynomial in N and the coupling symbols
    (multidegree in t_3..t_{d+1} tracked exactly); absent keys are zero.
    """

    marked: tuple[int, ...]
    e_max: int
    vars: tuple[str, ...]
    coeffs: dict[int, MPoly]

    def get(self, e: int) -> MPoly:
        return self.coeffs.get(e, MPoly.zero(self.vars))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.coeffs.values())

    def to_json(self) -> dict:
        return {
            "marked": list(self.marked),
            "e_max": self.e_max,
            "vars": list(self.vars),
            "coeffs": {
                str(e): [
                    {"exponents": list(ex), "re": str(c.re), "im": str(c.im)}
                    for ex, c in sorted(p.terms.items())
                ]
                for e, p in sorted(self.coeffs.items())
                if not p.is_zero()
            },
        }


def _series_vars(degrees: tuple[int, ...]) -> tuple[str, ...]:
    return ("N",) + tuple(f"t{k}" for k in degrees)


def _vertex_configs(degrees: tuple[int, ...], budget: int):
    """Multiplicity vectors m_k with sum k*m_k <= budget."""
    if not degrees:
        yield ()
        return
    k = degrees[0]
    for m in range(budget // k + 1):
        for rest in _vertex_configs(degrees[1:], budget - k * m):
            yield (m,) + rest


def map_series(tweights: dict[int, object], marked: tuple[int, ...], e_max: int) -> MapSeries:
    """Non-connected map generating series T_{marked} to edge order e_max.

    ``tweights`` maps vertex degrees (>= 3) to exact rational weights; marked
    faces must have size >= 1.  Grading: e = (sum of vertex degrees + sum of
    marked sizes) / 2.
    """
    if e_max > 6:
        raise ValueError("e_max above the complexity cap 6")
    return _series(tweights, marked, e_max)


def _series(tweights: dict[int, object], marked: tuple[int, ...], e_max: int) -> MapSeries:
    marked = tuple(int(k) for k in marked)
    if any(k < 1 for k in marked):
        raise ValueError("marked face sizes must be >= 1")
    weights = {int(k): CRational.coerce(v) if not isinstance(v, CRational) else v
               for k, v in tweights.items()}
    if any(k < 3 for k in weights):
        raise ValueError("vertex weights start at degree 3")
    degrees = tuple(sorted(weights))
    svars = _series_vars(degrees)
    base = sum(marked)
    coeffs: dict[int, MPoly] = {}
    for mvec in _vertex_configs(degrees, 2 * e_max - base if 2 * e_max >= base else -1):
        half = base + sum(k * m for k, m in zip(degrees, mvec))
        if half % 2:
            continue
        e = half // 2
        if e > e_max:
            continue
        if half > HALF_EDGE_CAP:
            raise ValueError(
                f"order e={e} needs {half} half-edges, beyond the cap {HALF_EDGE_CAP};"
                f" lower e_max"
            )
        powers = marked + tuple(
            k for k, m in zip(degrees, mvec) for _ in range(m)
        )
        wick = gaussian_trace_moment(powers) if powers else MPoly.const(1, NVARS)
        if wick.is_zero():
            continue
        rat = CRational(1)
        for k, m in zip(degrees, mvec):
            rat = rat * (weights[k] / k) ** m / Fraction(factorial(m))
        nshift = sum(mvec) - e
        mono_exp = (nshift,) + mvec
        factor = MPoly(svars, {mono_exp: rat})
        contrib = factor * _embed_n(wick, svars)
        coeffs[e] = coeffs.get(e, MPoly.zero(svars)) + contrib
    coeffs = {e: p for e, p in coeffs.items() if not p.is_zero()}
    return MapSeries(marked=marked, e_max=e_max, vars=svars, coeffs=coeffs)


def _embed_n(p: MPoly, svars: tuple[str, ...]) -> MPoly:
    return p.embed(svars)


def map_potential(tweights: dict[int, object]) -> tuple[Potential, tuple[str, ...], MPoly]:
    """The map-model potential V(x) = N (x^2/2t - sum_k t_k x^k / k) as a
    symbolic Potential, together with its generator tuple and the symbol N."""
    weights = {int(k): CRational.coerce(v) if not isinstance(v, CRational) else v
               for k, v in tweights.items()}
    degrees = tuple(sorted(weights))
    if degrees and degrees[0] < 3:
        raise ValueError("vertex weights start at degree 3")
    top = max(degrees) if degrees else 2
    qvars = ("N", "t") + tuple(f"t{k}" for k in degrees)
    N = MPoly.gen("N", qvars)
    zero = MPoly.zero(qvars)
    tau = [zero] * top
    tau[1] = N * MPoly.gen("t", qvars, power=-1)
    for k in degrees:
        tau[k - 1] = -(N * MPoly.gen(f"t{k}", qvars) * weights[k])
    return Potential.polynomial(tau), qvars, N


def apply_functional(Q, qvars: tuple[str, ...], tweights: dict[int, object], e_max: int) -> MapSeries:
    """E(Q) as a truncated series, with E(p_nu) := T_nu built from ``tweights``.

    ``Q`` must carry MPoly coefficients over ``qvars`` (as produced by
    q_polynomial on a map_potential); the internal series run one edge order
    past e_max so the 1/t propagator coefficient stays complete.
    """
    degrees = tuple(sorted(int(k) for k in tweights))
    svars = _series_vars(degrees)
    order = e_max + 1
    cache: dict[Partition, MapSeries] = {}
    n_idx = qvars.index("N")
    t_idx = qvars.index("t")
    coup_idx = [qvars.index(f"t{k}") for k in degrees]
    out: dict[int, MPoly] = {}
    for nu, coeff in Q.terms.items():
        if nu not in cache:
            cache[nu] = _series(tweights, tuple(nu), order)
        T = cache[nu]
        for exps, q in coeff.terms.items():
            mono = (exps[n_idx],) + tuple(exps[i] for i in coup_idx)
            factor = MPoly(svars, {mono: q})
            for e, poly in T.coeffs.items():
                target = e + exps[t_idx]
                if target < 0 or target > e_max:
                    continue
                out[target] = out.get(target, MPoly.zero(svars)) + factor * poly
    out = {e: p for e, p in out.items() if not p.is_zero()}
    return MapSeries(marked=(), e_max=e_max, vars=svars, coeffs=out)


def tutte_residual(tweights: dict[int, object], mu: tuple[int, ...], e_max: int) -> MapSeries:
    """Residual series of E(Q_mu) under E(p_nu) := T_nu.

    The recursion counting maps is exactly the loop equations, so every
    coefficient must be an identically zero polynomial; any nonzero entry in
    the returned series is a genuine discrepancy.
    """
    if e_max > 6:
        raise ValueError("e_max above the complexity cap 6")
    V, qvars, N = map_potential(tweights)
    Q = q_polynomial(tuple(mu), V, nvars=N)
    res = apply_functional(Q, qvars, tweights, e_max)
    return MapSeries(marked=tuple(mu), e_max=e_max, vars=res.vars, coeffs=res.coeffs)
