"""Taylor-series solutions of homogeneous quadratic (driver-type) systems.

For dx_i/dt = (v_i' x) x_i with frame V the series coefficients
c_k(i) = x_i^{(k)}(t0) obey a recursion directly in the frame entries:

    c_0(i) = x_i
    c_k(i) = sum_{s=2}^{k+1} sum_tails  v^{k+1,s}_{i,tail}(t0) * x_i * prod(x_tail)

with layer updates (A is the append step, d/dt the entrywise jet derivative)

    v^{k+1,k+1} = A v^{k,k}
    v^{k+1,s}   = A v^{k,s-1} + d/dt v^{k,s}     (3 <= s <= k)
    v^{k+1,2}   =               d/dt v^{k,2}
    v^{2,2}     = frame row

The append multiplier for a tail with multiset m and new index j is
sum_l alpha_l(m + root) * v_{l,j}, a function of the multiset only, so
ordered index strings are aggregated losslessly into multiset keys.  Tails
range over the support set S (indices of nonzero frame columns) only:
coefficients with a tail index outside S vanish identically.

Constant frames collapse to a single-layer recursion (all mixed layers
vanish) which runs over dense count vectors through the kernels in
:mod:`spquad._kernels`.

Everything here uses 1-based component indices in public structures.
"""

from __future__ import annotations

import functools
import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from . import _kernels
from .errors import (Divergence, DomainExit, MixedCenters, NotStationary,
                     OrderBudget, OutOfRadius, StepLimit, ZeroComponent)
from .jets import TimeJet
from .quadratize import QuadraticFrame

MAX_ORDER = 170  # float factorials overflow beyond this


class RadiusWarning(UserWarning):
    """Evaluation outside the guaranteed convergence interval."""


# --------------------------------------------------------------------------
# support
# --------------------------------------------------------------------------

def support(frame: QuadraticFrame) -> tuple[tuple[int, ...], dict[int, tuple[int, ...]]]:
    """Nonzero columns S of the frame and, per j in S, the rows rho(j) in S
    whose entry in column j is not identically zero."""
    m = frame.dim
    cols = tuple(
        j for j in range(1, m + 1)
        if any(not frame.jet(i, j).is_zero() for i in range(1, m + 1)))
    rho = {
        j: tuple(l for l in cols if not frame.jet(l, j).is_zero())
        for j in cols}
    return cols, rho


# --------------------------------------------------------------------------
# result containers
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexMultiset:
    """Unordered tail of a coefficient key: root index plus sorted
    (index, multiplicity) pairs."""

    root: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        last = 0
        for j, mult in self.pairs:
            if j <= last:
                raise ValueError("indices must be strictly increasing")
            if mult < 1:
                raise ValueError("multiplicities must be >= 1")
            last = j

    @property
    def total(self) -> int:
        """Tail length s - 1."""
        return sum(m for _, m in self.pairs)

    def count(self, j: int) -> int:
        for jj, m in self.pairs:
            if jj == j:
                return m
        return 0


@dataclass(frozen=True)
class CoefficientTensor:
    """Aggregated recursion coefficients for one root index.

    ``layers[(k, s)]`` maps tail multisets to jets holding the sum of
    v^{k,s} over all orderings of the tail.  Stationary frames populate
    only the diagonal layers (k, k).
    """

    root: int
    layers: dict[tuple[int, int], dict[IndexMultiset, TimeJet]]


@dataclass(frozen=True)
class SeriesSolution:
    """Taylor data of selected components around a center.

    ``coeffs[r, k]`` is c_k for ``components[r]`` (the derivative values,
    not yet divided by k!).  ``radius_bound`` is the guaranteed lower bound
    on the convergence radius at the center.
    """

    t0: float
    x0: np.ndarray
    order: int
    components: tuple[int, ...]
    coeffs: np.ndarray
    radius_bound: float
    frame_ref: str
    tensors: dict[int, CoefficientTensor] | None = field(default=None, compare=False)

    def component_row(self, i: int) -> np.ndarray:
        return self.coeffs[self.components.index(i)]

    def normalized(self) -> np.ndarray:
        """Literal series coefficients c_k / k!."""
        out = np.array(self.coeffs, dtype=float)
        fact = 1.0
        for k in range(1, self.order + 1):
            fact *= k
            out[:, k] /= fact
        return out


# --------------------------------------------------------------------------
# shared validation
# --------------------------------------------------------------------------

def _check_inputs(frame: QuadraticFrame, x0, K: int,
                  components) -> tuple[np.ndarray, tuple[int, ...]]:
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (frame.dim,):
        raise ValueError(f"x0 must have {frame.dim} components")
    if np.any(x0 == 0.0):
        bad = int(np.nonzero(x0 == 0.0)[0][0]) + 1
        raise ZeroComponent(f"x0 component {bad} is zero")
    if K < 0:
        raise ValueError("order must be >= 0")
    if K > MAX_ORDER:
        raise ValueError(f"order capped at {MAX_ORDER} by float factorial range")
    if components is None:
        comps = tuple(range(1, frame.dim + 1))
    else:
        seen = []
        for i in components:
            i = int(i)
            if not 1 <= i <= frame.dim:
                raise ValueError(f"component {i} out of range")
            if i not in seen:
                seen.append(i)
        comps = tuple(seen)
    return x0, comps


def _mset_from_counts(root: int, counts, cols: tuple[int, ...]) -> IndexMultiset:
    pairs = tuple((cols[l], int(c)) for l, c in enumerate(counts) if c)
    return IndexMultiset(root, pairs)


# --------------------------------------------------------------------------
# stationary engine (dense count vectors + kernels)
# --------------------------------------------------------------------------

@functools.lru_cache(maxsize=16)
def _multiset_tables(sigma: int, K: int):
    """Per-level count vectors and append-transition tables.

    Level k enumerates the multisets of size k over sigma symbols in
    lexicographic order; ``trans[k][r, j]`` is the level-(k+1) row of the
    multiset counts[k][r] + e_j.
    """
    if math.comb(K + sigma, sigma) > 5_000_000:
        raise ValueError(
            f"order {K} with support size {sigma} needs too many multisets; "
            "reduce the order")
    counts_levels = []
    rank_levels = []
    for k in range(K + 1):
        rows = [tuple(c.count(s) for s in range(sigma))
                for c in itertools.combinations_with_replacement(range(sigma), k)]
        counts_levels.append(np.array(rows, dtype=np.int64).reshape(len(rows), sigma))
        rank_levels.append({row: r for r, row in enumerate(rows)})
    trans_levels = []
    for k in range(K):
        counts = counts_levels[k]
        nxt = rank_levels[k + 1]
        trans = np.empty((counts.shape[0], sigma), dtype=np.int64)
        for r in range(counts.shape[0]):
            base = tuple(counts[r])
            for j in range(sigma):
                bumped = base[:j] + (base[j] + 1,) + base[j + 1:]
                trans[r, j] = nxt[bumped]
        trans_levels.append(trans)
    return counts_levels, trans_levels


def taylor_stationary(frame: QuadraticFrame, x0, K: int,
                      components: Iterable[int] | None = None,
                      t0: float = 0.0,
                      keep_tensors: bool = False) -> SeriesSolution:
    """Series coefficients for a constant frame via the single-layer
    recursion v^{k+1}(m + j) += v^k(m) * (sum_l alpha_l(m + root) v_{l,j})."""
    if not frame.is_stationary:
        raise NotStationary("frame has non-constant entries")
    x0, comps = _check_inputs(frame, x0, K, components)
    V = frame.constant_matrix()
    cols, _ = support(frame)
    sigma = len(cols)
    coeffs = np.zeros((len(comps), K + 1))
    coeffs[:, 0] = x0[[i - 1 for i in comps]]
    tensors: dict[int, CoefficientTensor] = {}

    if sigma == 0 or K == 0:
        if keep_tensors:
            for i in comps:
                tensors[i] = CoefficientTensor(i, {})
        return _finish(frame, x0, t0, K, comps, coeffs,
                       tensors if keep_tensors else None)

    counts_levels, trans_levels = _multiset_tables(sigma, K)
    S0 = [j - 1 for j in cols]
    Vss = np.ascontiguousarray(V[np.ix_(S0, S0)])
    x_S = x0[S0]
    pows = [np.prod(x_S ** counts_levels[k], axis=1) for k in range(K + 1)]

    for r, i in enumerate(comps):
        vroot = np.ascontiguousarray(V[i - 1, S0])
        vals = np.ones(1)
        layers: dict[tuple[int, int], dict[IndexMultiset, TimeJet]] = {}
        for k in range(1, K + 1):
            vals = _kernels.level_step(
                vals, counts_levels[k - 1], trans_levels[k - 1], Vss, vroot)
            with np.errstate(over="ignore", invalid="ignore"):
                coeffs[r, k] = x0[i - 1] * float(vals @ pows[k])
            if keep_tensors:
                layer = {}
                for row, v in enumerate(vals):
                    if v != 0.0:
                        key = _mset_from_counts(i, counts_levels[k][row], cols)
                        layer[key] = TimeJet.constant(v, center=frame.center)
                layers[(k + 1, k + 1)] = layer
        if keep_tensors:
            tensors[i] = CoefficientTensor(i, layers)

    return _finish(frame, x0, t0, K, comps, coeffs,
                   tensors if keep_tensors else None)


# --------------------------------------------------------------------------
# general engine (jet-valued sparse layers)
# --------------------------------------------------------------------------

def _a_step(layer: dict, root0: int, S0: list[int],
            entries) -> dict:
    """Append step: multiply each multiset by the aggregated frame column
    combination and accumulate into the enlarged multiset."""
    out: dict[tuple[int, ...], TimeJet] = {}
    for counts, jet in layer.items():
        for jpos, jcol in enumerate(S0):
            mult = None
            for l, c in enumerate(counts):
                if c:
                    e = entries[S0[l]][jcol]
                    if not e.is_zero():
                        term = e.scale(float(c))
                        mult = term if mult is None else mult + term
            root_entry = entries[root0][jcol]
            if not root_entry.is_zero():
                mult = root_entry if mult is None else mult + root_entry
            if mult is None or mult.is_zero():
                continue
            new = counts[:jpos] + (counts[jpos] + 1,) + counts[jpos + 1:]
            prod = jet * mult
            if new in out:
                out[new] = out[new] + prod
            else:
                out[new] = prod
    return {m: j for m, j in out.items() if not j.is_zero()}


def _d_step(layer: dict) -> dict:
    out = {}
    for counts, jet in layer.items():
        d = jet.derivative()
        if not d.is_zero():
            out[counts] = d
    return out


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for m, jet in b.items():
        out[m] = out[m] + jet if m in out else jet
    return {m: j for m, j in out.items() if not j.is_zero()}


def taylor_general(frame: QuadraticFrame, x0, t0: float, K: int,
                   components: Iterable[int] | None = None,
                   keep_tensors: bool = False) -> SeriesSolution:
    """Series coefficients for an arbitrary (time-jet) frame.

    Layer jets stay polynomials in t - center until assembly, where they are
    evaluated at t0; the same layers therefore serve any expansion center.
    Truncated frame jets must carry at least K trustworthy orders, else
    :class:`OrderBudget` is raised.
    """
    x0, comps = _check_inputs(frame, x0, K, components)
    if frame.min_valid_order() < K:
        raise OrderBudget(
            f"frame jets supply {frame.min_valid_order():.0f} derivative "
            f"orders but order {K} was requested")
    cols, _ = support(frame)
    sigma = len(cols)
    S0 = [j - 1 for j in cols]
    entries = frame.entries
    coeffs = np.zeros((len(comps), K + 1))
    coeffs[:, 0] = x0[[i - 1 for i in comps]]
    x_S = x0[S0]
    tensors: dict[int, CoefficientTensor] = {}

    for r, i in enumerate(comps):
        root0 = i - 1
        layers: dict[tuple[int, int], dict] = {}
        init = {}
        for jpos, jcol in enumerate(S0):
            e = entries[root0][jcol]
            if not e.is_zero():
                counts = tuple(1 if l == jpos else 0 for l in range(sigma))
                init[counts] = e
        layers[(2, 2)] = init
        for k in range(2, K + 1):
            layers[(k + 1, k + 1)] = _a_step(layers[(k, k)], root0, S0, entries)
            for s in range(3, k + 1):
                layers[(k + 1, s)] = _merge(
                    _a_step(layers[(k, s - 1)], root0, S0, entries),
                    _d_step(layers[(k, s)]))
            layers[(k + 1, 2)] = _d_step(layers[(k, 2)])
        for k in range(1, K + 1):
            acc = 0.0
            for s in range(2, k + 2):
                for counts, jet in layers.get((k + 1, s), {}).items():
                    acc += jet(t0) * float(np.prod(x_S ** np.array(counts)))
            coeffs[r, k] = x0[root0] * acc
        if keep_tensors:
            tensors[i] = CoefficientTensor(i, {
                ks: {_mset_from_counts(i, counts, cols): jet
                     for counts, jet in layer.items()}
                for ks, layer in layers.items() if layer})

    return _finish(frame, x0, t0, K, comps, coeffs,
                   tensors if keep_tensors else None)


def _finish(frame, x0, t0, K, comps, coeffs, tensors) -> SeriesSolution:
    return SeriesSolution(
        t0=float(t0), x0=x0, order=K, components=comps, coeffs=coeffs,
        radius_bound=convergence_bound(frame, x0, t0),
        frame_ref=frame.ref(), tensors=tensors)


def taylor(frame: QuadraticFrame, x0, t0: float, K: int,
           components: Iterable[int] | None = None,
           keep_tensors: bool = False) -> SeriesSolution:
    """Dispatch to the stationary engine when the frame allows it."""
    if frame.is_stationary:
        return taylor_stationary(frame, x0, K, components, t0=t0,
                                 keep_tensors=keep_tensors)
    return taylor_general(frame, x0, t0, K, components,
                          keep_tensors=keep_tensors)


# --------------------------------------------------------------------------
# bounds
# --------------------------------------------------------------------------

def convergence_bound(frame: QuadraticFrame, x0, t0: float = 0.0) -> float:
    """Guaranteed lower bound 1 / (sigma * v_M * x_M) on the convergence
    radius; +inf when the frame support is empty or all entries vanish at t0."""
    x0 = np.asarray(x0, dtype=float)
    cols, _ = support(frame)
    sigma = len(cols)
    if sigma == 0:
        return float("inf")
    v_M = max(abs(frame.jet(i, j)(t0))
              for i in range(1, frame.dim + 1)
              for j in range(1, frame.dim + 1))
    if v_M == 0.0:
        return float("inf")
    x_M = float(np.max(np.abs(x0)))
    return 1.0 / (sigma * v_M * x_M)


def bound_envelope(frame: QuadraticFrame, x0, t0: float, t: float) -> float:
    """Upper envelope x_M / (1 - sigma*v_M*x_M*|t - t0|), valid for
    |t - t0| below the radius bound."""
    x0 = np.asarray(x0, dtype=float)
    rbar = convergence_bound(frame, x0, t0)
    dt = abs(float(t) - float(t0))
    if dt >= rbar:
        raise OutOfRadius(f"|t - t0| = {dt} is not below the bound {rbar}")
    x_M = float(np.max(np.abs(x0)))
    if rbar == float("inf"):
        return x_M
    return x_M / (1.0 - dt / rbar)


# --------------------------------------------------------------------------
# evaluation and continuation
# --------------------------------------------------------------------------

def evaluate(series: SeriesSolution, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Horner evaluation of sum c_k (t-t0)^k / k! per component.

    Returns (values, truncation estimate), the estimate being the magnitude
    of the last kept term.  Warns outside the radius bound.
    """
    u = float(t) - series.t0
    if abs(u) >= series.radius_bound:
        warnings.warn(
            f"evaluating at |t - t0| = {abs(u)} outside the guaranteed "
            f"radius {series.radius_bound}", RadiusWarning, stacklevel=2)
    a = series.normalized()
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.zeros(a.shape[0])
        for k in range(series.order, -1, -1):
            vals = vals * u + a[:, k]
        err = np.abs(a[:, series.order] * u ** series.order)
    return vals, err


def continue_to(frame: QuadraticFrame, x0, t0: float, t_target: float,
                K: int = 30, theta: float = 0.5, max_steps: int = 200,
                tail_tol: float = 1e-9) -> tuple[np.ndarray, list[tuple[float, np.ndarray]]]:
    """Analytic continuation by repeated re-expansion.

    Each stage expands at the current center and advances by theta times the
    local radius bound, or straight to the target when that is closer.  The
    radius bound is a convergence statement, not a truncation one (and for
    time-dependent frames it is only local to the center), so a step is
    additionally halved until the last-kept-term estimate drops below
    ``tail_tol`` relative to the values.  Fails with :class:`DomainExit`
    when a component reaches zero, :class:`Divergence` on non-finite values
    and :class:`StepLimit` when the budget runs out or the step size
    underflows the time resolution.  Values that grow by 1e9 over the start
    raise :class:`Divergence`: sustained near-envelope growth means the path
    is running into a blow-up, where accumulated rounding also corrupts the
    local radius bound, so stopping beats reporting a finite wrong answer.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    x = np.asarray(x0, dtype=float)
    scale = np.maximum(np.abs(x), 1e-300)
    growth_cap = 1e9 * float(np.max(scale))
    t = float(t0)
    t_target = float(t_target)
    path: list[tuple[float, np.ndarray]] = []
    if t_target == t:
        return x.copy(), path
    for _ in range(max_steps):
        if not np.all(np.isfinite(x)):
            raise Divergence(f"state became non-finite near t = {t}")
        if np.max(np.abs(x)) > growth_cap:
            raise Divergence(
                f"values near t = {t} grew beyond the continuation trust "
                "threshold (approaching a blow-up)")
        if np.any(np.abs(x) <= 1e-12 * scale):
            raise DomainExit(f"a component reached zero near t = {t}")
        series = taylor(frame, x, t, K)
        remaining = t_target - t
        rbar = series.radius_bound
        if rbar == float("inf") or theta * rbar >= abs(remaining):
            step = remaining
        else:
            step = np.sign(remaining) * theta * rbar
        vals = None
        for _ in range(80):
            t_new = t_target if abs(step) >= abs(remaining) else t + step
            if t_new == t:
                raise StepLimit(
                    f"step size underflowed the time resolution near t = {t}")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RadiusWarning)
                vals, err = evaluate(series, t_new)
            bad = (not np.all(np.isfinite(vals))
                   or np.max(err / np.maximum(np.abs(vals), 1e-300)) > tail_tol)
            if not bad:
                break
            step *= 0.5
            vals = None
        if vals is None:
            raise StepLimit(f"could not control truncation error near t = {t}")
        x, t = vals, t_new
        path.append((t, x.copy()))
        if t == t_target:
            if not np.all(np.isfinite(x)):
                raise Divergence("value at target is non-finite")
            return x.copy(), path
    raise StepLimit(f"did not reach {t_target} within {max_steps} recenters")


# --------------------------------------------------------------------------
# observables
# --------------------------------------------------------------------------

def _ps_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = len(a)
    return np.convolve(a, b)[:n]

def _ps_inv(a: np.ndarray) -> np.ndarray:
    if a[0] == 0.0:
        raise ZeroComponent("cannot invert a series with zero constant term")
    n = len(a)
    b = np.zeros(n)
    b[0] = 1.0 / a[0]
    for k in range(1, n):
        b[k] = -np.dot(a[1:k + 1], b[k - 1::-1]) / a[0]
    return b

def _ps_pow(a: np.ndarray, e: int) -> np.ndarray:
    n = len(a)
    if e < 0:
        return _ps_pow(_ps_inv(a), -e)
    out = np.zeros(n)
    out[0] = 1.0
    base = a
    while e:
        if e & 1:
            out = _ps_mul(out, base)
        base = _ps_mul(base, base)
        e >>= 1
    return out


def observable_series(series, q: Mapping[int, float]) -> SeriesSolution:
    """Series of the monomial observable prod_i x_i^{q_i} with integer
    exponents, composed by Cauchy products of the component series.

    ``series`` may be one solution or a sequence of solutions sharing center
    (and truncated to the smallest common order).  Non-integer exponents
    need the fictitious-monomial route through the quadratizer instead.
    """
    sources = [series] if isinstance(series, SeriesSolution) else list(series)
    if not sources:
        raise ValueError("no series given")
    t0 = sources[0].t0
    for s in sources[1:]:
        if s.t0 != t0:
            raise MixedCenters(f"series centers differ: {s.t0} vs {t0}")
    K = min(s.order for s in sources)

    def _row(i: int) -> np.ndarray:
        for s in sources:
            if i in s.components:
                return s.normalized()[s.components.index(i), :K + 1]
        raise ValueError(f"no series supplies component {i}")

    acc = np.zeros(K + 1)
    acc[0] = 1.0
    for i, e in sorted(q.items()):
        if e != int(e):
            raise ValueError(
                f"exponent {e} on component {i} is not an integer; use a "
                "fictitious monomial and re-quadratize")
        e = int(e)
        if e == 0:
            continue
        acc = _ps_mul(acc, _ps_pow(_row(i), e))

    coeffs = np.array(acc)
    fact = 1.0
    for k in range(1, K + 1):
        fact *= k
        coeffs[k] *= fact
    return SeriesSolution(
        t0=t0, x0=np.array([acc[0]]), order=K, components=(1,),
        coeffs=coeffs.reshape(1, -1),
        radius_bound=min(s.radius_bound for s in sources),
        frame_ref=sources[0].frame_ref + "|obs")
