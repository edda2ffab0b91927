"""Exact quadratization of generalized-polynomial ODEs.

The change of variables Z_{i,l} = x_i^{-1} X_{i,l} maps a system with
monomial right-hand sides onto a homogeneous quadratic one:

    dZ_{i,l}/dt = sum_j pi_{i,j}^l (v_j' Z_j) Z_{i,l},     pi = p - delta,
    dx_i/dt     = (v_i' Z_i) x_i,

where the first block (the "driver") is autonomous and the second (the
"final stage") recovers x.  Appending a fictitious 0 * x_i^2 monomial to
every equation that lacks one makes the original states driver coordinates
themselves ("inclusive" form), so the final stage becomes redundant and the
whole system is described by one square coefficient matrix of time jets,
the :class:`QuadraticFrame`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EmptySystem
from .jets import TimeJet, as_jet
from .sigmapi import Monomial, SigmaPiOde


class QuadraticFrame:
    """Square matrix V of time jets defining dx_i/dt = (v_i' x) x_i."""

    __slots__ = ("dim", "entries", "center")

    def __init__(self, entries: Sequence[Sequence]):
        rows = []
        center = None
        for row in entries:
            jets = []
            for e in row:
                jet = as_jet(e)
                if center is None:
                    center = jet.center
                elif jet.center != center and not jet.is_constant():
                    raise ValueError("frame entries must share one center")
                jets.append(jet)
            rows.append(tuple(jets))
        dim = len(rows)
        if any(len(r) != dim for r in rows):
            raise ValueError("frame must be square")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "entries", tuple(rows))
        object.__setattr__(self, "center", 0.0 if center is None else center)

    def __setattr__(self, name, value):
        raise AttributeError("QuadraticFrame is immutable")

    def jet(self, i: int, j: int) -> TimeJet:
        """Entry v_{i,j} (1-based)."""
        return self.entries[i - 1][j - 1]

    @property
    def is_stationary(self) -> bool:
        return all(e.is_constant() for row in self.entries for e in row)

    def constant_matrix(self) -> np.ndarray:
        if not self.is_stationary:
            raise ValueError("frame is not stationary")
        return np.array([[e.coeffs[0] for e in row] for row in self.entries])

    def evaluate(self, t: float) -> np.ndarray:
        return np.array([[e(t) for e in row] for row in self.entries])

    def rhs(self, t: float, x: Sequence[float]) -> np.ndarray:
        xv = np.asarray(x, dtype=float)
        return (self.evaluate(t) @ xv) * xv

    def min_valid_order(self) -> float:
        """Smallest derivative budget over entries (inf when all exact)."""
        budget = float("inf")
        for row in self.entries:
            for e in row:
                if not e.exact:
                    budget = min(budget, e.valid_order)
        return budget

    def ref(self) -> str:
        """Stable short identifier derived from the frame contents."""
        text = ";".join(",".join(repr(e) for e in row) for row in self.entries)
        return hashlib.sha1(text.encode()).hexdigest()[:12]

    def __eq__(self, other):
        if not isinstance(other, QuadraticFrame):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"QuadraticFrame(dim={self.dim}, ref={self.ref()})"


@dataclass(frozen=True)
class Quadratization:
    """Result of quadratizing a system.

    ``source`` is the system the construction actually ran on (for the
    inclusive form this includes the appended fictitious monomials).  The
    driver coordinates are indexed both by the pair (i, l) and by the flat
    position s = alpha_i + l; ``phi`` lists the coordinate monomials in flat
    order.  ``identity`` maps each original index i to the flat coordinate
    equal to x_i when the quadratization is inclusive.  For ``inverse=True``
    the coordinates are the reciprocals W = Z^{-1} and the driver rows carry
    the negated exponent tensor.
    """

    source: SigmaPiOde
    pi: tuple[tuple[dict[int, float], ...], ...]   # pi[i-1][l-1] = {j: pi value}
    phi: tuple[Monomial, ...]                      # flat order
    pairs: tuple[tuple[int, int], ...]             # flat s -> (i, l), 1-based
    driver_dim: int
    inclusive: bool = False
    inverse: bool = False
    identity: dict[int, int] = field(default_factory=dict)

    @property
    def alpha(self) -> tuple[int, ...]:
        """Offsets alpha_i = nu_1 + ... + nu_{i-1}."""
        offs = [0]
        for i in range(1, self.source.n + 1):
            offs.append(offs[-1] + self.source.nu(i))
        return tuple(offs[:-1])

    def flat_index(self, i: int, l: int) -> int:
        """Flattened coordinate s = alpha_i + l (1-based)."""
        return self.alpha[i - 1] + l

    def pair(self, s: int) -> tuple[int, int]:
        return self.pairs[s - 1]

    @property
    def final_coeffs(self) -> tuple[tuple[TimeJet, ...], ...]:
        """Per-equation coefficient vectors v_i reused by the final stage."""
        return tuple(tuple(jet for jet, _ in eq) for eq in self.source.equations)


def _pi_row(ode: SigmaPiOde, i: int, mono: Monomial) -> dict[int, float]:
    row = {j: v for j, v, _ in mono.items()}
    row[i] = row.get(i, 0.0) - 1.0
    if row[i] == 0.0:
        del row[i]
    return row


def _phi_monomial(i: int, mono: Monomial, negate: bool = False) -> Monomial:
    """x_i^{-1} * mono (or its reciprocal when ``negate``), exactness kept."""
    exps: dict[int, object] = {}
    for j, value, rat in mono.items():
        exps[j] = rat if rat is not None else value
    prev = exps.get(i, Fraction(0))
    if isinstance(prev, float):
        exps[i] = prev - 1.0
    else:
        exps[i] = prev - 1
    if negate:
        exps = {j: -p for j, p in exps.items()}
    return Monomial(exps)


def quadratize_canonical(ode: SigmaPiOde) -> Quadratization:
    """Driver + final-stage quadratization under Z_{i,l} = x_i^{-1} X_{i,l}."""
    if ode.is_zero_system:
        raise EmptySystem("no monomials to quadratize")
    pi_rows = []
    phi = []
    pairs = []
    for i in range(1, ode.n + 1):
        rows_i = []
        for l, (_, mono) in enumerate(ode.terms(i), start=1):
            rows_i.append(_pi_row(ode, i, mono))
            phi.append(_phi_monomial(i, mono))
            pairs.append((i, l))
        pi_rows.append(tuple(rows_i))
    return Quadratization(
        source=ode, pi=tuple(pi_rows), phi=tuple(phi), pairs=tuple(pairs),
        driver_dim=len(pairs))


def _square_monomial(i: int) -> Monomial:
    return Monomial({i: 2})


def quadratize_inclusive(ode: SigmaPiOde) -> Quadratization:
    """Canonical quadratization after appending 0 * x_i^2 where missing.

    Every original state then appears among the driver coordinates; the
    returned ``identity`` map locates those coordinates so callers can read
    x straight off a driver trajectory.
    """
    square = {i: _square_monomial(i) for i in range(1, ode.n + 1)}
    equations = []
    for i in range(1, ode.n + 1):
        terms = list(ode.terms(i))
        if not any(mono == square[i] for _, mono in terms):
            terms.append((TimeJet.zero(), square[i]))
        equations.append(terms)
    augmented = SigmaPiOde(ode.n, equations)
    q = quadratize_canonical(augmented)
    identity = {}
    for i in range(1, augmented.n + 1):
        for l, (_, mono) in enumerate(augmented.terms(i), start=1):
            if mono == square[i]:
                identity[i] = q.flat_index(i, l)
                break
    return Quadratization(
        source=q.source, pi=q.pi, phi=q.phi, pairs=q.pairs,
        driver_dim=q.driver_dim, inclusive=True, identity=identity)


def add_fictitious_monomial(ode: SigmaPiOde, host: int, q: Monomial) -> SigmaPiOde:
    """Append 0 * q to equation ``host``.

    The solutions do not change, but the quadratization gains the coordinate
    x_host^{-1} q, from which the monomial observable q(x) is recoverable as
    that coordinate times x_host.
    """
    if not 1 <= host <= ode.n:
        raise ValueError(f"host index {host} out of range")
    if q.max_index() > ode.n:
        raise ValueError("fictitious monomial references unknown index")
    equations = [list(ode.terms(i)) for i in range(1, ode.n + 1)]
    equations[host - 1].append((TimeJet.zero(), q))
    return SigmaPiOde(ode.n, equations)


def inverse_driver(ode: SigmaPiOde) -> Quadratization:
    """Quadratization record for the reciprocal coordinates W = Z^{-1}.

    The W dynamics negate the exponent tensor but keep the multipliers
    v_j' Z_j in the original Z coordinates: dW_{i,l}/dt =
    -(sum_j pi_{i,j}^l v_j' Z_j) W_{i,l}.  Consumers see ``inverse=True``
    and know the state is W while Z = W^{-1}.
    """
    q = quadratize_canonical(ode)
    phi_w = tuple(
        _phi_monomial(i, ode.terms(i)[l - 1][1], negate=True)
        for (i, l) in q.pairs)
    return Quadratization(
        source=q.source, pi=q.pi, phi=phi_w, pairs=q.pairs,
        driver_dim=q.driver_dim, inverse=True)


def driver_frame(q: Quadratization) -> QuadraticFrame:
    """Flatten the driver block into a frame.

    Entry ((i,l),(j,s)) is pi_{i,j}^l * v_{j,s}; for an inverse record the
    rows are negated (and multiply the reciprocal state, see
    :func:`inverse_joint_frame` for a simulatable system).
    """
    d = q.driver_dim
    sign = -1.0 if q.inverse else 1.0
    rows = []
    for (i, l) in q.pairs:
        pi_row = q.pi[i - 1][l - 1]
        row = []
        for (j, s) in q.pairs:
            p = pi_row.get(j, 0.0)
            if p == 0.0:
                row.append(TimeJet.zero())
            else:
                jet, _ = q.source.terms(j)[s - 1]
                row.append(jet.scale(sign * p))
        rows.append(row)
    return QuadraticFrame(rows)


def inverse_joint_frame(q: Quadratization) -> QuadraticFrame:
    """Frame of the joint (Z, W) system, dimension 2d.

    Rows 1..d are the driver; rows d+1..2d drive W with the negated rows,
    reading their multipliers off the Z block.  Along trajectories started
    at W = Z^{-1} the products Z_{s} W_{s} stay equal to 1.
    """
    base = driver_frame(
        q if not q.inverse else Quadratization(
            source=q.source, pi=q.pi, phi=q.phi, pairs=q.pairs,
            driver_dim=q.driver_dim))
    d = base.dim
    zero = TimeJet.zero()
    rows = []
    for i in range(d):
        rows.append(list(base.entries[i]) + [zero] * d)
    for i in range(d):
        rows.append([e.scale(-1.0) for e in base.entries[i]] + [zero] * d)
    return QuadraticFrame(rows)


def phi_eval(q: Quadratization, x: Sequence[float]) -> np.ndarray:
    """Evaluate the coordinate map at x, in flat order.

    Raises :class:`DomainViolation` where a generalized power is undefined
    (zero base with negative exponent, negative base with an exponent that
    is not an integer or odd-denominator rational).
    """
    if len(x) != q.source.n:
        raise ValueError(f"expected {q.source.n} components, got {len(x)}")
    return np.array([mono.evaluate(x) for mono in q.phi])


def driver_type_ode(frame: QuadraticFrame) -> SigmaPiOde:
    """The quadratic system of a frame written back as monomial equations.

    Equation i carries the n monomials x_i * x_l with coefficients v_{i,l};
    feeding the result to :func:`quadratize_canonical` yields
    pi_{i,j}^l = delta_{l,j}, the self-driver fixed point.
    """
    n = frame.dim
    equations = []
    for i in range(1, n + 1):
        terms = []
        for l in range(1, n + 1):
            exps = {i: 1, l: 1} if l != i else {i: 2}
            terms.append((frame.jet(i, l), Monomial(exps)))
        equations.append(terms)
    return SigmaPiOde(n, equations)
