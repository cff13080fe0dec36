"""A 3x3 linearly degenerate system whose p-variation blows up.

The flux is

    f_2(u, v, w) = (w + 2 u v, 0, u (1 - 4 v^2) - 2 v w)

with constant characteristic speeds -1, 0, 1.  Across a 2-wave (speed 0)
the quantities ``A = w + 2 u v`` and ``F = u (1 - 4 v^2) - 2 v w`` are
continuous, and for frozen ``v`` the map ``(u, w) -> (A, F)`` is linear.
Riemann problems therefore reduce to a jump in ``v`` followed by a 2x2
linear solve, which is what :func:`riemann_ld` does.

Wave strengths follow the convention of the periodic pattern: the jump of
``u`` across 1- and 3-waves, the jump of ``v`` across 2-waves.

The periodic pattern has four cells per period holding the states labelled
1, 2, 5, 6.  Interfaces between cells 1|2 and 5|6 carry single 2-waves of
strength ``beta``; the interfaces 2|5 and 6|1 carry full Riemann problems
with strengths ``(alpha, -beta, -alpha)`` and ``(-alpha, -beta, alpha)``.
Every ``2 dx`` of time the pattern recurs, shifted by two cells, with
``alpha`` multiplied by ``(1 + beta) / (1 - beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, InvalidInputError, StructureError
from .pvar import max_p_sum_power

SPEEDS = (-1.0, 0.0, 1.0)
STRUCTURE_TOL = 1e-7
DEFAULT_BOX = (1.0, 0.3, 1.0)


def flux_f2(s) -> np.ndarray:
    u, v, w = np.asarray(s, dtype=float)
    return np.array([w + 2 * u * v, 0.0, u * (1 - 4 * v * v) - 2 * v * w])


def jacobian_f2(s) -> np.ndarray:
    u, v, w = np.asarray(s, dtype=float)
    return np.array([[2 * v, 2 * u, 1.0],
                     [0.0, 0.0, 0.0],
                     [1 - 4 * v * v, -8 * u * v - 2 * w, -2 * v]])


def right_vectors_f2(s) -> np.ndarray:
    """Columns ``r_1, r_2, r_3`` for the speeds -1, 0, 1.

    ``r_2`` keeps ``A`` and ``F`` fixed while ``v`` moves.
    """
    u, v, w = np.asarray(s, dtype=float)
    r1 = np.array([1.0, 0.0, -(1 + 2 * v)])
    r3 = np.array([1.0, 0.0, 1 - 2 * v])
    # d/dv of (u, w) at fixed (A, F), from u = F + 2vA, w = A - 2vF - 4v^2 A
    A, F = _invariants(u, v, w)
    r2 = np.array([2 * A, 1.0, -2 * F - 8 * v * A])
    return np.column_stack([r1, r2, r3])


def _invariants(u, v, w):
    return w + 2 * u * v, u * (1 - 4 * v * v) - 2 * v * w


def _from_invariants(A, v, F):
    return np.array([F + 2 * v * A, v, A - 2 * v * F - 4 * v * v * A])


def in_box(s, box=DEFAULT_BOX) -> bool:
    s = np.asarray(s, dtype=float)
    return bool(np.all(np.abs(s) <= np.asarray(box) * (1 + 1e-12)))


@dataclass(frozen=True)
class EigenReport:
    ok: bool
    max_eig_error: float
    max_degeneracy: float
    n_samples: int


def ld_eigencheck(n: int = 200, box=DEFAULT_BOX, seed: int = 0, h: float = 1e-6) -> EigenReport:
    """Spectrum ``{-1, 0, 1}`` and linear degeneracy on random box samples."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (n, 3)) * np.asarray(box)
    pts[0] = 0.0
    eig_err = 0.0
    degen = 0.0
    for s in pts:
        J = jacobian_f2(s)
        lam = np.sort(np.linalg.eigvals(J).real)
        eig_err = max(eig_err, float(np.max(np.abs(lam - np.array(SPEEDS)))))
        R = right_vectors_f2(s)
        for i in range(3):
            # directional derivative of the i-th eigenvalue along r_i
            lp = np.sort(np.linalg.eigvals(jacobian_f2(s + h * R[:, i])).real)[i]
            lm = np.sort(np.linalg.eigvals(jacobian_f2(s - h * R[:, i])).real)[i]
            degen = max(degen, abs(lp - lm) / (2 * h))
    return EigenReport(eig_err <= 1e-9 and degen <= 1e-6, eig_err, degen, n)


@dataclass(frozen=True)
class LDRiemann:
    strengths: np.ndarray
    states: np.ndarray  # u_l, after 1-wave, after 2-wave, u_r


def riemann_ld(u_l, u_r, box=None) -> LDRiemann:
    """Exact Riemann solution as 1-, 2- and 3-contacts.

    The 1-wave moves ``(A, F)`` along ``(-1, 1 + 2 v_l)``, the 2-wave keeps
    ``(A, F)`` and moves ``v`` to ``v_r``, the 3-wave moves ``(A, F)`` along
    ``(1, 1 - 2 v_r)``.
    """
    ul = np.asarray(u_l, dtype=float)
    ur = np.asarray(u_r, dtype=float)
    if box is not None:
        for s in (ul, ur):
            if not in_box(s, box):
                raise DomainError(f"state {s} outside the validity box {box}")
    vl, vr = ul[1], ur[1]
    Al, Fl = _invariants(*ul)
    Ar, Fr = _invariants(*ur)
    M = np.array([[-1.0, 1.0], [1 + 2 * vl, 1 - 2 * vr]])
    det = np.linalg.det(M)
    if abs(det) < 1e-12:
        raise ConvergenceError(f"singular wave system for v_l = {vl}, v_r = {vr}")
    a, c = np.linalg.solve(M, np.array([Ar - Al, Fr - Fl]))
    s1 = _from_invariants(Al - a, vl, Fl + a * (1 + 2 * vl))
    s2 = _from_invariants(Al - a, vr, Fl + a * (1 + 2 * vl))
    strengths = np.array([s1[0] - ul[0], vr - vl, ur[0] - s2[0]])
    return LDRiemann(strengths, np.array([ul, s1, s2, ur]))


def compose_ld(u_l, strengths) -> np.ndarray:
    """States after applying 1-, 2- and 3-waves of the given strengths."""
    s = np.asarray(u_l, dtype=float).copy()
    a, b, c = strengths
    out = [s.copy()]
    s = s + a * np.array([1.0, 0.0, -(1 + 2 * s[1])])
    out.append(s.copy())
    A, F = _invariants(*s)
    s = _from_invariants(A, s[1] + b, F)
    out.append(s.copy())
    s = s + c * np.array([1.0, 0.0, 1 - 2 * s[1]])
    out.append(s)
    return np.array(out)


@dataclass(frozen=True)
class YoungPattern:
    """One period of the initial data: cell states ``1, 2, 5, 6`` and the
    interior Riemann states ``3, 4`` and ``7, 0``."""

    dx: float
    base: np.ndarray
    alpha: float
    beta: float
    states: dict = field(default_factory=dict)

    @classmethod
    def build(cls, base=(0.0, 0.0, 0.0), alpha: float = 0.1, beta: float = 0.1, dx: float = 1.0):
        if dx <= 0:
            raise InvalidInputError("dx must be positive")
        s1 = np.asarray(base, dtype=float)
        s2 = compose_ld(s1, (0.0, beta, 0.0))[-1]
        _, s3, s4, s5 = compose_ld(s2, (alpha, -beta, -alpha))
        s6 = compose_ld(s5, (0.0, beta, 0.0))[-1]
        closing = riemann_ld(s6, s1)
        _, s7, s0, _ = closing.states
        states = {1: s1, 2: s2, 3: s3, 4: s4, 5: s5, 6: s6, 7: s7, 0: s0}
        return cls(dx, s1, alpha, beta, states)

    def cells(self) -> np.ndarray:
        return np.array([self.states[k] for k in (1, 2, 5, 6)])

    def closing_strengths(self) -> np.ndarray:
        return riemann_ld(self.states[6], self.states[1]).strengths


def _step(cells: np.ndarray, periodic: bool) -> np.ndarray:
    """Advance cell averages by one ``dx`` of time.

    At every interface the 1-wave reaches the left neighbour interface and
    the 3-wave the right one, so new cell ``k`` is the middle state of the
    Riemann problem between the state right of the 2-wave at interface
    ``k`` and the state left of the 2-wave at interface ``k + 1``.
    """
    n = len(cells)
    if periodic:
        ext = np.vstack([cells[-1:], cells, cells[:1]])
    else:
        ext = np.vstack([cells[:1], cells, cells[-1:]])
    # interface j sits between ext[j] and ext[j + 1], j = 0..n
    after_two = []
    after_one = []
    for j in range(n + 1):
        sol = riemann_ld(ext[j], ext[j + 1])
        after_one.append(sol.states[1])
        after_two.append(sol.states[2])
    new = np.empty_like(cells)
    for k in range(n):
        # cell k lies between interfaces k and k + 1
        new[k] = riemann_ld(after_two[k], after_one[k + 1]).states[1]
    return new


def interface_strengths(cells: np.ndarray, periodic: bool = True) -> np.ndarray:
    """Strength triples at each interface; in periodic mode interface ``k``
    separates cells ``k - 1`` and ``k``."""
    if periodic:
        pairs = [(cells[k - 1], cells[k]) for k in range(len(cells))]
    else:
        pairs = [(cells[k], cells[k + 1]) for k in range(len(cells) - 1)]
    return np.array([riemann_ld(a, b).strengths for a, b in pairs])


def _read_pattern(cells: np.ndarray, anchor: int, scale: float) -> tuple[float, float]:
    """Extract ``(alpha, beta)`` and check the eight-state structure."""
    st = interface_strengths(cells)
    a = st[anchor][0]
    b = st[(anchor - 1) % 4][1]
    expected = np.zeros((4, 3))
    expected[anchor] = (a, -b, -a)
    expected[(anchor + 2) % 4] = (-a, -b, a)
    expected[(anchor - 1) % 4] = (0.0, b, 0.0)
    expected[(anchor + 1) % 4] = (0.0, b, 0.0)
    dev = float(np.max(np.abs(st - expected)))
    if dev > STRUCTURE_TOL * max(1.0, scale):
        raise StructureError(f"pattern broke down: deviation {dev:.3e} from the eight-state structure")
    return float(a), float(b)


def evolve_period(pattern: YoungPattern, k: int) -> np.ndarray:
    """``(alpha_j, beta_j)`` for ``j = 0..k`` on a periodic ring of four cells.

    The period recurs every ``2 dx`` of time shifted by two cells, so the
    anchor interface carrying ``+alpha`` alternates between 2 and 0.
    """
    if k < 0:
        raise InvalidInputError("k must be non-negative")
    cells = pattern.cells()
    scale = max(abs(pattern.alpha), abs(pattern.beta))
    out = [_read_pattern(cells, 2, scale)]
    for j in range(1, k + 1):
        cells = _step(_step(cells, True), True)
        scale = max(scale, abs(out[-1][0]))
        out.append(_read_pattern(cells, 2 if j % 2 == 0 else 0, scale))
    return np.array(out)


def period_table(pattern: YoungPattern, k: int, p: float = 1.25) -> list:
    """Rows ``(j, alpha_j, beta_j, vp_j)`` with ``vp_j`` the p-variation of one
    period of the ring at ``t = 2 j dx``."""
    ab = evolve_period(pattern, k)
    cells = pattern.cells()
    rows = []
    for j in range(k + 1):
        if j:
            cells = _step(_step(cells, True), True)
        rows.append((j, float(ab[j, 0]), float(ab[j, 1]), family_vp(cells, p, periodic=True)))
    return rows


def growth_factor(beta: float) -> float:
    return (1 + beta) / (1 - beta)


def family_vp(cells: np.ndarray, p: float, periodic: bool = False) -> float:
    """``(sum over families of s_p^p(strengths, left to right))^(1/p)``."""
    st = interface_strengths(cells, periodic)
    if st.size == 0:
        return 0.0
    return sum(max_p_sum_power(st[:, f], p) for f in range(3)) ** (1.0 / p)


@dataclass(frozen=True)
class GrowthReport:
    epsilon: float
    n: int
    p: float
    alpha: float
    vp_initial: float
    vp_final: float
    vp_final_unit: float
    lower_bound: float
    initial_constant: float

    @property
    def ratio(self) -> float:
        return self.vp_final / self.vp_initial if self.vp_initial > 0 else math.inf

    @property
    def exceeds_bound(self) -> bool:
        return self.vp_final_unit >= self.lower_bound


def vp_growth_report(epsilon: float = 0.1, n: int = 16, p: float = 1.25, base=(0.0, 0.0, 0.0)) -> GrowthReport:
    """Evolve the data truncated to ``[-2, 3]`` up to ``t = 2`` and compare
    the p-variation on ``[0, 1]`` with ``eps exp(2 eps n^(1 - 1/p))``.

    The computational strip is ``[-4, 5]``: with unit speeds nothing from
    outside reaches it before ``t = 2`` and the far field stays constant.
    """
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    if p < 1:
        raise InvalidInputError("p must be at least 1")
    dx = 1.0 / n
    alpha = beta = epsilon * n ** (-1.0 / p)
    pat = YoungPattern.build(base, alpha, beta, dx)
    period = pat.cells()
    xs = -4.0 + dx * np.arange(9 * n)  # left ends of the cells
    idx = np.rint(xs / dx).astype(int)
    inside = (xs >= -2.0 - 1e-12) & (xs < 3.0 - 1e-12)
    cells = np.where(inside[:, None], period[idx % 4], np.asarray(base, dtype=float))
    vp0 = family_vp(cells, p)
    for _ in range(2 * n):
        cells = _step(cells, periodic=False)
    vp_final = family_vp(cells, p)
    unit = (xs >= -1e-12) & (xs <= 1.0 + 1e-12)
    vp_unit = family_vp(cells[unit], p)
    bound = epsilon * math.exp(2 * epsilon * n ** (1 - 1.0 / p))
    return GrowthReport(epsilon, n, p, alpha, vp0, vp_final, vp_unit, bound, vp0 / epsilon)
