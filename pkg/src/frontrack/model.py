"""2x2 model systems, their Riemann-coordinate charts and wave curves.

A model carries the flux in a Galilean frame chosen so that the midpoint of
the two characteristic speeds at the base state is zero.  States are numpy
arrays of shape ``(2,)``.  Families are numbered 1 and 2.

Two concrete systems ship with closed-form charts:

* ``builtin_p_system``: ``v_t - u_x = 0``, ``u_t + p(v)_x = 0`` with the
  gamma-law pressure ``p(v) = v**-gamma`` (genuinely nonlinear);
* ``builtin_degenerate_system``: the same structure with sound speed
  ``c(v) = 1 - (v - 1)**3``.  Then ``r_i . grad lambda_i = 3 (v-1)^2 / c``
  is non-negative with a double zero at ``v = 1``: monotone, not GNL.

``GenericModel`` accepts a user flux plus commuting eigenvector fields and
builds its chart by RK4 integration; it doubles as a cross-check of the
closed forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateJumpError,
    DomainError,
    PreconditionError,
    RadiusError,
)

HUGONIOT_MAX_ITER = 50
HUGONIOT_STEP_TOL = 1e-12
HUGONIOT_RESIDUAL_TOL = 1e-10
# below this strength the locus and the rarefaction curve differ by O(s^3),
# i.e. below round-off, and Newton on the 1/s-scaled residual is ill-posed
HUGONIOT_TINY = 1e-7


def _other(i: int) -> int:
    return 3 - i


class ModelSystem:
    """Base class.  Subclasses implement the ``_raw_*`` methods and the chart.

    Attributes
    ----------
    base : ndarray
        Reference state ``u_bar``.
    radius : float
        Radius of the admissible closed ball around ``base``.
    s0 : float
        Newton radius for Hugoniot curves (default ``radius / 4``).
    shift : float
        Galilean shift subtracted from the raw characteristic speeds.
    """

    name = "abstract"

    def __init__(self, base, radius: float, s0: float | None = None):
        self.base = np.asarray(base, dtype=float).copy()
        self.radius = float(radius)
        self.s0 = 0.25 * self.radius if s0 is None else float(s0)
        lam = self._raw_speeds(self.base)
        self.shift = 0.5 * (lam[0] + lam[1])
        self.w_base = np.asarray(self.w(self.base), dtype=float)

    # -- to be provided by subclasses -------------------------------------
    def _raw_flux(self, u):
        raise NotImplementedError

    def _raw_jacobian(self, u):
        raise NotImplementedError

    def _raw_speeds(self, u):
        raise NotImplementedError

    def right_vectors(self, u) -> np.ndarray:
        """Matrix whose columns are ``r_1(u), r_2(u)``."""
        raise NotImplementedError

    def left_vectors(self, u) -> np.ndarray:
        """Matrix whose rows are ``l_1(u), l_2(u)`` with ``l_i . r_j = delta_ij``."""
        return np.linalg.inv(self.right_vectors(u))

    def w(self, u) -> np.ndarray:
        raise NotImplementedError

    def u_of_w(self, w) -> np.ndarray:
        raise NotImplementedError

    # -- shifted-frame quantities ------------------------------------------
    def flux(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self._raw_flux(u) - self.shift * u

    def jacobian(self, u) -> np.ndarray:
        return self._raw_jacobian(np.asarray(u, dtype=float)) - self.shift * np.eye(2)

    def eigenvalues(self, u) -> np.ndarray:
        return np.asarray(self._raw_speeds(np.asarray(u, dtype=float))) - self.shift

    def lam(self, i: int, u) -> float:
        return float(self.eigenvalues(u)[i - 1])

    def r(self, i: int, u) -> np.ndarray:
        return self.right_vectors(u)[:, i - 1]

    def l(self, i: int, u) -> np.ndarray:
        return self.left_vectors(u)[i - 1]

    # -- domain --------------------------------------------------------------
    def in_ball(self, u, factor: float = 1.0) -> bool:
        return bool(np.linalg.norm(np.asarray(u) - self.base) <= factor * self.radius * (1 + 1e-12))

    def check_domain(self, u):
        if not self.in_ball(u):
            raise DomainError(f"state {np.asarray(u)} outside ball of radius {self.radius} around {self.base}")
        return u

    def sample_ball(self, n: int, seed: int = 0, factor: float = 1.0) -> np.ndarray:
        """Deterministic uniform samples in the closed ball."""
        rng = np.random.default_rng(seed)
        ang = rng.uniform(0, 2 * np.pi, n)
        rad = factor * self.radius * np.sqrt(rng.uniform(0, 1, n))
        return self.base + np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])

    @cached_property
    def speed_bounds(self) -> tuple[float, float]:
        """Sampled ``(Lambda1_max, Lambda2_min)`` over the ball."""
        pts = np.vstack([self.sample_ball(2000, seed=11), self.base])
        lam = np.array([self.eigenvalues(u) for u in pts])
        return float(lam[:, 0].max()), float(lam[:, 1].min())

    def __repr__(self):
        return f"{type(self).__name__}(base={self.base.tolist()}, radius={self.radius})"


class PSystem(ModelSystem):
    """p-system ``v_t - u_x = 0, u_t + p(v)_x = 0`` with state ``(v, u)``.

    With ``c = sqrt(-p'(v))`` and ``psi' = c``, the Riemann coordinates are
    ``w_1 = (u + psi)/2``, ``w_2 = (u - psi)/2``; ``r_1 = (1/c, 1)``,
    ``r_2 = (-1/c, 1)``, ``l_1 = (c/2, 1/2)``, ``l_2 = (-c/2, 1/2)``.
    """

    def pressure(self, v):
        raise NotImplementedError

    def sound_speed(self, v):
        raise NotImplementedError

    def psi(self, v):
        raise NotImplementedError

    def psi_inv(self, y):
        raise NotImplementedError

    def _raw_flux(self, u):
        return np.array([-u[1], self.pressure(u[0])])

    def _raw_jacobian(self, u):
        c = self.sound_speed(u[0])
        return np.array([[0.0, -1.0], [-c * c, 0.0]])

    def _raw_speeds(self, u):
        c = self.sound_speed(u[0])
        return np.array([-c, c])

    def right_vectors(self, u):
        c = self.sound_speed(u[0])
        return np.array([[1.0 / c, -1.0 / c], [1.0, 1.0]])

    def left_vectors(self, u):
        c = self.sound_speed(u[0])
        return np.array([[0.5 * c, 0.5], [-0.5 * c, 0.5]])

    def w(self, u):
        ps = self.psi(u[0])
        return np.array([0.5 * (u[1] + ps), 0.5 * (u[1] - ps)])

    def u_of_w(self, w):
        w = np.asarray(w, dtype=float)
        return np.array([self.psi_inv(w[0] - w[1]), w[0] + w[1]])

    def hugoniot_closed_form(self, i: int, s: float, u0) -> tuple[np.ndarray, float]:
        """Independent Rankine-Hugoniot solution used as a test oracle.

        Along the ``i``-locus ``u - u0 = -sigma (v - v0)`` with
        ``sigma = -/+ sqrt(-[p]/[v])``; the point with ``w_i`` jump ``s`` is
        found by bracketing in ``v``.
        """
        u0 = np.asarray(u0, dtype=float)
        v0 = u0[0]
        sign = -1.0 if i == 1 else 1.0

        def state(v):
            dv = v - v0
            if dv == 0.0:
                return u0.copy(), sign * self.sound_speed(v0)
            sigma = sign * np.sqrt(-(self.pressure(v) - self.pressure(v0)) / dv)
            return np.array([v, u0[1] - sigma * dv]), sigma

        w0 = self.w(u0)[i - 1]

        def g(v):
            return self.w(state(v)[0])[i - 1] - w0 - s

        if s == 0:
            return state(v0)[0], self.lam(i, u0)
        width = 0.5 * self.radius
        lo, hi = v0 - width, v0 + width
        v = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
        st, sigma = state(v)
        return st, sigma - self.shift


class GammaLawPSystem(PSystem):
    name = "p-system"

    def __init__(self, gamma: float = 2.0, base=(1.0, 0.0), radius: float | None = None, s0=None):
        if gamma <= 1:
            raise DomainError("gamma must exceed 1")
        base = np.asarray(base, dtype=float)
        if base[0] <= 0:
            raise DomainError("specific volume v must be positive at the base state")
        self.gamma = float(gamma)
        if radius is None:
            radius = 0.4 * base[0]
        if radius >= base[0]:
            raise DomainError("radius must keep v positive on the ball")
        self._k = 2.0 * np.sqrt(self.gamma) / (1.0 - self.gamma)
        self._e = 0.5 * (1.0 - self.gamma)
        super().__init__(base, radius, s0)

    def pressure(self, v):
        return v ** (-self.gamma)

    def sound_speed(self, v):
        if v <= 0:
            raise DomainError("vacuum state v <= 0")
        return np.sqrt(self.gamma) * v ** (-0.5 * (self.gamma + 1.0))

    def psi(self, v):
        if v <= 0:
            raise DomainError("vacuum state v <= 0")
        return self._k * v**self._e

    def psi_inv(self, y):
        ratio = y / self._k
        if ratio <= 0:
            raise DomainError("Riemann coordinates outside the chart (v would be non-positive)")
        return ratio ** (1.0 / self._e)

    def energy_entropy(self):
        """Physical energy pair ``eta = u^2/2 + P(v)``, ``q = p(v) u`` with
        ``P' = -p``, expressed in the shifted frame."""
        g = self.gamma
        lam = self.shift

        def eta(u):
            return 0.5 * u[1] ** 2 + u[0] ** (1.0 - g) / (g - 1.0)

        def q(u):
            return self.pressure(u[0]) * u[1] - lam * eta(u)

        def deta(u):
            return np.array([-self.pressure(u[0]), u[1]])

        return EntropyPair(eta, q, deta)


class DegeneratePSystem(PSystem):
    """p-system with ``c(v) = 1 - x^3``, ``x = v - 1``.

    ``psi = x - x^4/4`` and ``p = -(x - x^4/2 + x^7/7)``, so
    ``p'' = 6 c x^2 >= 0`` with a double zero at ``v = 1``.
    """

    name = "degenerate"

    def __init__(self, base=(1.0, 0.0), radius: float = 0.3, s0=None):
        base = np.asarray(base, dtype=float)
        if abs(base[0] - 1.0) + radius >= 1.0:
            raise DomainError("degenerate model requires |v - 1| < 1 on the ball")
        super().__init__(base, radius, s0)

    @staticmethod
    def pressure(v):
        x = v - 1.0
        return -(x - 0.5 * x**4 + x**7 / 7.0)

    @staticmethod
    def sound_speed(v):
        c = 1.0 - (v - 1.0) ** 3
        if c <= 0:
            raise DomainError("sound speed vanishes: outside the hyperbolic region")
        return c

    @staticmethod
    def psi(v):
        x = v - 1.0
        return x - 0.25 * x**4

    def psi_inv(self, y):
        x = float(y)
        for _ in range(60):
            g = x - 0.25 * x**4 - y
            dg = 1.0 - x**3
            if dg <= 0:
                raise DomainError("psi inverse left the hyperbolic region")
            step = g / dg
            x -= step
            if abs(step) < 1e-16 * (1 + abs(x)):
                break
        else:
            raise ConvergenceError("psi inverse did not converge")
        return 1.0 + x


class GenericModel(ModelSystem):
    """User-supplied flux with commuting eigenvector fields.

    Parameters
    ----------
    flux : callable
        Raw flux ``f(u)``.
    eigen : callable
        ``u -> (lambdas, R)`` with ``R`` columns the right eigenvectors.  The
        fields must commute (``[r_1, r_2] = 0``) for the chart to exist.
    jacobian : callable, optional
        Raw Jacobian; central differences are used when omitted.
    step : float, optional
        RK4 step; defaults to ``1e-3 * radius``.
    """

    name = "generic"

    def __init__(self, flux, eigen, base, radius, jacobian=None, step=None, s0=None):
        self._flux = flux
        self._eigen = eigen
        self._jac = jacobian
        self.base = np.asarray(base, dtype=float)
        self.radius = float(radius)
        self.step = 1e-3 * self.radius if step is None else float(step)
        super().__init__(base, radius, s0)

    def _raw_flux(self, u):
        return np.asarray(self._flux(u), dtype=float)

    def _raw_jacobian(self, u):
        if self._jac is not None:
            return np.asarray(self._jac(u), dtype=float)
        h = 1e-6
        cols = [(self._raw_flux(u + h * e) - self._raw_flux(u - h * e)) / (2 * h) for e in np.eye(2)]
        return np.column_stack(cols)

    def _raw_speeds(self, u):
        return np.asarray(self._eigen(u)[0], dtype=float)

    def right_vectors(self, u):
        return np.asarray(self._eigen(u)[1], dtype=float)

    def _flow(self, i, u, a):
        """RK4 flow of ``r_i`` for parameter length ``a``."""
        n = max(1, int(np.ceil(abs(a) / self.step)))
        h = a / n
        y = np.array(u, dtype=float)
        for _ in range(n):
            k1 = self.r(i, y)
            k2 = self.r(i, y + 0.5 * h * k1)
            k3 = self.r(i, y + 0.5 * h * k2)
            k4 = self.r(i, y + h * k3)
            y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        return y

    def u_of_w(self, w):
        w = np.asarray(w, dtype=float)
        return self._flow(1, self._flow(2, self.base, w[1]), w[0])

    def w(self, u):
        u = np.asarray(u, dtype=float)
        w = np.zeros(2)
        for _ in range(50):
            uw = self.u_of_w(w)
            dw = self.left_vectors(uw) @ (u - uw)
            w = w + dw
            if np.max(np.abs(dw)) < 1e-14:
                break
        else:
            raise ConvergenceError("generic chart inversion did not converge")
        return w


def builtin_p_system(gamma: float = 2.0, base=(1.0, 0.0), radius=None, s0=None) -> GammaLawPSystem:
    """Gamma-law p-system around ``base = (v, u)``."""
    return GammaLawPSystem(gamma, base, radius, s0)


def builtin_degenerate_system(base=(1.0, 0.0), radius: float = 0.3, s0=None) -> DegeneratePSystem:
    """Monotone but not genuinely nonlinear p-system (degenerate at ``v = 1``)."""
    return DegeneratePSystem(base, radius, s0)


def model_spec(model: ModelSystem) -> dict:
    """JSON-ready description of a built-in model."""
    spec = {"name": model.name, "base": [float(x) for x in model.base],
            "radius": float(model.radius), "s0": float(model.s0)}
    if isinstance(model, GammaLawPSystem):
        spec["gamma"] = float(model.gamma)
    elif not isinstance(model, DegeneratePSystem):
        raise ConfigError(f"model {model!r} has no serializable description")
    return spec


def model_from_spec(spec: dict) -> ModelSystem:
    """Inverse of :func:`model_spec`."""
    spec = dict(spec)
    name = spec.pop("name", None)
    if name == GammaLawPSystem.name:
        return GammaLawPSystem(spec.get("gamma", 2.0), spec.get("base", (1.0, 0.0)),
                               spec.get("radius"), spec.get("s0"))
    if name == DegeneratePSystem.name:
        return DegeneratePSystem(spec.get("base", (1.0, 0.0)), spec.get("radius", 0.3), spec.get("s0"))
    raise ConfigError(f"unknown model name {name!r}")


@dataclass(frozen=True)
class EntropyPair:
    eta: object
    q: object
    deta: object


# ---------------------------------------------------------------------------
# Wave curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveCurvePoint:
    s: float
    state: np.ndarray
    kind: str
    speed: float | None = None
    transverse: float = 0.0


def rarefaction_curve(model: ModelSystem, i: int, s: float, u0, check: bool = True) -> np.ndarray:
    """``R_i(s; u0)``: shift ``w_i`` by ``s``, keep ``w_{3-i}``."""
    u0 = np.asarray(u0, dtype=float)
    if s == 0:
        return u0.copy()
    w = model.w(u0).copy()
    w[i - 1] += s
    u = model.u_of_w(w)
    if check:
        model.check_domain(u)
    return u


def hugoniot_curve(model: ModelSystem, i: int, s: float, u0, check: bool = True) -> WaveCurvePoint:
    """Point of the ``i``-Hugoniot locus through ``u0`` with ``w_i`` jump ``s``.

    Unknowns are the transverse Riemann offset ``d`` and the speed ``V``;
    the residual ``(f(u) - f(u0) - V (u - u0)) / s`` with
    ``u = u[w0 + s e_i + d e_j]`` is zeroed by damped Newton starting from the
    rarefaction point.
    """
    u0 = np.asarray(u0, dtype=float)
    if check and abs(s) > model.s0 * (1 + 1e-12):
        raise RadiusError(f"|s| = {abs(s)} exceeds Newton radius {model.s0}")
    if s == 0:
        return WaveCurvePoint(0.0, u0.copy(), "hugoniot", model.lam(i, u0), 0.0)
    if abs(s) < HUGONIOT_TINY:
        u = rarefaction_curve(model, i, s, u0, check=False)
        return WaveCurvePoint(float(s), u, "hugoniot", 0.5 * (model.lam(i, u0) + model.lam(i, u)), 0.0)
    j = _other(i)
    w0 = model.w(u0)
    f0 = model.flux(u0)

    def point(d):
        w = w0.copy()
        w[i - 1] += s
        w[j - 1] += d
        return model.u_of_w(w)

    def residual(d, V):
        u = point(d)
        return (model.flux(u) - f0 - V * (u - u0)) / s, u

    d = 0.0
    u_r = point(0.0)
    V = 0.5 * (model.lam(i, u0) + model.lam(i, u_r))
    F, u = residual(d, V)
    for _ in range(HUGONIOT_MAX_ITER):
        J = np.column_stack([(model.jacobian(u) - V * np.eye(2)) @ model.r(j, u) / s, -(u - u0) / s])
        step = np.linalg.solve(J, -F)
        norm0 = np.linalg.norm(F)
        lam_ = 1.0
        for _ in range(30):
            F_new, u_new = residual(d + lam_ * step[0], V + lam_ * step[1])
            if np.linalg.norm(F_new) <= (1 - 1e-4 * lam_) * norm0 or norm0 < 1e-15:
                break
            lam_ *= 0.5
        d += lam_ * step[0]
        V += lam_ * step[1]
        F, u = F_new, u_new
        if lam_ * np.max(np.abs(step)) < HUGONIOT_STEP_TOL:
            break
    else:
        raise ConvergenceError(f"Hugoniot Newton did not converge for s = {s}")
    rh = np.linalg.norm(model.flux(u) - f0 - V * (u - u0))
    if rh > HUGONIOT_RESIDUAL_TOL:
        raise ConvergenceError(f"Hugoniot residual {rh:.3e} above tolerance")
    if check:
        model.check_domain(u)
    return WaveCurvePoint(float(s), u, "hugoniot", float(V), float(d))


def lax_curve(model: ModelSystem, i: int, s: float, u0, check: bool = True) -> np.ndarray:
    """Rarefaction branch for ``s >= 0``, Hugoniot branch for ``s < 0``."""
    if check and abs(s) > model.s0 * (1 + 1e-12):
        raise RadiusError(f"|s| = {abs(s)} exceeds Newton radius {model.s0}")
    if s >= 0:
        return rarefaction_curve(model, i, s, u0, check)
    return hugoniot_curve(model, i, s, u0, check).state


def shock_speed(model: ModelSystem, i: int, u_minus, u_plus) -> float:
    """``l_i(u-) . [f] / l_i(u-) . [u]``, exact Rankine-Hugoniot speed for shocks."""
    um = np.asarray(u_minus, dtype=float)
    up = np.asarray(u_plus, dtype=float)
    du = up - um
    if not np.any(du):
        return model.lam(i, um)
    li = model.l(i, um)
    den = li @ du
    if abs(den) < 1e-14:
        raise DegenerateJumpError(f"l_{i}.[u] = {den:.3e} for distinct states")
    return float(li @ (model.flux(up) - model.flux(um)) / den)


def modified_speed(model: ModelSystem, i: int, u_minus, u_plus, nu: float) -> float:
    """Shock speed plus ``nu (w_i[u+] - w_i[u_bar])``."""
    return shock_speed(model, i, u_minus, u_plus) + nu * (model.w(u_plus)[i - 1] - model.w_base[i - 1])


# ---------------------------------------------------------------------------
# Structural checks
# ---------------------------------------------------------------------------

@dataclass
class CheckReport:
    ok: bool
    values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    violations: list = field(default_factory=list)
    detail: str = ""


def monotonicity_values(model: ModelSystem, points, h: float = 1e-6) -> np.ndarray:
    """Finite-difference ``r_i . grad lambda_i`` for both families at each point."""
    out = np.zeros((len(points), 2))
    for k, u in enumerate(points):
        for i in (1, 2):
            r = model.r(i, u)
            out[k, i - 1] = (model.lam(i, u + h * r) - model.lam(i, u - h * r)) / (2 * h)
    return out


def monotonicity_check(model: ModelSystem, n: int = 1000, seed: int = 0, tol: float = 1e-8) -> CheckReport:
    """Verify ``r_i . grad lambda_i >= -tol`` and strict hyperbolicity on samples."""
    pts = np.vstack([model.sample_ball(n, seed), model.base])
    vals = monotonicity_values(model, pts)
    viol = [(pts[k].tolist(), vals[k].tolist()) for k in range(len(pts)) if vals[k].min() < -tol]
    lam = np.array([model.eigenvalues(u) for u in pts])
    gaps_ok = bool(np.all(lam[:, 0] < lam[:, 1]))
    sep_ok = bool(np.all(lam[:, 0] < 0) and np.all(lam[:, 1] > 0))
    return CheckReport(not viol and gaps_ok and sep_ok, vals, viol,
                       f"strictly hyperbolic={gaps_ok}, separated={sep_ok}")


def liu_condition_check(model: ModelSystem, i: int, u0, s_grid, tol: float = 1e-9) -> CheckReport:
    """Check that ``s -> speed(u0, S_i(s; u0))`` is non-decreasing on the grid."""
    grid = np.sort(np.asarray(s_grid, dtype=float))
    if np.any(grid > 0):
        raise PreconditionError("Liu check expects a non-positive grid")
    speeds = np.array([hugoniot_curve(model, i, s, u0).speed for s in grid])
    drops = np.diff(speeds)
    viol = [(grid[k], grid[k + 1], drops[k]) for k in range(len(drops)) if drops[k] < -tol]
    return CheckReport(not viol, speeds, viol)


def convex_lemma_check(h, s: float, dh=None, tol: float = 1e-8) -> CheckReport:
    """Quadrature check of ``|int_0^s t |h'(t) - q| dt| <= s^2/2 |h'(s) - q|``
    with ``q = (h(s) - h(0))/s``.

    ``h`` is a callable (with derivative ``dh``) or a ``(t, values)`` table
    on ``[-1, 1]``, which is interpolated by a cubic spline.
    """
    if isinstance(h, tuple):
        spline = CubicSpline(np.asarray(h[0], float), np.asarray(h[1], float))
        h, dh = spline, spline.derivative()
    elif dh is None:
        def dh(t, _h=h):
            e = 1e-6
            return (_h(t + e) - _h(t - e)) / (2 * e)
    grid = np.linspace(-1, 1, 401)
    hv = np.array([h(t) for t in grid])
    second = hv[2:] - 2 * hv[1:-1] + hv[:-2]
    if np.any(second < -1e-9 * (1 + np.abs(hv[1:-1]))):
        raise PreconditionError("sampled function is not convex on [-1, 1]")
    if s == 0:
        return CheckReport(True, np.array([0.0, 0.0]))
    q = (h(s) - h(0.0)) / s
    pts = []
    g = lambda t: dh(t) - q  # noqa: E731
    lo, hi = min(0.0, s), max(0.0, s)
    try:
        if g(lo) * g(hi) < 0:
            pts.append(optimize.brentq(g, lo, hi, xtol=1e-14))
    except ValueError:
        pass
    val, _ = integrate.quad(lambda t: t * abs(dh(t) - q), 0.0, s, points=pts or None,
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    lhs = abs(val)
    rhs = 0.5 * s * s * abs(dh(s) - q)
    return CheckReport(lhs <= rhs + tol, np.array([lhs, rhs]))
