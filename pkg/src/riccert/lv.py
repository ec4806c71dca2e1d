"""Generalized Lotka-Volterra systems with a single discrete delay.

Model:  dx_i/dt = g_i(x_i(t)) * (c_i + sum_j a_ij f_j(x_j(t))
                                      + sum_j b_ij f_j(x_j(t - tau)))

on the open positive orthant.  A diagonal Riccati certificate (p, q) for
(A, B) yields the functional

    V(t) = sum_i p_i * int_{xbar_i}^{x_i(t)} (f_i(z) - f_i(xbar_i)) / g_i(z) dz
         + sum_j mu_j * int_{t-tau}^{t} (f_j(x_j(s)) - f_j(xbar_j))^2 ds

with mu = q / 2, which decays at rate beta along trajectories no matter the
delay.  This module simulates trajectories (explicit RK4 by the method of
steps with cubic Hermite lookups of the stored past), evaluates the
functional, and verifies the decay inequality on a computed trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .certificates import RiccatiCertificate, verify_certificate
from .errors import (
    DimensionError,
    InversionError,
    NotNegativeDefinite,
    PreconditionError,
    StepCollapse,
)
from .matrices import as_square, as_vector, is_metzler, is_nonnegative

__all__ = [
    "InteractionFunction",
    "DelayLVModel",
    "Trajectory",
    "LKWeights",
    "DecayReport",
    "BoundednessReport",
    "mutualistic_equilibrium",
    "integrate",
    "lk_value",
    "verify_decay",
    "boundedness_experiment",
]

_KINDS = ("identity", "power", "saturating", "tabulated")


@dataclass
class InteractionFunction:
    """A strictly increasing response function on [0, inf) with f(0) = 0.

    Kinds: ``identity``; ``power`` (x**alpha, alpha > 0); ``saturating``
    (x / (1 + x)); ``tabulated`` (piecewise linear through given nodes,
    extended beyond the last node with its final slope).  ``attested`` records
    that the caller vouches for the divergence conditions the built-in kinds
    satisfy analytically; tabulated functions default to unattested.
    """

    kind: str
    alpha: float = 1.0
    xs: tuple = ()
    ys: tuple = ()
    attested: bool = True

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown function kind {self.kind!r}")
        if self.kind == "power":
            if not (math.isfinite(self.alpha) and self.alpha > 0.0):
                raise ValueError("power kind requires alpha > 0")
        if self.kind == "tabulated":
            xs = np.asarray(self.xs, dtype=float)
            ys = np.asarray(self.ys, dtype=float)
            if xs.ndim != 1 or xs.size < 2 or xs.shape != ys.shape:
                raise ValueError("tabulated kind requires matching x/y arrays with >= 2 nodes")
            if not (np.isfinite(xs).all() and np.isfinite(ys).all()):
                raise ValueError("tabulated nodes must be finite")
            if xs[0] != 0.0 or ys[0] != 0.0:
                raise ValueError("tabulated functions must start at (0, 0)")
            if not ((np.diff(xs) > 0.0).all() and (np.diff(ys) > 0.0).all()):
                raise ValueError("tabulated nodes must be strictly increasing")
            self.xs = tuple(float(v) for v in xs)
            self.ys = tuple(float(v) for v in ys)
        self._check_monotone()

    def _check_monotone(self):
        # Strict increase sampled on a log grid; kinds are monotone
        # analytically, this guards tabulated input and parameter mistakes.
        grid = np.concatenate([[0.0], np.logspace(-6.0, 6.0, 25)])
        values = np.array([self(v) for v in grid])
        if values[0] != 0.0 or not (np.diff(values) > 0.0).all():
            raise ValueError(f"{self.kind} function is not strictly increasing from 0")

    def __call__(self, x):
        if self.kind == "identity":
            return x
        if self.kind == "power":
            return x ** self.alpha
        if self.kind == "saturating":
            return x / (1.0 + x)
        xs, ys = self.xs, self.ys
        if np.ndim(x) == 0 and x > xs[-1]:
            slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
            return ys[-1] + slope * (x - xs[-1])
        out = np.interp(x, xs, ys)
        if np.ndim(x) > 0:
            beyond = np.asarray(x) > xs[-1]
            if np.any(beyond):
                slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
                out = np.where(beyond, ys[-1] + slope * (np.asarray(x) - xs[-1]), out)
        return out

    def invert(self, y: float) -> float:
        """Solve f(x) = y for x >= 0 (y >= 0).

        Closed form for identity/power; bisection to 1e-12 relative accuracy
        for saturating/tabulated, expanding the bracket until f exceeds y.
        Raises ``InversionError`` when the target is out of range.
        """
        if not (math.isfinite(y) and y >= 0.0):
            raise InversionError(f"inversion target must be finite and nonnegative, got {y}")
        if y == 0.0:
            return 0.0
        if self.kind == "identity":
            return float(y)
        if self.kind == "power":
            return float(y ** (1.0 / self.alpha))
        hi = 1.0
        for _ in range(200):
            if self(hi) > y:
                break
            hi *= 2.0
        else:
            raise InversionError(f"{self.kind} function never exceeds {y}; no preimage")
        lo = 0.0
        while hi - lo > 1e-12 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def _as_function_tuple(fs, n: int, name: str) -> tuple:
    if isinstance(fs, InteractionFunction):
        return (fs,) * n
    fs = tuple(fs)
    if len(fs) != n:
        raise DimensionError(f"{name} must provide one function per component ({n}), got {len(fs)}")
    for f in fs:
        if not isinstance(f, InteractionFunction):
            raise TypeError(f"{name} entries must be InteractionFunction instances")
    return fs


@dataclass
class DelayLVModel:
    """Matrices, intrinsic rates, delay and response functions of the system."""

    A: np.ndarray
    B: np.ndarray
    c: np.ndarray
    tau: float
    f: tuple = ()
    g: tuple = ()

    def __post_init__(self):
        self.A = as_square(self.A, "A")
        self.B = as_square(self.B, "B")
        if self.A.shape != self.B.shape:
            raise DimensionError("A and B must have the same shape")
        n = self.A.shape[0]
        self.c = as_vector(self.c, n, "c")
        self.tau = float(self.tau)
        if not (math.isfinite(self.tau) and self.tau >= 0.0):
            raise ValueError("tau must be finite and nonnegative")
        self.f = _as_function_tuple(self.f if self.f else InteractionFunction("identity"), n, "f")
        self.g = _as_function_tuple(self.g if self.g else InteractionFunction("identity"), n, "g")
        self._f_identity = all(fn.kind == "identity" for fn in self.f)
        self._g_identity = all(fn.kind == "identity" for fn in self.g)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def f_values(self, x: np.ndarray) -> np.ndarray:
        if self._f_identity:
            return x
        return np.array([fn(v) for fn, v in zip(self.f, x)])

    def g_values(self, x: np.ndarray) -> np.ndarray:
        if self._g_identity:
            return x
        return np.array([fn(v) for fn, v in zip(self.g, x)])


@dataclass
class Trajectory:
    """A computed solution on a uniform grid, plus the sampled history."""

    times: np.ndarray
    states: np.ndarray
    history_times: np.ndarray
    history: np.ndarray
    h: float
    tau: float

    @property
    def delay_steps(self) -> int:
        return self.history.shape[0] - 1


@dataclass
class LKWeights:
    """Weights (p, mu) of the decay functional; mu = q / 2 for a certificate."""

    p: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        self.p = as_vector(self.p, name="p")
        self.mu = as_vector(self.mu, self.p.size, name="mu")
        if not (self.p > 0.0).all():
            raise ValueError("p must be strictly positive")
        if not (self.mu >= 0.0).all():
            raise ValueError("mu must be nonnegative")

    @classmethod
    def from_certificate(cls, cert: RiccatiCertificate) -> "LKWeights":
        return cls(cert.pair.p.copy(), 0.5 * cert.pair.q)


def mutualistic_equilibrium(model: DelayLVModel) -> np.ndarray:
    """Positive equilibrium of a mutualistic model, f_i(xbar_i) solved componentwise.

    Preconditions: A Metzler, B nonnegative, c strictly positive, A + B
    Hurwitz.  The Hurwitz property is certified by the solve itself: with
    y = -(A+B)^{-1} c strictly positive and (A+B) y = -c strictly negative,
    the Metzler matrix A + B must be Hurwitz, so no eigensolve is needed.
    """
    if not is_metzler(model.A):
        raise PreconditionError("A is not Metzler")
    if not is_nonnegative(model.B):
        raise PreconditionError("B is not entrywise nonnegative")
    if not (model.c > 0.0).all():
        raise PreconditionError("c must be strictly positive")
    M = model.A + model.B
    try:
        y = np.linalg.solve(M, -model.c)
    except np.linalg.LinAlgError as exc:
        raise PreconditionError("A + B is singular, hence not Hurwitz") from exc
    if not (y > 0.0).all():
        raise PreconditionError("A + B is not Hurwitz (no positive equilibrium image)")
    xbar = np.empty(model.n)
    for i, (fn, target) in enumerate(zip(model.f, y)):
        try:
            xbar[i] = fn.invert(float(target))
        except InversionError as exc:
            raise InversionError(f"component {i}: {exc}") from exc
    return xbar


def _delay_steps(tau: float, h: float) -> int:
    if tau == 0.0:
        return 0
    m = int(round(tau / h))
    if m < 1 or abs(m * h - tau) > 1e-9 * max(1.0, tau):
        raise ValueError(f"step h = {h} must divide the delay tau = {tau} exactly")
    return m


def integrate(model: DelayLVModel, history, h: float, T: float) -> Trajectory:
    """Integrate the model from a positive history with classic RK4.

    ``history`` is a function on [-tau, 0] returning the state vector, or a
    constant vector.  The grid step must divide the delay, which puts every
    delayed whole-step lookup exactly on the grid; half-step lookups use cubic
    Hermite interpolation of the stored values and derivatives.  A step whose
    stages or result leave the open positive orthant is rejected and retried
    at half the span, up to 20 halvings; past that, ``StepCollapse`` is
    raised.  States are never clipped.
    """
    h = float(h)
    T = float(T)
    if not (math.isfinite(h) and h > 0.0):
        raise ValueError("h must be positive and finite")
    if not (math.isfinite(T) and T > 0.0):
        raise ValueError("T must be positive and finite")
    m = _delay_steps(model.tau, h)
    steps = int(round(T / h))
    if steps < 1:
        raise ValueError("T must cover at least one step")

    n = model.n
    if callable(history):
        hist_fn = history
    else:
        const = as_vector(history, n, "history")
        hist_fn = lambda _t, _v=const: _v

    def history_at(t: float) -> np.ndarray:
        value = np.asarray(hist_fn(t), dtype=float)
        if value.shape != (n,):
            raise DimensionError(f"history must return vectors of length {n}")
        if not (value > 0.0).all():
            raise ValueError(f"history must be strictly positive (violated at t = {t:.6g})")
        return value

    hist_samples = [history_at(-(m - j) * h) for j in range(m + 1)]

    A, B, c = model.A, model.B, model.c
    f_vals, g_vals = model.f_values, model.g_values

    def rhs(x: np.ndarray, xd: np.ndarray) -> np.ndarray:
        return g_vals(x) * (c + A @ f_vals(x) + B @ f_vals(xd))

    states = [hist_samples[-1].copy()]
    derivs: list[np.ndarray] = []

    def past(u: float) -> np.ndarray:
        # u is time in grid units; delayed lookups are u_stage - m, exact for
        # the dyadic stage offsets produced by halving.
        if u <= 0.0:
            return history_at(max(u, -float(m)) * h)
        i = int(u)
        frac = u - i
        if frac == 0.0:
            return states[i]
        s = frac
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        return (
            h00 * states[i]
            + (h10 * h) * derivs[i]
            + h01 * states[i + 1]
            + (h11 * h) * derivs[i + 1]
        )

    derivs.append(rhs(states[0], past(-float(m)) if m > 0 else states[0]))

    def positive(x: np.ndarray) -> bool:
        return bool((x > 0.0).all())

    def step_once(u: float, x: np.ndarray, span: float):
        width = span * h
        if m == 0:
            k1 = rhs(x, x)
            y2 = x + 0.5 * width * k1
            if not positive(y2):
                return None
            k2 = rhs(y2, y2)
            y3 = x + 0.5 * width * k2
            if not positive(y3):
                return None
            k3 = rhs(y3, y3)
            y4 = x + width * k3
            if not positive(y4):
                return None
            k4 = rhs(y4, y4)
        else:
            k1 = rhs(x, past(u - m))
            y2 = x + 0.5 * width * k1
            if not positive(y2):
                return None
            mid = past(u + 0.5 * span - m)
            k2 = rhs(y2, mid)
            y3 = x + 0.5 * width * k2
            if not positive(y3):
                return None
            k3 = rhs(y3, mid)
            y4 = x + width * k3
            if not positive(y4):
                return None
            k4 = rhs(y4, past(u + span - m))
        result = x + (width / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return result if positive(result) else None

    def advance(u: float, x: np.ndarray, span: float, depth: int) -> np.ndarray:
        candidate = step_once(u, x, span)
        if candidate is not None:
            return candidate
        if depth >= 20:
            raise StepCollapse(u * h, x)
        half = 0.5 * span
        mid_state = advance(u, x, half, depth + 1)
        return advance(u + half, mid_state, half, depth + 1)

    for k in range(steps):
        x_next = advance(float(k), states[k], 1.0, 0)
        states.append(x_next)
        derivs.append(rhs(x_next, past(float(k + 1) - m) if m > 0 else x_next))

    return Trajectory(
        times=np.arange(steps + 1) * h,
        states=np.vstack(states),
        history_times=np.arange(-m, 1) * h,
        history=np.vstack(hist_samples),
        h=h,
        tau=model.tau,
    )


def _adaptive_simpson(fn, a: float, b: float, rel_tol: float = 1e-10) -> float:
    if a == b:
        return 0.0
    fa, fb = fn(a), fn(b)
    mid = 0.5 * (a + b)
    fm = fn(mid)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = rel_tol * max(abs(whole), 1e-12)

    def recurse(lo, hi, flo, fmid, fhi, estimate, tol, depth):
        mid_ = 0.5 * (lo + hi)
        fl = fn(0.5 * (lo + mid_))
        fr = fn(0.5 * (mid_ + hi))
        left = (mid_ - lo) / 6.0 * (flo + 4.0 * fl + fmid)
        right = (hi - mid_) / 6.0 * (fmid + 4.0 * fr + fhi)
        if depth >= 50 or abs(left + right - estimate) <= 15.0 * tol:
            return left + right + (left + right - estimate) / 15.0
        return recurse(lo, mid_, flo, fl, fmid, left, 0.5 * tol, depth + 1) + recurse(
            mid_, hi, fmid, fr, fhi, right, 0.5 * tol, depth + 1
        )

    return recurse(a, b, fa, fm, fb, whole, eps, 0)


def _trapezoid(values: np.ndarray, dx: float) -> float:
    if values.shape[0] < 2:
        return 0.0
    return float(dx * (values.sum() - 0.5 * (values[0] + values[-1])))


def lk_value(model: DelayLVModel, weights: LKWeights, xbar, window, h: float) -> float:
    """Evaluate the decay functional on one window of the trajectory.

    ``window`` holds the states at t - tau, ..., t (step h, last row is the
    current state); for tau = 0 it is a single row.  The state integral uses
    the closed form when f_i and g_i are both identity and adaptive Simpson
    quadrature otherwise; the memory integral uses the composite trapezoid
    rule on the window.
    """
    xbar = as_vector(xbar, model.n, "xbar")
    W = np.asarray(window, dtype=float)
    if W.ndim != 2 or W.shape[1] != model.n:
        raise DimensionError(f"window must be (k, {model.n}), got {W.shape}")
    m = _delay_steps(model.tau, h)
    if W.shape[0] != m + 1:
        raise DimensionError(f"window must have {m + 1} rows for tau = {model.tau}, got {W.shape[0]}")
    if not (W > 0.0).all():
        raise ValueError("window states must be strictly positive")

    x_now = W[-1]
    total = 0.0
    for i in range(model.n):
        fi, gi = model.f[i], model.g[i]
        fbar = fi(xbar[i])
        if fi.kind == "identity" and gi.kind == "identity":
            contribution = (x_now[i] - xbar[i]) - xbar[i] * math.log(x_now[i] / xbar[i])
        else:
            contribution = _adaptive_simpson(
                lambda z, fi=fi, gi=gi, fbar=fbar: (fi(z) - fbar) / gi(z), xbar[i], x_now[i]
            )
        total += weights.p[i] * contribution
    for j in range(model.n):
        fj = model.f[j]
        fbar = fj(xbar[j])
        deltas = np.array([fj(v) - fbar for v in W[:, j]]) if fj.kind != "identity" else W[:, j] - fbar
        total += weights.mu[j] * _trapezoid(deltas * deltas, h)
    return float(total)


@dataclass
class DecayReport:
    """Outcome of checking the decay inequality along a trajectory."""

    steps_checked: int
    monotone_violations: int
    slope_violations: int
    worst_monotone_margin: float
    worst_slope_margin: float
    beta: float

    @property
    def violations(self) -> int:
        return self.monotone_violations + self.slope_violations

    def to_dict(self) -> dict:
        return {
            "steps_checked": self.steps_checked,
            "monotone_violations": self.monotone_violations,
            "slope_violations": self.slope_violations,
            "worst_monotone_margin": self.worst_monotone_margin,
            "worst_slope_margin": self.worst_slope_margin,
            "beta": self.beta,
            "violations": self.violations,
        }


def verify_decay(
    model: DelayLVModel, cert: RiccatiCertificate, xbar, trajectory: Trajectory
) -> DecayReport:
    """Check monotone decay and the decay-rate inequality of the functional.

    At every grid step both V(t_{k+1}) <= V(t_k) + eps and

        (V(t_{k+1}) - V(t_k)) / h <= -beta * (||df(t_k)||^2 + ||df(t_k - tau)||^2) + eps

    are required, with df_i(t) = f_i(x_i(t)) - f_i(xbar_i) and
    eps = 1e-6 * (1 + |V(t_k)|) absorbing quadrature and discretization noise.
    The certificate is re-verified against the model matrices first; a stale
    or corrupted certificate is a precondition failure.
    """
    try:
        fresh = verify_certificate(model.A, model.B, cert.pair)
    except NotNegativeDefinite as exc:
        raise PreconditionError(f"certificate does not verify for this model: {exc}") from exc
    if abs(fresh.lambda_max - cert.lambda_max) > 1e-8:
        raise PreconditionError("certificate lambda_max does not match a fresh verification")
    beta = fresh.beta

    xbar = as_vector(xbar, model.n, "xbar")
    if trajectory.tau != model.tau:
        raise PreconditionError("trajectory delay does not match the model")
    h = trajectory.h
    m = _delay_steps(model.tau, h)
    weights = LKWeights.from_certificate(fresh)

    if m > 0:
        combined = np.vstack([trajectory.history[:-1], trajectory.states])
    else:
        combined = trajectory.states
    n_points = trajectory.states.shape[0]

    if model._f_identity:
        deltas = combined - xbar[None, :]
    else:
        deltas = np.empty_like(combined)
        for j in range(model.n):
            fj = model.f[j]
            fbar = fj(xbar[j])
            deltas[:, j] = np.array([fj(v) for v in combined[:, j]]) - fbar
    squared = deltas * deltas

    # V at every grid point: state term plus trapezoid of the mu-weighted
    # squares over the trailing window, done with cumulative sums.
    mu_sq = squared @ weights.mu
    if m > 0:
        csum = np.concatenate([[0.0], np.cumsum(mu_sq)])
        window_sums = csum[m + 1 :] - csum[:-(m + 1)]  # sums over rows k..k+m
        memory = h * (window_sums - 0.5 * (mu_sq[: n_points] + mu_sq[m:]))
    else:
        memory = np.zeros(n_points)

    if model._f_identity and model._g_identity:
        X = trajectory.states
        state_term = ((X - xbar[None, :]) - xbar[None, :] * np.log(X / xbar[None, :])) @ weights.p
    else:
        state_term = np.empty(n_points)
        for k in range(n_points):
            total = 0.0
            for i in range(model.n):
                fi, gi = model.f[i], model.g[i]
                fbar = fi(xbar[i])
                if fi.kind == "identity" and gi.kind == "identity":
                    xi = trajectory.states[k, i]
                    total += weights.p[i] * ((xi - xbar[i]) - xbar[i] * math.log(xi / xbar[i]))
                else:
                    total += weights.p[i] * _adaptive_simpson(
                        lambda z, fi=fi, gi=gi, fbar=fbar: (fi(z) - fbar) / gi(z),
                        xbar[i],
                        trajectory.states[k, i],
                    )
            state_term[k] = total
    V = state_term + memory

    sq_now = squared[m:].sum(axis=1)  # rows aligned with grid times 0..N
    sq_delayed = squared[: n_points].sum(axis=1)  # rows aligned with t - tau

    eps = 1e-6 * (1.0 + np.abs(V[:-1]))
    dV = np.diff(V)
    slope = dV / h
    bound = -beta * (sq_now[:-1] + sq_delayed[:-1])

    monotone_excess = dV - eps
    slope_excess = slope - bound - eps
    return DecayReport(
        steps_checked=int(dV.size),
        monotone_violations=int((monotone_excess > 0.0).sum()),
        slope_violations=int((slope_excess > 0.0).sum()),
        worst_monotone_margin=float(monotone_excess.max()) if dV.size else 0.0,
        worst_slope_margin=float(slope_excess.max()) if dV.size else 0.0,
        beta=beta,
    )


@dataclass
class BoundednessReport:
    """Empirical ultimate-bound measurements over a batch of histories."""

    r_hat: float | None
    tail_sups: list
    entry_times: list
    errors: list
    T: float
    h: float

    def to_dict(self) -> dict:
        return {
            "r_hat": self.r_hat,
            "tail_sups": self.tail_sups,
            "entry_times": self.entry_times,
            "errors": self.errors,
            "T": self.T,
            "h": self.h,
        }


def boundedness_experiment(
    model: DelayLVModel, reference, histories, T: float, h: float
) -> BoundednessReport:
    """Integrate each history and measure the empirical ultimate bound.

    For each run the supremum of the Euclidean state norm over the tail
    [T/2, T] is recorded; r_hat is the maximum over successful runs, and the
    entry time is the first time from which the norm stays within
    1.05 * r_hat.  Integrator failures are recorded per run without aborting
    the batch.  ``reference`` is validated as an interior point of the orthant
    (the functional behind the bound is anchored at such a point) but the
    measurements themselves are norm-based.
    """
    reference = as_vector(reference, model.n, "reference")
    if not (reference > 0.0).all():
        raise PreconditionError("reference must be strictly positive")

    tail_sups: list[float | None] = []
    errors: list[str | None] = []
    trajectories: list[Trajectory | None] = []
    for history in histories:
        try:
            trajectory = integrate(model, history, h, T)
        except (StepCollapse, ValueError, DimensionError) as exc:
            trajectories.append(None)
            tail_sups.append(None)
            errors.append(f"{type(exc).__name__}: {exc}")
            continue
        norms = np.linalg.norm(trajectory.states, axis=1)
        tail = norms[trajectory.times >= T / 2.0]
        trajectories.append(trajectory)
        tail_sups.append(float(tail.max()))
        errors.append(None)

    finished = [s for s in tail_sups if s is not None]
    r_hat = max(finished) if finished else None
    entry_times: list[float | None] = []
    for trajectory in trajectories:
        if trajectory is None or r_hat is None:
            entry_times.append(None)
            continue
        norms = np.linalg.norm(trajectory.states, axis=1)
        outside = np.flatnonzero(norms > 1.05 * r_hat)
        entry_times.append(0.0 if outside.size == 0 else float(trajectory.times[outside[-1] + 1]))
    return BoundednessReport(
        r_hat=r_hat, tail_sups=tail_sups, entry_times=entry_times, errors=errors, T=T, h=h
    )
