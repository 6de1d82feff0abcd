"""Branching weight sequences and their equivalent offspring distributions.

A weight sequence (omega_k)_{k>=0} assigns a nonnegative weight to each
outdegree, with omega_0 > 0 and omega_k > 0 for some k >= 2.  Writing
phi(z) = sum_k omega_k z^k with radius of convergence rho, the sequence is
classified by the limit nu of psi(t) = t phi'(t) / phi(t) as t increases to
rho:

* type I   (nu >= 1): there is a unique tau in (0, rho] with psi(tau) = 1;
* type II  (0 < nu < 1): tau = rho;
* type III (rho = 0): tau = 0.

The tilted probabilities pi_k = tau^k omega_k / phi(tau) define the offspring
law of the equivalent Galton-Watson tree (a point mass at 0 in type III), with
mean mu = min(nu, 1) and variance sigma^2 = tau psi'(tau), possibly infinite.

All values are exact rationals whenever the family permits (e.g. uniform
weights, tau = 1/2); otherwise high-precision floats via mpmath, with series
truncated at a recorded point under a rigorous tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath

from .errors import PrecisionFailureError, ValidationError

INFINITY = float("inf")

DEFAULT_PRECISION_BITS = 128
DEFAULT_ROOT_TOL = 1e-12
DEFAULT_TAIL_TOL = 1e-14

_TRUNCATION_CAP = 1 << 26


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@dataclass(frozen=True)
class _Analytics:
    """Closed-form facts a built-in family supplies about itself.

    tail_bound(t, K, r) describes sum_{k>K} k(k-1)...(k-r+1) omega_k t^{k-r}
    as a pair (correction, error_bound) with the true tail inside
    correction +- error_bound, or returns None when that series diverges.
    """

    nu: object = None
    tau: object = None
    phi_tau: object = None
    sigma2: object = None
    span: int | None = None
    tail_bound: Callable | None = None


@dataclass(frozen=True)
class WeightSequence:
    """Immutable branching weight sequence omega_k with known radius.

    The radius of convergence is supplied analytically by the constructor
    (finite positive, ``math.inf`` or 0); it is never detected numerically.
    Finite-support sequences store their values in ``values``; unbounded
    built-in families use the ``weight_fn`` accessor instead.
    """

    radius: object
    family: str
    values: dict | None = None
    weight_fn: Callable[[int], object] | None = None
    log_weight_fn: Callable[[int], float] | None = None
    exact: bool = True
    analytics: _Analytics = field(default=_Analytics(), repr=False)

    def __post_init__(self):
        if (self.values is None) == (self.weight_fn is None):
            raise ValidationError("need exactly one of values / weight_fn")
        if self.values is not None:
            if any(v < 0 for v in self.values.values()):
                raise ValidationError("weights must be non-negative")
            if self.weight(0) <= 0:
                raise ValidationError("omega_0 must be positive")
            if not any(k >= 2 and v > 0 for k, v in self.values.items()):
                raise ValidationError("need omega_k > 0 for some k >= 2")

    # -- accessors ---------------------------------------------------------

    def weight(self, k: int):
        if self.values is not None:
            return self.values.get(k, Fraction(0))
        return self.weight_fn(k)

    def log_weight(self, k: int) -> float:
        """log omega_k (for scale handling); -inf on zero weight."""
        if self.log_weight_fn is not None:
            return self.log_weight_fn(k)
        w = self.weight(k)
        return math.log(w) if w > 0 else -INFINITY

    def weights_upto(self, kmax: int) -> list:
        return [self.weight(k) for k in range(kmax + 1)]

    @property
    def finite_support(self) -> bool:
        return self.values is not None

    @property
    def max_support(self) -> int | None:
        if self.values is None:
            return None
        return max(k for k, v in self.values.items() if v > 0)

    def span(self) -> int:
        """gcd of the positive-weight outdegrees."""
        if self.analytics.span is not None:
            return self.analytics.span
        g = 0
        for k, v in self.values.items():
            if v > 0:
                g = math.gcd(g, k)
        return max(g, 1)

    def admissible(self, n: int) -> bool:
        """Whether n-vertex trees can carry positive weight (n = 1 mod span)."""
        return n >= 1 and n % self.span() == 1 % self.span()

    def tail_bound(self, t, K: int, r: int):
        """(correction, error bound) for the series tail past K, or None."""
        if self.finite_support:
            return mpmath.mpf(0), mpmath.mpf(0)
        if self.analytics.tail_bound is None:
            raise PrecisionFailureError(
                f"family {self.family!r} has unbounded support and no tail bound"
            )
        return self.analytics.tail_bound(t, K, r)


def span(w: WeightSequence) -> int:
    return w.span()


# -- series evaluation -----------------------------------------------------


def _falling(k: int, r: int) -> int:
    out = 1
    for i in range(r):
        out *= k - i
    return out


def phi_series(w: WeightSequence, t, r: int = 0, tail_tol: float = DEFAULT_TAIL_TOL):
    """Evaluate phi^(r)(t) = sum_k k(k-1)..(k-r+1) omega_k t^{k-r}.

    Returns (value, tail_error, K): the series is truncated at the smallest K
    (doubling search) whose rigorous tail error drops below
    tail_tol * max(1, partial sum); the family's tail correction is folded
    into the value.  Raises PrecisionFailureError when no such K exists below
    the truncation cap, ValidationError on divergence.
    """
    if w.finite_support:
        kmax = w.max_support
        total = sum(
            _falling(k, r) * w.weight(k) * t ** (k - r)
            for k in range(r, kmax + 1)
            if w.weight(k) > 0
        )
        return total, mpmath.mpf(0), kmax

    t = mpmath.mpf(t) if not _is_exact(t) else t
    K = 64
    while K <= _TRUNCATION_CAP:
        partial = sum(
            _falling(k, r) * w.weight(k) * (t ** (k - r)) for k in range(r, K + 1)
        )
        tail = w.tail_bound(t, K, r)
        if tail is None:
            raise ValidationError(
                f"series phi^({r}) diverges at t={t} for family {w.family!r}"
            )
        correction, bound = tail
        if bound <= tail_tol * max(1, abs(partial)):
            return partial + correction, bound, K
        K *= 2
    raise PrecisionFailureError(
        f"tail bound not met below K={_TRUNCATION_CAP} for family {w.family!r}"
    )


def psi(w: WeightSequence, t, tail_tol: float = DEFAULT_TAIL_TOL):
    """psi(t) = t phi'(t) / phi(t)."""
    num, _, _ = phi_series(w, t, 1, tail_tol)
    den, _, _ = phi_series(w, t, 0, tail_tol)
    return t * num / den


# -- offspring laws --------------------------------------------------------


@dataclass(frozen=True)
class OffspringLaw:
    """Tilted offspring distribution pi_k = tau^k omega_k / phi(tau).

    ``exact`` is True when tau and phi(tau) are rational, in which case pmf()
    returns Fractions; otherwise values are floats computed from mpmath
    intermediates at the construction precision.  ``truncation_k`` and
    ``tail_bound`` record where unbounded-support series were cut and how much
    mass the bound allows past that point.
    """

    type_tag: str  # "I" | "II" | "III"
    tau: object
    nu: object
    mu: object
    sigma2: object
    phi_tau: object
    weights: WeightSequence
    exact: bool
    precision_bits: int
    truncation_k: int | None = None
    tail_bound: float = 0.0

    @property
    def span(self) -> int:
        return self.weights.span()

    def pmf(self, k: int):
        """pi_k, exact Fraction in exact mode, float otherwise."""
        if self.type_tag == "III":
            return Fraction(1) if k == 0 else Fraction(0)
        wk = self.weights.weight(k)
        if wk == 0:
            return Fraction(0) if self.exact else 0.0
        if self.exact:
            return Fraction(self.tau) ** k * Fraction(wk) / Fraction(self.phi_tau)
        with mpmath.workprec(self.precision_bits):
            return float(_to_mpf(self.tau) ** k * _to_mpf(wk) / _to_mpf(self.phi_tau))

    def pmf_upto(self, kmax: int) -> list:
        """[pi_0 .. pi_kmax] with a running product for the tilt."""
        if self.type_tag == "III":
            return [Fraction(1)] + [Fraction(0)] * kmax
        if self.exact:
            tau = Fraction(self.tau)
            phi = Fraction(self.phi_tau)
            out = []
            tk = Fraction(1)
            for k in range(kmax + 1):
                out.append(tk * Fraction(self.weights.weight(k)) / phi)
                tk *= tau
            return out
        with mpmath.workprec(self.precision_bits):
            tau = _to_mpf(self.tau)
            phi = _to_mpf(self.phi_tau)
            out = []
            tk = mpmath.mpf(1)
            for k in range(kmax + 1):
                out.append(float(tk * _to_mpf(self.weights.weight(k)) / phi))
                tk *= tau
            return out

    def pmf_floats(self, kmax: int):
        import numpy as np

        return np.array([float(p) for p in self.pmf_upto(kmax)], dtype=np.float64)

    def mean_float(self) -> float:
        return float(self.mu)


@dataclass(frozen=True)
class SizeBiasedLaw:
    """Size-biased offspring variable: mass k pi_k at k >= 1, defect at infinity.

    The infinity mass 1 - mu is what drives condensation: it is zero exactly
    in type I.
    """

    law: OffspringLaw

    @property
    def infinity_mass(self):
        return 1 - self.law.mu

    def finite_pmf(self, k: int):
        if k < 1:
            return Fraction(0) if self.law.exact else 0.0
        return k * self.law.pmf(k)

    def finite_pmf_floats(self, kmax: int):
        import numpy as np

        arr = self.law.pmf_floats(kmax)
        return arr * np.arange(kmax + 1, dtype=np.float64)


def size_biased(law: OffspringLaw) -> SizeBiasedLaw:
    return SizeBiasedLaw(law)


# -- classification --------------------------------------------------------


def _bisect_tau(w: WeightSequence, tol: float, tail_tol: float):
    """Unique root of psi(t) = 1 in (0, rho), by bisection to abs tol."""
    rho = w.radius
    if rho == INFINITY:
        hi = mpmath.mpf(1)
        while psi(w, hi, tail_tol) < 1:
            hi *= 2
        lo = hi / 2 if hi > 1 else mpmath.mpf(0)
    else:
        hi = _to_mpf(rho)
        lo = mpmath.mpf(0)
        # psi may equal 1 only strictly inside; nudge hi off the boundary when
        # the series is evaluable there is unnecessary: bisection never
        # evaluates at hi.
    lo = mpmath.mpf(lo)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if psi(w, mid, tail_tol) < 1:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def classify(
    w: WeightSequence,
    *,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    root_tol: float = DEFAULT_ROOT_TOL,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> OffspringLaw:
    """Classify a weight sequence and build its offspring law.

    Deterministic: identical inputs produce identical outputs.
    """
    with mpmath.workprec(precision_bits):
        ana = w.analytics

        if w.radius == 0:
            return OffspringLaw(
                type_tag="III",
                tau=Fraction(0),
                nu=Fraction(0),
                mu=Fraction(0),
                sigma2=Fraction(0),
                phi_tau=w.weight(0),
                weights=w,
                exact=True,
                precision_bits=precision_bits,
            )

        if ana.nu is not None:
            nu = ana.nu
        elif w.finite_support:
            nu = w.max_support  # psi(t) -> max support degree as t -> inf
        else:
            raise ValidationError(
                f"family {w.family!r}: nu must be supplied for unbounded support"
            )

        if nu >= 1:
            type_tag = "I"
            if ana.tau is not None:
                tau = ana.tau
            else:
                tau = _bisect_tau(w, root_tol, tail_tol)
        else:
            type_tag = "II"
            tau = w.radius

        exact = w.exact and _is_exact(tau) and (
            ana.phi_tau is not None or w.finite_support
        )

        truncation_k = None
        bound = 0.0
        if ana.phi_tau is not None:
            phi_tau = ana.phi_tau
        else:
            phi_tau, b, truncation_k = phi_series(w, tau, 0, tail_tol)
            bound = float(b)

        # mu = min(nu, 1): exactly 1 in type I, nu itself in type II
        mu = Fraction(1) if type_tag == "I" else nu

        if ana.sigma2 is not None:
            sigma2 = ana.sigma2
        elif exact and w.finite_support:
            sigma2 = _sigma2_series(w, tau, phi_tau, tail_tol)
        else:
            # series results are approximations regardless of scalar type
            s2 = _sigma2_series(w, tau, phi_tau, tail_tol)
            sigma2 = s2 if s2 == INFINITY else float(s2)

        if not exact:
            tau = float(tau) if not _is_exact(tau) else tau
            phi_tau = float(phi_tau) if not _is_exact(phi_tau) else phi_tau
        nu_out = nu if _is_exact(nu) else float(nu)
        mu_out = mu if _is_exact(mu) else float(mu)

        return OffspringLaw(
            type_tag=type_tag,
            tau=tau,
            nu=nu_out,
            mu=mu_out,
            sigma2=sigma2,
            phi_tau=phi_tau,
            weights=w,
            exact=exact,
            precision_bits=precision_bits,
            truncation_k=truncation_k,
            tail_bound=bound,
        )


def _sigma2_series(w: WeightSequence, tau, phi_tau, tail_tol):
    """sigma^2 = tau psi'(tau), or inf when phi'' diverges at tau."""
    if tau == 0:
        return Fraction(0)
    try:
        d2, _, _ = phi_series(w, tau, 2, tail_tol)
    except ValidationError:
        return INFINITY
    d1, _, _ = phi_series(w, tau, 1, tail_tol)
    d0 = phi_tau
    # psi'(t) = (phi' + t phi'')/phi - t (phi'/phi)^2
    val = tau * ((d1 + tau * d2) / d0 - tau * (d1 / d0) ** 2)
    return val


# -- built-in families -----------------------------------------------------


def _uniform_tail(t, K, r):
    # terms a_k = k(k-1)..(k-r+1) t^{k-r}; ratio a_{k+1}/a_k = t (k+1)/(k+1-r),
    # decreasing in k, so bounded by its value at k = K+1.
    t = _to_mpf(t)
    if t >= 1:
        return None
    k = max(K + 1, r + 1)
    rho = t * (k + 1) / (k + 1 - r)
    if rho >= 1:  # contraction not reached yet; a larger K will do
        return mpmath.mpf(0), mpmath.inf
    a = _falling(k, r) * t ** (k - r)
    return mpmath.mpf(0), a / (1 - rho)


def _cayley_tail(t, K, r):
    # a_k = t^{k-r}/(k-r)!; ratio = t/(k+1-r)
    t = _to_mpf(t)
    k = max(K + 1, r)
    rho = t / (k + 1 - r)
    if rho >= 1:  # always contracts for larger K
        return mpmath.mpf(0), mpmath.inf
    a = t ** (k - r) / mpmath.factorial(k - r)
    return mpmath.mpf(0), a / (1 - rho)


def _power_sum_tail(s, a):
    """(value, error bound) for sum_{k>=a} k^-s, s > 1, via Euler-Maclaurin.

    Correction terms through B_6; the remainder of the expansion for a
    completely monotone integrand is bounded by the first omitted term (B_8).
    """
    s = mpmath.mpf(s)
    a = mpmath.mpf(a)
    val = a ** (1 - s) / (s - 1) + a ** (-s) / 2 + s * a ** (-s - 1) / 12
    val -= s * (s + 1) * (s + 2) * a ** (-s - 3) / 720
    val += s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * a ** (-s - 5) / 30240
    bound = (
        s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * (s + 5) * (s + 6)
        * a ** (-s - 7) / 1209600
    )
    return val, bound


def _powerlaw_tail(alpha):
    def tail(t, K, r):
        t = _to_mpf(t)
        k = K + 1
        if t < 1:
            # a_k <= k^r k^-alpha t^{k-r}; ratio <= t ((k+1)/k)^r
            rho = t * ((k + 1) / k) ** r
            if rho >= 1:  # contraction not reached yet
                return mpmath.mpf(0), mpmath.inf
            a = mpmath.mpf(k) ** (r - alpha) * t ** (k - r)
            return mpmath.mpf(0), a / (1 - rho)
        # t == 1 (the radius). k(k-1)..(k-r+1) k^-alpha expands into pure
        # power sums: r=0 -> T(alpha); r=1 -> T(alpha-1);
        # r=2 -> T(alpha-2) - T(alpha-1).
        if alpha <= r + 1:
            return None
        if r == 0:
            return _power_sum_tail(alpha, k)
        if r == 1:
            return _power_sum_tail(alpha - 1, k)
        if r == 2:
            v2, b2 = _power_sum_tail(alpha - 2, k)
            v1, b1 = _power_sum_tail(alpha - 1, k)
            return v2 - v1, b2 + b1
        raise PrecisionFailureError(f"powerlaw tail: derivative order {r} unsupported")

    return tail


def _powerlaw_nu(alpha, tail_tol: float = DEFAULT_TAIL_TOL):
    """nu = phi'(1)/phi(1) = (sum k^{1-alpha}) / (1 + sum k^{-alpha}).

    Finite iff alpha > 2; partial sums plus Euler-Maclaurin tails.
    """
    if alpha <= 2:
        return INFINITY
    K = 1 << 10
    s_num = sum(mpmath.mpf(k) ** (1 - alpha) for k in range(1, K + 1))
    s_den = sum(mpmath.mpf(k) ** (-mpmath.mpf(alpha)) for k in range(1, K + 1))
    t_num, b_num = _power_sum_tail(alpha - 1, K + 1)
    t_den, b_den = _power_sum_tail(alpha, K + 1)
    if b_num > tail_tol or b_den > tail_tol:
        raise PrecisionFailureError("powerlaw nu: tail bound not met")
    return (s_num + t_num) / (1 + s_den + t_den)


def builtin(family: str, **params) -> WeightSequence:
    """Construct a built-in weight family with its analytic radius attached.

    Families: uniform; motzkin (omega_0 = omega_1 = omega_2 = 1); fullbinary
    (omega_0 = omega_2 = 1); cayley (omega_k = 1/k!); powerlaw(alpha > 1)
    (omega_0 = 1, omega_k = k^-alpha); factorial(alpha > 0) (omega_k = k!^alpha).
    """
    if family == "uniform":
        return WeightSequence(
            radius=Fraction(1),
            family="uniform",
            weight_fn=lambda k: Fraction(1),
            log_weight_fn=lambda k: 0.0,
            exact=True,
            analytics=_Analytics(
                nu=INFINITY,
                tau=Fraction(1, 2),
                phi_tau=Fraction(2),
                sigma2=Fraction(2),
                span=1,
                tail_bound=_uniform_tail,
            ),
        )
    if family == "motzkin":
        return WeightSequence(
            radius=INFINITY,
            family="motzkin",
            values={0: Fraction(1), 1: Fraction(1), 2: Fraction(1)},
            analytics=_Analytics(
                nu=2, tau=Fraction(1), phi_tau=Fraction(3), sigma2=Fraction(2, 3), span=1
            ),
        )
    if family == "fullbinary":
        return WeightSequence(
            radius=INFINITY,
            family="fullbinary",
            values={0: Fraction(1), 2: Fraction(1)},
            analytics=_Analytics(
                nu=2, tau=Fraction(1), phi_tau=Fraction(2), sigma2=Fraction(1), span=2
            ),
        )
    if family == "cayley":
        return WeightSequence(
            radius=INFINITY,
            family="cayley",
            weight_fn=lambda k: Fraction(1, math.factorial(k)),
            log_weight_fn=lambda k: -math.lgamma(k + 1),
            exact=True,
            analytics=_Analytics(
                nu=INFINITY,
                tau=Fraction(1),
                phi_tau=None,  # e is irrational; series path
                sigma2=None,   # tau psi'(tau) = 1, but let the series confirm
                span=1,
                tail_bound=_cayley_tail,
            ),
        )
    if family == "powerlaw":
        alpha = params.get("alpha", 3)
        if alpha <= 1:
            raise ValidationError("powerlaw needs alpha > 1")
        alpha_is_int = float(alpha).is_integer()
        alpha_i = int(alpha)

        def wfn(k, _a=alpha, _ai=alpha_i, _int=alpha_is_int):
            if k == 0:
                return Fraction(1)
            if _int:
                return Fraction(1, k**_ai)
            return float(k) ** (-_a)

        return WeightSequence(
            radius=Fraction(1),
            family=f"powerlaw(alpha={alpha})",
            weight_fn=wfn,
            log_weight_fn=lambda k, _a=alpha: 0.0 if k == 0 else -_a * math.log(k),
            exact=alpha_is_int,
            analytics=_Analytics(
                nu=_powerlaw_nu(alpha),
                span=1,
                tail_bound=_powerlaw_tail(alpha),
            ),
        )
    if family == "factorial":
        alpha = params.get("alpha", 1)
        if alpha <= 0:
            raise ValidationError("factorial needs alpha > 0")
        alpha_is_int = float(alpha).is_integer()
        alpha_i = int(alpha)

        def wfn(k, _a=alpha, _ai=alpha_i, _int=alpha_is_int):
            if _int:
                return Fraction(math.factorial(k) ** _ai)
            return math.exp(_a * math.lgamma(k + 1))

        return WeightSequence(
            radius=Fraction(0),
            family=f"factorial(alpha={alpha})",
            weight_fn=wfn,
            log_weight_fn=lambda k, _a=alpha: _a * math.lgamma(k + 1),
            exact=alpha_is_int,
            analytics=_Analytics(span=1),
        )
    raise ValidationError(f"unknown weight family {family!r}")


def from_values(values: dict, radius=INFINITY, family: str = "custom") -> WeightSequence:
    """Finite-support weight sequence from a {k: weight} mapping."""
    vals = {int(k): (v if isinstance(v, Fraction) else Fraction(v)) for k, v in values.items()}
    return WeightSequence(radius=radius, family=family, values=vals)


# -- weight files ----------------------------------------------------------


def load_weights(path) -> WeightSequence:
    """Read a weight file: header ``radius=<value|inf|0>``, then ``k<TAB>value``
    lines where value is ``p/q`` or a decimal literal (parsed exactly)."""
    values = {}
    radius = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("radius="):
                tok = line.split("=", 1)[1].strip()
                radius = INFINITY if tok == "inf" else Fraction(tok)
                continue
            try:
                k_str, v_str = line.split("\t")
                values[int(k_str)] = Fraction(v_str)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad weight line {line!r}") from exc
    if radius is None:
        raise ValidationError(f"{path}: missing radius= header")
    return from_values(values, radius=radius, family=f"file:{path}")


def save_weights(w: WeightSequence, path) -> None:
    if not w.finite_support:
        raise ValidationError("only finite-support sequences can be saved")
    with open(path, "w", encoding="utf-8") as fh:
        rad = "inf" if w.radius == INFINITY else str(w.radius)
        fh.write(f"radius={rad}\n")
        for k in sorted(w.values):
            if w.values[k] > 0:
                fh.write(f"{k}\t{w.values[k]}\n")
