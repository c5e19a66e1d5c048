"""Complex-coefficient rational transfer-function algebra and polynomial
root finding.

Coefficient vectors are stored in ascending powers of s.  Complex
coefficients are first-class: frequency-shifted (phase-domain) models are
not conjugate-symmetric, so roots are never assumed to come in conjugate
pairs.
"""
from __future__ import annotations

import math

import numpy as np

DEGREE_CAP = 200
CANCEL_TOL = 1e-9        # relative tolerance for common-root cancellation
_TRIM_REL = 1e-13        # trailing coefficients below this (rel. to max) are noise


# ---------------------------------------------------------------------------
# raw polynomial helpers (ascending coefficient arrays)

def _as_poly(c) -> np.ndarray:
    a = np.atleast_1d(np.asarray(c, dtype=complex))
    if a.ndim != 1 or a.size == 0:
        raise ValueError("coefficient vector must be a nonempty 1-d sequence")
    return a


def _ptrim(c: np.ndarray) -> np.ndarray:
    m = np.max(np.abs(c))
    if m == 0.0:
        return np.zeros(1, dtype=complex)
    keep = np.nonzero(np.abs(c) > _TRIM_REL * m)[0]
    return c[: keep[-1] + 1].copy()


def _pzero_trim(c: np.ndarray) -> np.ndarray:
    # drop exact-zero leading (high-degree) coefficients only; genuinely tiny
    # leading terms (henry-product coefficients) carry real far-plane roots
    out = np.trim_zeros(c, "b")
    if len(out) == 0:
        return np.zeros(1, dtype=complex)
    return out.copy()


def _padd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def _pmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def _pshift(c: np.ndarray, dz: complex) -> np.ndarray:
    # p(s) -> p(s + dz) via the binomial theorem
    out = np.zeros(len(c), dtype=complex)
    for k in range(len(c)):
        ck = c[k]
        if ck == 0.0:
            continue
        for j in range(k + 1):
            out[j] += ck * math.comb(k, j) * dz ** (k - j)
    return out


def _peval(c: np.ndarray, s) -> complex:
    # Horner, highest power first
    acc = np.zeros_like(np.asarray(s, dtype=complex))
    for ck in c[::-1]:
        acc = acc * s + ck
    return acc if acc.shape else complex(acc)


def _pderiv(c: np.ndarray) -> np.ndarray:
    if len(c) == 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, len(c), dtype=float)


def _pdivide_exact(a: np.ndarray, b: np.ndarray):
    """a / b when b divides a up to roundoff, else None."""
    if len(b) > len(a) or (len(b) == 1 and b[0] == 0.0):
        return None
    quo, rem = np.polynomial.polynomial.polydiv(a, b)
    scale = np.max(np.abs(a)) + np.max(np.abs(b)) * np.max(np.abs(quo))
    if np.max(np.abs(rem)) <= 1e-10 * scale:
        return np.asarray(quo, dtype=complex)
    return None


# ---------------------------------------------------------------------------
# root finding

def poly_roots(coeffs, seed: int = 12345) -> np.ndarray:
    """All roots of the polynomial sum(coeffs[k] * s**k).

    Simultaneous (Aberth-Ehrlich) iteration from a randomized circle of
    initial guesses, followed by Newton polishing; multiple roots are
    clustered and replaced by their cluster mean.

    Parameters
    ----------
    coeffs : sequence of complex, ascending powers
    seed : int, initialization seed (fixed default keeps results deterministic)

    Returns
    -------
    np.ndarray of complex roots (length = degree),
    sorted by (real, imag) for reproducibility.
    """
    c = _pzero_trim(_as_poly(coeffs))
    deg = len(c) - 1
    if deg < 1:
        raise ValueError("degree must be >= 1 (nonzero leading coefficient)")
    if deg > DEGREE_CAP:
        raise ValueError(f"degree {deg} exceeds cap {DEGREE_CAP}")

    # strip exact zero roots (s | p), then rescale: substitute s = alpha*x so
    # the remaining roots sit near the unit circle, and divide by the max
    # coefficient magnitude (ohm/henry coefficients differ by many orders)
    nzero = 0
    while abs(c[0]) == 0.0:
        c = c[1:]
        nzero += 1
    n = len(c) - 1

    roots = np.zeros(0, dtype=complex)
    if n > 0:
        alpha = (abs(c[0]) / abs(c[-1])) ** (1.0 / n)
        cs = c * alpha ** np.arange(n + 1)
        cs = cs / np.max(np.abs(cs))
        dp = _pderiv(cs)
        for attempt in range(4):
            x = _aberth(cs, seed + 7919 * attempt)
            for _ in range(3):  # Newton polish
                pv = _peval_vec(cs, x)
                dv = _peval_vec(dp, x)
                step = np.where(dv != 0.0, pv / np.where(dv == 0.0, 1.0, dv), 0.0)
                x = x - step
            res = np.abs(_peval_vec(cs, x))
            scale = np.maximum(1.0, np.abs(x)) ** n
            if np.all(res <= 1e-8 * scale):
                break
        roots = alpha * _cluster_means(x)

    if nzero:
        roots = np.concatenate([np.zeros(nzero, dtype=complex), roots])
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _peval_vec(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for ck in c[::-1]:
        acc = acc * z + ck
    return acc


def _init_guesses(c: np.ndarray, rng) -> np.ndarray:
    """Starting points on circles sized by the Newton polygon of |c|.

    Root moduli can span many orders of magnitude (sub-ohm grid terms against
    henry-product leading terms), so a single starting circle stalls.  The
    upper convex hull of (k, log|c_k|) estimates one modulus per hull edge;
    each edge contributes that many starting points.
    """
    n = len(c) - 1
    pts = [(k, math.log(abs(ck))) for k, ck in enumerate(c) if ck != 0.0]
    hull: list[tuple[int, float]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    z = np.empty(n, dtype=complex)
    pos = 0
    for (k0, y0), (k1, y1) in zip(hull[:-1], hull[1:]):
        m = k1 - k0
        r = math.exp((y0 - y1) / m)
        ang = (2.0 * np.pi * (np.arange(m) + 0.35) / m
               + 2.0 * np.pi * pos / n + 0.2 * rng.standard_normal(m))
        z[pos:pos + m] = r * (1.0 + 0.05 * rng.standard_normal(m)) * np.exp(1j * ang)
        pos += m
    return z


def _aberth(c: np.ndarray, seed: int, maxiter: int = 400) -> np.ndarray:
    rng = np.random.default_rng(seed)
    z = _init_guesses(c, rng)
    dp = _pderiv(c)
    for _ in range(maxiter):
        pv = _peval_vec(c, z)
        dv = _peval_vec(dp, z)
        dv = np.where(dv == 0.0, 1e-300, dv)
        w = pv / dv
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - w * s
        denom = np.where(denom == 0.0, 1e-300, denom)
        step = w / denom
        z = z - step
        if np.all(np.abs(step) <= 1e-14 * (1.0 + np.abs(z))):
            break
    return z


CLUSTER_TOL = 1e-7  # ~sqrt(eps) with margin: multiple roots split this wide


def _cluster_means(roots: np.ndarray, tol: float = CLUSTER_TOL) -> np.ndarray:
    # greedy clustering; each cluster replaced by its mean, repeated
    order = np.lexsort((roots.imag, roots.real))
    rs = roots[order]
    out = []
    i = 0
    while i < len(rs):
        j = i + 1
        while j < len(rs) and abs(rs[j] - rs[i]) <= tol * max(1.0, abs(rs[i]), abs(rs[j])):
            j += 1
        cluster = rs[i:j]
        out.extend([cluster.mean()] * len(cluster))
        i = j
    return np.array(out, dtype=complex)


# ---------------------------------------------------------------------------
# rational functions

class ComplexRational:
    """Ratio of two complex-coefficient polynomials in s.

    The denominator is normalized monic; common roots of numerator and
    denominator within `CANCEL_TOL` (relative) are cancelled on reduce().
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1.0,), reduce: bool = True, trim: bool = True):
        # trim=False keeps genuinely tiny leading coefficients (impedance
        # models carry henry-scale terms many orders below the ohm terms)
        clean = _ptrim if trim else _pzero_trim
        self.num = clean(_as_poly(num))
        self.den = clean(_as_poly(den))
        if len(self.den) == 1 and self.den[0] == 0.0:
            raise ZeroDivisionError("denominator is the zero polynomial")
        self._monic()
        if reduce:
            self._cancel()

    def _monic(self):
        lead = self.den[-1]
        self.den = self.den / lead
        self.num = self.num / lead

    def _cancel(self, tol: float = CANCEL_TOL):
        if self.is_zero() or (len(self.num) == 1 or len(self.den) == 1):
            return
        rn = list(poly_roots(self.num))
        rd = list(poly_roots(self.den))
        kept_d = []
        cancelled = False
        for r in rd:
            hit = None
            for i, q in enumerate(rn):
                if abs(q - r) <= tol * max(1.0, abs(q), abs(r)):
                    hit = i
                    break
            if hit is None:
                kept_d.append(r)
            else:
                rn.pop(hit)
                cancelled = True
        if not cancelled:
            return
        lead_n = self.num[-1]
        self.num = lead_n * np.polynomial.polynomial.polyfromroots(rn) \
            if rn else np.array([lead_n], dtype=complex)
        self.den = np.polynomial.polynomial.polyfromroots(kept_d) \
            if kept_d else np.array([1.0], dtype=complex)
        self.num = _pzero_trim(self.num)
        self.den = _pzero_trim(self.den)
        self._monic()

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return len(self.num) == 1 and self.num[0] == 0.0

    def degree(self) -> tuple[int, int]:
        return len(self.num) - 1, len(self.den) - 1

    def poles(self) -> np.ndarray:
        if len(self.den) == 1:
            return np.zeros(0, dtype=complex)
        return poly_roots(self.den)

    def zeros(self) -> np.ndarray:
        if len(self.num) == 1:
            return np.zeros(0, dtype=complex)
        return poly_roots(self.num)

    def reduce(self, tol: float = CANCEL_TOL) -> "ComplexRational":
        out = ComplexRational(self.num, self.den, reduce=False, trim=False)
        out._cancel(tol)
        return out

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if np.array_equal(self.den, other.den):
            return ComplexRational(_padd(self.num, other.num), self.den)
        # shared-factor denominators combine without inflating the degree
        q = _pdivide_exact(self.den, other.den)
        if q is not None:
            return ComplexRational(_padd(self.num, _pmul(other.num, q)), self.den)
        q = _pdivide_exact(other.den, self.den)
        if q is not None:
            return ComplexRational(_padd(other.num, _pmul(self.num, q)), other.den)
        num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
        return ComplexRational(num, _pmul(self.den, other.den))

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return ComplexRational(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self.__add__(_coerce(other).__neg__())

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __mul__(self, other):
        if np.isscalar(other):
            return ComplexRational(self.num * complex(other), self.den, reduce=False)
        other = _coerce(other)
        return ComplexRational(_pmul(self.num, other.num), _pmul(self.den, other.den))

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = _coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        num, den = _pmul(self.num, other.den), _pmul(self.den, other.num)
        q = _pdivide_exact(self.num, other.num)
        if q is not None:
            num, den = _pmul(q, other.den), self.den
        else:
            q = _pdivide_exact(self.den, other.den)
            if q is not None:
                num, den = self.num, _pmul(q, other.num)
        return ComplexRational(num, den)

    def __rtruediv__(self, other):
        return _coerce(other).__truediv__(self)

    def __call__(self, s) -> complex:
        return eval_tf(self, s)

    def __repr__(self):
        return f"ComplexRational(num={self.num!r}, den={self.den!r})"

    def to_dict(self) -> dict:
        return {
            "num_re": self.num.real.tolist(), "num_im": self.num.imag.tolist(),
            "den_re": self.den.real.tolist(), "den_im": self.den.imag.tolist(),
        }


def _coerce(x) -> ComplexRational:
    if isinstance(x, ComplexRational):
        return x
    if np.isscalar(x):
        return ComplexRational([complex(x)], [1.0], reduce=False)
    raise TypeError(f"cannot interpret {type(x).__name__} as ComplexRational")


# spec'd operation surface (thin wrappers over the operators)

def add(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    return _coerce(a) + b


def mul(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    return _coerce(a) * b


def div(a: ComplexRational, b: ComplexRational) -> ComplexRational:
    return _coerce(a) / _coerce(b)


def neg(a: ComplexRational) -> ComplexRational:
    return -_coerce(a)


def scalar_mul(a: ComplexRational, k) -> ComplexRational:
    return _coerce(a) * k


def parallel(zs: list) -> ComplexRational:
    """Parallel combination (sum of reciprocals, inverted)."""
    if not zs:
        raise ValueError("parallel() needs a nonempty list")
    zs = [_coerce(z) for z in zs]
    if any(z.is_zero() for z in zs):
        raise ValueError("parallel() element is identically zero")
    first = zs[0]
    if all(np.array_equal(z.num, first.num) and np.array_equal(z.den, first.den)
           for z in zs[1:]):
        return scalar_mul(first, 1.0 / len(zs))  # exact for identical branches
    y = ComplexRational(first.den, first.num)
    for z in zs[1:]:
        y = y + ComplexRational(z.den, z.num)
    return ComplexRational(y.den, y.num)


def shift(h: ComplexRational, f1: float) -> ComplexRational:
    """h evaluated at argument s - j*2*pi*f1, returned as a rational in s."""
    dz = -2j * np.pi * f1
    return ComplexRational(_pshift(h.num, dz), _pshift(h.den, dz), reduce=False)


def eval_tf(h: ComplexRational, s) -> complex:
    dv = _peval(h.den, s)
    if dv == 0.0:
        raise ZeroDivisionError(f"evaluation at a pole: s={s}")
    return _peval(h.num, s) / dv
