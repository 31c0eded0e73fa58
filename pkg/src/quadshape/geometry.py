"""Spectral geometry of smooth closed planar curves.

A curve is sampled at N equispaced parameter values theta_j = 2*pi*j/N and
every derivative is taken through the FFT, so all geometric quantities
(tangent, outward normal, curvature, arclength weights) inherit spectral
accuracy for smooth curves.  Orientation is counterclockwise throughout: the
signed area is positive, the normal points outward, and the curvature of a
counterclockwise convex curve is positive (a circle of radius R has
curvature 1/R everywhere).

The module also carries the scalar normal fields that represent tangent
vectors to the manifold of curves, the curvature-weighted metric

    G(h, m) = integral (1 + A*kappa^2) * alpha * beta ds,   h = alpha*nu,

and the basic operations on them: inner products, normal flows, and
resampling to uniform arclength.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi

MIN_SAMPLES = 16


class GeometryError(ValueError):
    """A curve failed validation: bad grid, orientation, or self-intersection."""


def _check_even(n):
    if n < MIN_SAMPLES or n % 2 != 0:
        raise GeometryError(f"need an even sample count >= {MIN_SAMPLES}, got {n}")


def spectral_derivative(values, order=1):
    """Differentiate equispaced periodic samples through the FFT.

    Exact (to roundoff) for trigonometric polynomials resolved by the grid.
    For odd derivative orders the Nyquist mode is dropped, as it carries no
    consistent derivative on a real grid.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    _check_even(n)
    if not np.all(np.isfinite(values)):
        raise GeometryError("samples must be finite")
    k = np.fft.fftfreq(n, d=1.0 / n)
    if order % 2 == 1:
        k = k.copy()
        k[n // 2] = 0.0
    out = np.fft.ifft(np.fft.fft(values, axis=0) * (1j * k) ** order, axis=0)
    return np.ascontiguousarray(out.real)


def spectral_lowpass(values, keep):
    """Zero all Fourier modes above ``keep`` in equispaced periodic samples."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    _check_even(n)
    coef = np.fft.rfft(values)
    coef[int(keep) + 1:] = 0.0
    return np.fft.irfft(coef, n)


def trig_interpolate(values, theta):
    """Evaluate the trigonometric interpolant of real equispaced samples.

    The Nyquist mode is kept as a pure cosine, which is the unique real
    symmetric choice on an even grid.  Cost O(len(theta) * n); the grids in
    this package are small enough that no fast transform is needed.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    _check_even(n)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    coef = np.fft.rfft(values)
    m = np.arange(n // 2 + 1)
    amp = np.full(n // 2 + 1, 2.0)
    amp[0] = 1.0
    amp[-1] = 1.0
    phase = theta[:, None] * m[None, :]
    out = (np.cos(phase) @ (amp * coef.real) - np.sin(phase) @ (amp * coef.imag)) / n
    return out


def _cross2(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _segments_intersect_any(points):
    """True if any two non-adjacent edges of the closed polygon cross properly."""
    n = len(points)
    a = points
    b = np.roll(points, -1, axis=0)
    edge = b - a
    for i in range(n - 2):
        # candidate partners: all later edges except the neighbours of i
        j0 = i + 2
        j1 = n if i > 0 else n - 1
        if j0 >= j1:
            continue
        c = a[j0:j1]
        d = b[j0:j1]
        e = edge[i]
        d1 = _cross2(e, c - a[i])
        d2 = _cross2(e, d - a[i])
        f = d - c
        d3 = _cross2(f, a[i] - c)
        d4 = _cross2(f, b[i] - c)
        if np.any((d1 * d2 < 0.0) & (d3 * d4 < 0.0)):
            return True
    return False


class Curve:
    """Closed counterclockwise curve with spectrally computed geometry.

    Parameters
    ----------
    points : (n, 2) array
        Samples c(theta_j) at theta_j = 2*pi*j/n; n must be a power of two.
    validate : bool
        Run orientation, regularity, and simplicity checks (default True).

    Attributes computed once at construction: ``theta``, ``c_theta`` (first
    parameter derivative), ``speed`` (|c_theta|), ``tangent``, ``normal``
    (outward unit), ``kappa`` (curvature), ``weights`` (arclength quadrature
    weights |c_theta| * 2*pi/n).
    """

    def __init__(self, points, validate=True):
        points = np.array(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2:
            raise GeometryError("points must have shape (n, 2)")
        n = points.shape[0]
        _check_even(n)
        if n & (n - 1):
            raise GeometryError(f"sample count must be a power of two, got {n}")
        if not np.all(np.isfinite(points)):
            raise GeometryError("curve points must be finite")

        self.points = points
        self.n = n
        self.theta = TWO_PI * np.arange(n) / n

        z = points[:, 0] + 1j * points[:, 1]
        zh = np.fft.fft(z)
        k = np.fft.fftfreq(n, d=1.0 / n)
        k1 = k.copy()
        k1[n // 2] = 0.0
        zp = np.fft.ifft(zh * 1j * k1)
        zpp = np.fft.ifft(zh * (1j * k) ** 2)

        self.c_theta = np.column_stack([zp.real, zp.imag])
        self.speed = np.abs(zp)
        tang = zp / self.speed if np.all(self.speed > 0) else zp
        self.tangent = np.column_stack([tang.real, tang.imag])
        nrm = -1j * tang
        self.normal = np.column_stack([nrm.real, nrm.imag])
        self.kappa = (np.conj(zp) * zpp).imag / self.speed**3
        self.weights = self.speed * (TWO_PI / n)
        # signed area via the shoelace integral 0.5 * integral (x y' - y x')
        self.area = 0.5 * (TWO_PI / n) * float(np.sum((np.conj(z) * zp).imag))
        self.perimeter = float(np.sum(self.weights))

        for arr in (self.points, self.c_theta, self.tangent, self.normal,
                    self.kappa, self.weights, self.theta, self.speed):
            arr.setflags(write=False)

        if validate:
            self._validate()

    def _validate(self):
        smax = float(np.max(self.speed))
        if smax == 0.0 or float(np.min(self.speed)) < 1e-12 * smax:
            raise GeometryError("parametrization is degenerate (vanishing speed)")
        if self.area <= 0.0:
            raise GeometryError("curve must be counterclockwise (signed area > 0)")
        if _segments_intersect_any(self.points):
            raise GeometryError("curve is not simple (self-intersection detected)")

    # -- constructors ------------------------------------------------------

    @classmethod
    def circle(cls, radius=1.0, n=256, center=(0.0, 0.0)):
        if radius <= 0:
            raise GeometryError("radius must be positive")
        th = TWO_PI * np.arange(n) / n
        pts = np.column_stack([center[0] + radius * np.cos(th),
                               center[1] + radius * np.sin(th)])
        return cls(pts)

    @classmethod
    def ellipse(cls, a, b, n=256, center=(0.0, 0.0)):
        if a <= 0 or b <= 0:
            raise GeometryError("semi-axes must be positive")
        th = TWO_PI * np.arange(n) / n
        pts = np.column_stack([center[0] + a * np.cos(th),
                               center[1] + b * np.sin(th)])
        return cls(pts)

    @classmethod
    def from_radial(cls, r0=1.0, cos=None, sin=None, n=256):
        """Star-shaped curve r(theta) = r0 + sum a_j cos(j theta) + b_j sin(j theta).

        ``cos`` and ``sin`` are mappings from mode number to amplitude.
        """
        th = TWO_PI * np.arange(n) / n
        r = np.full(n, float(r0))
        for j, amp in (cos or {}).items():
            r += amp * np.cos(int(j) * th)
        for j, amp in (sin or {}).items():
            r += amp * np.sin(int(j) * th)
        if np.any(r <= 0):
            raise GeometryError("radial profile must stay positive")
        return cls(np.column_stack([r * np.cos(th), r * np.sin(th)]))

    # -- derived quantities ------------------------------------------------

    @property
    def diameter(self):
        d = getattr(self, "_diameter", None)
        if d is None:
            p = self.points
            d = 0.0
            for i in range(self.n):
                d = max(d, float(np.max(np.sum((p - p[i]) ** 2, axis=1))))
            d = float(np.sqrt(d))
            self._diameter = d
        return d

    def scaled(self, factor):
        if factor <= 0:
            raise GeometryError("scale factor must be positive")
        return Curve(self.points * factor, validate=False)

    def translated(self, shift):
        return Curve(self.points + np.asarray(shift, dtype=float), validate=False)

    def interpolate_points(self, theta):
        """Trigonometric interpolation of the curve at arbitrary parameters."""
        x = trig_interpolate(self.points[:, 0], theta)
        y = trig_interpolate(self.points[:, 1], theta)
        return np.column_stack([x, y])

    def __repr__(self):
        return (f"Curve(n={self.n}, area={self.area:.6g}, "
                f"perimeter={self.perimeter:.6g})")


@dataclass(frozen=True)
class NormalField:
    """Scalar field alpha on a curve grid, representing the flow alpha * nu.

    ``normal_derivative`` holds d(alpha)/d(nu) for fields that come with an
    ambient extension; it defaults to zero, which means values are carried
    node-to-node when the curve moves (Lagrangian transport).
    """

    values: np.ndarray
    normal_derivative: np.ndarray = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise GeometryError("field values must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise GeometryError("field values must be finite")
        nd = self.normal_derivative
        nd = np.zeros_like(values) if nd is None else np.asarray(nd, dtype=float)
        if nd.shape != values.shape or not np.all(np.isfinite(nd)):
            raise GeometryError("normal_derivative must match values and be finite")
        values.setflags(write=False)
        nd.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "normal_derivative", nd)

    @property
    def n(self):
        return self.values.shape[0]

    @classmethod
    def constant(cls, value, n):
        return cls(np.full(n, float(value)))

    @classmethod
    def from_mode(cls, spec, n):
        """Build a Fourier direction from a label: 'const', 'cos3', 'sin2'.

        The numeral is the angular mode; 'const' (or '1') is the unit field.
        """
        th = TWO_PI * np.arange(n) / n
        s = spec.strip().lower()
        if s in ("const", "1"):
            return cls(np.ones(n))
        for prefix, fn in (("cos", np.cos), ("sin", np.sin)):
            if s.startswith(prefix) and s[len(prefix):].isdigit():
                j = int(s[len(prefix):])
                if j < 1:
                    break
                return cls(fn(j * th))
        raise GeometryError(f"unknown direction spec {spec!r}")


@dataclass(frozen=True)
class MetricParams:
    """Parameters of the curvature-weighted metric and the Neumann target.

    A >= 0 scales the kappa^2 weight (A = 0 degenerates to the plain L^2
    arclength metric and is accepted with a diagnostic warning); k > 0 is the
    prescribed magnitude of the normal derivative on the free boundary.
    """

    A: float = 1.0
    k: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.A) or self.A < 0:
            raise ValueError("A must be a finite number >= 0")
        if not np.isfinite(self.k) or self.k <= 0:
            raise ValueError("k must be positive")
        if self.A == 0:
            warnings.warn("A = 0 gives the plain L^2 metric; curvature weighting "
                          "is disabled", stacklevel=2)


def _field_values(field):
    return field.values if isinstance(field, NormalField) else np.asarray(field, dtype=float)


def metric_weight(curve, params):
    """Pointwise metric density 1 + A * kappa^2."""
    return 1.0 + params.A * curve.kappa**2


def metric_inner(curve, params, a, b):
    """Curvature-weighted inner product integral (1 + A kappa^2) a b ds."""
    av = _field_values(a)
    bv = _field_values(b)
    if av.shape[0] != curve.n or bv.shape[0] != curve.n:
        raise GeometryError("fields must live on the curve grid")
    return float(np.sum(metric_weight(curve, params) * av * bv * curve.weights))


def metric_norm(curve, params, a):
    return float(np.sqrt(max(metric_inner(curve, params, a, a), 0.0)))


def flow_curve(curve, field, t, validate=True):
    """Move the curve by t along the normal field: c + t * alpha * nu."""
    av = _field_values(field)
    if av.shape[0] != curve.n:
        raise GeometryError("field must live on the curve grid")
    return Curve(curve.points + t * av[:, None] * curve.normal, validate=validate)


def resample_by_arclength(curve, newton_tol=1e-13, max_newton=50):
    """Redistribute the nodes to uniform arclength spacing.

    The cumulative arclength of the trigonometric interpolant is inverted
    with Newton's method and the curve is re-sampled at the preimages of a
    uniform arclength grid.  The basepoint theta = 0 is kept fixed.  For
    smooth curves the enclosed area changes only at the level of the
    interpolation error.
    """
    n = curve.n
    coef = np.fft.rfft(curve.speed)
    sbar = coef[0].real / n
    m = np.arange(n // 2 + 1)
    amp = np.full(n // 2 + 1, 2.0)
    amp[0] = 0.0
    amp[-1] = 1.0
    cr = np.where(m > 0, coef.real / np.maximum(m, 1), 0.0)
    ci = np.where(m > 0, coef.imag / np.maximum(m, 1), 0.0)

    def arclen(th):
        # cumulative arclength s(theta) = sbar*theta + periodic part, s(0) = 0;
        # the periodic part is the termwise antiderivative of speed - sbar
        phase = th[:, None] * m[None, :]
        anti = (np.sin(phase) @ (amp * cr) + (np.cos(phase) - 1.0) @ (amp * ci)) / n
        deriv = trig_interpolate(curve.speed, th)
        return sbar * th + anti, deriv

    total = curve.perimeter
    targets = total * np.arange(n) / n
    th = targets / sbar
    for _ in range(max_newton):
        s_val, s_der = arclen(th)
        step = (s_val - targets) / s_der
        th = th - step
        if float(np.max(np.abs(step))) < newton_tol * TWO_PI:
            break
    th[0] = 0.0
    return Curve(curve.interpolate_points(th))


# -- serialization ---------------------------------------------------------

CURVE_CSV_HEADER = "theta,x,y,nx,ny,kappa,w"


def curve_to_csv(curve):
    """Serialize the curve grid and its derived geometry to CSV text."""
    buf = io.StringIO()
    buf.write(CURVE_CSV_HEADER + "\n")
    cols = (curve.theta, curve.points[:, 0], curve.points[:, 1],
            curve.normal[:, 0], curve.normal[:, 1], curve.kappa, curve.weights)
    for row in zip(*cols):
        buf.write(",".join(format(v, ".17g") for v in row) + "\n")
    return buf.getvalue()


def curve_from_csv(text):
    """Rebuild a Curve from its CSV serialization (geometry columns are
    recomputed from the points and checked against the stored values)."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CURVE_CSV_HEADER:
        raise GeometryError(f"expected CSV header {CURVE_CSV_HEADER!r}")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    if data.ndim != 2 or data.shape[1] != 7:
        raise GeometryError("curve CSV must have 7 columns")
    curve = Curve(data[:, 1:3])
    if not np.allclose(curve.theta, data[:, 0], atol=1e-12):
        raise GeometryError("theta column is not the uniform grid")
    return curve
