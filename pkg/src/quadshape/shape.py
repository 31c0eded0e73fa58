"""Shape functional, boundary gradient, and shape Hessian routes.

The state u solves -lap(u) = f in the region bounded by the curve with
u = 0 on the boundary, where f is a disjoint union of uniform disks kept
away from the boundary.  The shape functional is

    J = -1/2 integral |grad u|^2 dx + (k^2 / 2) |Omega|,

whose critical points satisfy -du/dnu = k on the whole boundary.  The first
variation is carried by the boundary density psi = k^2 - u_nu^2; the
functions below expose its boundary integral, several independent routes to
the second variation, finite-difference arbiters for both, and spectral
stability diagnostics built on the Dirichlet-to-Neumann map.

Conventions worth stating once: the boundary integral sum(psi * alpha * w)
is reported as printed, while finite differences of J along normal flows
consistently produce half of it; the ratio is reported, never silently
absorbed (a ``factor`` argument lets callers rescale).  Likewise the
pointwise second-variation density is computed in both curvature
orientation conventions, and the Steklov-type quadratic form is kept
separate from the finite-difference arbiter that disagrees with it on the
breathing mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bem import AccuracyWarning, BoundaryOperators, get_operators
from .geometry import (Curve, GeometryError, MetricParams, NormalField,
                       flow_curve, metric_inner)
from .potential import (SourceTerm, clearance_margin, eval_potential,
                        eval_potential_gradient, source_quadrature)
from .riemannian import covariant_derivative


def _values(direction, n):
    v = direction.values if isinstance(direction, NormalField) else np.asarray(direction, dtype=float)
    if v.shape != (n,):
        raise GeometryError("direction must live on the curve grid")
    return v


def _as_field(direction, n):
    if isinstance(direction, NormalField):
        return direction
    return NormalField(np.asarray(direction, dtype=float))


@dataclass
class ShapeState:
    """Solved state on one curve: layer density, Neumann trace, gradient
    density psi = k^2 - u_nu^2, and the operator bundle that produced them."""

    curve: Curve
    source: SourceTerm
    k: float
    ops: BoundaryOperators
    density: object
    u_nu: np.ndarray
    psi: np.ndarray
    _J: dict = field(default_factory=dict, repr=False)


def solve_state(curve, source, k, require_clearance=True):
    """Solve the Dirichlet state on the curve and collect boundary data.

    The particular solution is the closed-form disk potential; the harmonic
    correction comes from a single-layer solve against minus its trace, so
    u = 0 on the boundary holds by construction and u_nu is assembled from
    the closed-form gradient plus the density's jump relation.
    """
    if not np.isfinite(k) or k <= 0:
        raise ValueError("k must be positive")
    if require_clearance and clearance_margin(source, curve) < 0.0:
        raise GeometryError("source disks must sit inside the curve with one "
                            "radius of clearance to the boundary")
    ops = get_operators(curve)
    trace = eval_potential(source, curve.points)
    density = ops.solve_dirichlet(-trace)
    grad_p = eval_potential_gradient(source, curve.points)
    u_nu = np.sum(grad_p * curve.normal, axis=1) + ops.neumann_trace(density)
    psi = k**2 - u_nu**2
    return ShapeState(curve, source, float(k), ops, density, u_nu, psi)


def evaluate_J(state, n_radial=32, n_angular=64):
    """Shape functional via integration by parts: integral |grad u|^2 = integral f u."""
    key = (n_radial, n_angular)
    if key not in state._J:
        pts, wts, dens = source_quadrature(state.source, n_radial, n_angular)
        u = eval_potential(state.source, pts)
        u = u + state.ops.eval_interior(state.density, pts)
        energy = float(np.sum(wts * dens * u))
        state._J[key] = -0.5 * energy + 0.5 * state.k**2 * state.curve.area
    return state._J[key]


def hadamard_derivative(state, direction, factor=1.0):
    """Boundary form of the first variation: factor * sum(psi * alpha * w).

    With factor = 1 this is the raw boundary integral; finite differences of
    J along the same flow consistently fit factor = 1/2 (see
    ``fd_first_derivative``), and the ratio is surfaced in reports.
    """
    alpha = _values(direction, state.curve.n)
    return factor * float(np.sum(state.psi * alpha * state.curve.weights))


def fd_first_derivative(curve, source, k, direction, t_step=None):
    """Central finite difference of t -> J(curve flowed by direction)."""
    if t_step is None:
        t_step = 1e-3 * curve.diameter
    vals = {}
    for t in (t_step, -t_step, 0.5 * t_step, -0.5 * t_step):
        ct = flow_curve(curve, direction, t, validate=False)
        vals[t] = evaluate_J(solve_state(ct, source, k))
    coarse = (vals[t_step] - vals[-t_step]) / (2.0 * t_step)
    fine = (vals[0.5 * t_step] - vals[-0.5 * t_step]) / t_step
    return (4.0 * fine - coarse) / 3.0


# -- second variation routes ----------------------------------------------


def steklov_form(state, a, b=None):
    """Curvature-Steklov quadratic form of the second variation at a
    critical shape:  k^2 ( integral a L b ds - integral kappa a b ds ).

    L is the Dirichlet-to-Neumann map.  On the critical disk this
    diagonalizes in the Fourier basis with values k^2 pi (n - 1) per unit
    mode; note the breathing mode n = 0 comes out negative here while the
    finite-difference arbiter gives the same magnitude with positive sign.
    That discrepancy is reported side by side, not resolved.
    """
    av = _values(a, state.curve.n)
    bv = av if b is None else _values(b, state.curve.n)
    w = state.curve.weights
    dtn_term = float(np.sum(av * state.ops.dtn_apply(bv) * w))
    curv_term = float(np.sum(state.curve.kappa * av * bv * w))
    return state.k**2 * (dtn_term - curv_term)


def psi_normal_derivative(state, method="interior", eps=None):
    """Normal derivative of the gradient density psi = k^2 - |grad u|^2.

    method "interior": closed form 2 kappa u_nu^2, from u_nunu = -kappa u_nu
    (the source vanishes near the boundary and the tangential trace of u is
    constant).
    method "mirror": -2 kappa u_nu^2, the same expression with curvature
    measured against the inward normal; kept for side-by-side reporting.
    method "sampled": one-sided second-order difference of |grad u|^2
    sampled a short distance inside along -nu; a cross-check of the closed
    form, accurate only to a few percent (the sampling depth trades
    quadrature decay against stencil truncation), and it assumes the sample
    points stay outside the source disks.
    """
    kap = state.curve.kappa
    if method == "interior":
        return 2.0 * kap * state.u_nu**2
    if method == "mirror":
        return -2.0 * kap * state.u_nu**2
    if method != "sampled":
        raise ValueError("method must be 'interior', 'mirror', or 'sampled'")
    if eps is None:
        eps = 4.0 * state.curve.diameter / state.curve.n
    g0 = state.u_nu**2
    samples = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        for d in (eps, 2.0 * eps):
            pts = state.curve.points - d * state.curve.normal
            grad = eval_potential_gradient(state.source, pts)
            grad = grad + state.ops.eval_interior_gradient(state.density, pts)
            samples.append(np.sum(grad * grad, axis=1))
    # d g / d nu from values at 0, -eps, -2 eps (second order one-sided)
    dg = (3.0 * g0 - 4.0 * samples[0] + samples[1]) / (2.0 * eps)
    return -dg


def direct_hessian_form(state, a, b=None, state_term=True, dpsi_method="interior"):
    """Direct boundary evaluation of the metric Hessian form.

    The derivative of the boundary gradient integral along a normal flow
    splits into the state sensitivity (the harmonic extension term, carrying
    the Steklov operator) and a pointwise part:

        sum 2 u_nu L(u_nu a) b w  +  sum (dpsi/dnu + kappa psi) a b w.

    With ``state_term`` the value matches the flow route
    (``flow_hessian_form``) up to the connection correction, which vanishes
    at critical shapes.  Without it only the pointwise density remains,
    which on the critical disk reduces to +/- 2 k^2 sum(kappa a b w)
    depending on ``dpsi_method``.  The form carries no metric parameter: it
    is independent of A by construction.
    """
    av = _values(a, state.curve.n)
    bv = av if b is None else _values(b, state.curve.n)
    w = state.curve.weights
    kap = state.curve.kappa
    dpsi = psi_normal_derivative(state, dpsi_method)
    total = float(np.sum((dpsi + kap * state.psi) * av * bv * w))
    if state_term:
        sens = state.ops.dtn_apply(state.u_nu * av)
        total += 2.0 * float(np.sum(state.u_nu * sens * bv * w))
    return total


def flow_hessian_form(state, a, b, A=1.0, t_step=1e-3, factor=1.0):
    """Hessian form as derivative of the gradient along a flow.

    Central-differences t -> hadamard_derivative on the curve flowed by a
    (the weight field b rides along node-to-node) and subtracts the gradient
    against the covariant derivative nabla_a b, so the result is the metric
    Hessian form evaluated through the connection.
    """
    n = state.curve.n
    af = _as_field(a, n)
    bf = _as_field(b, n)
    params = MetricParams(A=A, k=state.k)
    vals = []
    for t in (t_step, -t_step):
        ct = flow_curve(state.curve, af, t, validate=False)
        st = solve_state(ct, state.source, state.k)
        vals.append(hadamard_derivative(st, bf.values, factor))
    first = (vals[0] - vals[1]) / (2.0 * t_step)
    nabla = covariant_derivative(state.curve, params, af, bf)
    second = hadamard_derivative(state, nabla.values, factor)
    return first - second


@dataclass(frozen=True)
class SecondDifference:
    """Result of the finite-difference second derivative of J."""

    value: float
    coarse: float
    fine: float
    richardson_delta: float
    step: float
    retries: int


def fd_second_derivative(curve, source, k, direction, t_step=None,
                         source_velocity=None, max_retries=5):
    """Richardson-extrapolated second difference of J along a normal flow.

    Five-point stencil: central second differences at steps t and t/2 are
    combined to fourth order; their gap is reported as a convergence
    indicator.  If a flowed curve self-intersects or violates source
    clearance the step shrinks by 4, up to ``max_retries`` times.
    ``source_velocity`` translates the source with the flow, which makes J
    exactly invariant along rigid translations (direction <e, nu> with
    velocity e).
    """
    if t_step is None:
        t_step = 1e-3 * curve.diameter
    j0 = evaluate_J(solve_state(curve, source, k))

    def j_at(t):
        ct = flow_curve(curve, direction, t)
        src = source if source_velocity is None else source.translated(
            (t * source_velocity[0], t * source_velocity[1]))
        return evaluate_J(solve_state(ct, src, k))

    retries = 0
    while True:
        try:
            half = 0.5 * t_step
            jp, jm = j_at(t_step), j_at(-t_step)
            jph, jmh = j_at(half), j_at(-half)
            break
        except GeometryError:
            retries += 1
            if retries > max_retries:
                raise
            t_step *= 0.25
    coarse = (jp - 2.0 * j0 + jm) / t_step**2
    fine = (jph - 2.0 * j0 + jmh) / half**2
    value = (4.0 * fine - coarse) / 3.0
    return SecondDifference(value, coarse, fine, abs(value - fine),
                            t_step, retries)


# -- aggregated reports ----------------------------------------------------


HESSIAN_ROUTES = ("fd", "flow", "direct", "direct_local",
                  "direct_local_mirror", "steklov")


@dataclass
class HessianReport:
    """All second-variation routes over a direction basis, plus fits."""

    labels: list
    A: float
    k: float
    t_step: float
    pairs: list
    fitted_slopes: dict
    max_flow_asymmetry: float

    def to_dict(self):
        return {
            "directions": list(self.labels),
            "A": self.A,
            "k": self.k,
            "t_step": self.t_step,
            "pairs": self.pairs,
            "fitted_slopes": self.fitted_slopes,
            "max_flow_asymmetry": self.max_flow_asymmetry,
        }


def hessian_report(state, directions, A=1.0, t_step=1e-3, with_fd=True):
    """Evaluate every Hessian route on all direction pairs.

    ``directions`` is a list of mode labels ('const', 'cos2', ...) or normal
    fields.  The flow route shares two state solves per direction across all
    pairs; finite differences on off-diagonal pairs use the polarization
    identity.  Fitted slopes regress each route against the
    finite-difference column (or the flow column when fd is disabled).
    """
    curve, source, k = state.curve, state.source, state.k
    n = curve.n
    labels = []
    fields = []
    for d in directions:
        if isinstance(d, str):
            labels.append(d)
            fields.append(NormalField.from_mode(d, n))
        else:
            labels.append(f"field{len(labels)}")
            fields.append(_as_field(d, n))
    params = MetricParams(A=A, k=k)

    # two solves per direction cover the flow route for every ordered pair
    flow_states = []
    for f in fields:
        pair = []
        for t in (t_step, -t_step):
            ct = flow_curve(curve, f, t, validate=False)
            pair.append(solve_state(ct, source, k))
        flow_states.append(pair)

    def flow_value(i, j):
        sp, sm = flow_states[i]
        first = (hadamard_derivative(sp, fields[j].values)
                 - hadamard_derivative(sm, fields[j].values)) / (2.0 * t_step)
        nabla = covariant_derivative(curve, params, fields[i], fields[j])
        return first - hadamard_derivative(state, nabla.values)

    fd_cache = {}

    def fd_diag(vals):
        key = vals.tobytes()
        if key not in fd_cache:
            fd_cache[key] = fd_second_derivative(curve, source, k, vals,
                                                 t_step=t_step).value
        return fd_cache[key]

    pairs = []
    asym = 0.0
    for i in range(len(fields)):
        for j in range(i, len(fields)):
            ai, aj = fields[i].values, fields[j].values
            row = {"i": i, "j": j, "pair": f"{labels[i]}*{labels[j]}"}
            if with_fd:
                if i == j:
                    row["fd"] = fd_diag(ai)
                else:
                    qp = fd_diag(ai + aj)
                    qm = fd_diag(ai - aj)
                    row["fd"] = 0.25 * (qp - qm)
            row["flow"] = flow_value(i, j)
            flow_t = flow_value(j, i)
            row["flow_transposed"] = flow_t
            asym = max(asym, abs(row["flow"] - flow_t))
            row["direct"] = direct_hessian_form(state, ai, aj)
            row["direct_local"] = direct_hessian_form(state, ai, aj,
                                                      state_term=False)
            row["direct_local_mirror"] = direct_hessian_form(
                state, ai, aj, state_term=False, dpsi_method="mirror")
            row["steklov"] = steklov_form(state, ai, aj)
            pairs.append(row)

    ref_key = "fd" if with_fd else "flow"
    ref = np.array([p[ref_key] for p in pairs])
    fitted = {}
    denom = float(np.sum(ref * ref))
    for route in HESSIAN_ROUTES:
        if route == ref_key or route not in pairs[0]:
            continue
        col = np.array([p[route] for p in pairs])
        fitted[route] = float(np.sum(col * ref) / denom) if denom > 0 else float("nan")
    return HessianReport(labels, A, k, t_step, pairs, fitted, asym)


# -- stability diagnostics -------------------------------------------------


def symmetric_spectrum(matrix, weights):
    """Eigendecomposition of an operator symmetric in the weighted inner
    product sum(a b w): returns ascending eigenvalues and eigenvectors
    orthonormal in that product, with a deterministic sign convention."""
    s = np.sqrt(weights)
    sym = (matrix * s[:, None]) / s[None, :]
    sym = 0.5 * (sym + sym.T)
    vals, vecs = np.linalg.eigh(sym)
    vecs = vecs / s[:, None]
    for col in range(vecs.shape[1]):
        pivot = int(np.argmax(np.abs(vecs[:, col])))
        if vecs[pivot, col] < 0:
            vecs[:, col] = -vecs[:, col]
    return vals, vecs


@dataclass
class StabilityReport:
    """Curvature controls and spectral coercivity data for one state."""

    total_curvature: float
    min_kappa: float
    max_kappa: float
    argmin_index: int
    argmin_point: tuple
    negative_part_sup: float
    eigenvalues_minus: np.ndarray
    lambda0_minus: float
    phi0_minus: np.ndarray
    eigenvalues_plus: np.ndarray
    lambda0_plus: float
    phi0_plus: np.ndarray
    verdicts: dict
    remarks: dict

    def to_dict(self, max_eigs=None):
        em = self.eigenvalues_minus
        ep = self.eigenvalues_plus
        if max_eigs is not None:
            em, ep = em[:max_eigs], ep[:max_eigs]
        return {
            "total_curvature": self.total_curvature,
            "min_kappa": self.min_kappa,
            "max_kappa": self.max_kappa,
            "argmin_index": self.argmin_index,
            "argmin_point": list(self.argmin_point),
            "negative_part_sup": self.negative_part_sup,
            "eigenvalues_minus": list(em),
            "lambda0_minus": self.lambda0_minus,
            "eigenvalues_plus": list(ep),
            "lambda0_plus": self.lambda0_plus,
            "verdicts": dict(self.verdicts),
            "remarks": dict(self.remarks),
        }


def stability_controls(state):
    """Curvature sign controls and the spectra of k^2 (L -+ kappa).

    Both operator signs are assembled because they genuinely disagree and
    only the finite-difference data can adjudicate: the minus sign follows
    the Steklov quadratic form above, the plus sign is the variant whose
    spectrum matches the arbiter on the critical disk.  Eigenproblems are
    posed in the arclength inner product.
    """
    curve, k = state.curve, state.k
    kap = curve.kappa
    w = curve.weights
    L = state.ops.dtn_matrix
    total = float(np.sum(kap * w))
    imin = int(np.argmin(kap))

    m_minus = k**2 * (L - np.diag(kap))
    m_plus = k**2 * (L + np.diag(kap))
    vals_m, vecs_m = symmetric_spectrum(m_minus, w)
    vals_p, vecs_p = symmetric_spectrum(m_plus, w)

    verdicts = {
        "total_curvature_nonpositive": bool(total <= 0.0),
        "negative_curvature_point": bool(kap[imin] < 0.0),
        "coercive_minus": bool(vals_m[0] > 0.0),
        "coercive_plus": bool(vals_p[0] > 0.0),
    }
    remarks = {
        "total_curvature": (
            "total curvature of a simple closed planar curve is always +2 pi "
            "(rotation index one), so this control cannot certify stability "
            "in the plane"),
        "pointwise": (
            "a boundary point with negative curvature certifies a strict "
            "local minimum through the pointwise control"
            if verdicts["negative_curvature_point"] else
            "curvature is nonnegative everywhere; the pointwise control "
            "does not apply"),
    }
    return StabilityReport(
        total_curvature=total,
        min_kappa=float(kap[imin]),
        max_kappa=float(np.max(kap)),
        argmin_index=imin,
        argmin_point=(float(curve.points[imin, 0]), float(curve.points[imin, 1])),
        negative_part_sup=float(max(-kap[imin], 0.0)),
        eigenvalues_minus=vals_m,
        lambda0_minus=float(vals_m[0]),
        phi0_minus=vecs_m[:, 0],
        eigenvalues_plus=vals_p,
        lambda0_plus=float(vals_p[0]),
        phi0_plus=vecs_p[:, 0],
        verdicts=verdicts,
        remarks=remarks,
    )
