"""Bezier polynomials on [0, 1] in the Bernstein basis.

Coefficient arrays have shape (degree + 1,) or (degree + 1, n_channels).
"""

from __future__ import annotations

import numpy as np

from .errors import FitToleranceExceeded


def bernstein_matrix(degree, tau):
    """Rows: evaluation points, columns: Bernstein basis b_{k,degree}(tau)."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    k = np.arange(degree + 1)
    binom = np.array([_binom(degree, i) for i in k], dtype=float)
    t = tau[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        mat = binom * t ** k * (1.0 - t) ** (degree - k)
    # 0**0 at the endpoints
    mat = np.where(np.isfinite(mat), mat, 0.0)
    mat[tau == 0.0, :] = 0.0
    mat[tau == 0.0, 0] = 1.0
    mat[tau == 1.0, :] = 0.0
    mat[tau == 1.0, degree] = 1.0
    return mat


def _binom(n, k):
    out = 1.0
    for i in range(k):
        out = out * (n - i) / (i + 1)
    return out


def bezier_value(coeffs, tau):
    coeffs = np.asarray(coeffs, dtype=float)
    if np.isscalar(tau) or np.ndim(tau) == 0:
        return _de_casteljau(coeffs, float(tau))
    deg = coeffs.shape[0] - 1
    return bernstein_matrix(deg, tau) @ coeffs


def _de_casteljau(coeffs, t):
    b = coeffs
    while b.shape[0] > 1:
        b = (1.0 - t) * b[:-1] + t * b[1:]
    return b[0]


def bezier_derivative_coeffs(coeffs):
    """Control points of d/dtau of the curve (degree drops by one)."""
    coeffs = np.asarray(coeffs, dtype=float)
    deg = coeffs.shape[0] - 1
    if deg == 0:
        return np.zeros_like(coeffs[:1])
    return deg * np.diff(coeffs, axis=0)


def bezier_deriv(coeffs, tau):
    return bezier_value(bezier_derivative_coeffs(coeffs), tau)


def bezier_second_deriv(coeffs, tau):
    return bezier_value(
        bezier_derivative_coeffs(bezier_derivative_coeffs(coeffs)), tau
    )


def fit_bezier(tau, values, degree, deriv=None, deriv_weight=1e-2,
               pin_endpoints=True):
    """Least-squares Bernstein fit; optionally matches d(values)/dtau data.

    With pin_endpoints the first/last control points are set to the first/last
    samples exactly (requires tau[0] == 0, tau[-1] == 1).
    """
    tau = np.asarray(tau, dtype=float)
    values = np.asarray(values, dtype=float)
    single = values.ndim == 1
    vals = values[:, None] if single else values
    a_pos = bernstein_matrix(degree, tau)
    rows = [a_pos]
    rhs = [vals]
    if deriv is not None:
        dv = np.asarray(deriv, dtype=float)
        dv = dv[:, None] if single else dv
        # derivative operator in coefficient space: deg * diff
        diff_op = np.zeros((degree, degree + 1))
        for i in range(degree):
            diff_op[i, i] = -degree
            diff_op[i, i + 1] = degree
        a_der = bernstein_matrix(degree - 1, tau) @ diff_op
        rows.append(deriv_weight * a_der)
        rhs.append(deriv_weight * dv)
    a_full = np.vstack(rows)
    b_full = np.vstack(rhs)
    if pin_endpoints:
        if abs(tau[0]) > 1e-12 or abs(tau[-1] - 1.0) > 1e-12:
            raise ValueError("endpoint pinning requires tau spanning [0, 1]")
        c0 = vals[0]
        c1 = vals[-1]
        inner = np.arange(1, degree)
        b_red = b_full - np.outer(a_full[:, 0], c0) - np.outer(a_full[:, degree], c1)
        sol, *_ = np.linalg.lstsq(a_full[:, inner], b_red, rcond=None)
        coeffs = np.vstack([c0[None, :], sol, c1[None, :]])
    else:
        coeffs, *_ = np.linalg.lstsq(a_full, b_full, rcond=None)
    return coeffs[:, 0] if single else coeffs


def fit_bezier_to_tolerance(tau, values, tol, degree=6, max_degree=16,
                            deriv=None, deriv_weight=1e-2):
    """Escalate the fit degree until max sample residual <= tol.

    Returns (coeffs, residual, degree). Raises FitToleranceExceeded if the
    degree cap cannot meet the tolerance.
    """
    best = None
    for deg in range(degree, max_degree + 1):
        n_samples = len(np.atleast_1d(tau))
        if deg + 1 > n_samples + 2:
            break
        coeffs = fit_bezier(tau, values, deg, deriv=deriv,
                            deriv_weight=deriv_weight)
        res = np.max(np.abs(bezier_value(coeffs, tau) - values))
        if best is None or res < best[1]:
            best = (coeffs, res, deg)
        if res <= tol:
            return coeffs, res, deg
    raise FitToleranceExceeded(
        f"bezier fit residual {best[1]:.3e} above tolerance {tol:.1e} "
        f"at degree {best[2]}", residual=best[1])
