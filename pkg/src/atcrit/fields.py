"""Closed-form deformation fields X and boundary-data extensions G.

Second inner variations need exact derivatives of X and G; sampling would
contaminate the verification, so every catalogue entry carries analytic
evaluators for X, DX, D2X (respectively G, grad G, D2G, D3G).  Conventions:

  1D:  X(x) -> array, DX -> X', D2X -> X''.
  2D:  X(x, y) -> (..., 2); DX -> (..., 2, 2) with DX[i, j] = d_j X_i;
       D2X -> (..., 2, 2, 2) with D2X[i, j, k] = d_j d_k X_i.

Catalogue identifiers (accepted in config files):

  vector fields: poly_bump, sine, slope_bump (1D);
                 shear_x, shear_y, swirl (2D, tangential on rectangles)
  extensions:    affine, quadratic, boundary_ramp (1D); coordinate (2D)
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class VectorFieldSpec:
    """A deformation field with exact derivatives.

    Y = (DX) X is derived, not stored: Y(p) = DX(p) . X(p), and
    DY[i,k] = D2X[i,j,k] X[j] + DX[i,j] DX[j,k].
    """

    name: str
    dim: int
    X: callable
    DX: callable
    D2X: callable
    tangential: bool
    compact_support: bool
    params: dict = field(default_factory=dict)

    def Y(self, *coords):
        if self.dim == 1:
            return self.DX(*coords) * self.X(*coords)
        return np.einsum("...ij,...j->...i", self.DX(*coords), self.X(*coords))

    def DY(self, *coords):
        if self.dim == 1:
            return self.D2X(*coords) * self.X(*coords) + self.DX(*coords) ** 2
        d2 = self.D2X(*coords)
        dx = self.DX(*coords)
        x = self.X(*coords)
        return (np.einsum("...ijk,...j->...ik", d2, x)
                + np.einsum("...ij,...jk->...ik", dx, dx))


@dataclass(frozen=True)
class ExtensionSpec:
    """A boundary-data extension G with exact derivatives."""

    name: str
    dim: int
    G: callable
    dG: callable
    d2G: callable
    d3G: callable
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# 1D vector fields
# ---------------------------------------------------------------------------

def _poly_bump(length, amplitude=1.0, center=None):
    """X = A x^2 (L-x)^2 (x - c); vanishes to second order at both ends."""
    L = float(length)
    c = L / 2 if center is None else float(center)
    A = float(amplitude)

    def q(x):
        return x**2 * (L - x) ** 2

    def qp(x):
        return 2 * x * (L - x) * (L - 2 * x)

    def qpp(x):
        return 2 * L**2 - 12 * L * x + 12 * x**2

    def X(x):
        x = np.asarray(x, float)
        return A * (x - c) * q(x)

    def DX(x):
        x = np.asarray(x, float)
        return A * (q(x) + (x - c) * qp(x))

    def D2X(x):
        x = np.asarray(x, float)
        return A * (2 * qp(x) + (x - c) * qpp(x))

    return VectorFieldSpec("poly_bump", 1, X, DX, D2X, tangential=True,
                           compact_support=True,
                           params={"length": L, "amplitude": A, "center": c})


def _sine(length, amplitude=1.0, mode=1):
    L, A, k = float(length), float(amplitude), int(mode)
    w = k * np.pi / L

    def X(x):
        return A * np.sin(w * np.asarray(x, float))

    def DX(x):
        return A * w * np.cos(w * np.asarray(x, float))

    def D2X(x):
        return -A * w * w * np.sin(w * np.asarray(x, float))

    return VectorFieldSpec("sine", 1, X, DX, D2X, tangential=True,
                           compact_support=False,
                           params={"length": L, "amplitude": A, "mode": k})


def _slope_bump(length, slope=1.0, width=0.1, center=None):
    """X = s r exp(-(r/sigma)^6), r = x - center: X'(center) = s exactly,
    X' flat to O((r/sigma)^6) near the center, and X below 1e-14 beyond
    ~2.2 sigma (numerically compact support)."""
    L = float(length)
    c = L / 2 if center is None else float(center)
    s, sig = float(slope), float(width)

    def X(x):
        r = np.asarray(x, float) - c
        t6 = (r / sig) ** 6
        return s * r * np.exp(-t6)

    def DX(x):
        r = np.asarray(x, float) - c
        t6 = (r / sig) ** 6
        return s * (1 - 6 * t6) * np.exp(-t6)

    def D2X(x):
        r = np.asarray(x, float) - c
        t = r / sig
        return (6 * s / sig) * t**5 * (6 * t**6 - 7) * np.exp(-t**6)

    compact = min(c, L - c) / sig >= 2.2
    return VectorFieldSpec("slope_bump", 1, X, DX, D2X, tangential=compact,
                           compact_support=compact,
                           params={"length": L, "slope": s, "width": sig,
                                   "center": c})


# ---------------------------------------------------------------------------
# 2D vector fields, tangential on (0, Lx) x (0, Ly)
# ---------------------------------------------------------------------------

def _stack2(*comps):
    return np.stack(np.broadcast_arrays(*comps), axis=-1)


def _product_field(name, lengths, fx, gy, axis, amplitude):
    """X = A (f(x) g(y), 0) or (0, f(x) g(y)) with closed-form factors.

    fx, gy are (value, d, d2, d3) tuples of callables of one variable.
    """
    A = float(amplitude)
    f, f1, f2, f3 = fx
    g, g1, g2, g3 = gy

    def comp(x, y, dx_order, dy_order):
        fs = [f, f1, f2, f3][dx_order](np.asarray(x, float))
        gs = [g, g1, g2, g3][dy_order](np.asarray(y, float))
        return A * fs * gs

    def X(x, y):
        val = comp(x, y, 0, 0)
        zero = np.zeros_like(val)
        return _stack2(val, zero) if axis == 0 else _stack2(zero, val)

    def DX(x, y):
        d = [comp(x, y, 1, 0), comp(x, y, 0, 1)]
        zero = np.zeros_like(d[0])
        if axis == 0:
            rows = [[d[0], d[1]], [zero, zero]]
        else:
            rows = [[zero, zero], [d[0], d[1]]]
        return np.stack([_stack2(*r) for r in rows], axis=-2)

    def D2X(x, y):
        dxx = comp(x, y, 2, 0)
        dxy = comp(x, y, 1, 1)
        dyy = comp(x, y, 0, 2)
        zero = np.zeros_like(dxx)
        hess = np.stack([_stack2(dxx, dxy), _stack2(dxy, dyy)], axis=-2)
        zhess = np.zeros_like(hess)
        if axis == 0:
            return np.stack([hess, zhess], axis=-3)
        return np.stack([zhess, hess], axis=-3)

    return X, DX, D2X


def _trig(freq, kind):
    w = freq
    if kind == "sin":
        return (lambda t: np.sin(w * t), lambda t: w * np.cos(w * t),
                lambda t: -w * w * np.sin(w * t), lambda t: -w**3 * np.cos(w * t))
    return (lambda t: np.cos(w * t), lambda t: -w * np.sin(w * t),
            lambda t: -w * w * np.cos(w * t), lambda t: w**3 * np.sin(w * t))


def _shear_x(lengths, amplitude=1.0):
    """X = A (sin(pi x/Lx) cos(pi y/(2 Ly)), 0): tangential, y-asymmetric."""
    lx, ly = lengths
    X, DX, D2X = _product_field("shear_x", lengths, _trig(np.pi / lx, "sin"),
                                _trig(np.pi / (2 * ly), "cos"), 0, amplitude)
    return VectorFieldSpec("shear_x", 2, X, DX, D2X, tangential=True,
                           compact_support=False,
                           params={"lengths": tuple(lengths), "amplitude": amplitude})


def _shear_y(lengths, amplitude=1.0):
    """X = A (0, cos(pi x/(2 Lx)) sin(pi y/Ly)): tangential, x-asymmetric."""
    lx, ly = lengths
    X, DX, D2X = _product_field("shear_y", lengths, _trig(np.pi / (2 * lx), "cos"),
                                _trig(np.pi / ly, "sin"), 1, amplitude)
    return VectorFieldSpec("shear_y", 2, X, DX, D2X, tangential=True,
                           compact_support=False,
                           params={"lengths": tuple(lengths), "amplitude": amplitude})


def _swirl(lengths, amplitude=1.0):
    """X = A (sin(2 pi x/Lx) sin^2(pi y/Ly), sin^2(pi x/Lx) sin(2 pi y/Ly))."""
    lx, ly = lengths
    A = float(amplitude)
    px, py = 2 * np.pi / lx, 2 * np.pi / ly

    # sin^2(pi t / L) = (1 - cos(2 pi t / L)) / 2
    def s2(w, t, order):
        t = np.asarray(t, float)
        if order == 0:
            return 0.5 * (1 - np.cos(w * t))
        if order == 1:
            return 0.5 * w * np.sin(w * t)
        return 0.5 * w * w * np.cos(w * t)

    def sn(w, t, order):
        t = np.asarray(t, float)
        if order == 0:
            return np.sin(w * t)
        if order == 1:
            return w * np.cos(w * t)
        return -w * w * np.sin(w * t)

    def X(x, y):
        return _stack2(A * sn(px, x, 0) * s2(py, y, 0),
                       A * s2(px, x, 0) * sn(py, y, 0))

    def DX(x, y):
        r0 = _stack2(A * sn(px, x, 1) * s2(py, y, 0), A * sn(px, x, 0) * s2(py, y, 1))
        r1 = _stack2(A * s2(px, x, 1) * sn(py, y, 0), A * s2(px, x, 0) * sn(py, y, 1))
        return np.stack([r0, r1], axis=-2)

    def D2X(x, y):
        h0 = np.stack([_stack2(A * sn(px, x, 2) * s2(py, y, 0),
                               A * sn(px, x, 1) * s2(py, y, 1)),
                       _stack2(A * sn(px, x, 1) * s2(py, y, 1),
                               A * sn(px, x, 0) * s2(py, y, 2))], axis=-2)
        h1 = np.stack([_stack2(A * s2(px, x, 2) * sn(py, y, 0),
                               A * s2(px, x, 1) * sn(py, y, 1)),
                       _stack2(A * s2(px, x, 1) * sn(py, y, 1),
                               A * s2(px, x, 0) * sn(py, y, 2))], axis=-2)
        return np.stack([h0, h1], axis=-3)

    return VectorFieldSpec("swirl", 2, X, DX, D2X, tangential=True,
                           compact_support=False,
                           params={"lengths": tuple(lengths), "amplitude": A})


def _poly_product(name, lengths, amplitude, fx_coeffs, gy_coeffs, axis):
    """One-component field A f(x/Lx) g(y/Ly) with polynomial factors
    (coefficients highest power first); exact derivatives by polynomial
    differentiation.  f must vanish at 0 and 1 for axis 0 (resp. g for
    axis 1) to keep the field tangential."""
    lx, ly = (float(t) for t in lengths)
    A = float(amplitude)
    f = [np.array(fx_coeffs, float)]
    g = [np.array(gy_coeffs, float)]
    for _ in range(2):
        f.append(np.polyder(f[-1]))
        g.append(np.polyder(g[-1]))

    def comp(x, y, dx_order, dy_order):
        xv = np.asarray(x, float) / lx
        yv = np.asarray(y, float) / ly
        return (A * np.polyval(f[dx_order], xv) * np.polyval(g[dy_order], yv)
                / lx**dx_order / ly**dy_order)

    def X(x, y):
        val = comp(x, y, 0, 0)
        zero = np.zeros_like(val)
        return _stack2(val, zero) if axis == 0 else _stack2(zero, val)

    def DX(x, y):
        d = [comp(x, y, 1, 0), comp(x, y, 0, 1)]
        zero = np.zeros_like(d[0])
        if axis == 0:
            rows = [[d[0], d[1]], [zero, zero]]
        else:
            rows = [[zero, zero], [d[0], d[1]]]
        return np.stack([_stack2(*r) for r in rows], axis=-2)

    def D2X(x, y):
        dxx, dxy, dyy = (comp(x, y, 2, 0), comp(x, y, 1, 1), comp(x, y, 0, 2))
        hess = np.stack([_stack2(dxx, dxy), _stack2(dxy, dyy)], axis=-2)
        zhess = np.zeros_like(hess)
        pair = [hess, zhess] if axis == 0 else [zhess, hess]
        return np.stack(pair, axis=-3)

    return VectorFieldSpec(name, 2, X, DX, D2X, tangential=True,
                           compact_support=False,
                           params={"lengths": (lx, ly), "amplitude": A})


# parity-free polynomial factors: p0 vanishes at 0 and 1, q0 does not
_P0 = (-1.0, 0.7, 0.3, 0.0)          # t(1-t)(t+0.3)
_Q0 = (-0.6, 1.0, 0.4)               # 0.4 + t - 0.6 t^2
_R0 = (-1.0, 0.6, 0.4, 0.0)          # t(1-t)(t+0.4)
_S0 = (-0.4, 0.8, 0.5)               # 0.5 + 0.8 t - 0.4 t^2


def _poly_shear_x(lengths, amplitude=1.0):
    """X = A (f(x) g(y), 0), polynomial, no parity about the midlines."""
    return _poly_product("poly_shear_x", lengths, amplitude, _P0, _Q0, 0)


def _poly_shear_y(lengths, amplitude=1.0):
    """X = A (0, f(x) g(y)) with g vanishing at the y-edges."""
    return _poly_product("poly_shear_y", lengths, amplitude, _S0, _R0, 1)


def _poly_swirl(lengths, amplitude=1.0):
    """Two-component polynomial field, tangential and parity-free."""
    a = _poly_product("swirl_a", lengths, amplitude, _P0, _S0, 0)
    b = _poly_product("swirl_b", lengths, amplitude, _Q0, _R0, 1)

    def X(x, y):
        return a.X(x, y) + b.X(x, y)

    def DX(x, y):
        return a.DX(x, y) + b.DX(x, y)

    def D2X(x, y):
        return a.D2X(x, y) + b.D2X(x, y)

    return VectorFieldSpec("poly_swirl", 2, X, DX, D2X, tangential=True,
                           compact_support=False,
                           params={"lengths": tuple(lengths),
                                   "amplitude": float(amplitude)})


_VECTOR_FIELDS = {
    "poly_bump": (_poly_bump, 1),
    "sine": (_sine, 1),
    "slope_bump": (_slope_bump, 1),
    "shear_x": (_shear_x, 2),
    "shear_y": (_shear_y, 2),
    "swirl": (_swirl, 2),
    "poly_shear_x": (_poly_shear_x, 2),
    "poly_shear_y": (_poly_shear_y, 2),
    "poly_swirl": (_poly_swirl, 2),
}


def vector_field(name, **params) -> VectorFieldSpec:
    """Build a catalogue deformation field by identifier."""
    if name not in _VECTOR_FIELDS:
        raise ConfigError(f"unknown vector field {name!r}; "
                          f"known: {sorted(_VECTOR_FIELDS)}")
    factory, _ = _VECTOR_FIELDS[name]
    return factory(**params)


# ---------------------------------------------------------------------------
# extensions
# ---------------------------------------------------------------------------

def _affine_ext(length, g0=0.0, gL=1.0):
    L, a0, aL = float(length), float(g0), float(gL)
    slope = (aL - a0) / L

    def G(x):
        return a0 + slope * np.asarray(x, float)

    def dG(x):
        return np.full_like(np.asarray(x, float), slope)

    def zero(x):
        return np.zeros_like(np.asarray(x, float))

    return ExtensionSpec("affine", 1, G, dG, zero, zero,
                         params={"length": L, "g0": a0, "gL": aL})


def _quadratic_ext(length, g0=0.0, gL=1.0):
    L, a0, aL = float(length), float(g0), float(gL)
    c = (aL - a0) / L**2

    def G(x):
        x = np.asarray(x, float)
        return a0 + c * x * x

    def dG(x):
        return 2 * c * np.asarray(x, float)

    def d2G(x):
        return np.full_like(np.asarray(x, float), 2 * c)

    def d3G(x):
        return np.zeros_like(np.asarray(x, float))

    return ExtensionSpec("quadratic", 1, G, dG, d2G, d3G,
                         params={"length": L, "g0": a0, "gL": aL})


def _boundary_ramp_ext(length, g0=0.0, gL=1.0, width=None):
    """G = g0 + (gL-g0) * ramp((x - L + w)/w): a C^3 septic smoothstep
    supported in [L - w, L], so G' vanishes away from the right boundary
    (disjoint from mid-interval bumps)."""
    L, a0, aL = float(length), float(g0), float(gL)
    w = L / 4 if width is None else float(width)
    amp = aL - a0

    def _t(x):
        return np.clip((np.asarray(x, float) - (L - w)) / w, 0.0, 1.0)

    def G(x):
        t = _t(x)
        return a0 + amp * t**4 * (35 - 84 * t + 70 * t**2 - 20 * t**3)

    def dG(x):
        t = _t(x)
        inside = (np.asarray(x, float) > L - w) & (np.asarray(x, float) < L)
        val = 140 * t**3 - 420 * t**4 + 420 * t**5 - 140 * t**6
        return np.where(inside, amp * val / w, 0.0)

    def d2G(x):
        t = _t(x)
        inside = (np.asarray(x, float) > L - w) & (np.asarray(x, float) < L)
        val = 420 * t**2 - 1680 * t**3 + 2100 * t**4 - 840 * t**5
        return np.where(inside, amp * val / w**2, 0.0)

    def d3G(x):
        t = _t(x)
        inside = (np.asarray(x, float) > L - w) & (np.asarray(x, float) < L)
        val = 840 * t - 5040 * t**2 + 8400 * t**3 - 4200 * t**4
        return np.where(inside, amp * val / w**3, 0.0)

    return ExtensionSpec("boundary_ramp", 1, G, dG, d2G, d3G,
                         params={"length": L, "g0": a0, "gL": aL, "width": w})


def _coordinate_ext(coeffs=(1.0, 0.0), constant=0.0):
    """2D affine extension G = c0 + a x + b y (g(x, y) = x by default)."""
    a, b = (float(c) for c in coeffs)
    c0 = float(constant)

    def G(x, y):
        return c0 + a * np.asarray(x, float) + b * np.asarray(y, float)

    def dG(x, y):
        xx = np.asarray(x, float)
        return _stack2(np.full_like(xx, a), np.full_like(xx, b))

    def d2G(x, y):
        xx = np.asarray(x, float)
        return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)) + (2, 2))

    def d3G(x, y):
        return np.zeros(np.broadcast_shapes(np.shape(x), np.shape(y)) + (2, 2, 2))

    return ExtensionSpec("coordinate", 2, G, dG, d2G, d3G,
                         params={"coeffs": (a, b), "constant": c0})


_EXTENSIONS = {
    "affine": (_affine_ext, 1),
    "quadratic": (_quadratic_ext, 1),
    "boundary_ramp": (_boundary_ramp_ext, 1),
    "coordinate": (_coordinate_ext, 2),
}


def extension(name, **params) -> ExtensionSpec:
    """Build a catalogue boundary-data extension by identifier."""
    if name not in _EXTENSIONS:
        raise ConfigError(f"unknown extension {name!r}; known: {sorted(_EXTENSIONS)}")
    factory, _ = _EXTENSIONS[name]
    return factory(**params)


def check_trace_match_1d(spec: ExtensionSpec, g, length, tol=1e-12):
    g0 = float(np.asarray(spec.G(np.array([0.0]))).ravel()[0])
    gL = float(np.asarray(spec.G(np.array([length]))).ravel()[0])
    if abs(g0 - g[0]) > tol or abs(gL - g[1]) > tol:
        raise ContractError(
            f"extension trace ({g0}, {gL}) does not match boundary data {g}")
