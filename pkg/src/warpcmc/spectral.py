"""Spectral engines on the parameter sphere.

Two engines cover the two symmetry modes.  The full engine works on
S^2 (ambient dimension 3) with a Gauss-Legendre latitude grid, uniform
longitudes, and normalized associated Legendre tables; the axisymmetric
engine works in any dimension on functions of the polar angle alone,
with Gauss-Jacobi nodes and normalized Gegenbauer polynomials.

Both expose the same small surface: analysis and synthesis, quadrature
that integrates over the whole round sphere, per-degree spectral
filtering, and the orthonormal-frame jet (values, first derivatives,
covariant Hessian) that the surface geometry assembles curvature from.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, roots_jacobi, roots_legendre

from .errors import ParameterError
from .warping import sphere_volume

__all__ = [
    "SphericalHarmonicEngine",
    "AxisymEngine",
    "get_engine",
    "COEFFICIENT_FLOOR",
]

# Analysis coefficients below this fraction of the spectral peak are
# quadrature roundoff, not signal.  The second-derivative tables grow like
# degree^4 near the poles and would amplify that roundoff by up to 1e6, so
# the frame-jet transforms drop such coefficients before synthesis.
COEFFICIENT_FLOOR = 1e-12


class SphericalHarmonicEngine:
    """Scalar spherical-harmonic transform on a Gauss-Legendre grid.

    The grid has ``nlat`` latitudes at Legendre nodes x = cos(theta) and
    ``2 nlat`` uniform longitudes; degrees up to lmax = nlat - 1 are
    resolved exactly.  Basis functions are orthonormal over the sphere
    (no Condon-Shortley phase), and the associated Legendre tables carry
    first and second theta-derivatives so covariant Hessians need no
    finite differencing.
    """

    kind = "full"

    def __init__(self, nlat: int):
        if nlat < 8:
            raise ParameterError("need at least 8 latitudes")
        self.nlat = int(nlat)
        self.nlon = 2 * self.nlat
        self.lmax = self.nlat - 1
        x, w = roots_legendre(self.nlat)
        order = np.argsort(-x)  # theta ascending from the north pole
        self.x = x[order]
        self.w = w[order]
        self.theta = np.arccos(self.x)
        self.sin_theta = np.sqrt(1.0 - self.x * self.x)
        self.cot_theta = self.x / self.sin_theta
        self.phi = 2.0 * math.pi * np.arange(self.nlon) / self.nlon
        # quadrature weights over the whole sphere, shape (nlat, 1)
        self.area_weights = (self.w * (2.0 * math.pi / self.nlon))[:, None]
        self._build_tables()

    def _build_tables(self):
        L = self.lmax
        nlat = self.nlat
        x, s = self.x, self.sin_theta
        P = np.zeros((L + 1, L + 1, nlat))
        P[0, 0] = math.sqrt(1.0 / (4.0 * math.pi))
        for m in range(1, L + 1):
            P[m, m] = math.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
        for m in range(L + 1):
            if m + 1 <= L:
                P[m + 1, m] = math.sqrt(2 * m + 3) * x * P[m, m]
            for l in range(m + 2, L + 1):
                a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
                b = math.sqrt(
                    (2.0 * l + 1.0)
                    / (2.0 * l - 3.0)
                    * ((l - 1.0) ** 2 - m * m)
                    / (l * l - m * m)
                )
                P[l, m] = a * x * P[l - 1, m] - b * P[l - 2, m]
        dP = np.zeros_like(P)
        for m in range(L + 1):
            for l in range(m, L + 1):
                c = math.sqrt((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0)) if l > 0 else 0.0
                low = P[l - 1, m] if l - 1 >= m else 0.0
                dP[l, m] = (l * x * P[l, m] - c * low) / s
        ll = np.arange(L + 1, dtype=float)[:, None, None]
        mm = np.arange(L + 1, dtype=float)[None, :, None]
        # second derivative from the defining ODE
        d2P = -self.cot_theta * dP - (ll * (ll + 1.0) - mm * mm / (s * s)) * P
        tri = mm[0] <= ll[:, :, 0][..., None]  # enforce m <= l
        self._tables = (P, dP, d2P * tri)
        self.degrees = np.arange(L + 1)

    # -- transforms ----------------------------------------------------

    def analyze(self, values: np.ndarray) -> np.ndarray:
        """Expansion coefficients a[l, m] of a real grid function."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.nlat, self.nlon):
            raise ParameterError(f"grid shape must be {(self.nlat, self.nlon)}")
        fm = np.fft.rfft(values, axis=1)[:, : self.lmax + 1]
        P = self._tables[0]
        return (2.0 * math.pi / self.nlon) * np.einsum(
            "lmi,im->lm", P, self.w[:, None] * fm
        )

    def synthesize(self, alm: np.ndarray, dtheta: int = 0, dphi: int = 0) -> np.ndarray:
        """Grid values of sum a_lm Y_lm, optionally differentiated.

        ``dtheta`` selects the Legendre table (0, 1, or 2 derivatives in
        theta); ``dphi`` multiplies coefficients by (i m)^dphi.
        """
        table = self._tables[dtheta]
        coeff = np.asarray(alm, dtype=complex)
        if dphi:
            coeff = coeff * (1j * np.arange(self.lmax + 1)[None, :]) ** dphi
        gm = np.einsum("lmi,lm->im", table, coeff)
        spec = np.zeros((self.nlat, self.nlon // 2 + 1), dtype=complex)
        spec[:, : self.lmax + 1] = gm * self.nlon
        return np.fft.irfft(spec, n=self.nlon, axis=1)

    def filter_degrees(self, values: np.ndarray, factor: np.ndarray) -> np.ndarray:
        """Apply a per-degree multiplier in coefficient space."""
        alm = self.analyze(values)
        return self.synthesize(alm * np.asarray(factor, dtype=float)[:, None])

    def mode(self, l: int, m: int, amplitude: float = 1.0) -> np.ndarray:
        """Grid values of one real orthonormal harmonic.

        m = 0 is the zonal mode; m > 0 the cosine and m < 0 the sine
        sectoral/tesseral modes, all with unit square integral.
        """
        if not (0 <= l <= self.lmax):
            raise ParameterError(f"degree {l} outside [0, {self.lmax}]")
        if abs(m) > l:
            raise ParameterError(f"order |{m}| exceeds degree {l}")
        alm = np.zeros((self.lmax + 1, self.lmax + 1), dtype=complex)
        if m == 0:
            alm[l, 0] = amplitude
        elif m > 0:
            alm[l, m] = amplitude / math.sqrt(2.0)
        else:
            alm[l, -m] = -1j * amplitude / math.sqrt(2.0)
        return self.synthesize(alm)

    # -- geometry helpers ----------------------------------------------

    def integrate(self, values: np.ndarray) -> float:
        """Quadrature of a grid function over the round sphere."""
        return float(np.sum(np.asarray(values) * self.area_weights))

    def on_frame_jet(self, values: np.ndarray):
        """Value, orthonormal-frame gradient, and covariant Hessian.

        Returns (f, f1, f2, h11, h12, h22) where the frame is the unit
        theta and phi directions and h is the covariant Hessian of the
        round metric in that frame.  Coefficients below the floor are
        dropped (see COEFFICIENT_FLOOR).
        """
        alm = self.analyze(values)
        alm = np.where(np.abs(alm) < COEFFICIENT_FLOOR * np.max(np.abs(alm)), 0.0, alm)
        f = self.synthesize(alm)
        ft = self.synthesize(alm, dtheta=1)
        fp = self.synthesize(alm, dphi=1)
        ftt = self.synthesize(alm, dtheta=2)
        ftp = self.synthesize(alm, dtheta=1, dphi=1)
        fpp = self.synthesize(alm, dphi=2)
        s = self.sin_theta[:, None]
        cot = self.cot_theta[:, None]
        f1 = ft
        f2 = fp / s
        h11 = ftt
        h12 = (ftp - cot * fp) / s
        h22 = fpp / (s * s) + cot * ft
        return f, f1, f2, h11, h12, h22


class AxisymEngine:
    """Gegenbauer transform for axisymmetric functions on S^{n-1}.

    Functions depend on the polar angle alone; nodes are Gauss-Jacobi
    points for the weight (1 - x^2)^{(n-3)/2}, which is the transverse
    sphere volume factor, so quadrature sums are exact against the full
    round measure.  Basis functions are Gegenbauer polynomials in
    cos(theta) normalized against that measure; in ambient dimension 3
    they reduce to the zonal spherical harmonics.
    """

    kind = "axisym"

    def __init__(self, dim: int, points: int):
        if dim < 3:
            raise ParameterError(f"ambient dimension must be >= 3, got {dim}")
        if points < 8:
            raise ParameterError("need at least 8 nodes")
        self.dim = int(dim)
        self.npoints = int(points)
        self.lmax = self.npoints - 1
        alpha = 0.5 * (dim - 3)
        x, w = roots_jacobi(self.npoints, alpha, alpha)
        order = np.argsort(-x)
        self.x = x[order]
        self.w = w[order]
        self.theta = np.arccos(self.x)
        self.sin_theta = np.sqrt(1.0 - self.x * self.x)
        self.cot_theta = self.x / self.sin_theta
        self.transverse_volume = sphere_volume(dim - 2)
        self.area_weights = self.transverse_volume * self.w
        self._build_tables()

    def _gegenbauer_rows(self, lam: float, count: int) -> np.ndarray:
        """Unnormalized C_l^lam(x) for l = 0..count-1 by recurrence."""
        rows = np.zeros((max(count, 1), self.npoints))
        if count >= 1:
            rows[0] = 1.0
        if count >= 2:
            rows[1] = 2.0 * lam * self.x
        for l in range(2, count):
            rows[l] = (
                2.0 * self.x * (l + lam - 1.0) * rows[l - 1]
                - (l + 2.0 * lam - 2.0) * rows[l - 2]
            ) / l
        return rows

    def _build_tables(self):
        L = self.lmax
        lam = 0.5 * (self.dim - 2)
        C0 = self._gegenbauer_rows(lam, L + 1)
        C1 = self._gegenbauer_rows(lam + 1.0, L)
        C2 = self._gegenbauer_rows(lam + 2.0, max(L - 1, 0))
        dC = np.zeros_like(C0)
        d2C = np.zeros_like(C0)
        dC[1:] = 2.0 * lam * C1[: L]
        if L >= 2:
            d2C[2:] = 4.0 * lam * (lam + 1.0) * C2[: L - 1]
        l = np.arange(L + 1, dtype=float)
        log_norm = (
            math.log(math.pi)
            + (1.0 - 2.0 * lam) * math.log(2.0)
            + gammaln(l + 2.0 * lam)
            - gammaln(l + 1.0)
            - np.log(l + lam)
            - 2.0 * gammaln(lam)
        )
        scale = 1.0 / np.sqrt(self.transverse_volume * np.exp(log_norm))
        self._tables = (scale[:, None] * C0, scale[:, None] * dC, scale[:, None] * d2C)
        self.degrees = np.arange(L + 1)

    # -- transforms ----------------------------------------------------

    def analyze(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.npoints,):
            raise ParameterError(f"grid shape must be {(self.npoints,)}")
        return self._tables[0] @ (self.area_weights * values)

    def synthesize(self, coeff: np.ndarray, dtheta: int = 0) -> np.ndarray:
        """Grid values of sum c_l G_l(cos theta), optionally d/dtheta."""
        G, dG, d2G = self._tables
        coeff = np.asarray(coeff, dtype=float)
        if dtheta == 0:
            return coeff @ G
        if dtheta == 1:
            return -self.sin_theta * (coeff @ dG)
        if dtheta == 2:
            return -self.x * (coeff @ dG) + self.sin_theta**2 * (coeff @ d2G)
        raise ParameterError("dtheta must be 0, 1 or 2")

    def filter_degrees(self, values: np.ndarray, factor: np.ndarray) -> np.ndarray:
        return self.synthesize(self.analyze(values) * np.asarray(factor, dtype=float))

    def mode(self, l: int, m: int = 0, amplitude: float = 1.0) -> np.ndarray:
        """Grid values of the degree-l zonal basis function."""
        if m != 0:
            raise ParameterError("axisymmetric mode carries no azimuthal order")
        if not (0 <= l <= self.lmax):
            raise ParameterError(f"degree {l} outside [0, {self.lmax}]")
        coeff = np.zeros(self.lmax + 1)
        coeff[l] = amplitude
        return self.synthesize(coeff)

    # -- geometry helpers ----------------------------------------------

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.area_weights, np.asarray(values)))

    def on_frame_jet(self, values: np.ndarray):
        """Value, polar derivative, covariant Hessian components.

        Returns (f, f1, h11, htr) where f1 = df/dtheta, h11 is the
        meridian Hessian component and htr = cot(theta) df/dtheta the
        common transverse component.  Coefficients below the floor are
        dropped (see COEFFICIENT_FLOOR).
        """
        coeff = self.analyze(values)
        coeff = np.where(
            np.abs(coeff) < COEFFICIENT_FLOOR * np.max(np.abs(coeff)), 0.0, coeff
        )
        f = self.synthesize(coeff)
        ft = self.synthesize(coeff, dtheta=1)
        ftt = self.synthesize(coeff, dtheta=2)
        return f, ft, ftt, self.cot_theta * ft


_ENGINES: dict = {}


def get_engine(kind: str, dim: int, size: int):
    """Shared engine cache; tables are reused across surfaces."""
    key = (kind, int(dim), int(size))
    if key not in _ENGINES:
        if kind == "full":
            if dim != 3:
                raise ParameterError("the full engine is implemented for ambient dimension 3")
            _ENGINES[key] = SphericalHarmonicEngine(size)
        elif kind == "axisym":
            _ENGINES[key] = AxisymEngine(dim, size)
        else:
            raise ParameterError(f"unknown engine kind {kind!r}")
    return _ENGINES[key]
