"""Inner loops with a numba path and a pure-numpy fallback.

Set ``GRAVAB_DISABLE_NUMBA=1`` before import to force the numpy versions.
Both versions stay importable (``*_numpy`` / ``*_numba``) so the test-suite
and ``benchmarks/bench_kernels.py`` can compare them directly.
"""
import math
import os
import warnings

import numpy as np

# numba probes for a newer TBB than some distributions ship and falls back on its own
_TBB_WARNING = ".*TBB threading layer.*"
warnings.filterwarnings("ignore", message=_TBB_WARNING)

try:
    from numba import njit, prange
except ImportError:  # pragma: no cover
    njit = None

_DISABLED = os.environ.get("GRAVAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
HAVE_NUMBA = njit is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


# ---------------------------------------------------------------- projections

def coherent_projection_numpy(alpha, n_levels):
    """<n|alpha> for n = 0..n_levels-1."""
    n = np.arange(n_levels)
    out = np.empty(n_levels, dtype=np.complex128)
    out[0] = math.exp(-0.5 * abs(alpha) ** 2)
    if n_levels > 1:
        out[1:] = alpha / np.sqrt(n[1:])
        out = np.cumprod(out)
    return out


def _coherent_projection_loop(alpha, n_levels):
    out = np.empty(n_levels, dtype=np.complex128)
    out[0] = math.exp(-0.5 * (alpha.real * alpha.real + alpha.imag * alpha.imag))
    for n in range(1, n_levels):
        out[n] = out[n - 1] * alpha / math.sqrt(n)
    return out


# ---------------------------------------------------------------- solenoid shell

def shell_sum_numpy(rc, p, radius, thickness, length, rho_x, rho_w, z_x, z_w, n_phi):
    """Tensor-product quadrature of  p . phi_hat(x) / |rc - x|  over a cylindrical shell.

    Shell axis is local z, centred at the origin; ``rc`` and ``p`` are already
    expressed in that frame. ``rho_x, rho_w`` and ``z_x, z_w`` are Gauss-Legendre
    nodes/weights on [-1, 1]; the azimuth uses the periodic trapezoid rule.
    """
    rho = radius + 0.5 * thickness * (rho_x + 1.0)
    z = 0.5 * length * z_x
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    w = (0.5 * thickness * rho_w)[:, None, None] * (2.0 * np.pi / n_phi) * (0.5 * length * z_w)[None, None, :]
    R, PHI, Z = np.meshgrid(rho, phi, z, indexing="ij")
    cphi, sphi = np.cos(PHI), np.sin(PHI)
    dist = np.sqrt((rc[0] - R * cphi) ** 2 + (rc[1] - R * sphi) ** 2 + (rc[2] - Z) ** 2)
    pdotphi = -p[0] * sphi + p[1] * cphi
    return float(np.sum(w * R * pdotphi / dist))


def _shell_sum_loop(rc, p, radius, thickness, length, rho_x, rho_w, z_x, z_w, n_phi):
    total = 0.0
    dphi = 2.0 * math.pi / n_phi
    for i in prange(rho_x.shape[0]):
        rho = radius + 0.5 * thickness * (rho_x[i] + 1.0)
        wr = 0.5 * thickness * rho_w[i] * rho * dphi
        acc = 0.0
        for j in range(n_phi):
            phi = j * dphi
            c, s = math.cos(phi), math.sin(phi)
            pdotphi = -p[0] * s + p[1] * c
            dx = rc[0] - rho * c
            dy = rc[1] - rho * s
            for k in range(z_x.shape[0]):
                dz = rc[2] - 0.5 * length * z_x[k]
                acc += 0.5 * length * z_w[k] * pdotphi / math.sqrt(dx * dx + dy * dy + dz * dz)
        total += wr * acc
    return total


if HAVE_NUMBA:
    coherent_projection_numba = njit(cache=True)(_coherent_projection_loop)
    shell_sum_numba = njit(cache=True, parallel=True, fastmath=False)(_shell_sum_loop)
else:  # pragma: no cover
    coherent_projection_numba = None
    shell_sum_numba = None


def coherent_projection(alpha, n_levels):
    if USE_NUMBA:
        return coherent_projection_numba(complex(alpha), int(n_levels))
    return coherent_projection_numpy(complex(alpha), int(n_levels))


def shell_sum(rc, p, radius, thickness, length, rho_x, rho_w, z_x, z_w, n_phi):
    args = (
        np.ascontiguousarray(rc, dtype=float), np.ascontiguousarray(p, dtype=float),
        float(radius), float(thickness), float(length),
        np.ascontiguousarray(rho_x), np.ascontiguousarray(rho_w),
        np.ascontiguousarray(z_x), np.ascontiguousarray(z_w), int(n_phi),
    )
    if USE_NUMBA:
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", message=_TBB_WARNING)
            return float(shell_sum_numba(*args))
    return shell_sum_numpy(*args)
