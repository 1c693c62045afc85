"""Fundamental solutions of ``-y'' = z y`` as entire functions of z.

``sine_like(z, x) = sin(sqrt(z) x)/sqrt(z)`` and ``cosine_like(z, x) =
cos(sqrt(z) x)`` continue analytically through z = 0 (hyperbolic branch for
z < 0).  Everything downstream is expressed through these two functions of
the square z = lambda**2, which keeps each quantity even in lambda with no
branch cuts to manage.

Small |z| x**2 is handled by short power series so the z-derivatives stay
accurate where the closed forms cancel.
"""

from __future__ import annotations

import numpy as np

# below this |z x^2| the power series is both cheaper and better conditioned
_SERIES_CUT = 1e-4


def _split(z, x):
    z = np.asarray(z, dtype=float)
    u = z * x * x
    pos = u > _SERIES_CUT
    neg = u < -_SERIES_CUT
    mid = ~(pos | neg)
    return z, u, pos, neg, mid


def sine_like(z, x):
    """sin(sqrt(z) x)/sqrt(z), extended through z <= 0."""
    z, u, pos, neg, mid = _split(z, x)
    out = np.empty_like(z)
    if pos.any():
        r = np.sqrt(z[pos])
        out[pos] = np.sin(r * x) / r
    if neg.any():
        r = np.sqrt(-z[neg])
        out[neg] = np.sinh(r * x) / r
    if mid.any():
        um = u[mid]
        out[mid] = x * (1.0 - um / 6.0 + um * um / 120.0 - um**3 / 5040.0)
    return out if out.ndim else float(out)


def cosine_like(z, x):
    """cos(sqrt(z) x), extended through z <= 0."""
    z, u, pos, neg, mid = _split(z, x)
    out = np.empty_like(z)
    if pos.any():
        out[pos] = np.cos(np.sqrt(z[pos]) * x)
    if neg.any():
        out[neg] = np.cosh(np.sqrt(-z[neg]) * x)
    if mid.any():
        um = u[mid]
        out[mid] = 1.0 - um / 2.0 + um * um / 24.0 - um**3 / 720.0
    return out if out.ndim else float(out)


def sine_like_dz(z, x):
    """d/dz of sine_like, stable through z = 0."""
    z, u, pos, neg, mid = _split(z, x)
    out = np.empty_like(z)
    hard = pos | neg
    if hard.any():
        zh = z[hard]
        out[hard] = (x * cosine_like(zh, x) - sine_like(zh, x)) / (2.0 * zh)
    if mid.any():
        um = u[mid]
        out[mid] = -(x**3 / 6.0) * (1.0 - um / 10.0 + um * um / 280.0 - um**3 / 15120.0)
    return out if out.ndim else float(out)


def cosine_like_dz(z, x):
    """d/dz of cosine_like; equals -(x/2) sine_like(z, x)."""
    return -0.5 * x * sine_like(z, x)


def sine_like_dz2(z, x):
    """Second z-derivative of sine_like."""
    z, u, pos, neg, mid = _split(z, x)
    out = np.empty_like(z)
    hard = pos | neg
    if hard.any():
        zh = z[hard]
        s = sine_like(zh, x)
        ds = sine_like_dz(zh, x)
        out[hard] = -(0.5 * x * x * s + 3.0 * ds) / (2.0 * zh)
    if mid.any():
        um = u[mid]
        out[mid] = (x**5 / 60.0) * (1.0 - um / 14.0 + um * um / 504.0)
    return out if out.ndim else float(out)


def cosine_like_dz2(z, x):
    """Second z-derivative of cosine_like; equals -(x/2) sine_like_dz."""
    return -0.5 * x * sine_like_dz(z, x)
