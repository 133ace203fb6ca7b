"""Independent numpy/scipy oracles for the constants frozen in the C++ tests.

Run: python3 tests/oracles/derive_values.py
"""
import numpy as np
from scipy import integrate

TWO_PI = 2 * np.pi


def quarter_circle(m=2_000_001):
    a = np.linspace(0.0, np.pi / 2, m)
    return np.stack([np.cos(a), np.sin(a)], axis=1)


def indicatrix_quadrant(t):
    # sup over unit y in the closed quadrant of -<y, t>
    return float(np.max(-quarter_circle() @ np.asarray(t)))


def delta_wedge(gens):
    # min over unit y in the wedge spanned by gens and unit t in the dual quadrant of <y, t>
    g = [np.asarray(v) / np.linalg.norm(v) for v in gens]
    lam = np.linspace(0.0, 1.0, 2001)[:, None]
    ys = lam * g[0] + (1 - lam) * g[1]
    ys /= np.linalg.norm(ys, axis=1, keepdims=True)
    ts = quarter_circle(20001)
    return float(np.min(ys @ ts.T))


def gaussian_l2():
    v, _ = integrate.quad(lambda t: np.exp(-2 * np.pi * t * t), -np.inf, np.inf)
    return np.sqrt(v)


def half_line_kernel_l2(y=1.0):
    # |K(x + iy)|^2 = 1 / (4 pi^2 (x^2 + y^2))
    v, _ = integrate.quad(lambda x: 1.0 / (4 * np.pi**2 * (x * x + y * y)), -np.inf, np.inf)
    return np.sqrt(v)


def lightcone2_k2iy(y=(1.0, 0.0)):
    # K(2iy) = int over |t2| < t1 of exp(-4 pi <y, t>)
    f = lambda t2, t1: np.exp(-4 * np.pi * (y[0] * t1 + y[1] * t2))
    v, _ = integrate.dblquad(f, 0, np.inf, lambda t1: -t1, lambda t1: t1)
    return v


def semigroup(x=0.3, y=0.5):
    # int P_1(t) P_y(x - t) dt against P_{1+y}(x)
    P = lambda s, h: h / (np.pi * (s * s + h * h))
    v, _ = integrate.quad(lambda t: P(t, 1.0) * P(x - t, y), -np.inf, np.inf, limit=400)
    return v, P(x, 1.0 + y)


def hausdorff_young_gaussian(p):
    # |F g|_q / |g|_p for g = exp(-pi t^2), which is self-reciprocal
    q = p / (p - 1)
    nq, _ = integrate.quad(lambda t: np.exp(-q * np.pi * t * t), -np.inf, np.inf)
    npp, _ = integrate.quad(lambda t: np.exp(-p * np.pi * t * t), -np.inf, np.inf)
    return nq ** (1 / q) / npp ** (1 / p)


if __name__ == "__main__":
    print("indicatrix quadrant (1,1)      ", indicatrix_quadrant((1, 1)))
    print("indicatrix quadrant (-1,-1)    ", indicatrix_quadrant((-1, -1)))
    print("delta ray (1,1)                ", delta_wedge([(1, 1), (1, 1)]))
    print("delta wedge (1,2),(2,1)        ", delta_wedge([(1, 2), (2, 1)]))
    print("gaussian L2                    ", gaussian_l2())
    print("half-line kernel L2 at y=1     ", half_line_kernel_l2())
    print("light cone n=2 K(2i e0)        ", lightcone2_k2iy())
    print("semigroup (lhs, rhs)           ", semigroup())
    print("HY ratio p=4/3                 ", hausdorff_young_gaussian(4 / 3))
