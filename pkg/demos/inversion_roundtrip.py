"""Recover functions from their M-images.

The image is only available through quadrature, so it is inverted on the
Bromwich line (Euler-accelerated trapezoid).  Near x = 0 the exact factor
exp(v omega / x) amplifies any inversion error, which is visible in the
last column.

    python demos/inversion_roundtrip.py
"""
import numpy as np

from gmtransform import InversionConfig, MParams, inverse_laplace, m_inverse, m_transform_many
from gmtransform.corpus import CORPUS
from gmtransform.quad import QuadConfig

TIGHT = QuadConfig(rel_tol=1e-13, abs_tol=1e-300)


def main():
    print("plain Laplace inversion, fixed Talbot vs Bromwich")
    for label, F, t, exact in [
        ("1/(s+1)", lambda s: 1 / (s + 1), 1.0, np.exp(-1)),
        ("1/s^2", lambda s: 1 / s ** 2, 2.0, 2.0),
        ("1/(s^2+1)", lambda s: 1 / (s * s + 1), np.pi / 2, 1.0),
    ]:
        tal = inverse_laplace(F, t)
        bro = inverse_laplace(F, t, InversionConfig("bromwich_trapezoid"))
        print(f"  {label:<10} t={t:.4f}  talbot err {abs(tal - exact):.1e}  bromwich err {abs(bro - exact):.1e}")

    p = MParams(rho=1, m=1, v=1, omega=2)
    xs = np.array([0.15, 0.2, 0.5, 1.0, 2.0, 4.0])
    print(f"\nM-transform round trip, rho={p.rho}, m={p.m}, v={p.v}, omega={p.omega}")
    print("  x      " + "".join(f"{name:>12}" for name in CORPUS) + "   e^(v w/x)")
    errs = {name: [] for name in CORPUS}
    for name, f in CORPUS.items():
        image = lambda u, f=f: m_transform_many(f, p, u=u, cfg=TIGHT)
        for x in xs:
            errs[name].append(abs(m_inverse(image, x, p) - f(np.array([x]))[0]))
    for i, x in enumerate(xs):
        cells = "".join(f"{errs[name][i]:12.1e}" for name in CORPUS)
        print(f"  {x:<6}{cells}   {np.exp(p.v * p.omega / x):9.2e}")


if __name__ == "__main__":
    main()
