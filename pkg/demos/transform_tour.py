"""A short tour of the M-transform and its classical special cases.

    python demos/transform_tour.py
"""
import math

import numpy as np
from scipy.special import exp1

from gmtransform import (MParams, image_exponential, image_power, laplace, m_transform, natural,
                         parse, to_handle)
from gmtransform.suite import run_suite


def main():
    f = to_handle("exp(-x)")
    print("f(x) =", parse("exp(-x)"))

    # with rho = v = 0 and omega = 1 the transform is the Laplace transform
    for u in (0.5, 1.0, 2.0):
        p = MParams(rho=0, m=1, u=u, v=0, omega=1)
        print(f"  u={u:<4}  M = {m_transform(f, p).value:.15f}   1/(u+1) = {1 / (u + 1):.15f}")

    # the natural transform interpolates Laplace (omega = 1) and Sumudu (u = 1)
    print("natural(e^-t, u=1, omega=2) =", natural(f, 1, 2.0).value, "(exact 1/3)")
    print("laplace(sin, u=1)          =", laplace(np.sin, 1).value, "(exact 1/2)")

    # closed-form images through the extended H-function against quadrature
    print("\nclosed forms vs quadrature (rho=1.5, m=2, u=1.2, v=0.4, omega=1.3)")
    p = MParams(rho=1.5, m=2, u=1.2, v=0.4, omega=1.3)
    rows = [
        ("x^(1.5-1)", image_power(1.5, p), m_transform(lambda x: x ** 0.5, p).value),
        ("exp(-0.7x)", image_exponential(0.7, p), m_transform(lambda x: np.exp(-0.7 * x), p).value),
    ]
    for name, closed, quad in rows:
        print(f"  {name:<11} H-form {closed:.14f}  quadrature {quad:.14f}  "
              f"rel {abs(closed - quad) / abs(quad):.1e}")

    # a slice of the identity suite
    print("\nscaling and elimination identities")
    for r in run_suite(["scaling", "elimination"])[:6]:
        print(" ", r)

    # rho = 1, m = 1, v = 0: the image of 1 is int e^{-ux}/(x + omega) dx = e^{u omega} E_1(u omega)
    val = m_transform(1, MParams(rho=1, m=1, u=1, v=0, omega=1)).value
    print(f"\nM[1] at rho=m=u=omega=1: {val:.15f}   e E_1(1) = {math.e * exp1(1.0):.15f}")


if __name__ == "__main__":
    main()
