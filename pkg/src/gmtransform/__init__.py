"""Numerics for the generalized M-transform

    M_{rho,m}[f](u, v, w) = int_0^inf exp(-u x - v/x) (x^m + w^m)^(-rho) f(w x) dx

together with its operational rules, integral identities, inversion and two
PDE applications.
"""
from .errors import *  # noqa: F401,F403
from .quad import (QuadConfig, QuadResult, integrate_finite, integrate_semi_infinite,
                   integrate_tanh_sinh, integrate_vertical_line)
from .specfun import (ContourSpec, ExtHParams, gamma, gamma_ext, h_1111, h_ext_2112, loggamma)
from .mtransform import (FuncHandle, GrowthBound, MParams, borel_dzrbashjan, laplace, m_transform,
                         m_transform_many, mellin, natural, stieltjes, sumudu)
from .report import ResidualReport
from .rules import (apply_elimination, apply_scaling, image_exponential, image_power,
                    image_power_exponential, m_derivative, table1_residuals)
from .identities import (convolution_theorem, m_convolve, parseval, parseval_mixed,
                         relation_borel, relation_laplace, relation_mellin, relation_natural)
from .laplace_inv import InversionConfig, inverse_laplace, inverse_natural, m_inverse
from .pde import (HeatProblem, TransportProblem, heat_fd_oracle, solve_heat_series,
                  solve_transport, transport_char_oracle)
from .funcdsl import differentiate, fmt, parse, to_handle
from .suite import run_suite

__version__ = "0.1.0"
