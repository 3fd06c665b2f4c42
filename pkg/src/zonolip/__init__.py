"""Certified local Lipschitz upper bounds for feedforward networks.

The bound comes from propagating the input region through the network with
hyperboxes or zonotopes, boxing each nonlinearity's derivative range, pushing
the dual-norm unit ball backwards through the same layers, and maximizing the
l1 norm over the resulting set of attainable gradient-vector products.
"""

from .netio import (
    Affine,
    ConvSpec,
    NetworkIR,
    Nonlin,
    VJPResult,
    eval_network,
    gen_random_net,
    load_network,
    lower_conv,
    sampled_lower_bound,
    save_network,
    vjp,
)
from .normmax import (
    NormMaxResult,
    l1max_exact,
    l1max_hyperbox,
    l1max_lp,
    matnorm_inf_to_1,
)
from .propagate import (
    DomainChoice,
    LayerTrace,
    LipschitzReport,
    backward_pass,
    elementwise_jacobian,
    elementwise_mul_set,
    forward_pass,
    map_nonlin,
    zlip,
)
from .sets import (
    Hyperbox,
    LinMaxResult,
    Zonotope,
    affine_map_box,
    affine_map_zono,
    box_linmax,
    drop_zero_generators,
    hadamard_scale_zono,
    minkowski_sum,
    reduce_generators,
    zono_interval_hull,
    zono_linmax,
)
from .vpfit import (
    MulBounds,
    PiecewiseHull,
    VPFit,
    upper_hull_giftwrap,
    vp_fit,
    vp_fit_abs,
    vp_fit_mul,
    vp_fit_relu,
    vp_fit_sshaped,
    vp_verify,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
