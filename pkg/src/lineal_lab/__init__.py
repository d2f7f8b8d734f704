"""Dyadic-grid experiments on line extensions of fractal sets and exact complexity profiles."""

from .atlas import FORMULAS, eval_bound, verify_ren_wang_cor
from .constructions import (
    cantor,
    cantor_dimension,
    decode_assist,
    encode_assist,
    graph_chart,
    graph_set,
    recover_pair,
    slope_pencil,
    split_dim_zero,
    two_point_example,
)
from .digits import BitString, DigitRule
from .dimension import DimReport, Verdict, dim_report, inequality_verdict
from .dyadic import (
    DyadicCell,
    DyadicSet,
    LineFamily,
    LineSpec,
    box_count,
    coarsen,
    rasterize_line,
    slice_set,
)
from .errors import LabError
from .extensions import direction_set, lineal_extension, s_hausdorff_extension, two_point_extension
from .kprofile import KProfile, clamp_oracle, join, lower_bound_xaxb, subtract, upper_bound_xaxb
from .search import SearchConfig, adversarial_search
from .suite import run_suite

__version__ = "0.1.0"
