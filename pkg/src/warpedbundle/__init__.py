"""Executable arithmetic for the alpha-warped (R, +) bundle over D/Z.

The disk D carries the Z-action ``n . z = z exp(2 pi i n alpha)``; its lift
``n . (z, t) = (z exp(2 pi i n alpha), t + n |z|^2)`` to D x R defines a
principal (R, +)-bundle W -> D/Z over a contractible base that is nonetheless
non-trivial and admits no connection. This package computes with it.
"""
from .bundle import (
    BasePath,
    EquivarianceReport,
    contract,
    gauge_lift,
    pullback_forward,
    pullback_inverse,
    radial_path,
    radial_paths,
    restrict_boundary,
    test_lift_equivariance,
    trivial_lift,
)
from .cohomology import (
    CircleFunction,
    CoboundaryReport,
    DiskFunction,
    certify_obstruction,
    class_is_trivial,
    delta_alpha,
    evaluate,
    gauge_residual,
    orbit_average,
    sample,
    solve_coboundary,
)
from .quotient import (
    DRep,
    MatchWindow,
    SampledPath,
    WRep,
    act_D,
    act_R,
    act_W,
    divide,
    divide_path,
    equal_in_D,
    equal_in_W,
    project,
)
from .rotation import (
    RotationNumber,
    convergents,
    make_rotation,
    min_orbit_gap,
    small_divisor,
    small_divisor_table,
)

__version__ = "0.1.0"
