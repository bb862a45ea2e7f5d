"""Gelfand-Cetlin systems on co-adjoint SO(n)-orbits.

Ladder-diagram faces, the exact polytope they describe, fiber topology
and the matrix numerics that tie both to actual skew-symmetric matrices.
"""

__version__ = "0.1.0"

from .errors import CapacityError, ContainmentError, GCError, UsageError, ValidationError
from .fibers import (
    BlockFilling,
    FiberDescriptor,
    StageRegion,
    StageStrings,
    cut_wblock,
    fiber_descriptor,
    fiber_descriptor_cut,
    fiber_descriptor_face,
    is_lagrangian,
    li_fill,
    stage_fiber,
    stage_strings,
)
from .ladder import (
    Coastline,
    DiagramFace,
    Isogram,
    LadderDiagram,
    LadderSpec,
    build_ladder,
    enumerate_coastlines,
    enumerate_faces,
    enumerate_isograms,
    f_vector,
    face_leq,
)
from .numerics import (
    FiberMatrixFamily,
    SphereRadii,
    char_poly_z,
    gc_map,
    pfaffian,
    reconstruct_matrix,
    sample_orbit_point,
    sphere_radii,
    terminal_x,
)
from .polytope import (
    FaceLattice,
    GCPoint,
    HPolytope,
    build_hrep,
    correspondence,
    enumerate_faces_bruteforce,
    face_of_point,
    face_support,
    locate_face,
    parse_point,
    verify_correspondence,
)

__all__ = [name for name in dir() if not name.startswith("_")]
