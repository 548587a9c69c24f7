"""croftonkit: Monte Carlo integral geometry over kinematic-measure lines.

Random lines hitting a convex body are sampled from the rigid-motion
invariant line measure; the toolkit estimates hit-count distributions,
Crofton-type areas, chord statistics, and pair probabilities, and carries
the curvature machinery for a numerical "sphere certificate" (constant
chord-endpoint kernel + everywhere-umbilic boundary characterize the round
2-sphere among smooth convex bodies)."""

from .curvature import (KernelSample, SecondFundamentalForm, SphereCertificate,
                        kernel_F, kernel_local_asymptotic, normal_at,
                        principal_curvatures, second_fundamental_form,
                        second_fundamental_form_fd, sphere_certificate,
                        umbilic_defect)
from .errors import (CroftonkitError, MeshFormatError, NonConvexityDetected,
                     ProposalBudgetExceeded, RejectionBudgetExceeded,
                     TangentialContact)
from .estimators import (ArchimedesResult, CellPartition, ChordCdfResult,
                         ChordScalingResult, EstimatorReport, HitDistribution,
                         IndependenceResult, PairHitResult, archimedes_check,
                         build_cell_partition, chord_cdf, chord_scaling,
                         crofton_area, dot_moment, estimate_hit_distribution,
                         independence_chisq, pair_hit_probability,
                         quad_crofton_check, quad_crofton_constant)
from .geometry import (Cap, ConvexBody, DirectedLine, Ellipsoid, HalfSpaceCut,
                       ImplicitConvex, LatLonBox, Sphere, SurfacePatch,
                       TransformedBody, TriangleMesh, WholeBoundary,
                       cap_area_exact, cap_patch, half_space_patch,
                       lat_lon_patch, patch_complement, patch_contains,
                       patch_intersection, patch_union, sigma_exact,
                       sphere_cap_sigma, surface_area_exact, unit_sphere,
                       whole_boundary)
from .intersect import (HitRecord, count_patch_hits, intersect_ellipsoid,
                        intersect_implicit, intersect_line, intersect_mesh,
                        intersect_sphere)
from .meshio import cube_mesh, icosphere_mesh, load_mesh, save_obj, save_off
from .rng import RandomStream
from .sampling import (ChordSample, KinematicLineSampler, sample_chord,
                       sample_kinematic_line, uniform_ball_point,
                       uniform_ball_points, uniform_patch_point,
                       uniform_patch_points, uniform_sphere_point,
                       uniform_sphere_points)

__version__ = "0.1.0"
