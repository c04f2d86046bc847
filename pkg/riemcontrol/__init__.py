"""Riemcontrol
=====

Provides
 1. Closed-form Riemannian geometry (exponential and logarithm maps, parallel
    transport, curvature, Hessian of the squared distance) on Euclidean
    spaces, spheres, SO(3) and SPD matrices.
 2. Finite-difference oracles that check the closed forms.
 3. Integrators for first- and second-order dynamics on these manifolds, and
    variations along trajectories: Jacobi fields, linearized closed loops,
    complete lifts and exponential decay fits.
 4. Tracking controllers, speed observers, attitude filters, Killing filters
    and contraction certificates of gradient flows.
 5. A scenario runner that checks predicted convergence rates.

"""
__version__ = "0.3.0"
from .exceptions import RiemcontrolError, BasepointMismatch, \
    ConstraintViolation, InjectivityRadiusExceeded, AtCutLocus, \
    GridTooCoarse, DegenerateInput, StepTooLarge, ConstraintDrift, \
    NeighborLeftInjectivityGuard, NotAGeodesic, NotOnTrajectory, NotKilling, \
    BeyondValidityRange, NonPositiveSample, WindowTooSmall, GainOutOfRange, \
    ConfigInvalid
from .manifolds import Euclidean, Sphere, SO3, SPD, make_manifold, \
    ManifoldPoint, TangentVector, BilinearReport, zero_vector, inner, norm, \
    exp_map, log_map, dist, parallel_transport, curvature, \
    sectional_curvature, grad_half_sq_dist, hess_half_sq_dist, \
    laplacian_half_sq_dist
from .oracles import OracleConfig, SurfacePatch, fd_covariant_derivative, \
    check_metric_compatibility, check_torsion_free, fd_curvature, \
    check_swap_cov, check_separation_order, check_killing, \
    fd_hessian_half_sq_dist, richardson_slope
from .integrators import FirstOrderField, SecondOrderField, BundleSystem, \
    Trajectory, integrate_first_order, integrate_second_order, \
    integrate_bundle
from .variations import VariationTrack, DecayFit, LiftAnalysis, \
    propagate_variation_fd, propagate_jacobi, propagate_linearized_EL, \
    fit_decay, lift_frame_analysis, sasaki_distance, jacobi_energy, \
    frame_coordinates, commutation_residual
from .control_laws import Gains, Potential, ReferenceSignal, KillingField, \
    Isometry, zero_potential, gravity_potential, tracking_force, \
    tracking_field, tracking_system, speed_observer_field, observer_system, \
    so3_tracking_field, so3_reference_field, so3_tracking, \
    so3_filter_field, so3_filter, certify_killing, killing_filter_field, \
    killing_filter, killing_filter_discrete_step, congruence_isometry, \
    rotation_isometry, translation_isometry, gradient_flow_field, \
    gradient_flow, contraction_rate_bound, contraction_certificate, \
    volume_rate
from .scenarios import ScenarioConfig, RunReport, validate, run, run_suite, \
    list_scenarios

__all__ = ['RiemcontrolError',
           'BasepointMismatch',
           'ConstraintViolation',
           'InjectivityRadiusExceeded',
           'AtCutLocus',
           'GridTooCoarse',
           'DegenerateInput',
           'StepTooLarge',
           'ConstraintDrift',
           'NeighborLeftInjectivityGuard',
           'NotAGeodesic',
           'NotOnTrajectory',
           'NotKilling',
           'BeyondValidityRange',
           'NonPositiveSample',
           'WindowTooSmall',
           'GainOutOfRange',
           'ConfigInvalid',
           'Euclidean',
           'Sphere',
           'SO3',
           'SPD',
           'make_manifold',
           'ManifoldPoint',
           'TangentVector',
           'BilinearReport',
           'zero_vector',
           'inner',
           'norm',
           'exp_map',
           'log_map',
           'dist',
           'parallel_transport',
           'curvature',
           'sectional_curvature',
           'grad_half_sq_dist',
           'hess_half_sq_dist',
           'laplacian_half_sq_dist',
           'OracleConfig',
           'SurfacePatch',
           'fd_covariant_derivative',
           'check_metric_compatibility',
           'check_torsion_free',
           'fd_curvature',
           'check_swap_cov',
           'check_separation_order',
           'check_killing',
           'fd_hessian_half_sq_dist',
           'richardson_slope',
           'FirstOrderField',
           'SecondOrderField',
           'BundleSystem',
           'Trajectory',
           'integrate_first_order',
           'integrate_second_order',
           'integrate_bundle',
           'VariationTrack',
           'DecayFit',
           'LiftAnalysis',
           'propagate_variation_fd',
           'propagate_jacobi',
           'propagate_linearized_EL',
           'fit_decay',
           'lift_frame_analysis',
           'sasaki_distance',
           'jacobi_energy',
           'frame_coordinates',
           'commutation_residual',
           'Gains',
           'Potential',
           'ReferenceSignal',
           'KillingField',
           'Isometry',
           'zero_potential',
           'gravity_potential',
           'tracking_force',
           'tracking_field',
           'tracking_system',
           'speed_observer_field',
           'observer_system',
           'so3_tracking_field',
           'so3_reference_field',
           'so3_tracking',
           'so3_filter_field',
           'so3_filter',
           'certify_killing',
           'killing_filter_field',
           'killing_filter',
           'killing_filter_discrete_step',
           'congruence_isometry',
           'rotation_isometry',
           'translation_isometry',
           'gradient_flow_field',
           'gradient_flow',
           'contraction_rate_bound',
           'contraction_certificate',
           'volume_rate',
           'ScenarioConfig',
           'RunReport',
           'validate',
           'run',
           'run_suite',
           'list_scenarios']
