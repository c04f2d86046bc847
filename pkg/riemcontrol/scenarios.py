# -*- coding: utf-8 -*-
"""
Scenario runner: loads TOML scenario files, wires manifolds, laws and
integrators, writes the time series as CSV and checks the measured decay
rates against their predictions.

Created on Mon Oct 19 09:40:27 2026

@author: riemcontrol developers
"""
from __future__ import division, print_function
import copy
import json
import os
import sys
import time
import numpy as np
from scipy.linalg import expm
try:
    import tomllib
except ImportError:
    import tomli as tomllib
try:
    from multiprocessing import Pool
except ImportError:
    pass
from .control_laws import Gains, ReferenceSignal, certify_killing, \
    congruence_isometry, contraction_certificate, contraction_rate_bound, \
    gradient_flow, gravity_potential, killing_filter, \
    killing_filter_discrete_step, observer_system, so3_filter, \
    so3_filter_field, so3_reference_field, so3_tracking, tracking_field, \
    tracking_system, volume_rate, zero_potential
from .exceptions import ConfigInvalid, ConstraintViolation, RiemcontrolError
from .integrators import FirstOrderField, SecondOrderField, \
    integrate_bundle, integrate_first_order, integrate_second_order
from .manifolds import Euclidean, ManifoldPoint, SO3, TangentVector, \
    make_manifold, zero_vector
from .matrix_utils import rotation_matrix
from .oracles import richardson_slope
from .variations import fit_decay, frame_coordinates, jacobi_energy, \
    lift_frame_analysis, propagate_jacobi, propagate_linearized_EL, \
    propagate_variation_fd, sasaki_distance

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                          "configs")
OUTPUT_ENV = "RIEMCONTROL_OUTPUT_DIR"
PRNG = "PCG64"

_TOP_KEYS = ("scenario", "seed", "t_span", "h", "eps", "output", "manifold",
             "gains", "initial", "options")
_MANIFOLD_KEYS = ("kind", "n", "radius")


###########################################################################
# CONFIGURATION                                                           #
###########################################################################

class ScenarioConfig(object):
    """Parameters of one scenario run.

    :param scenario: Scenario id, see :func:`list_scenarios`.
    :type scenario: str.
    :param seed: Seed of the PCG64 generator used for random draws.
    :type seed: int.
    :param t_span: Initial and final time.
    :param h: Integration step.
    :param eps: Perturbation size of finite-difference variations.
    :param output: Output directory.
    :param manifold: Table with ``kind``, ``n`` and ``radius``.
    :param gains: Table of gains, see :class:`riemcontrol.control_laws.Gains`.
    :param initial: Table of initial conditions as coordinate arrays.
    :param options: Scenario-specific options.
    """

    def __init__(self, scenario, seed=0, t_span=None, h=None, eps=1e-5,
                 output=None, manifold=None, gains=None, initial=None,
                 options=None, unknown=None, source=None):
        self.scenario = scenario
        self.seed = seed
        self.t_span = t_span
        self.h = h
        self.eps = eps
        self.output = output
        self.manifold = dict(manifold or {})
        self.gains = dict(gains or {})
        self.initial = dict(initial or {})
        self.options = dict(options or {})
        self.unknown = list(unknown or [])
        self.source = source

    def __repr__(self):
        return "ScenarioConfig(%r, seed=%r)" % (self.scenario, self.seed)

    @classmethod
    def from_dict(cls, data, source=None):
        data = dict(data)
        unknown = sorted(key for key in data if key not in _TOP_KEYS)
        kwargs = dict((key, data[key]) for key in _TOP_KEYS if key in data)
        if "scenario" not in kwargs:
            kwargs["scenario"] = None
        return cls(unknown=unknown, source=source, **kwargs)

    @classmethod
    def from_file(cls, path):
        """Read a scenario file.

        :raises ConfigInvalid: if the file is not valid TOML.
        """
        with open(path, "rb") as fp:
            try:
                data = tomllib.load(fp)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigInvalid("Cannot parse " + str(path) + ": " +
                                    str(exc))
        return cls.from_dict(data, source=str(path))

    def with_overrides(self, seed=None, h=None):
        config = copy.deepcopy(self)
        if seed is not None:
            config.seed = seed
        if h is not None:
            config.h = h
        return config

    def to_dict(self):
        data = dict((key, getattr(self, key)) for key in _TOP_KEYS)
        return dict((k, v) for k, v in data.items() if v is not None)

    def build_manifold(self):
        return make_manifold(self.manifold.get("kind", ""),
                             self.manifold.get("n"),
                             self.manifold.get("radius", 1.0))

    def build_gains(self):
        return Gains(**self.gains)

    @property
    def n_steps(self):
        return int(round((self.t_span[1] - self.t_span[0]) / self.h))


class Violation(object):
    """A reason why a configuration cannot run. `kind` is the name of the
    exception class the violation corresponds to."""

    def __init__(self, kind, message):
        self.kind = kind
        self.message = message

    def __repr__(self):
        return "Violation(%r, %r)" % (self.kind, self.message)

    def __str__(self):
        return self.kind + ": " + self.message


class _Scenario(object):

    def __init__(self, name, func, kinds, gains, initial, options, check):
        self.name = name
        self.func = func
        self.kinds = kinds
        self.gains = gains
        self.initial = initial
        self.options = options
        self.check = check


SCENARIOS = {}


def _scenario(name, kinds, gains=(), initial=None, options=(), check=None):
    """Register a scenario. `initial` maps initial-condition names to one of
    "point", "vector" or "scalar"."""
    def register(func):
        SCENARIOS[name] = _Scenario(name, func, kinds, gains, initial or {},
                                    options, check)
        return func
    return register


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool) \
        and np.isfinite(value)


def validate(config):
    """Collect every reason why `config` cannot run.

    :param config: The configuration.
    :type config: :class:`ScenarioConfig`.

    :returns: list of :class:`Violation`; empty iff the scenario can run.
    """
    violations = []

    def add(kind, message):
        violations.append(Violation(kind, message))

    for key in config.unknown:
        add("ConfigInvalid", "Unknown key " + key)
    entry = SCENARIOS.get(config.scenario)
    if entry is None:
        add("ConfigInvalid", "Unknown scenario " + repr(config.scenario))
        return violations
    if not isinstance(config.seed, int) or isinstance(config.seed, bool) \
            or config.seed < 0:
        add("ConfigInvalid", "seed must be a nonnegative integer")
    span_ok = isinstance(config.t_span, (list, tuple)) and \
        len(config.t_span) == 2 and all(_is_number(t) for t in config.t_span)
    if not span_ok or config.t_span[1] <= config.t_span[0]:
        add("ConfigInvalid", "t_span must be two increasing numbers")
    elif not _is_number(config.h) or config.h <= 0:
        add("ConfigInvalid", "h must be a positive number")
    else:
        length = config.t_span[1] - config.t_span[0]
        n = int(round(length / config.h))
        if n < 1 or abs(n * config.h - length) > 1e-9 * max(1.0, length):
            add("ConfigInvalid", "t_span length must be a multiple of h")
    if not _is_number(config.eps) or not 1e-6 <= config.eps <= 1e-3:
        add("ConfigInvalid", "eps must lie in [1e-6, 1e-3]")
    for key in config.manifold:
        if key not in _MANIFOLD_KEYS:
            add("ConfigInvalid", "Unknown key manifold." + key)
    M = None
    if config.manifold.get("kind") not in entry.kinds:
        add("ConfigInvalid", "Scenario " + entry.name + " runs on " +
            " or ".join(entry.kinds))
    else:
        try:
            M = config.build_manifold()
        except (ValueError, TypeError) as exc:
            add("ConfigInvalid", str(exc))
    for key, value in config.gains.items():
        if key not in Gains._names:
            add("ConfigInvalid", "Unknown key gains." + key)
        elif not _is_number(value):
            add("GainOutOfRange", "Gain " + key + " must be a number")
    for name in entry.gains:
        value = config.gains.get(name)
        if value is None:
            add("GainOutOfRange", "Gain " + name + " is missing")
        elif _is_number(value) and value <= 0:
            add("GainOutOfRange", "Gain " + name + " must be positive")
    for key in config.initial:
        if key not in entry.initial:
            add("ConfigInvalid", "Unknown key initial." + key)
    for key, role in sorted(entry.initial.items()):
        if key not in config.initial:
            add("ConfigInvalid", "Missing initial." + key)
            continue
        message = _check_initial(M, role, config.initial[key])
        if message is not None:
            add(*message)
    for key in config.options:
        if key not in entry.options:
            add("ConfigInvalid", "Unknown key options." + key)
    if entry.check is not None and not violations:
        for kind, message in entry.check(config, M):
            add(kind, message)
    return violations


def _check_initial(M, role, value):
    if role == "scalar":
        if not _is_number(value):
            return "ConfigInvalid", "Initial scalar must be a number"
        return None
    try:
        arr = np.asarray(value, dtype=float)
    except (ValueError, TypeError):
        return "ConfigInvalid", "Initial condition is not a numeric array"
    if M is None:
        return None
    if arr.shape != M.ambient_shape or not np.all(np.isfinite(arr)):
        return "ConstraintViolation", "Initial condition must be a finite " \
            "array of shape " + str(M.ambient_shape)
    if role == "point":
        try:
            M.check_point(M.project_point(arr), 1e-8)
        except ConstraintViolation as exc:
            return "ConstraintViolation", str(exc)
    return None


def _check_angle(config, M):
    if not 0 < config.initial["angle"] < np.pi / 2:
        yield "ConstraintViolation", "Initial angle must lie in (0, pi/2)"


def _check_offset(config, M):
    if not 0 < config.initial["offset"] < 0.5 * M.injectivity_radius:
        yield "ConstraintViolation", "Initial offset must be positive and " \
            "below half the injectivity radius"


def _check_discrete(config, M):
    k = config.gains["k"]
    if not k * config.h < 1:
        yield "GainOutOfRange", "k*h = %g must lie in (0, 1)" % (k * config.h)


###########################################################################
# REPORTS                                                                 #
###########################################################################

class Criterion(object):
    """One pass/fail check of a scenario.

    Comparisons: "relative" |m - p| <= tol |p|, "absolute" |m - p| <= tol,
    "at_most" m <= p + tol, "at_least" m >= p - tol, "below" m < p and
    "above" m > p.
    """

    def __init__(self, name, measured, predicted, tolerance,
                 comparison="relative", provenance=""):
        self.name = name
        self.measured = float(measured)
        self.predicted = float(predicted)
        self.tolerance = float(tolerance)
        self.comparison = comparison
        self.provenance = provenance
        m, p, tol = self.measured, self.predicted, self.tolerance
        if comparison == "relative":
            self.passed = abs(m - p) <= tol * abs(p)
        elif comparison == "absolute":
            self.passed = abs(m - p) <= tol
        elif comparison == "at_most":
            self.passed = m <= p + tol
        elif comparison == "at_least":
            self.passed = m >= p - tol
        elif comparison == "below":
            self.passed = m < p
        elif comparison == "above":
            self.passed = m > p
        else:
            raise ValueError("Unknown comparison " + comparison)
        self.passed = bool(self.passed and np.isfinite(m))

    def __repr__(self):
        return "Criterion(%s: measured %.6g, predicted %.6g, %s)" % \
            (self.name, self.measured, self.predicted,
             "pass" if self.passed else "FAIL")

    def to_dict(self):
        return {"name": self.name, "measured": self.measured,
                "predicted": self.predicted, "tolerance": self.tolerance,
                "comparison": self.comparison, "provenance": self.provenance,
                "passed": self.passed}


class RunReport(object):
    """Outcome of a scenario run: decay fits, criteria, findings and
    bookkeeping."""

    def __init__(self, scenario, seed, name=None):
        self.scenario = scenario
        self.name = name or scenario
        self.seed = seed
        self.prng = PRNG
        self.fits = {}
        self.criteria = []
        self.findings = []
        self.wall_time = None
        self.csv_path = None
        self.report_path = None

    def __repr__(self):
        return "RunReport(%s, %d/%d criteria passed)" % \
            (self.name, sum(c.passed for c in self.criteria),
             len(self.criteria))

    @property
    def passed(self):
        return len(self.criteria) > 0 and all(c.passed for c in self.criteria)

    def add_fit(self, name, fit):
        self.fits[name] = fit
        return fit

    def check(self, name, measured, predicted, tolerance,
              comparison="relative", provenance=""):
        criterion = Criterion(name, measured, predicted, tolerance,
                              comparison, provenance)
        self.criteria.append(criterion)
        return criterion

    def finding(self, message):
        self.findings.append(message)

    def to_dict(self):
        return {"scenario": self.scenario, "name": self.name,
                "seed": self.seed, "prng": self.prng, "passed": self.passed,
                "wall_time": self.wall_time, "csv": self.csv_path,
                "fits": dict((k, f.to_dict()) for k, f in self.fits.items()),
                "criteria": [c.to_dict() for c in self.criteria],
                "findings": list(self.findings)}

    def write(self, path):
        with open(path, "w") as fp:
            json.dump(self.to_dict(), fp, indent=2, sort_keys=True)
            fp.write("\n")
        self.report_path = path


def write_csv(path, columns, data):
    """Write columns of equal length as comma-separated values with 17
    significant digits and a header row."""
    np.savetxt(path, np.column_stack(data), fmt="%.17g", delimiter=",",
               header=",".join(columns), comments="", newline="\n")


def output_dir(config, out_dir=None):
    """Resolve the output directory: explicit argument, environment variable,
    the config's ``output`` entry, the current directory."""
    for candidate in (out_dir, os.environ.get(OUTPUT_ENV), config.output):
        if candidate:
            return candidate
    return os.getcwd()


def run(config, out_dir=None, verbose=0):
    """Run a scenario and write ``<name>.csv`` and ``<name>_report.json``,
    where name is the stem of the scenario file (the scenario id for configs
    built in memory).

    :param config: The configuration.
    :type config: :class:`ScenarioConfig`.
    :param out_dir: Output directory; see :func:`output_dir`.
    :type out_dir: str.
    :param verbose: Level of verbosity: 0 quiet, 1 summary, 2 progress.
    :type verbose: int.

    :returns: :class:`RunReport`.
    :raises ConfigInvalid: if the configuration does not validate.
    """
    violations = validate(config)
    if violations:
        raise ConfigInvalid("; ".join(str(v) for v in violations))
    entry = SCENARIOS[config.scenario]
    rng = np.random.Generator(np.random.PCG64(config.seed))
    stem = os.path.splitext(os.path.basename(config.source))[0] \
        if config.source else config.scenario
    report = RunReport(config.scenario, config.seed, stem)
    if verbose > 0:
        print("Running " + config.scenario + " (seed %d)" % config.seed)
    tstart = time.time()
    try:
        columns, data = entry.func(config, rng, report, verbose)
    except RiemcontrolError as exc:
        raise type(exc)("Scenario " + config.scenario + ": " + str(exc)) \
            from exc
    report.wall_time = time.time() - tstart
    directory = output_dir(config, out_dir)
    if not os.path.isdir(directory):
        os.makedirs(directory)
    report.csv_path = os.path.join(directory, stem + ".csv")
    write_csv(report.csv_path, columns, data)
    report.write(os.path.join(directory, stem + "_report.json"))
    if verbose > 0:
        for criterion in report.criteria:
            print("  " + repr(criterion))
        for finding in report.findings:
            print("  Finding: " + finding, file=sys.stderr)
    return report


###########################################################################
# SCENARIO HELPERS                                                        #
###########################################################################

def _point(M, config, name):
    return ManifoldPoint(M, M.project_point(np.asarray(config.initial[name],
                                                       dtype=float)))


def _tangent(p, value):
    M = p.manifold
    return TangentVector(p, M.project_tangent(p.coords,
                                              np.asarray(value, dtype=float)),
                         check=False)


def _offset(p, distance, rng):
    """Point at `distance` from p in a random direction, with the tangent
    step used to reach it."""
    M = p.manifold
    w = distance * M.random_tangent(p.coords, rng)
    return ManifoldPoint(M, M.project_point(M.exp(p.coords, w)),
                         check=False), w


def _damped_rate(c1, c0):
    """Decay rate of the slowest solution of y'' + c1 y' + c0 y = 0."""
    disc = c1 ** 2 - 4 * c0
    if disc >= 0:
        return (c1 - np.sqrt(disc)) / 2
    return c1 / 2


def _potential(M, config, default="none"):
    kind = config.options.get("potential", default)
    if kind == "gravity":
        return gravity_potential(M, config.options.get("g", 1.0))
    elif kind == "none":
        return zero_potential(M)
    raise ConfigInvalid("Unknown potential " + str(kind))


def _omega(config):
    scale = config.options.get("omega_scale", 1.0)
    return lambda t: scale * np.array([np.sin(t), 0.0, np.cos(t)])


def _sampled_reference(field, x0, config):
    """First-order reference integrated at h/2, so that every stage time of
    an RK4 step of size h is a sample."""
    traj = integrate_first_order(field, x0, config.t_span, config.h / 2)
    return traj, ReferenceSignal.from_trajectory(traj, field)


def _verbose_inner(verbose):
    return verbose - 1 if verbose > 1 else 0


###########################################################################
# SCENARIOS                                                               #
###########################################################################

@_scenario("tracking_sphere", kinds=("sphere",), gains=("k1", "k2"),
           initial={"ref_q": "point", "ref_v": "vector", "offset": "scalar"},
           options=("potential", "g", "window_frac", "tolerance",
                    "linearization_span", "feasibility_tol"),
           check=_check_offset)
def _tracking_sphere(config, rng, report, verbose):
    M = config.build_manifold()
    gains = config.build_gains()
    potential = _potential(M, config)
    window = config.options.get("window_frac", 0.5)
    vin = _verbose_inner(verbose)
    qs0 = _point(M, config, "ref_q")
    vs0 = _tangent(qs0, config.initial["ref_v"])
    q0, w = _offset(qs0, config.initial["offset"], rng)
    v0 = M.transp_exp(qs0.coords, w, vs0.coords)
    plant, ref = integrate_bundle(tracking_system(potential, gains),
                                  [q0, qs0], [v0, vs0], config.t_span,
                                  config.h, vin)
    times = plant.times
    distance = np.array([M.dist(a, b) for a, b in zip(plant.points,
                                                      ref.points)])
    error = np.array([sasaki_distance(ref.velocity(i), plant.velocity(i))
                      for i in range(len(times))])
    fit = report.add_fit("sasaki_error", fit_decay(times, error, window))

    # Linearized prediction from the same initial variation.
    var0 = TangentVector(ref.point(0), M.log(qs0.coords, q0.coords),
                         check=False)
    dvar0 = TangentVector(ref.point(0), M.transp(q0.coords, qs0.coords, v0) -
                          vs0.coords, check=False)
    lin = propagate_linearized_EL(ref, gains.k1, gains.k2, potential, var0,
                                  dvar0)
    lin_error = lin.sasaki_norms()
    lin_fit = report.add_fit("linearized", fit_decay(times, lin_error,
                                                     window))
    tol = config.options.get("tolerance", 0.25)
    if config.options.get("potential", "none") == "none":
        report.check("decay_rate", fit.lam, _damped_rate(gains.k1, gains.k2),
                     tol, provenance="slowest root of s^2 + k1 s + k2 of the "
                     "linearized error dynamics")
    else:
        report.check("decay_rate", fit.lam, lin_fit.lam, tol,
                     provenance="decay rate of the linearized closed loop "
                     "along the reference")

    _linearization_check(M, potential, gains, qs0, vs0, config, rng, report,
                         vin)
    columns = ["t", "distance", "sasaki_error", "linearized_sasaki"]
    return columns, [times, distance, error, lin_error]


def _linearization_check(M, potential, gains, qs0, vs0, config, rng, report,
                         verbose):
    """Compare finite-difference variations of the closed loop with the
    linearized dynamics along the reference, both in parallel frames."""
    span = config.options.get("linearization_span", 2.0)
    h = config.h / 2
    t_span = (config.t_span[0], config.t_span[0] + span)
    free = SecondOrderField(M, lambda t, x, v: -potential.gradient(x), "free")
    ref_traj = integrate_second_order(free, qs0, vs0, t_span, h / 2, verbose)
    ref = ReferenceSignal.from_trajectory(ref_traj)
    report.check("reference_feasibility",
                 ref.feasibility_residual(potential, ref_traj.times), 0.0,
                 config.options.get("feasibility_tol", 1e-6), "at_most",
                 "the reference solves the uncontrolled dynamics")
    v = _tangent(qs0, M.random_tangent(qs0.coords, rng))
    w = _tangent(qs0, M.random_tangent(qs0.coords, rng))
    tol = max(1e-3, 10 * config.eps)

    def residual(sign):
        closed = tracking_field(potential, ref, gains, curvature_sign=sign)
        base = integrate_second_order(closed, qs0, vs0, t_span, h, verbose)
        fd = propagate_variation_fd(closed, base, v, config.eps, w)
        start = base.point(0)
        lin = propagate_linearized_EL(
            base, gains.k1, gains.k2, potential,
            TangentVector(start, v.coords, check=False),
            TangentVector(start, w.coords, check=False))
        c_fd, cd_fd = frame_coordinates(fd)
        c_lin, cd_lin = frame_coordinates(lin)
        return max(np.abs(c_fd - c_lin).max(), np.abs(cd_fd - cd_lin).max())

    value = residual(1.0)
    if value > tol:
        flipped = residual(-1.0)
        report.finding("Linearization residual %.3g with u_R = R(grad F, "
                       "qdot) qdot; %.3g with the opposite sign" %
                       (value, flipped))
    report.check("linearization", value, 0.0, tol, "absolute",
                 "curvature compensation cancels the curvature term of the "
                 "variation equation")


@_scenario("observer_sphere_pendulum", kinds=("sphere",),
           gains=("alpha", "beta"),
           initial={"q": "point", "v": "vector", "offset": "scalar"},
           options=("potential", "g", "window_frac", "tolerance",
                    "velocity_offset"),
           check=_check_offset)
def _observer_sphere_pendulum(config, rng, report, verbose):
    M = config.build_manifold()
    gains = config.build_gains()
    options = config.options
    potential = _potential(M, config, "gravity")
    q0 = _point(M, config, "q")
    v0 = _tangent(q0, config.initial["v"])
    qh0, w = _offset(q0, config.initial["offset"], rng)
    vh0 = M.transp_exp(q0.coords, w, v0.coords)
    dv = options.get("velocity_offset", 0.0)
    if dv:
        vh0 = vh0 + dv * M.random_tangent(qh0.coords, rng)
    plant, obs = integrate_bundle(observer_system(potential, gains),
                                  [q0, qh0], [v0, vh0], config.t_span,
                                  config.h, _verbose_inner(verbose))
    times = plant.times
    distance = np.array([M.dist(a, b) for a, b in zip(plant.points,
                                                      obs.points)])
    error = np.array([sasaki_distance(plant.velocity(i), obs.velocity(i))
                      for i in range(len(times))])
    fit = report.add_fit("sasaki_error",
                         fit_decay(times, error,
                                   options.get("window_frac", 0.5)))
    report.check("decay_rate", fit.lam,
                 _damped_rate(gains.alpha, gains.beta),
                 options.get("tolerance", 0.25),
                 provenance="slowest root of s^2 + alpha s + beta of the "
                 "observer error dynamics")
    return ["t", "distance", "sasaki_error"], [times, distance, error]


@_scenario("so3_filter", kinds=("so3",), gains=("k",),
           initial={"ref_q": "point", "angle": "scalar"},
           options=("omega_scale", "window_frac", "tolerance"),
           check=_check_angle)
def _so3_filter(config, rng, report, verbose):
    M = SO3()
    k = config.gains["k"]
    omega = _omega(config)
    window = config.options.get("window_frac", 0.2)
    tol = config.options.get("tolerance", 0.25)
    R0 = _point(M, config, "ref_q")
    axis = rng.standard_normal(3)
    angle = config.initial["angle"]
    Rh0 = ManifoldPoint(M, R0.coords.dot(rotation_matrix(axis, angle)),
                        check=False)
    plant, measured = _sampled_reference(so3_reference_field(omega, M), R0,
                                         config)
    times = plant.times[::2]
    columns, data = ["t"], [times]
    for variant in ("gradient", "log"):
        traj = integrate_first_order(so3_filter(measured, omega, k, variant),
                                     Rh0, config.t_span, config.h,
                                     verbose=_verbose_inner(verbose))
        frob = np.array([np.linalg.norm(a - b) for a, b in
                         zip(traj.points, plant.points[::2])])
        ang = np.array([M.dist(a, b) / np.sqrt(2.0) for a, b in
                        zip(traj.points, plant.points[::2])])
        fit = report.add_fit(variant, fit_decay(times, frob, window))
        report.check("rate_" + variant, fit.lam, k, tol,
                     provenance="Hess F = g at the estimate for "
                     "F = |R - R_hat|^2 / 2")
        if abs(fit.lam - k / 4) > tol * k / 4:
            report.finding("Variant %s decays at %.4g; the rate k/4 = %.4g "
                           "does not hold for the trace metric" %
                           (variant, fit.lam, k / 4))
        columns += ["frobenius_" + variant, "angle_" + variant]
        data += [frob, ang]

    def difference(theta):
        Rh = ManifoldPoint(M, R0.coords.dot(rotation_matrix(axis, theta)),
                           check=False)
        a = so3_filter_field(Rh, R0, omega(0.0), k, "gradient")
        b = so3_filter_field(Rh, R0, omega(0.0), k, "log")
        return np.linalg.norm(a.coords - b.coords)

    order = richardson_slope(difference, angle * 0.5 ** np.arange(6))
    report.check("variant_difference_order", order, 2.0, 0.1, "at_least",
                 "both corrections agree to first order in the error angle")
    return columns, data


@_scenario("so3_tracking", kinds=("so3",), gains=("k",),
           initial={"ref_q": "point", "angle": "scalar"},
           options=("omega_scale", "window_frac", "tolerance"),
           check=_check_angle)
def _so3_tracking(config, rng, report, verbose):
    M = SO3()
    k = config.gains["k"]
    omega = _omega(config)
    window = config.options.get("window_frac", 0.2)
    R0 = _point(M, config, "ref_q")
    ref_traj, ref = _sampled_reference(so3_reference_field(omega, M), R0,
                                       config)
    start = ManifoldPoint(M, R0.coords.dot(rotation_matrix(
        rng.standard_normal(3), config.initial["angle"])), check=False)
    traj = integrate_first_order(so3_tracking(ref, omega, k), start,
                                 config.t_span, config.h,
                                 verbose=_verbose_inner(verbose))
    frob = np.array([np.linalg.norm(a - b) for a, b in
                     zip(traj.points, ref_traj.points[::2])])
    fit = report.add_fit("frobenius_error", fit_decay(traj.times, frob,
                                                      window))
    report.check("decay_rate", fit.lam, k,
                 config.options.get("tolerance", 0.25),
                 provenance="Hess F = g at the reference for "
                 "F = |R - R_ref|^2 / 2")
    if abs(fit.lam - k / 4) > 0.25 * k / 4:
        report.finding("Tracking error decays at %.4g; the rate k/4 = %.4g "
                       "does not hold for the trace metric" % (fit.lam, k / 4))
    return ["t", "frobenius_error"], [traj.times, frob]


@_scenario("killing_spd_continuous", kinds=("spd",), gains=("k",),
           initial={"q": "point", "qhat": "point"},
           options=("drift", "omega", "window_frac", "tolerance"))
def _killing_spd_continuous(config, rng, report, verbose):
    M = config.build_manifold()
    k = config.gains["k"]
    q0 = _point(M, config, "q").coords
    drift = config.options.get("drift", "none")
    if drift == "rotation":
        W = np.zeros((M.n, M.n))
        W[1, 0] = config.options.get("omega", 0.5)
        W[0, 1] = -W[1, 0]

        def rate(t, x):
            return W.dot(x) + x.dot(W.T)

        def plant(t):
            G = expm(t * W)
            return G.dot(q0).dot(G.T)
    elif drift == "none":
        def rate(t, x):
            return np.zeros_like(x)

        def plant(t):
            return q0
    else:
        raise ConfigInvalid("Unknown drift " + str(drift))
    field = certify_killing(FirstOrderField(M, rate, drift), rng=rng)
    report.check("killing_certificate", field.residual, 0.0, field.tol,
                 "at_most", "the drift is a Killing field")
    measured = ReferenceSignal(M, lambda t: (plant(t), rate(t, plant(t))))
    traj = integrate_first_order(killing_filter(field, measured, k),
                                 _point(M, config, "qhat"), config.t_span,
                                 config.h, verbose=_verbose_inner(verbose))
    distance = np.array([M.dist(x, plant(t)) for t, x in
                         zip(traj.times, traj.points)])
    fit = report.add_fit("distance", fit_decay(
        traj.times, distance, config.options.get("window_frac", 0.2)))
    report.check("decay_rate", fit.lam, k,
                 config.options.get("tolerance", 0.05) * k, "at_least",
                 "Hess F >= g on a space of nonpositive curvature")
    return ["t", "distance"], [traj.times, distance]


@_scenario("killing_spd_discrete", kinds=("spd",), gains=("k",),
           initial={"q": "point", "qhat": "point"},
           options=("angle", "transient", "ratio_bound"),
           check=_check_discrete)
def _killing_spd_discrete(config, rng, report, verbose):
    M = config.build_manifold()
    k, dt = config.gains["k"], config.h
    J = np.zeros((M.n, M.n))
    J[1, 0], J[0, 1] = 1.0, -1.0
    tau = congruence_isometry(M, expm(config.options.get("angle", 0.05) * J))
    n = config.n_steps
    times = config.t_span[0] + dt * np.arange(n + 1)
    q = _point(M, config, "q").coords
    qh = _point(M, config, "qhat")
    distance = np.empty(n + 1)
    for i in range(n + 1):
        distance[i] = M.dist(qh.coords, q)
        if i == n:
            break
        qh = killing_filter_discrete_step(qh, ManifoldPoint(M, q, check=False),
                                          tau, k, dt)
        q = tau.apply(q)
        if verbose > 1:
            sys.stdout.write("\r\x1b[KStep %d/%d" % (i + 1, n))
            sys.stdout.flush()
    if verbose > 1:
        sys.stdout.write("\n")
    ratios = np.r_[np.nan, distance[1:] / distance[:-1]]
    transient = config.options.get("transient", 10)
    report.check("max_step_ratio", np.nanmax(ratios[transient + 1:]),
                 config.options.get("ratio_bound", 0.95), 0.0, "at_most",
                 "sampled filter with an isometric plant step")
    report.check("mean_step_ratio", np.nanmean(ratios[transient + 1:]),
                 1 - k * dt, 1e-3, "absolute",
                 "the correction moves a fraction k dt along the geodesic to "
                 "the measurement")
    fit = report.add_fit("distance", fit_decay(times, distance, 0.0))
    report.check("decay_rate", fit.lam, -np.log(1 - k * dt) / dt, 0.05,
                 provenance="per-step factor 1 - k dt")
    return ["t", "distance", "step_ratio"], [times, distance, ratios]


@_scenario("gradient_flow_contraction", kinds=("sphere",),
           gains=("lam_flow",), initial={"P": "point"},
           options=("n_pairs", "max_distance", "separation", "rate_window",
                    "slack"))
def _gradient_flow_contraction(config, rng, report, verbose):
    M = config.build_manifold()
    lam = config.gains["lam_flow"]
    A = M.curvature_bounds[1]
    P = _point(M, config, "P")
    field = gradient_flow(M, P, lam)
    opts = config.options
    dmax_allowed = opts.get("max_distance", np.pi / 3)
    sep = opts.get("separation", 0.1)
    slack = opts.get("slack", 0.05)
    vin = _verbose_inner(verbose)

    def flow(x):
        return integrate_first_order(field, ManifoldPoint(M, x, check=False),
                                     config.t_span, config.h, verbose=vin)

    def pair(x1, x2):
        t1, t2 = flow(x1), flow(x2)
        d12 = np.array([M.dist(a, b) for a, b in zip(t1.points, t2.points)])
        return t1, t2, d12

    columns, data = ["t"], []
    for i in range(opts.get("n_pairs", 5)):
        for _ in range(100):
            d = rng.uniform(0.1, dmax_allowed - sep)
            x1, _ = _offset(P, d, rng)
            x2, _ = _offset(x1, sep, rng)
            if M.dist(x2.coords, P.coords) <= dmax_allowed:
                break
        t1, t2, d12 = pair(x1.coords, x2.coords)
        far = max([(M.dist(x, P.coords), x) for x in (x1.coords, x2.coords)],
                  key=lambda item: item[0])[1]
        gamma = contraction_rate_bound(ManifoldPoint(M, far, check=False), P,
                                       lam, A)
        lograte = np.gradient(np.log(d12 ** 2), config.h, edge_order=2)
        report.check("pair_%d_log_rate" % i, lograte.max(), -gamma, slack,
                     "at_most", "d/dt <dq, dq> <= -gamma <dq, dq> with "
                     "gamma = 2 sqrt(A) d / (lam tan(sqrt(A) d))")
        if not data:
            data.append(t1.times)
        columns.append("pair_%d" % i)
        data.append(d12)

    # Pairs on a circle around P, where the comparison bound is attained.
    basis = M.orthonormal_basis(P.coords)
    window = opts.get("rate_window", 0.1)
    nw = int(round(window / config.h))

    def tangential(d, phi=0.2):
        e1 = basis[0]
        e2 = np.cos(phi) * basis[0] + np.sin(phi) * basis[1]
        x1 = M.exp(P.coords, d * e1)
        x2 = M.exp(P.coords, d * e2)
        t1, _, d12 = pair(x1, x2)
        rate = -(np.log(d12[nw] ** 2) - np.log(d12[0] ** 2)) / \
            (t1.times[nw] - t1.times[0])
        return t1, d12, rate

    base, d_quarter, rate_quarter = tangential(np.pi / 4)
    gamma_quarter = contraction_rate_bound(
        ManifoldPoint(M, base.points[0], check=False), P, lam, A)
    report.check("rate_at_pi_over_4", rate_quarter, gamma_quarter,
                 slack * gamma_quarter, "at_least",
                 "contraction rate bound at d = pi/4")
    _, d_half, rate_half = tangential(0.5)
    report.check("rate_below_limit_at_0.5", rate_half, 2 / lam, 0.0, "below",
                 "away from P the rate stays strictly below 2/lam")
    _, d_near, rate_near = tangential(0.02)
    report.check("rate_near_P", rate_near, 2 / lam, 0.1,
                 provenance="gamma tends to 2/lam at P")
    margin = contraction_certificate(field, base)
    report.check("contraction_certificate", margin, gamma_quarter / 2,
                 slack * gamma_quarter / 2, "at_least",
                 "norm contraction margin is half the rate of <dq, dq>")
    columns += ["tangential_pi_4", "tangential_0.5", "tangential_0.02"]
    data += [d_quarter, d_half, d_near]
    return columns, data


@_scenario("jacobi_demo", kinds=("sphere",),
           initial={"q": "point", "v": "vector", "w": "vector"},
           options=("sin_tol", "energy_tol", "affine_tol"))
def _jacobi_demo(config, rng, report, verbose):
    M = config.build_manifold()
    r = M.radius
    K = 1.0 / r ** 2
    vin = _verbose_inner(verbose)
    p0 = _point(M, config, "q")
    v = M.project_tangent(p0.coords, np.asarray(config.initial["v"], float))
    v = v / M.norm(p0.coords, v)
    w = M.project_tangent(p0.coords, np.asarray(config.initial["w"], float))
    w = w - M.inner(p0.coords, w, v) * v
    w = TangentVector(p0, w / M.norm(p0.coords, w), check=False)
    zero_force = SecondOrderField(M, lambda t, x, u: np.zeros_like(x),
                                  "geodesic")
    geodesic = integrate_second_order(zero_force, p0,
                                      TangentVector(p0, v, check=False),
                                      config.t_span, config.h, vin)
    times = geodesic.times
    jac = propagate_jacobi(geodesic, zero_vector(p0), w)
    norms = jac.norms()
    expected = r * np.abs(np.sin((times - times[0]) / r))
    report.check("norm_vs_sin", np.abs(norms - expected).max(), 0.0,
                 config.options.get("sin_tol", 1e-4), "absolute",
                 "normal Jacobi field r sin(t/r) on a sphere of radius r")
    energy = jacobi_energy(jac, K)
    report.check("energy_drift", np.abs(energy - energy[0]).max(), 0.0,
                 config.options.get("energy_tol", 1e-5), "absolute",
                 "|DJ|^2 + K |J|^2 is conserved for normal Jacobi fields")
    fd = propagate_variation_fd(zero_force, geodesic, zero_vector(p0),
                                config.eps, w)
    fd_norms = fd.norms()
    gap = max(M.norm(x, a - b) for x, a, b in
              zip(geodesic.points, fd.qprime, jac.qprime))
    report.check("finite_difference_agreement", gap, 0.0,
                 max(1e-3, 10 * config.eps), "absolute",
                 "Jacobi fields are variations through geodesics")

    E = Euclidean(M.n)
    e0 = ManifoldPoint(E, np.zeros(M.n))
    line = integrate_second_order(SecondOrderField(E, lambda t, x, u:
                                                   np.zeros_like(x)),
                                  e0, TangentVector(e0, np.eye(M.n)[0]),
                                  config.t_span, config.h, vin)
    J0 = TangentVector(e0, E.random_tangent(e0.coords, rng), check=False)
    W0 = TangentVector(e0, E.random_tangent(e0.coords, rng), check=False)
    flat = propagate_jacobi(line, J0, W0)
    affine = J0.coords + np.outer(line.times - line.times[0], W0.coords)
    report.check("euclidean_affine", np.abs(flat.qprime - affine).max(), 0.0,
                 config.options.get("affine_tol", 1e-8), "absolute",
                 "Jacobi fields of flat space are affine")
    columns = ["t", "jacobi_norm", "expected_norm", "energy", "fd_norm"]
    return columns, [times, norms, expected, energy, fd_norms]


def _lift_and_neighbors(field, x0, config, rng, n_starts, delta, window,
                        verbose):
    M = field.manifold
    base = integrate_first_order(field, x0, config.t_span, config.h,
                                 verbose=verbose)
    lift = lift_frame_analysis(field, base, config.eps, window)
    rates = []
    for _ in range(n_starts):
        y0, _ = _offset(base.point(0), delta, rng)
        traj = integrate_first_order(field, y0, config.t_span, config.h)
        d = np.array([M.dist(a, b) for a, b in zip(base.points, traj.points)])
        rates.append(fit_decay(base.times, d, window).lam)
    return base, lift, np.array(rates)


@_scenario("lift_equivalence", kinds=("sphere",), gains=("lam_flow", "k"),
           initial={"q": "point", "P": "point", "angle": "scalar"},
           options=("n_starts", "delta", "window_frac", "tolerance",
                    "omega_scale"))
def _lift_equivalence(config, rng, report, verbose):
    M = config.build_manifold()
    opts = config.options
    n_starts = opts.get("n_starts", 20)
    delta = opts.get("delta", 1e-3)
    window = opts.get("window_frac", 0.2)
    tol = opts.get("tolerance", 0.15)
    vin = _verbose_inner(verbose)
    P = _point(M, config, "P")
    systems = [("gradient_flow",
                gradient_flow(M, P, config.gains["lam_flow"]),
                _point(M, config, "q"))]

    omega = _omega(config)
    S = SO3()
    _, ref = _sampled_reference(so3_reference_field(omega, S),
                                ManifoldPoint(S, np.eye(3)), config)
    R0 = ManifoldPoint(S, rotation_matrix(rng.standard_normal(3),
                                          config.initial["angle"]),
                       check=False)
    systems.append(("so3_tracking", so3_tracking(ref, omega,
                                                 config.gains["k"]), R0))

    E = Euclidean(2)
    Amat = np.diag([-1.0, -2.0])
    linear = FirstOrderField(E, lambda t, x: Amat.dot(x), "linear")
    systems.append(("linear", linear, ManifoldPoint(E, [1.0, 1.0])))

    columns, data = ["t"], []
    for name, field, x0 in systems:
        base, lift, rates = _lift_and_neighbors(field, x0, config, rng,
                                                n_starts, delta, window, vin)
        report.add_fit(name + "_lift", lift.fit)
        direct = float(np.median(rates))
        report.check(name + "_lift_vs_direct", direct, lift.fit.lam, tol,
                     provenance="nearby solutions converge at the rate of "
                     "the complete lift")
        if not data:
            data.append(base.times)
        columns.append(name + "_lift_growth")
        data.append(lift.growth)
        if name == "linear":
            report.check("linear_lift_rate", lift.fit.lam, 1.0, tol,
                         provenance="slowest eigenvalue of diag(-1, -2)")
            speed = np.array([np.linalg.norm(Amat.dot(x))
                              for x in base.points])
            speed_fit = report.add_fit("linear_speed",
                                       fit_decay(base.times, speed, window))
            report.check("linear_speed_decay", speed_fit.lam, 0.0, 0.0,
                         "above", "velocities decay along a contracting "
                         "flow")
    return columns, data


@_scenario("volume_contraction", kinds=("sphere", "spd", "euclidean"),
           gains=("lam_flow",), initial={"q": "point", "P": "point"},
           options=("tolerance",))
def _volume_contraction(config, rng, report, verbose):
    M = config.build_manifold()
    lam = config.gains["lam_flow"]
    P = _point(M, config, "P")
    field = gradient_flow(M, P, lam)
    base = integrate_first_order(field, _point(M, config, "q"), config.t_span,
                                 config.h, verbose=_verbose_inner(verbose))
    lift = lift_frame_analysis(field, base, config.eps)
    fd_rate = np.gradient(lift.log_volume, config.h, edge_order=2)
    predicted = np.array([volume_rate(base.point(i), P, lam)
                          for i in range(len(base))])
    report.check("log_volume_rate", np.abs(fd_rate - predicted)[2:-2].max(),
                 0.0, config.options.get("tolerance", 1e-3), "absolute",
                 "frames contract at the rate -Laplacian(F)/lam")
    columns = ["t", "log_volume", "fd_rate", "predicted_rate"]
    return columns, [base.times, lift.log_volume, fd_rate, predicted]


###########################################################################
# SUITE                                                                   #
###########################################################################

def list_scenarios():
    """Names of the bundled scenario files, without extension."""
    return sorted(os.path.splitext(f)[0] for f in os.listdir(CONFIG_DIR)
                  if f.endswith(".toml"))


def bundled_config(name):
    return ScenarioConfig.from_file(os.path.join(CONFIG_DIR, name + ".toml"))


def _run_bundled(args):
    name, out_dir, verbose = args
    return run(bundled_config(name), out_dir, verbose)


def run_suite(name_filter=None, out_dir=None, parallel=False, verbose=0):
    """Run the bundled scenarios, optionally one worker per scenario.

    :param name_filter: Run only scenarios whose name contains this string.
    :type name_filter: str.
    :param out_dir: Output directory.
    :param parallel: Use a multiprocessing pool.
    :type parallel: bool.

    :returns: list of :class:`RunReport`.
    """
    names = [n for n in list_scenarios()
             if name_filter is None or name_filter in n]
    jobs = [(name, out_dir, verbose) for name in names]
    if parallel:
        try:
            pool = Pool()
        except NameError:
            print("Warning: multiprocessing cannot be imported!",
                  file=sys.stderr)
            parallel = False
    if parallel:
        try:
            reports = pool.map(_run_bundled, jobs)
        finally:
            pool.close()
            pool.join()
    else:
        reports = [_run_bundled(job) for job in jobs]
    return reports


def acceptance_table(reports):
    lines = ["%-28s %9s %6s %10s" % ("scenario", "criteria", "result",
                                     "wall time")]
    for report in reports:
        lines.append("%-28s %4d/%-4d %6s %8.2f s" %
                     (report.name,
                      sum(c.passed for c in report.criteria),
                      len(report.criteria),
                      "PASS" if report.passed else "FAIL",
                      report.wall_time))
    return "\n".join(lines)
