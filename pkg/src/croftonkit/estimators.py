"""Monte Carlo estimators over kinematic-measure lines: hit-count
distributions, Crofton area, the quadratic Crofton identity, chord
statistics, pair-hit probabilities, higher-dimensional moments, the
contingency-table independence test, and the cap-area check.

Work is split into fixed-size chunks, one child random stream per chunk,
and per-chunk accumulators are merged in chunk order - so every estimate is
bit-identical for any worker count.  All stochastic tolerances are "within
k reported standard errors", never fixed absolute numbers.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .geometry import (Cap, ConvexBody, Ellipsoid, HalfSpaceCut,
                       RegionComplement, RegionIntersection, Sphere,
                       SurfacePatch, TriangleMesh, WholeBoundary, body_dim,
                       cap_area_exact, enclosing_radius, patch_complement,
                       patch_mask, region_mask, sigma_exact,
                       sphere_surface_area, surface_area_exact, whole_boundary)
from .intersect import _mesh_hit_stats, line_hits_batch
from .rng import RandomStream
from .sampling import (KinematicLineSampler, surface_points,
                       uniform_patch_points, uniform_sphere_points)

CHUNK_SIZE = 1 << 17

# fixed stream ids so every estimator's randomness is reproducible and
# non-overlapping within one seed
STREAM_LINES = 0
STREAM_PAIRS = 1
STREAM_SURFACE = 2
STREAM_PARTITION = 3
STREAM_AREA = 4
STREAM_CAL_LINES = 10
STREAM_CAL_PAIRS = 11

_KERNEL_GUARD_REL = 1e-6


def resolve_workers(workers=None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("CROFTONKIT_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _chunk_plan(total: int, chunk: int = CHUNK_SIZE):
    return [(i, min(chunk, total - i * chunk))
            for i in range((total + chunk - 1) // chunk)]


def _map_chunks(fn, total: int, workers):
    """Run fn(chunk_index, chunk_size) over the plan; results in chunk order."""
    plan = _chunk_plan(total)
    w = resolve_workers(workers)
    if w <= 1 or len(plan) <= 1:
        return [fn(i, s) for i, s in plan]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(lambda args: fn(*args), plan))


def _mean_se(sum_x: float, sum_x2: float, n: int):
    mean = sum_x / n
    var = max(sum_x2 / n - mean * mean, 0.0) * (n / max(n - 1, 1))
    return mean, math.sqrt(var / n)


def _binom_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


# ---------------------------------------------------------------------------
# result records
# ---------------------------------------------------------------------------

@dataclass
class EstimatorReport:
    """Universal Monte Carlo result: estimate, standard error, provenance."""

    estimate: float
    stderr: float
    n_samples: int
    seed: int
    wall_time: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "estimate": float(self.estimate),
            "stderr": float(self.stderr),
            "n_samples": int(self.n_samples),
            "seed": int(self.seed),
            "wall_time": float(self.wall_time),
            "metadata": self.metadata,
        }


@dataclass
class HitDistribution:
    """Empirical probabilities of a kinematic line meeting a patch 0/1/2 times."""

    p0: float
    p1: float
    p2: float
    stderr0: float
    stderr1: float
    stderr2: float
    n_lines: int
    seed: int
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "p0": self.p0, "p1": self.p1, "p2": self.p2,
            "stderr0": self.stderr0, "stderr1": self.stderr1, "stderr2": self.stderr2,
            "n_lines": self.n_lines, "seed": self.seed, "metadata": self.metadata,
        }


def _finish_report(estimate, stderr, n, seed, t0, **meta) -> EstimatorReport:
    return EstimatorReport(float(estimate), float(stderr), int(n), int(seed),
                           time.perf_counter() - t0, meta)


def _sampler_chords(body, bounding_radius, stream, ci, size):
    gen = stream.child(ci).generator()
    smp = KinematicLineSampler(body, bounding_radius)
    X, Y, U, P = smp.sample_chords_batch(gen, size)
    return X, Y, U, P, smp


# ---------------------------------------------------------------------------
# hit distribution
# ---------------------------------------------------------------------------

def estimate_hit_distribution(patch: SurfacePatch, n_lines: int = 1_000_000,
                              seed: int = 42, *, workers=None,
                              bounding_radius=None,
                              stream_id: int = STREAM_LINES) -> HitDistribution:
    """(p0, p1, p2) over kinematic chords of the patch's body.

    Runs with the same seed share the exact same line stream, so counts for
    a patch and its complement are exactly complementary."""
    body = patch.body
    stream = RandomStream(seed, stream_id)

    def work(ci, size):
        X, Y, _, _, smp = _sampler_chords(body, bounding_radius, stream, ci, size)
        n = patch_mask(patch, X).astype(np.int64) + patch_mask(patch, Y)
        return (np.bincount(n, minlength=3), smp.proposal_count,
                smp.acceptance_count)

    counts = np.zeros(3, dtype=np.int64)
    proposals = accepted = 0
    for c, pr, ac in _map_chunks(work, n_lines, workers):
        counts += c
        proposals += pr
        accepted += ac
    p = counts / n_lines
    se = [_binom_se(pi, n_lines) for pi in p]
    return HitDistribution(
        p0=float(p[0]), p1=float(p[1]), p2=float(p[2]),
        stderr0=se[0], stderr1=se[1], stderr2=se[2],
        n_lines=n_lines, seed=seed,
        metadata={"acceptance_rate": accepted / proposals,
                  "proposals": proposals})


# ---------------------------------------------------------------------------
# Crofton area
# ---------------------------------------------------------------------------

def crofton_area(target, n_lines: int = 1_000_000, seed: int = 42, *,
                 workers=None, bounding_radius=None, mode: str = "auto",
                 stream_id: int = STREAM_LINES) -> EstimatorReport:
    """Boundary-patch area from line crossing counts.

    Two modes:
      * "known-area": body's total boundary area S has a closed form; then
        area(A) = (S/2) * mean crossings over lines conditioned to hit the
        body (a hitting line crosses the whole boundary exactly twice).
      * "calibrated": lines are drawn hitting a bounding ball without
        conditioning and the Crofton constant is calibrated on a same-run
        unit-sphere reference sharing the line stream; used for meshes and
        for bodies without a closed-form area.
    """
    t0 = time.perf_counter()
    if isinstance(target, TriangleMesh):
        patch = whole_boundary(target)
    else:
        patch = target
    body = patch.body
    if mode == "auto":
        if isinstance(body, TriangleMesh):
            mode = "calibrated"
        elif surface_area_exact(body) is not None:
            mode = "known-area"
        else:
            mode = "calibrated"
    stream = RandomStream(seed, stream_id)

    if mode == "known-area":
        S = surface_area_exact(body)
        if S is None:
            raise ValueError("known-area mode requires a closed-form total area")

        def work(ci, size):
            X, Y, _, _, smp = _sampler_chords(body, bounding_radius, stream, ci, size)
            n = patch_mask(patch, X).astype(np.int64) + patch_mask(patch, Y)
            return float(n.sum()), float((n * n).sum()), smp.proposal_count, smp.acceptance_count

        sx = sx2 = 0.0
        proposals = accepted = 0
        for a, b, pr, ac in _map_chunks(work, n_lines, workers):
            sx += a
            sx2 += b
            proposals += pr
            accepted += ac
        mean, se = _mean_se(sx, sx2, n_lines)
        half_s = S / 2.0
        return _finish_report(half_s * mean, half_s * se, n_lines, seed, t0,
                              mode=mode, total_area=S,
                              acceptance_rate=accepted / proposals)

    if mode != "calibrated":
        raise ValueError(f"unknown mode {mode!r}")
    if body_dim(body) != 3:
        raise ValueError("calibrated mode uses a unit-sphere reference in R^3")
    R_b = bounding_radius if bounding_radius is not None else max(enclosing_radius(body), 1.0)
    if R_b < 1.0 or R_b < enclosing_radius(body) * (1.0 - 1e-9):
        raise ValueError("bounding radius must contain both the body and the "
                         "unit reference sphere")
    reference = Sphere(3)

    def work(ci, size):
        gen = stream.child(ci).generator()
        smp = KinematicLineSampler(body, R_b)
        P, U = smp.propose_batch(gen, size)
        if isinstance(body, TriangleMesh):
            region = None if isinstance(patch.region, WholeBoundary) else patch.region
            counts, _, _, in_region = _mesh_hit_stats(body, P, U, region=region, body=body)
            n_t = counts if in_region is None else in_region
        else:
            hits = line_hits_batch(body, P, U)
            n_t = np.zeros(size, dtype=np.int64)
            ok = hits.hit
            if np.any(ok):
                Xh = P[ok] + hits.t_enter[ok][:, None] * U[ok]
                Yh = P[ok] + hits.t_exit[ok][:, None] * U[ok]
                n_t[ok] = (patch_mask(patch, Xh).astype(np.int64)
                           + patch_mask(patch, Yh))
        ref_hits = line_hits_batch(reference, P, U)
        n_r = 2 * ref_hits.hit.astype(np.int64)
        n_t = n_t.astype(float)
        n_r = n_r.astype(float)
        return (float(n_t.sum()), float((n_t * n_t).sum()), float(n_r.sum()),
                float((n_r * n_r).sum()), float((n_t * n_r).sum()))

    st = st2 = sr = sr2 = str_ = 0.0
    for a, b, c, d, e in _map_chunks(work, n_lines, workers):
        st += a
        st2 += b
        sr += c
        sr2 += d
        str_ += e
    mt, se_t = _mean_se(st, st2, n_lines)
    mr, se_r = _mean_se(sr, sr2, n_lines)
    if mr <= 0:
        raise ValueError("reference sphere was never hit; bounding radius too large?")
    cov = (str_ / n_lines - mt * mr) / n_lines
    ref_area = sphere_surface_area(3)
    estimate = ref_area * mt / mr
    rel_var = (se_t / mt) ** 2 + (se_r / mr) ** 2 - 2.0 * cov / (mt * mr) if mt > 0 else \
        (se_r / mr) ** 2
    if mt > 0:
        stderr = abs(estimate) * math.sqrt(max(rel_var, 0.0))
    else:
        stderr = ref_area * se_t / mr
    return _finish_report(estimate, stderr, n_lines, seed, t0,
                          mode=mode, bounding_radius=R_b,
                          crofton_constant=ref_area / mr,
                          mean_target_crossings=mt, mean_reference_crossings=mr)


# ---------------------------------------------------------------------------
# chord statistics
# ---------------------------------------------------------------------------

@dataclass
class ChordCdfResult:
    rows: list                      # (d, cdf, stderr)
    mean_chord: EstimatorReport
    n_lines: int
    seed: int

    def to_dict(self) -> dict:
        return {"rows": [[float(a), float(b), float(c)] for a, b, c in self.rows],
                "mean_chord": self.mean_chord.to_dict(),
                "n_lines": self.n_lines, "seed": self.seed}


def chord_cdf(body: ConvexBody, d_grid, n_lines: int = 1_000_000,
              seed: int = 42, *, workers=None, bounding_radius=None) -> ChordCdfResult:
    """Empirical CDF of the chord length over kinematic lines hitting the body."""
    t0 = time.perf_counter()
    grid = np.sort(np.asarray(d_grid, dtype=float))
    stream = RandomStream(seed, STREAM_LINES)

    def work(ci, size):
        X, Y, _, _, _ = _sampler_chords(body, bounding_radius, stream, ci, size)
        d = np.linalg.norm(Y - X, axis=1)
        below = (d[:, None] <= grid[None, :]).sum(axis=0).astype(np.int64)
        return below, float(d.sum()), float((d * d).sum())

    below = np.zeros(len(grid), dtype=np.int64)
    sd = sd2 = 0.0
    for b, s1, s2 in _map_chunks(work, n_lines, workers):
        below += b
        sd += s1
        sd2 += s2
    rows = []
    for d, c in zip(grid, below):
        p = c / n_lines
        rows.append((float(d), float(p), _binom_se(p, n_lines)))
    mean, se = _mean_se(sd, sd2, n_lines)
    return ChordCdfResult(rows,
                          _finish_report(mean, se, n_lines, seed, t0),
                          n_lines, seed)


def _chord_sums(dim: int, n_lines: int, seed: int, workers,
                stream_id: int = STREAM_LINES):
    """Accumulate chord dot products and lengths on the unit sphere S^(dim-1)."""
    body = Sphere(dim)
    stream = RandomStream(seed, stream_id)

    def work(ci, size):
        X, Y, _, _, _ = _sampler_chords(body, None, stream, ci, size)
        dot = np.sum(X * Y, axis=1)
        q = np.sum((X - Y) ** 2, axis=1)
        r = np.sqrt(q)
        return (float(dot.sum()), float((dot * dot).sum()),
                float(q.sum()), float((q * q).sum()),
                float(r.sum()), float((r * r).sum()))

    acc = [0.0] * 6
    for parts in _map_chunks(work, n_lines, workers):
        for k, v in enumerate(parts):
            acc[k] += v
    return acc


def dot_moment(dim: int, n_lines: int = 1_000_000, seed: int = 42, *,
               workers=None) -> EstimatorReport:
    """Mean inner product of chord endpoints on the unit sphere in R^dim;
    equals (n-3)/(n+1), so it vanishes exactly in dimension three."""
    t0 = time.perf_counter()
    sdot, sdot2, sq, sq2, _, _ = _chord_sums(dim, n_lines, seed, workers)
    mean, se = _mean_se(sdot, sdot2, n_lines)
    mean_q, se_q = _mean_se(sq, sq2, n_lines)
    # per-chord identity <X,Y> = 1 - |X-Y|^2/2 on the unit sphere
    residual = abs(mean - (1.0 - mean_q / 2.0))
    return _finish_report(mean, se, n_lines, seed, t0,
                          dim=dim, expected=(dim - 3) / (dim + 1),
                          mean_sq_chord=mean_q, stderr_sq_chord=se_q,
                          identity_residual=residual)


@dataclass
class ChordScalingResult:
    rows: list                      # (dim, mean_chord, stderr)
    slope: float
    slope_stderr: float
    n_lines: int
    seed: int

    def to_dict(self) -> dict:
        return {"rows": [[int(a), float(b), float(c)] for a, b, c in self.rows],
                "slope": self.slope, "slope_stderr": self.slope_stderr,
                "n_lines": self.n_lines, "seed": self.seed}


def chord_scaling(dims, n_lines: int = 1_000_000, seed: int = 42, *,
                  workers=None) -> ChordScalingResult:
    """Mean chord length across dimensions, with a log-log slope fit
    (entry and exit points concentrate at distance ~ n^(-1/2))."""
    rows = []
    for k, dim in enumerate(dims):
        _, _, _, _, sr, sr2 = _chord_sums(int(dim), n_lines, seed, workers,
                                          stream_id=STREAM_LINES + 32 * k)
        mean, se = _mean_se(sr, sr2, n_lines)
        rows.append((int(dim), mean, se))
    x = np.log([r[0] for r in rows])
    y = np.log([r[1] for r in rows])
    se_y = np.array([r[2] / r[1] for r in rows])
    xc = x - x.mean()
    sxx = float(np.sum(xc * xc))
    slope = float(np.sum(xc * y) / sxx)
    slope_se = float(np.sqrt(np.sum((xc / sxx) ** 2 * se_y ** 2)))
    return ChordScalingResult(rows, slope, slope_se, n_lines, seed)


# ---------------------------------------------------------------------------
# pair-hit probability
# ---------------------------------------------------------------------------

@dataclass
class PairHitResult:
    joint: EstimatorReport             # direct P(line meets both patches)
    kernel_integral: EstimatorReport   # MC of int_A int_B |x-y|^(3-n) dsigma dsigma
    c_n: float
    c_n_stderr: float
    predicted: float                   # c_n * kernel integral
    predicted_stderr: float
    sigma_a: float
    sigma_b: float

    def to_dict(self) -> dict:
        return {"joint": self.joint.to_dict(),
                "kernel_integral": self.kernel_integral.to_dict(),
                "c_n": self.c_n, "c_n_stderr": self.c_n_stderr,
                "predicted": self.predicted, "predicted_stderr": self.predicted_stderr,
                "sigma_a": self.sigma_a, "sigma_b": self.sigma_b}


_pair_constant_cache: dict = {}


def _joint_hit_probability(patch_a, patch_b, n_lines, seed, workers, stream_id):
    body = patch_a.body
    stream = RandomStream(seed, stream_id)

    def work(ci, size):
        X, Y, _, _, _ = _sampler_chords(body, None, stream, ci, size)
        in_a = patch_mask(patch_a, X) | patch_mask(patch_a, Y)
        in_b = patch_mask(patch_b, X) | patch_mask(patch_b, Y)
        return int(np.count_nonzero(in_a & in_b))

    hits = sum(_map_chunks(work, n_lines, workers))
    p = hits / n_lines
    return p, _binom_se(p, n_lines)


def _patch_sigma(patch, seed, workers, n_points: int = 200_000):
    """Normalized sphere measure of a patch: exact when cap algebra applies,
    else a surface-sampling estimate."""
    exact = sigma_exact(patch)
    if exact is not None:
        return exact, 0.0
    body = patch.body
    stream = RandomStream(seed, STREAM_SURFACE)

    def work(ci, size):
        gen = stream.child(ci).generator()
        pts = surface_points(body, size, gen)
        return int(np.count_nonzero(patch_mask(patch, pts)))

    inside = sum(_map_chunks(work, n_points, workers))
    p = inside / n_points
    return p, _binom_se(p, n_points)


def _kernel_distance_mean(patch_a, patch_b, n_pairs, seed, workers, stream_id):
    body = patch_a.body
    expo = 3 - body_dim(body)
    stream = RandomStream(seed, stream_id)

    def work(ci, size):
        gen = stream.child(ci).generator()
        X = uniform_patch_points(patch_a, size, gen)
        Y = uniform_patch_points(patch_b, size, gen)
        v = np.linalg.norm(X - Y, axis=1) ** expo
        return float(v.sum()), float((v * v).sum())

    s = s2 = 0.0
    for a, b in _map_chunks(work, n_pairs, workers):
        s += a
        s2 += b
    return _mean_se(s, s2, n_pairs)


def _pair_constant(dim, seed, workers):
    """c_n calibrated on complementary hemispheres of S^(n-1)."""
    key = (dim, seed)
    if key in _pair_constant_cache:
        return _pair_constant_cache[key]
    body = Sphere(dim)
    axis = np.zeros(dim)
    axis[-1] = 1.0
    upper = SurfacePatch(body, Cap(axis, 0.0))
    lower = patch_complement(upper)
    p0, se_p0 = _joint_hit_probability(upper, lower, 400_000, seed, workers,
                                       STREAM_CAL_LINES)
    k0, se_k0 = _kernel_distance_mean(upper, lower, 200_000, seed, workers,
                                      STREAM_CAL_PAIRS)
    integral = 0.25 * k0           # sigma = 1/2 for each hemisphere
    se_integral = 0.25 * se_k0
    c = p0 / integral
    se_c = c * math.sqrt((se_p0 / p0) ** 2 + (se_integral / integral) ** 2)
    _pair_constant_cache[key] = (c, se_c)
    return c, se_c


def pair_hit_probability(patch_a: SurfacePatch, patch_b: SurfacePatch,
                         n_lines: int = 1_000_000, n_pairs: int = 200_000,
                         seed: int = 42, *, workers=None) -> PairHitResult:
    """P(a line meets both disjoint sphere patches), against the distance-
    kernel double integral with a same-run calibrated constant.

    In dimension three the kernel exponent vanishes and the joint
    probability is 2 sigma(A) sigma(B) regardless of the gap; for n >= 4
    closer patches are more likely to be hit jointly."""
    t0 = time.perf_counter()
    body = patch_a.body
    if patch_b.body is not body:
        raise ValueError("patches must live on the same body")
    if not isinstance(body, Sphere):
        raise ValueError("pair-hit estimation is defined on spheres")

    probe = RandomStream(seed, STREAM_SURFACE + 16).generator()
    pts_a = uniform_patch_points(patch_a, 2048, probe)
    pts_b = uniform_patch_points(patch_b, 2048, probe)
    if np.any(patch_mask(patch_b, pts_a)) or np.any(patch_mask(patch_a, pts_b)):
        raise ValueError("patches overlap; pair-hit probability needs disjoint sets")

    p, se_p = _joint_hit_probability(patch_a, patch_b, n_lines, seed, workers,
                                     STREAM_LINES)
    sig_a, se_a = _patch_sigma(patch_a, seed, workers)
    sig_b, se_b = _patch_sigma(patch_b, seed + 1, workers)
    kmean, se_k = _kernel_distance_mean(patch_a, patch_b, n_pairs, seed, workers,
                                        STREAM_PAIRS)
    integral = sig_a * sig_b * kmean
    rel = 0.0
    for val, se in ((sig_a, se_a), (sig_b, se_b), (kmean, se_k)):
        if val > 0:
            rel += (se / val) ** 2
    se_integral = integral * math.sqrt(rel)
    c, se_c = _pair_constant(body.dim, seed, workers)
    predicted = c * integral
    pred_rel = (se_c / c) ** 2 + ((se_integral / integral) ** 2 if integral > 0 else 0.0)
    se_pred = predicted * math.sqrt(pred_rel)
    joint = _finish_report(p, se_p, n_lines, seed, t0,
                           sigma_a=sig_a, sigma_b=sig_b)
    kernel = _finish_report(integral, se_integral, n_pairs, seed, t0,
                            kernel_exponent=3 - body.dim, mean_kernel=kmean)
    return PairHitResult(joint, kernel, c, se_c, predicted, se_pred, sig_a, sig_b)


# ---------------------------------------------------------------------------
# quadratic Crofton identity
# ---------------------------------------------------------------------------

_quad_constant_cache: dict = {}


def _kernel_pair_mean(patch, n_pairs, seed, workers, stream_id):
    """Mean of the chord-endpoint kernel over independent area-uniform pairs."""
    from .curvature import kernel_values_batch   # local import, no cycle at module load
    body = patch.body
    guard = _KERNEL_GUARD_REL * 2.0 * enclosing_radius(body)
    stream = RandomStream(seed, stream_id)

    def work(ci, size):
        gen = stream.child(ci).generator()
        X = uniform_patch_points(patch, size, gen)
        Y = uniform_patch_points(patch, size, gen)
        sep = np.linalg.norm(Y - X, axis=1)
        while np.any(sep < guard):
            bad = sep < guard
            Y[bad] = uniform_patch_points(patch, int(bad.sum()), gen)
            sep = np.linalg.norm(Y - X, axis=1)
        F = kernel_values_batch(body, X, Y)
        return float(F.sum()), float((F * F).sum())

    s = s2 = 0.0
    for a, b in _map_chunks(work, n_pairs, workers):
        s += a
        s2 += b
    return _mean_se(s, s2, n_pairs)


def _squared_count_stats(patch, n_lines, seed, workers, bounding_radius,
                         stream_id):
    """mean(n^2), mean(n) over conditioned lines, plus the hitting measure
    mu(hit body) estimated from the acceptance ratio (ball measure R^(n-1))."""
    body = patch.body
    stream = RandomStream(seed, stream_id)

    def work(ci, size):
        X, Y, _, _, smp = _sampler_chords(body, bounding_radius, stream, ci, size)
        n = (patch_mask(patch, X).astype(np.int64) + patch_mask(patch, Y)).astype(float)
        n2 = n * n
        return (float(n2.sum()), float((n2 * n2).sum()), float(n.sum()),
                smp.proposal_count, smp.acceptance_count, smp.bounding_radius)

    s2 = s4 = s1 = 0.0
    proposals = accepted = 0
    radius = None
    for a, b, c, pr, ac, rb in _map_chunks(work, n_lines, workers):
        s2 += a
        s4 += b
        s1 += c
        proposals += pr
        accepted += ac
        radius = rb
    m2, se_m2 = _mean_se(s2, s4, n_lines)
    rate = accepted / proposals
    ndim = body_dim(body)
    mu = radius ** (ndim - 1) * rate
    se_mu = radius ** (ndim - 1) * _binom_se(rate, proposals)
    return m2, se_m2, s1 / n_lines, mu, se_mu


def quad_crofton_constant(seed: int = 42, *, workers=None,
                          n_lines: int = 200_000, n_pairs: int = 200_000):
    """Calibration of the quadratic identity's kernel-side constant on the
    unit sphere, where every quantity is known: the left side is 4*pi and
    the kernel is identically 1/4, giving 1/pi.  Cached per (seed)."""
    key = (seed,)
    if key in _quad_constant_cache:
        return _quad_constant_cache[key]
    patch = whole_boundary(Sphere(3))
    m2, se_m2, _, mu, se_mu = _squared_count_stats(
        patch, n_lines, seed, workers, None, STREAM_CAL_LINES)
    H = sphere_surface_area(3)
    lhs = 2.0 * math.pi * mu * m2 - H
    se_lhs = 2.0 * math.pi * math.sqrt((mu * se_m2) ** 2 + (m2 * se_mu) ** 2)
    fmean, se_f = _kernel_pair_mean(patch, n_pairs, seed, workers, STREAM_CAL_PAIRS)
    integral = H * H * fmean
    c = lhs / integral
    se_c = abs(c) * math.sqrt((se_lhs / lhs) ** 2 + (se_f / fmean) ** 2)
    _quad_constant_cache[key] = (c, se_c)
    return c, se_c


def quad_crofton_check(patch: SurfacePatch, n_lines: int = 1_000_000,
                       n_pairs: int = 200_000, seed: int = 42, *,
                       workers=None, bounding_radius=None):
    """Both sides of the quadratic Crofton identity as independent Monte
    Carlo estimates (they agree within combined standard errors on any C^2
    or mesh patch):

        lhs = 2*pi * int n^2 dmu - area(A)
        rhs = c3* * int_A int_A F(x, y) dA dA,   c3* calibrated (1/pi)
    """
    t0 = time.perf_counter()
    body = patch.body
    if body_dim(body) != 3:
        raise ValueError("the quadratic identity check runs in R^3")
    c3, se_c3 = quad_crofton_constant(seed, workers=workers)

    # area(A): exact on spheres via cap algebra, else a Crofton estimate on
    # an independent line stream
    H_A = se_H = None
    if isinstance(body, Sphere):
        sig = sigma_exact(patch)
        if sig is not None:
            H_A, se_H = sig * surface_area_exact(body), 0.0
    if H_A is None:
        rep = crofton_area(patch, n_lines, seed, workers=workers,
                           bounding_radius=bounding_radius, stream_id=STREAM_AREA)
        H_A, se_H = rep.estimate, rep.stderr

    m2, se_m2, m1, mu, se_mu = _squared_count_stats(
        patch, n_lines, seed, workers, bounding_radius, STREAM_LINES)
    lhs = 2.0 * math.pi * mu * m2 - H_A
    se_lhs = math.sqrt((2 * math.pi) ** 2 * ((mu * se_m2) ** 2 + (m2 * se_mu) ** 2)
                       + se_H ** 2)

    fmean, se_f = _kernel_pair_mean(patch, n_pairs, seed, workers, STREAM_PAIRS)
    rhs = c3 * H_A * H_A * fmean
    rel = (se_c3 / c3) ** 2 + (se_f / fmean) ** 2
    if H_A > 0 and se_H:
        rel += (2.0 * se_H / H_A) ** 2
    se_rhs = abs(rhs) * math.sqrt(rel)

    meta = {"c3_star": c3, "c3_star_stderr": se_c3, "patch_area": H_A,
            "patch_area_stderr": se_H, "mean_sq_crossings": m2,
            "mean_crossings": m1, "hit_measure": mu, "hit_measure_stderr": se_mu}
    lhs_rep = _finish_report(lhs, se_lhs, n_lines, seed, t0, side="lhs", **meta)
    rhs_rep = _finish_report(rhs, se_rhs, n_pairs, seed, t0, side="rhs",
                             mean_kernel=fmean, mean_kernel_stderr=se_f, **meta)
    return lhs_rep, rhs_rep


# ---------------------------------------------------------------------------
# cell partitions and the independence test
# ---------------------------------------------------------------------------

@dataclass
class CellPartition:
    """Disjoint band x sector cells covering the boundary, targeting equal
    measure (exact on spheres via equal-height bands; quantile-equalized
    from surface samples otherwise)."""

    body: ConvexBody
    z_edges: np.ndarray          # bands + 1 entries, first/last infinite
    lon_edges: np.ndarray        # sectors + 1 entries in [-pi, pi]
    measures: np.ndarray         # per-cell measure (sums to 1)

    @property
    def n_bands(self) -> int:
        return len(self.z_edges) - 1

    @property
    def n_sectors(self) -> int:
        return len(self.lon_edges) - 1

    @property
    def n_cells(self) -> int:
        return self.n_bands * self.n_sectors

    def classify(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        band = np.searchsorted(self.z_edges[1:-1], pts[:, 2], side="right")
        lon = np.arctan2(pts[:, 1], pts[:, 0])
        sector = np.searchsorted(self.lon_edges[1:-1], lon, side="right")
        sector = np.minimum(sector, self.n_sectors - 1)
        return band * self.n_sectors + sector

    def cell_patches(self) -> list:
        """The cells as surface-patch objects (band cuts intersected with
        azimuth wedges built from half-spaces through the polar axis)."""
        out = []
        ez = np.array([0.0, 0.0, 1.0])
        for bi in range(self.n_bands):
            lo, hi = self.z_edges[bi], self.z_edges[bi + 1]
            parts = []
            if np.isfinite(lo):
                parts.append(HalfSpaceCut(ez, float(lo)))
            if np.isfinite(hi):
                parts.append(RegionComplement(HalfSpaceCut(ez, float(hi))))
            for si in range(self.n_sectors):
                a, b = self.lon_edges[si], self.lon_edges[si + 1]
                wa = np.array([-math.sin(a), math.cos(a), 0.0])
                wb = np.array([-math.sin(b), math.cos(b), 0.0])
                sector = [HalfSpaceCut(wa, 0.0), RegionComplement(HalfSpaceCut(wb, 0.0))]
                region = RegionIntersection(tuple(parts + sector))
                out.append(SurfacePatch(self.body, region))
        return out


def build_cell_partition(body: ConvexBody, bands: int = 6, sectors: int = 8,
                         seed: int = 42, *, workers=None,
                         n_calibration: int = 262_144) -> CellPartition:
    if body_dim(body) != 3:
        raise ValueError("cell partitions are built for bodies in R^3")
    if bands < 1 or sectors < 2:
        raise ValueError("need at least 1 band and 2 sectors")
    if isinstance(body, Sphere) and np.allclose(body.center, 0.0):
        # equal-height bands have exactly equal measure on a sphere
        z = body.center[2] + body.radius * np.linspace(-1.0, 1.0, bands + 1)
        z_edges = np.concatenate(([-np.inf], z[1:-1], [np.inf]))
        lon_edges = np.linspace(-math.pi, math.pi, sectors + 1)
        measures = np.full(bands * sectors, 1.0 / (bands * sectors))
        return CellPartition(body, z_edges, lon_edges, measures)
    stream = RandomStream(seed, STREAM_PARTITION)
    pts = surface_points(body, n_calibration, stream.generator())
    qs = np.linspace(0.0, 1.0, bands + 1)[1:-1]
    z_edges = np.concatenate(([-np.inf], np.quantile(pts[:, 2], qs), [np.inf]))
    lon = np.arctan2(pts[:, 1], pts[:, 0])
    qs = np.linspace(0.0, 1.0, sectors + 1)[1:-1]
    lon_edges = np.concatenate(([-math.pi], np.quantile(lon, qs), [math.pi]))
    part = CellPartition(body, z_edges, lon_edges, np.zeros(bands * sectors))
    cells = part.classify(pts)
    freq = np.bincount(cells, minlength=bands * sectors) / len(pts)
    part.measures = freq
    return part


@dataclass
class IndependenceResult:
    chi2: float
    dof: int
    p_value: float
    table: np.ndarray
    partition: CellPartition
    n_lines: int
    seed: int
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"chi2": self.chi2, "dof": self.dof, "p_value": self.p_value,
                "n_cells": self.partition.n_cells, "n_lines": self.n_lines,
                "seed": self.seed, "metadata": self.metadata}


def _factor_cells(k: int):
    best = None
    for s in range(2, k + 1):
        if k % s:
            continue
        b = k // s
        if b < 1:
            continue
        score = abs(s - math.sqrt(k * 4.0 / 3.0))
        if best is None or score < best[0]:
            best = (score, b, s)
    if best is None:
        raise ValueError(f"cannot factor {k} cells into bands x sectors")
    return best[1], best[2]


def independence_chisq(body: ConvexBody, n_cells: int = 48,
                       n_lines: int = 1_000_000, seed: int = 42, *,
                       workers=None, bands: int | None = None,
                       sectors: int | None = None) -> IndependenceResult:
    """Pearson chi-square test of independence between a chord's entry and
    exit cells.  Entry/exit points of kinematic lines through a round sphere
    are independent, so the test should not reject there; any other convex
    body exhibits dependence."""
    t0 = time.perf_counter()
    if bands is None or sectors is None:
        bands, sectors = _factor_cells(n_cells)
    if bands * sectors != n_cells:
        raise ValueError("bands * sectors must equal n_cells")
    part = build_cell_partition(body, bands, sectors, seed, workers=workers)
    k = part.n_cells
    stream = RandomStream(seed, STREAM_LINES)

    def work(ci, size):
        X, Y, _, _, _ = _sampler_chords(body, None, stream, ci, size)
        cx = part.classify(X)
        cy = part.classify(Y)
        return np.bincount(cx * k + cy, minlength=k * k)

    table = np.zeros(k * k, dtype=np.int64)
    for t in _map_chunks(work, n_lines, workers):
        table += t
    table = table.reshape(k, k)
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    expected = np.outer(rows, cols) / n_lines
    if expected.min() < 5.0:
        raise ValueError(
            f"minimum expected cell count {expected.min():.2f} < 5; "
            "increase n_lines or coarsen the partition")
    chi2 = float(((table - expected) ** 2 / expected).sum())
    dof = (k - 1) ** 2
    p = float(stats.chi2.sf(chi2, dof))
    return IndependenceResult(chi2, dof, p, table, part, n_lines, seed,
                              metadata={"wall_time": time.perf_counter() - t0,
                                        "bands": bands, "sectors": sectors})


# ---------------------------------------------------------------------------
# cap-area (hat-box) check
# ---------------------------------------------------------------------------

@dataclass
class ArchimedesResult:
    rows: list                    # (t, mc_area, exact_area, stderr)
    slope: float
    intercept: float
    max_std_residual: float
    n_points: int
    seed: int

    def to_dict(self) -> dict:
        return {"rows": [[float(a), float(b), float(c), float(d)]
                         for a, b, c, d in self.rows],
                "slope": self.slope, "intercept": self.intercept,
                "max_std_residual": self.max_std_residual,
                "n_points": self.n_points, "seed": self.seed}


def archimedes_check(t_grid, n_points: int = 1_000_000, seed: int = 42, *,
                     workers=None) -> ArchimedesResult:
    """Monte Carlo cap areas on the unit 2-sphere against 2*pi*(1-t); cap
    area is affine in height (hat-box), which the regression confirms."""
    grid = np.asarray(t_grid, dtype=float)
    stream = RandomStream(seed, STREAM_SURFACE)

    def work(ci, size):
        gen = stream.child(ci).generator()
        z = uniform_sphere_points(3, size, gen)[:, 2]
        return (z[:, None] >= grid[None, :]).sum(axis=0).astype(np.int64)

    counts = np.zeros(len(grid), dtype=np.int64)
    for c in _map_chunks(work, n_points, workers):
        counts += c
    full = 4.0 * math.pi
    rows = []
    for t, c in zip(grid, counts):
        p = c / n_points
        rows.append((float(t), full * p, cap_area_exact(float(t)),
                     full * _binom_se(p, n_points)))
    areas = np.array([r[1] for r in rows])
    ses = np.maximum(np.array([r[3] for r in rows]), 1e-300)
    xc = grid - grid.mean()
    sxx = float(np.sum(xc * xc))
    slope = float(np.sum(xc * areas) / sxx)
    intercept = float(areas.mean() - slope * grid.mean())
    resid = areas - (intercept + slope * grid)
    return ArchimedesResult(rows, slope, intercept,
                            float(np.max(np.abs(resid) / ses)), n_points, seed)
