"""Assisted-entanglement quantities: closed forms, bounds and searches.

The diagonal values of a certified diagonal form give the assisted maximum
(sum of lam^(2/d)) and Wootters-style lower/upper bounds on the mixed-state
G-concurrence. The decomposition optimizer acts as an independent
brute-force oracle: its max-direction values are achieved averages (valid
lower bounds on the assisted maximum), its min-direction values achieved
averages as well (valid upper bounds on the convex roof). Exactness claims
come only from the closed forms, never from the search.
"""

from dataclasses import dataclass, field

import numpy as np

from . import gconc, numkit, states, tau
from .errors import DimensionError, InternalConsistencyError, ValidationError
from .states import DensityMatrix, partial_trace
from .unitary_opt import OptimizerConfig, flat_starts, search_unitary
from ._backend import kernels

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class OptimizerOutcome:
    """Best decomposition found for one direction of the average-G search."""

    value: float
    witness: np.ndarray  # m x n isometry mapping the eigen-ensemble
    direction: str
    trace: tuple


@dataclass(frozen=True)
class BoundsReport:
    """Lower/upper bounds on the mixed-state G-concurrence from a diagonal
    form; separable_flag marks the vanishing-G case lam1 <= sum(rest)."""

    lower: float
    upper: float
    separable_flag: bool
    lam: np.ndarray


def diagonal_form_of(rho, cfg=None):
    """Eigen-ensemble -> tensor -> best diagonal form for a density matrix."""
    ens = states.eigen_ensemble(rho)
    return tau.diagonalize(tau.build_tau(ens), cfg)


def gcoa_from_diag(df):
    """Assisted maximum of the average G for a certified diagonal form.

    Equals sum_k lam_k^(2/d). Raises ValidationError when the form is not
    certified (residual above threshold); use the optimizer then.
    """
    if not df.member:
        raise ValidationError(
            "diagonal form is not certified; the closed form does not apply"
        )
    return df.achieved_avg_g()


def gc_bounds(df):
    """G-concurrence bounds of the mixed state behind a diagonal form.

    With lam descending: if lam1 <= sum(rest) both bounds are 0 (a
    zero-G decomposition exists); otherwise the bounds are
    lam1^(2/d) - sum_rest lam^(2/d) (clamped at 0) and
    (lam1 - sum_rest)^(2/d). For d = 2 the two coincide with the Wootters
    concurrence.
    """
    if not df.member:
        raise ValidationError(
            "diagonal form is not certified; bounds require a diagonal form"
        )
    lam = df.lam
    d = df.d
    rest = float(lam[1:].sum())
    if lam[0] <= rest:
        return BoundsReport(0.0, 0.0, True, lam.copy())
    lower = max(0.0, lam[0] ** (2.0 / d) - np.sum(lam[1:] ** (2.0 / d)))
    upper = (lam[0] - rest) ** (2.0 / d)
    return BoundsReport(float(lower), float(upper), False, lam.copy())


def _min_phases(df):
    """Phases realizing the best cancellation for the min-direction seed."""
    lam = tau.padded_lam(df)
    rest = lam[1:].sum()
    if lam[0] <= rest and lam.sum() > 0:
        return tau.zero_sum_phases(lam)
    thetas = np.full(lam.size, np.pi)
    thetas[0] = 0.0
    return thetas


def optimize_avg_g(rho, direction, cfg=None, df=None):
    """Search decompositions of rho for extremal average G-concurrence.

    direction is "max" or "min". The eigen-ensemble is transformed through
    m x n isometries with m swept from the rank to cfg.max_m (default d^2),
    each size searched with seeded restarts. When a certified diagonal
    form is supplied, its decomposition seeds the max direction and the
    phase-cancellation construction seeds the min direction, and the
    result is checked against the closed-form ceiling/floor.
    """
    if direction not in ("max", "min"):
        raise ValidationError(f"direction must be 'max' or 'min', got {direction!r}")
    cfg = cfg or OptimizerConfig()
    ens = states.eigen_ensemble(rho)
    n, d = ens.m, ens.d
    max_m = cfg.max_m if cfg.max_m is not None else d * d
    if max_m < n:
        raise ValidationError(f"max_m = {max_m} is below the state rank {n}")
    amps = ens.amps()
    sign = 1.0 if direction == "max" else -1.0

    ceiling = floor = None
    if df is not None and df.member:
        ceiling = df.achieved_avg_g()
        floor = gc_bounds(df).lower

    best_val = -np.inf
    best_u = None
    best_n_use = n
    trace = []
    for m in range(n, max_m + 1):

        def fun(u):
            g, egrad_w = kernels.avg_g_terms(amps, np.conj(u[:, :n]))
            egrad = np.zeros_like(u)
            egrad[:, :n] = sign * egrad_w
            return sign * float(np.sum(g)), egrad

        starts = [np.eye(m, dtype=np.complex128)]
        starts.extend(flat_starts(m))
        if df is not None and df.member and df.m == n:
            if direction == "max":
                emb = np.zeros((m, n), dtype=np.complex128)
                emb[:n] = np.eye(n)
                starts.append(numkit.complete_isometry(emb @ df.unitary))
            elif m == d * d:
                iso = tau.cancellation_isometry(df, _min_phases(df))
                starts.append(numkit.complete_isometry(iso))
        target = None
        if direction == "max" and ceiling is not None:
            target = ceiling * (1.0 - 1e-12) - 1e-15
        if direction == "min" and floor is not None:
            target = -(floor * (1.0 + 1e-12) + 1e-15)
        res = search_unitary(
            fun, m, seed=cfg.seed + 1009 * m, restarts=cfg.restarts,
            max_iters=cfg.max_iters, stall_limit=cfg.stall_limit,
            target=target, starts=starts,
        )
        trace.extend(res.trace)
        if res.value > best_val:
            best_val = res.value
            best_u = res.unitary
        if target is not None and best_val >= target:
            break

    value = max(sign * best_val, 0.0)
    witness = np.ascontiguousarray(best_u[:, :n])
    # replay the witness through the public path as a self-check
    replay = gconc.ensemble_avg_g(states.transform_ensemble(ens, witness))
    if abs(replay - value) > CONSISTENCY_TOL:
        raise InternalConsistencyError(
            f"witness replay {replay} deviates from reported value {value}"
        )
    if ceiling is not None and direction == "max" and value > ceiling + CONSISTENCY_TOL:
        raise InternalConsistencyError(
            f"search exceeded the certified assisted maximum: {value} > {ceiling}"
        )
    if floor is not None and direction == "min" and value < floor - CONSISTENCY_TOL:
        raise InternalConsistencyError(
            f"search undercut the certified lower bound: {value} < {floor}"
        )
    return OptimizerOutcome(value=value, witness=witness, direction=direction,
                            trace=tuple(trace))


def gcoa_pure_tripartite(psi, cfg=None):
    """Assisted maximum of average G for a pure tripartite state.

    Returns (value, certified, df): exact via the diagonal form when it is
    certified, otherwise the best achieved decomposition average (a lower
    bound) from the diagonal-form witness and the optimizer.
    """
    cfg = cfg or OptimizerConfig()
    rho = partial_trace(psi, (0, 1))
    df = diagonal_form_of(rho, cfg)
    if df.member:
        return gcoa_from_diag(df), True, df
    out = optimize_avg_g(rho, "max", cfg)
    return max(df.achieved_avg_g(), out.value), False, df


# ---------------------------------------------------------------------------
# product states shared with two suppliers


def _product_tripartite_matrix(rho1, rho2):
    """kron(rho1, rho2) reordered to the (A, B, S1S2) i-major basis."""
    d = rho1.dim_a
    big = np.kron(rho1.mat, rho2.mat)
    t = big.reshape(d, d, d, d, d, d, d, d)
    # axes: a, s1, b, s2 (ket) then bra copies; group as a, b, (s1 s2)
    t = t.transpose(0, 2, 1, 3, 4, 6, 5, 7)
    n = d * d * d * d
    return t.reshape(n, n)


def _povm_average_wootters(members3, unitary, ns):
    """Average two-qubit concurrence after measuring S with rank-one POVM."""
    total = 0.0
    dim_ab = members3[0].shape[0]
    for l in range(unitary.shape[0]):
        v = unitary[l, :ns]
        post = np.zeros((dim_ab, dim_ab), dtype=np.complex128)
        prob = 0.0
        for mem in members3:
            w = mem @ v.conj()
            prob += float(np.real(w.conj() @ w))
            post += np.outer(w, w.conj())
        if prob <= 1e-14:
            continue
        rho_ab = DensityMatrix(
            _cleanup_density(post / prob), 2, 2
        )
        total += prob * gconc.wootters_concurrence(rho_ab)
    return total


def _cleanup_density(mat):
    mat = (mat + mat.conj().T) / 2.0
    return mat / np.trace(mat).real


def swap_bound(rho1, rho2, cfg=None):
    """Entanglement-swapping check: sampled assistance never beats the
    product of the factor G-concurrences.

    rho1 lives on A-S1, rho2 on B-S2 (equal local dimension d); the
    supplier holds S1 S2 and measures. For d = 2 the factor values are the
    exact Wootters concurrences and each sampled measurement is scored by
    the average post-measurement concurrence. Pure factors route through
    the decomposition optimizer, which attains the product value. For
    d > 2 the report carries bracket information instead of exact values.
    """
    cfg = cfg or OptimizerConfig()
    d = rho1.dim_a
    if (rho1.dim_a, rho1.dim_b) != (d, d) or (rho2.dim_a, rho2.dim_b) != (d, d):
        raise DimensionError("both factors must be d x d two-qudit states")
    report = {"d": d, "samples": 0, "achieved_max": 0.0}

    w1 = np.linalg.eigvalsh(rho1.mat)
    w2 = np.linalg.eigvalsh(rho2.mat)
    pure_product = w1.max() > 1.0 - 1e-12 and w2.max() > 1.0 - 1e-12

    if d == 2:
        c1 = gconc.wootters_concurrence(rho1)
        c2 = gconc.wootters_concurrence(rho2)
        bound = c1 * c2
        report.update({"factor_g": [c1, c2], "bound": bound, "exact_bound": True})
    else:
        brackets = []
        for rho in (rho1, rho2):
            df = diagonal_form_of(rho, cfg)
            if df.member:
                b = gc_bounds(df)
                brackets.append((b.lower, b.upper))
            else:
                brackets.append((None, None))
        report.update({"factor_g_brackets": brackets, "exact_bound": False})
        if all(b[0] is not None for b in brackets):
            report["bound_upper"] = brackets[0][1] * brackets[1][1]

    sigma = _product_tripartite_matrix(rho1, rho2)
    ns = d * d
    dim_ab = d * d
    w, v = numkit.hermitian_eig(sigma)
    members3 = [
        np.sqrt(w[k]) * v[:, k].reshape(dim_ab, ns)
        for k in range(w.size)
        if w[k] > 1e-12
    ]

    if pure_product:
        rho_ab = _reduced_ab_of_product(rho1, rho2)
        df = diagonal_form_of(rho_ab, cfg)
        out = optimize_avg_g(rho_ab, "max", cfg, df=df)
        achieved = out.value
        if df.member:
            achieved = max(achieved, gcoa_from_diag(df))
        report["achieved_max"] = achieved
        report["samples"] = len(out.trace)
    elif d == 2:
        achieved = 0.0
        count = 0
        protos = [np.eye(ns, dtype=np.complex128)] + flat_starts(ns)
        for j in range(cfg.restarts):
            protos.append(numkit.haar_unitary(ns, cfg.seed + 7919 * (j + 1)))
        for u in protos:
            achieved = max(achieved, _povm_average_wootters(members3, u, ns))
            count += 1
        report["achieved_max"] = achieved
        report["samples"] = count
        if achieved > report["bound"] + CONSISTENCY_TOL:
            raise InternalConsistencyError(
                f"sampled assistance {achieved} exceeds the product bound {report['bound']}"
            )
    else:
        report["achieved_max"] = None
        report["indeterminate"] = True

    if d == 2:
        report["margin"] = report["bound"] - report["achieved_max"]
    return report


def _reduced_ab_of_product(rho1, rho2):
    d = rho1.dim_a
    ra = rho1.mat.reshape(d, d, d, d).trace(axis1=1, axis2=3)
    rb = rho2.mat.reshape(d, d, d, d).trace(axis1=1, axis2=3)
    return DensityMatrix(_cleanup_density(np.kron(ra, rb)), d, d)


# ---------------------------------------------------------------------------
# monogamy sampling


def _g_cut_value(psi):
    """G across the first-vs-rest cut: d * det(rho_A)^(1/d)."""
    amp = psi.amp
    d = amp.shape[0]
    rho_a = np.tensordot(amp, amp.conj(), axes=([1, 2], [1, 2]))
    det = np.linalg.det((rho_a + rho_a.conj().T) / 2.0).real
    return d * max(det, 0.0) ** (1.0 / d)


def monogamy_terms(psi, cfg=None):
    """All quantities entering the monogamy comparison for one pure state.

    Returns a dict with the G brackets of the two reduced states (exact at
    d = 2), the assisted maxima (exact when the diagonal form certifies,
    otherwise achieved lower bounds), the single-cut value, and the verdict
    per inequality: "holds", "violated" or "indeterminate" at 1e-9.
    """
    cfg = cfg or OptimizerConfig()
    d = psi.dims[0]
    if psi.dims[1] != d:
        raise DimensionError("monogamy terms need equal A and B dimensions")
    rec = {"d": d}
    g_cut = _g_cut_value(psi)
    rec["g_single_cut"] = g_cut

    sides = {}
    for name, keep in (("ab", (0, 1)), ("as", (0, 2))):
        rho = partial_trace(psi, keep)
        df = diagonal_form_of(rho, cfg)
        info = {"member": bool(df.member), "residual": df.residual}
        if d == 2:
            c = gconc.wootters_concurrence(rho)
            info["g_lower"] = info["g_upper"] = c
        elif df.member:
            b = gc_bounds(df)
            info["g_lower"], info["g_upper"] = b.lower, b.upper
        else:
            # verdicts stay indeterminate without a certified form, but the
            # searched bracket [0, best min-average] is reported alongside
            info["g_lower"] = info["g_upper"] = None
            info["g_search_upper"] = optimize_avg_g(rho, "min", cfg).value
        if df.member:
            info["ga"] = gcoa_from_diag(df)
            info["ga_exact"] = True
        else:
            out = optimize_avg_g(rho, "max", cfg)
            info["ga"] = max(df.achieved_avg_g(), out.value)
            info["ga_exact"] = False
        sides[name] = info
    rec["ab"] = sides["ab"]
    rec["as"] = sides["as"]

    rhs = g_cut**d
    tol = CONSISTENCY_TOL
    up = [sides[k]["g_upper"] for k in ("ab", "as")]
    lo = [sides[k]["g_lower"] for k in ("ab", "as")]
    if None not in up and up[0] ** d + up[1] ** d <= rhs + tol:
        rec["g_inequality"] = "holds"
    elif None not in lo and lo[0] ** d + lo[1] ** d > rhs + tol:
        rec["g_inequality"] = "violated"
    else:
        rec["g_inequality"] = "indeterminate"

    ga = [sides[k]["ga"] for k in ("ab", "as")]
    exact = all(sides[k]["ga_exact"] for k in ("ab", "as"))
    lhs = ga[0] ** d + ga[1] ** d
    if lhs >= rhs - tol:
        rec["ga_inequality"] = "holds"  # lower bounds already beat the cut
    elif exact:
        rec["ga_inequality"] = "violated"
    else:
        rec["ga_inequality"] = "indeterminate"
    return rec


def monogamy_sample(d, samples, seed, cfg=None):
    """Tally monogamy inequality outcomes over Haar-random d x d x d states.

    Never asserts the inequalities; it only counts "holds", "violated"
    (beyond 1e-9) and "indeterminate" per direction. Supported for
    d in {2, 3}.
    """
    if d not in (2, 3):
        raise DimensionError("sampling supports d = 2 and d = 3")
    cfg = cfg or OptimizerConfig()
    counts = {
        "g": {"holds": 0, "violated": 0, "indeterminate": 0},
        "ga": {"holds": 0, "violated": 0, "indeterminate": 0},
    }
    for i in range(samples):
        psi = states.random_pure_tripartite((d, d, d), seed + i)
        rec = monogamy_terms(psi, cfg)
        counts["g"][rec["g_inequality"]] += 1
        counts["ga"][rec["ga_inequality"]] += 1
    return {"d": d, "samples": samples, "seed": seed, "counts": counts}


# ---------------------------------------------------------------------------
# simulated assistance protocols


def locc_assist_check(psi, cfg=None, filters=0):
    """Simulate supplier measurements (and optional local filters on A) and
    compare the achieved average G against the assisted-maximum ceiling.

    Measurement protocols are rank-one POVMs built from structured and
    seeded Haar unitaries of every size from the support dimension up to
    d^2. The report carries the best achieved average, the ceiling and the
    margins; beating a certified ceiling raises InternalConsistencyError.
    """
    cfg = cfg or OptimizerConfig()
    da, db, ns = psi.dims
    if da != db:
        raise DimensionError("assistance simulation needs equal A and B dimensions")
    d = da
    ceiling, certified, df = gcoa_pure_tripartite(psi, cfg)

    max_m = max(cfg.max_m if cfg.max_m is not None else d * d, ns)
    achieved = 0.0
    protocols = 0
    for m in range(ns, max_m + 1):
        candidates = [np.eye(m, dtype=np.complex128)] + flat_starts(m)
        for j in range(cfg.restarts):
            candidates.append(numkit.haar_unitary(m, cfg.seed + 104729 * m + j))
        for u in candidates:
            povm = states.povm_from_unitary(u, ns)
            outcomes = states.apply_povm(psi, povm)
            avg = sum(p * gconc.g_pure(s) for p, s in outcomes)
            achieved = max(achieved, avg)
            protocols += 1
    excess = achieved - ceiling
    if certified and excess > CONSISTENCY_TOL:
        raise InternalConsistencyError(
            f"simulated assistance {achieved} exceeds the certified ceiling {ceiling}"
        )

    filter_margins = []
    for j in range(filters):
        fa = gconc.random_contraction(d, cfg.seed + 15485863 * (j + 1))
        f1, f2 = gconc.two_outcome_filter(fa)
        post_total = 0.0
        for kraus in (f1, f2):
            amp = gconc.filtered_tripartite(psi.amp, kraus)
            p = float(np.real(amp.conj().ravel() @ amp.ravel()))
            if p <= 1e-14:
                continue
            branch = states.PureTripartite(amp / np.sqrt(p))
            val, cert_b, _ = gcoa_pure_tripartite(branch, cfg)
            post_total += p * val
        margin = ceiling - post_total
        filter_margins.append(margin)
        if certified and margin < -CONSISTENCY_TOL:
            raise InternalConsistencyError(
                f"filtered assistance {post_total} exceeds the ceiling {ceiling}"
            )
    return {
        "ceiling": ceiling,
        "ceiling_certified": certified,
        "achieved_max": achieved,
        "excess": max(0.0, excess),
        "protocols": protocols,
        "filter_margins": filter_margins,
        "residual": df.residual,
    }
