"""Ensemble verifiers for the Phi-moment martingale inequalities.

Each verifier draws a seeded ensemble, computes both sides of one inequality
per sample and returns a ``VerificationReport``.  Where the constant is known
(constant-one facts, Power(2) identities, certified interpolation constants)
the report asserts it; otherwise ratios are recorded as findings.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import NcOrliczError, RegimeError
from .interpolation import (
    auto_exponents,
    column_embed,
    identity_operator,
    row_embed,
    stein_operator,
    transform_operator,
    verify_interpolation,
)
from .martingale import (
    Filtration,
    filtration_for_dim,
    martingale_difference_projection,
    random_martingale,
    stein_map,
    transform,
)
from .noise import circle_phi_average, lacunary_embed, rademacher_phi_moment, rademacher_phi_moment_mc
from .operators import column_square_moment, random_operator, row_square_moment, trace_phi_moment
from .orlicz import OrliczFunction, Power, indices, parse_phi
from .report import VerificationReport, evaluate_pass, summarize

IDENTITY_TOL = 1e-9
DEGENERATE_MODULAR = 1e-14
BOUNDARY_TOL = 1e-6
NO_INFORMATION = (
    "the regime 1 < p_Phi <= 2 <= q_Phi gives no information: "
    "the inequality needs q_Phi < 2 or p_Phi > 2"
)
INEQUALITIES = ("transform", "signs", "stein", "khintchine", "bg")


@dataclass
class EnsembleConfig:
    phi: OrliczFunction
    dim: int = 8
    samples: int = 50
    seed: int = 0
    filtration: dict | None = None
    rademacher: str = "exact"
    n_terms: int = 4
    hermitian: bool = False
    alpha: str = "alternating"
    p0: float | None = None
    p1: float | None = None
    restarts: int = 3
    iterations: int = 300
    step_tol: float = 1e-6
    directions: int = 1
    quad: int | None = None

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if isinstance(self.phi, str):
            self.phi = parse_phi(self.phi)

    def make_filtration(self) -> Filtration:
        if self.filtration is None:
            return filtration_for_dim(self.dim)
        f = Filtration.from_descriptor(self.filtration)
        if f.dim != self.dim:
            raise ValueError(f"filtration dimension {f.dim} does not match dim={self.dim}")
        return f

    def rng(self, tag: str, index: int) -> np.random.Generator:
        """Independent stream per (verifier, sample), split from the master seed."""
        return np.random.default_rng(np.random.SeedSequence([self.seed, zlib.crc32(tag.encode()), index]))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["phi"] = self.phi.spec()
        return d


@dataclass
class DecomposeSettings:
    restarts: int = 3
    iterations: int = 300
    step_tol: float = 1e-6
    directions: int = 1
    seed: int = 0


# regime gating


def regime(phi: OrliczFunction) -> str:
    """'sum' when 1 < p_Phi <= q_Phi < 2, 'max' when 2 < p_Phi <= q_Phi < inf."""
    idx = indices(phi)
    if idx.p_phi > 1 + BOUNDARY_TOL and idx.q_phi < 2 - BOUNDARY_TOL:
        return "sum"
    if idx.p_phi > 2 + BOUNDARY_TOL and math.isfinite(idx.q_phi):
        return "max"
    raise RegimeError(
        f"{NO_INFORMATION} (estimated p_Phi={idx.p_phi:.4g}, q_Phi={idx.q_phi:.4g})"
    )


def _require_reflexive(phi):
    idx = indices(phi)
    if not (idx.p_phi > 1 + BOUNDARY_TOL and math.isfinite(idx.q_phi)):
        raise RegimeError(f"need 1 < p_Phi <= q_Phi < inf, estimated ({idx.p_phi:.4g}, {idx.q_phi:.4g})")
    return idx


def _regime_meta(phi, name=None):
    idx = indices(phi)
    out = {"p_phi": idx.p_phi, "q_phi": idx.q_phi}
    if name is not None:
        out["regime"] = name
    return out


def _finish(name, phi, cfg, rows, aggregate, regime_name=None, findings=None):
    aggregate = {**summarize(rows), **aggregate}
    return VerificationReport(
        inequality=name,
        regime=_regime_meta(phi, regime_name),
        samples=rows,
        aggregate=aggregate,
        passed=evaluate_pass(rows, aggregate),
        findings=findings or [],
        config=cfg.to_dict(),
    )


def _row(i, lhs, rhs, variant="", **extra):
    return {"index": i, "variant": variant, "lhs": float(lhs), "rhs": float(rhs),
            "ratio": float(lhs) / float(rhs), **extra}


def _is_power(phi, p=None):
    return isinstance(phi, Power) and (p is None or phi.p == p)


# symbols for martingale transforms


def resolve_alpha(alpha, n: int, rng: np.random.Generator | None = None) -> list:
    if isinstance(alpha, str):
        if alpha == "ones":
            return [1.0] * n
        if alpha == "alternating":
            return [(-1.0) ** k for k in range(n)]
        if alpha == "random":
            rng = rng or np.random.default_rng(0)
            return list(rng.uniform(-1.0, 1.0, n))
        return resolve_alpha([float(v) for v in alpha.split(",")], n)
    alpha = [complex(a) if isinstance(a, complex) else float(a) for a in alpha]
    if len(alpha) < n:
        raise ValueError(f"symbol needs {n} entries, got {len(alpha)}")
    return alpha[:n]


# verifiers


def verify_transform(cfg: EnsembleConfig, alpha=None) -> VerificationReport:
    """tau(Phi(|T_alpha x|)) <= C tau(Phi(|x|)) against the certified constant."""
    phi = cfg.phi
    _require_reflexive(phi)
    f = cfg.make_filtration()
    alpha = resolve_alpha(cfg.alpha if alpha is None else alpha, f.n_levels, cfg.rng("alpha", 0))
    ensemble = [random_martingale(f, cfg.rng("transform", i), cfg.hermitian).final for i in range(cfg.samples)]
    p0, p1 = _exponents(cfg)
    res = verify_interpolation(transform_operator(f, alpha), phi, p0, p1, ensemble)
    rows = [_row(i, l, r) for i, (l, r) in enumerate(zip(res.lhs, res.rhs))]
    agg = {"mode": "certified", "upper_bound": res.constant, "lower_bound": None,
           "A0": res.A0, "A1": res.A1, "p0": p0, "p1": p1, "skipped": res.skipped,
           "alpha": [[a.real, a.imag] if isinstance(a, complex) else a for a in alpha]}
    if _is_power(phi, 2.0) and max(abs(a) for a in alpha) <= 1:
        agg.update(mode="asserted", upper_bound=1 + IDENTITY_TOL, certified_constant=res.constant)
    return _finish("transform", phi, cfg, rows, agg)


def _exponents(cfg):
    p0, p1 = auto_exponents(cfg.phi)
    return (cfg.p0 if cfg.p0 is not None else p0), (cfg.p1 if cfg.p1 is not None else p1)


MAX_SIGN_PATTERNS = 2 ** 14
MEASURED_SIGN_PATTERNS = 64


def sign_patterns(n: int, rng: np.random.Generator, limit: int = MAX_SIGN_PATTERNS) -> np.ndarray:
    """All 2^n sign vectors (first all +1), or ``limit`` seeded ones if there are more."""
    if 2 ** n <= limit:
        idx = np.arange(2 ** n)[:, None]
        return 1.0 - 2.0 * ((idx >> np.arange(n)[None, :]) & 1)
    pats = rng.choice([-1.0, 1.0], size=(limit, n))
    pats[0] = 1.0
    return pats


def verify_sign_equivalence(cfg: EnsembleConfig) -> VerificationReport:
    """tau(Phi(|sum eps_n dx_n|)) against tau(Phi(|sum dx_n|)) for every sign pattern.

    T_eps is an involution, so one certified constant C gives 1/C <= ratio <= C.
    """
    phi = cfg.phi
    _require_reflexive(phi)
    f = cfg.make_filtration()
    n = f.n_levels
    patterns = sign_patterns(n, cfg.rng("signs-patterns", 0))
    mart = [random_martingale(f, cfg.rng("signs", i), cfg.hermitian) for i in range(cfg.samples)]
    ensemble = [m.final for m in mart]
    p0, p1 = _exponents(cfg)
    measured = patterns[:MEASURED_SIGN_PATTERNS]
    C, A0, A1 = 0.0, 0.0, 0.0
    for eps in measured:
        res = verify_interpolation(transform_operator(f, eps), phi, p0, p1, ensemble[: min(len(ensemble), 20)])
        if res.constant > C:
            C, A0, A1 = res.constant, res.A0, res.A1
    rows = []
    skipped = 0
    for i, m in enumerate(mart):
        den = trace_phi_moment(phi, m.final)
        if den < DEGENERATE_MODULAR:
            skipped += 1
            continue
        for j, eps in enumerate(patterns):
            num = trace_phi_moment(phi, transform(m, eps).final)
            rows.append(_row(i, num, den, pattern=j))
    agg = {"mode": "certified", "upper_bound": C, "lower_bound": 1.0 / C, "A0": A0, "A1": A1,
           "p0": p0, "p1": p1, "patterns": len(patterns), "skipped": skipped}
    if _is_power(phi, 2.0):
        agg.update(mode="asserted", upper_bound=1 + IDENTITY_TOL, lower_bound=1 - IDENTITY_TOL,
                   certified_constant=C)
    return _finish("signs", phi, cfg, rows, agg)


def verify_stein(cfg: EnsembleConfig) -> VerificationReport:
    """Column and row Stein inequalities for (E_n a_n) against (a_n)."""
    phi = cfg.phi
    _require_reflexive(phi)
    f = cfg.make_filtration()
    n = f.n_levels
    seqs = []
    for i in range(cfg.samples):
        rng = cfg.rng("stein", i)
        seqs.append([random_operator(rng, f.dim, cfg.hermitian) for _ in range(n)])
    p0, p1 = _exponents(cfg)
    rows, bounds, extra = [], {}, {}
    for variant, embed, moment in (("col", column_embed, column_square_moment),
                                   ("row", row_embed, row_square_moment)):
        T = stein_operator(f, row=(variant == "row"))
        res = verify_interpolation(T, phi, p0, p1, [embed(a) for a in seqs[: min(len(seqs), 50)]])
        C = res.constant
        if _is_power(phi, 2.0):
            C = 1 + IDENTITY_TOL
        bounds[variant] = [None, C]
        extra[variant] = {"A0": res.A0, "A1": res.A1, "certified_constant": res.constant}
        for i, a in enumerate(seqs):
            rows.append(_row(i, moment(phi, stein_map(f, a)), moment(phi, a), variant))
    rows.sort(key=lambda r: (r["index"], r["variant"]))
    agg = {"mode": "asserted" if _is_power(phi, 2.0) else "certified", "bounds": bounds,
           "p0": p0, "p1": p1, "measured": extra}
    return _finish("stein", phi, cfg, rows, agg)


def decompose_optimal(phi: OrliczFunction, xs: Sequence, settings: DecomposeSettings | None = None,
                      filtration: Filtration | None = None):
    """Upper bound for inf over x_k = y_k + z_k of
    tau(Phi[(sum |y_k|^2)^(1/2)]) + tau(Phi[(sum |z_k*|^2)^(1/2)]).

    The search runs over y_k = theta_k x_k + sum_j c_kj D_kj with fixed random
    directions D_kj (projected to level-k martingale differences when a
    filtration is given, so y and z stay martingales).  Starts include the
    trivial decompositions y = x and z = x, so the returned value never
    exceeds min(column-only, row-only).  Returns (ys, zs, value).
    """
    settings = settings or DecomposeSettings()
    xs = [np.asarray(x, dtype=complex) for x in xs]
    n = len(xs)
    if n == 0 or all(not np.any(x) for x in xs):
        zero = [np.zeros_like(x) for x in xs]
        return zero, [z.copy() for z in zero], 0.0
    rng = np.random.default_rng(settings.seed)
    m = settings.directions
    dirs = []
    for k, x in enumerate(xs):
        scale = np.linalg.norm(x) / math.sqrt(x.shape[0])
        row = []
        for _ in range(m):
            D = random_operator(rng, x.shape[0]) * scale
            if filtration is not None:
                D = martingale_difference_projection(filtration, k, D)
            row.append(D)
        dirs.append(row)

    def build(params):
        theta = params[:n]
        coef = params[n:].reshape(n, m) if m else np.zeros((n, 0))
        ys = [theta[k] * xs[k] + sum(coef[k, j] * dirs[k][j] for j in range(m)) for k in range(n)]
        return ys, [x - y for x, y in zip(xs, ys)]

    def cost(params):
        ys, zs = build(params)
        return column_square_moment(phi, ys) + row_square_moment(phi, zs)

    starts = [np.concatenate([np.ones(n), np.zeros(n * m)]), np.zeros(n * (m + 1))]
    for _ in range(settings.restarts):
        starts.append(np.concatenate([rng.uniform(0.0, 1.0, n), np.zeros(n * m)]))
    best_p, best_v = None, math.inf
    for s in starts:
        v0 = cost(s)
        if v0 < best_v:
            best_p, best_v = s, v0
    for s in starts[2:] + starts[:2]:
        res = minimize(cost, s, method="Powell",
                       options={"maxfev": settings.iterations, "xtol": settings.step_tol, "ftol": 1e-12})
        if res.fun < best_v:
            best_p, best_v = res.x, float(res.fun)
    ys, zs = build(best_p)
    return ys, zs, float(cost(best_p))


def _decompose_settings(cfg, i, tag):
    return DecomposeSettings(cfg.restarts, cfg.iterations, cfg.step_tol, cfg.directions,
                             seed=int(cfg.rng(tag + "-opt", i).integers(2 ** 31)))


def _rademacher(cfg, phi, xs, i):
    mode = cfg.rademacher
    if mode == "exact":
        return rademacher_phi_moment(phi, xs)
    if mode.startswith("mc:"):
        return rademacher_phi_moment_mc(phi, xs, int(mode[3:]), int(cfg.rng("rademacher", i).integers(2 ** 31)))[0]
    raise ValueError(f"unknown Rademacher mode {mode!r}")


def default_sequence(cfg: EnsembleConfig, rng: np.random.Generator) -> list:
    return [random_operator(rng, cfg.dim, cfg.hermitian) for _ in range(cfg.n_terms)]


def verify_khintchine(cfg: EnsembleConfig, xs_generator: Callable | None = None,
                      regime_override: str | None = None) -> VerificationReport:
    """Noncommutative Khintchine in Phi-moments.

    sum regime (q_Phi < 2): Rademacher moment against min(column, row) and the
    optimized decomposition, both directions recorded.  max regime (p_Phi > 2):
    max(column, row) <= Rademacher moment, asserted with constant 1 for powers.
    """
    phi = cfg.phi
    name = regime_override or regime(phi)
    gen = xs_generator or default_sequence
    rows, findings = [], []
    for i in range(cfg.samples):
        xs = gen(cfg, cfg.rng("khintchine", i))
        rad = _rademacher(cfg, phi, xs, i)
        col, row = column_square_moment(phi, xs), row_square_moment(phi, xs)
        if rad < DEGENERATE_MODULAR:
            continue
        if name == "max":
            r = _row(i, max(col, row), rad, "max", col=col, row_sq=row)
            rows.append(r)
            if r["ratio"] > 1 + IDENTITY_TOL:
                findings.append(f"sample {i}: max(col,row)/rademacher = {r['ratio']:.6g} > 1")
        else:
            _, _, dec = decompose_optimal(phi, xs, _decompose_settings(cfg, i, "khintchine"))
            rows.append(_row(i, rad, min(col, row), "rad/min", col=col, row_sq=row))
            rows.append(_row(i, rad, dec, "rad/decomp", decomposition=dec))
            rows.append(_row(i, dec, rad, "decomp/rad", decomposition=dec))
        if cfg.quad is not None:
            circ = circle_phi_average(phi, lacunary_embed(xs), cfg.quad)
            rows.append(_row(i, circ, rad, "lacunary/rad"))
    if name == "max" and _is_power(phi) and phi.p >= 2:
        bounds = {"max": [None, 1 + IDENTITY_TOL]}
        if cfg.quad is not None:
            bounds["lacunary/rad"] = [None, None]
        agg = {"mode": "asserted", "bounds": bounds}
    else:
        agg = {"mode": "finding"}
    return _finish("khintchine", phi, cfg, rows, agg, name, findings)


def verify_bg(cfg: EnsembleConfig, regime_override: str | None = None,
              diagonal: bool = False) -> VerificationReport:
    """Burkholder-Gundy in Phi-moments for random martingales.

    max regime: tau(Phi(|x_N|)) against max of the column and row square
    function moments.  sum regime: against the optimized martingale
    decomposition.  Two-sided empirical constants are recorded.
    ``diagonal=True`` draws diagonal (commutative) martingales.
    """
    phi = cfg.phi
    name = regime_override or regime(phi)
    f = cfg.make_filtration()
    rows = []
    skipped = 0
    for i in range(cfg.samples):
        m = random_martingale(f, cfg.rng("bg", i), cfg.hermitian, diagonal=diagonal)
        lhs = trace_phi_moment(phi, m.final)
        if lhs < DEGENERATE_MODULAR:
            skipped += 1
            continue
        col, row = column_square_moment(phi, m.diffs), row_square_moment(phi, m.diffs)
        if name == "max":
            rows.append(_row(i, lhs, max(col, row), "max", col=col, row_sq=row))
        else:
            _, _, dec = decompose_optimal(phi, m.diffs, _decompose_settings(cfg, i, "bg"), filtration=f)
            rows.append(_row(i, lhs, dec, "sum", col=col, row_sq=row, decomposition=dec))
    ratios = [r["ratio"] for r in rows]
    agg = {
        "mode": "finding",
        "skipped": skipped,
        "upper_constant": max(ratios, default=None),
        "lower_constant": max((1 / r for r in ratios), default=None),
    }
    return _finish("bg", phi, cfg, rows, agg, name)


VERIFIERS = {
    "transform": verify_transform,
    "signs": verify_sign_equivalence,
    "stein": verify_stein,
    "khintchine": verify_khintchine,
    "bg": verify_bg,
}


def ensemble_run(cfg: EnsembleConfig, which) -> list:
    """Run the selected verifiers in canonical order; errors become error reports."""
    unknown = set(which) - set(INEQUALITIES)
    if unknown:
        raise ValueError(f"unknown inequality ids: {sorted(unknown)}")
    out = []
    for name in INEQUALITIES:
        if name not in which:
            continue
        try:
            out.append(VERIFIERS[name](cfg))
        except NcOrliczError as exc:
            out.append(VerificationReport(name, {}, [], {}, None, [], cfg.to_dict(),
                                          error=f"{type(exc).__name__}: {exc}"))
    return out


def interpolation_ensemble(cfg: EnsembleConfig, op: str):
    """(operator, ensemble) for the interpolation check of ``op``."""
    f = cfg.make_filtration()
    if op == "identity":
        T = identity_operator()
    elif op == "transform":
        T = transform_operator(f, resolve_alpha(cfg.alpha, f.n_levels, cfg.rng("alpha", 0)))
    elif op == "stein":
        T = stein_operator(f)
        seqs = [[random_operator(cfg.rng("interpolate", i), f.dim, cfg.hermitian) for _ in range(f.n_levels)]
                for i in range(cfg.samples)]
        return T, [column_embed(a) for a in seqs]
    else:
        raise ValueError(f"unknown operator {op!r} (expected transform, stein or identity)")
    return T, [random_operator(cfg.rng("interpolate", i), cfg.dim, cfg.hermitian) for i in range(cfg.samples)]


def verify_interpolation_report(cfg: EnsembleConfig, op: str) -> VerificationReport:
    """Every ratio tau(Phi(|Tx|))/tau(Phi(|x|)) against the certified constant."""
    T, ensemble = interpolation_ensemble(cfg, op)
    p0, p1 = _exponents(cfg)
    res = verify_interpolation(T, cfg.phi, p0, p1, ensemble)
    rows = [_row(i, l, r, op) for i, (l, r) in enumerate(zip(res.lhs, res.rhs))]
    agg = {"mode": "certified", "upper_bound": res.constant, "lower_bound": None,
           "A0": res.A0, "A1": res.A1, "p0": p0, "p1": p1, "skipped": res.skipped}
    return _finish("interpolation", cfg.phi, cfg, rows, agg)
