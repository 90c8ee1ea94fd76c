"""Statistics over circuit sweeps: power-law fits, finite-size collapse,
and reproducible figure-data pipelines.

Every CSV written here embeds the generating configuration and its hash in
a leading comment line; floats carry 9 significant digits.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .circuit import CircuitConfig, MonteCarloResult, monte_carlo

__all__ = [
    "power_law_fit",
    "ModelComparison",
    "scaling_model_comparison",
    "Curve",
    "collapse_objective",
    "CollapseFit",
    "optimize_collapse",
    "SweepSpec",
    "SweepCell",
    "SweepResult",
    "run_sweep",
    "write_sweep_csv",
    "read_sweep_csv",
    "reproduce_figure",
]


# -- fits ------------------------------------------------------------------------


def _weighted_lstsq(design: np.ndarray, y: np.ndarray, stderr: np.ndarray):
    if np.any(stderr > 0):
        w = np.where(stderr > 0, 1.0 / np.maximum(stderr, 1e-300), 0.0)
        w[stderr <= 0] = w[w > 0].max() if np.any(w > 0) else 1.0
    else:
        w = np.ones_like(y)
    coef, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    fitted = design @ coef
    resid = y - fitted
    wrss = float((w**2 * resid**2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return coef, r2, wrss


def power_law_fit(
    points: Sequence[Tuple[float, float, float]],
) -> Tuple[float, float, float]:
    """Weighted LSQ of y on (L^(1/3), 1); returns (c1, c2, r_squared)."""
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    arr = np.asarray(points, dtype=np.float64)
    L, y, err = arr[:, 0], arr[:, 1], arr[:, 2]
    design = np.column_stack([np.cbrt(L), np.ones_like(L)])
    coef, r2, _ = _weighted_lstsq(design, y, err)
    return float(coef[0]), float(coef[1]), r2


@dataclass(frozen=True)
class ModelComparison:
    """Weighted residuals of the three candidate scaling forms."""

    wrss_cuberoot: float
    wrss_linear: float
    wrss_log: float
    r2_cuberoot: float
    r2_linear: float
    r2_log: float

    @property
    def preferred(self) -> str:
        best = min(
            ("cuberoot", self.wrss_cuberoot),
            ("linear", self.wrss_linear),
            ("log", self.wrss_log),
            key=lambda kv: kv[1],
        )
        return best[0]


def scaling_model_comparison(
    points: Sequence[Tuple[float, float, float]],
) -> ModelComparison:
    """Compare y ~ a*L^(1/3)+b against pure-linear and pure-log alternatives."""
    if len(points) < 3:
        raise ValueError("need at least 3 points")
    arr = np.asarray(points, dtype=np.float64)
    L, y, err = arr[:, 0], arr[:, 1], arr[:, 2]
    ones = np.ones_like(L)
    out = {}
    for name, column in (("cuberoot", np.cbrt(L)), ("linear", L), ("log", np.log(L))):
        _, r2, wrss = _weighted_lstsq(np.column_stack([column, ones]), y, err)
        out[name] = (wrss, r2)
    return ModelComparison(
        wrss_cuberoot=out["cuberoot"][0],
        wrss_linear=out["linear"][0],
        wrss_log=out["log"][0],
        r2_cuberoot=out["cuberoot"][1],
        r2_linear=out["linear"][1],
        r2_log=out["log"][1],
    )


# -- finite-size-scaling collapse --------------------------------------------------


@dataclass(frozen=True)
class Curve:
    """One system size's observable versus measurement rate."""

    L: int
    p: np.ndarray
    y: np.ndarray
    stderr: np.ndarray

    def __post_init__(self):
        order = np.argsort(self.p)
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float)[order])
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float)[order])
        object.__setattr__(self, "stderr", np.asarray(self.stderr, dtype=float)[order])
        if self.p.size < 2:
            raise ValueError("curves need at least 2 points")
        if np.unique(self.p).size != self.p.size:
            raise ValueError("duplicate p values on one curve")


def collapse_objective(curves: Sequence[Curve], p_c: float, nu: float) -> float:
    """Master-curve residual of the scaled data.

    Each curve is shifted by its own interpolated value at p_c and the
    abscissa rescaled to (p - p_c) L^(1/nu). Every point is then compared
    with the piecewise-linear interpolant through the points of the *other*
    curves that bracket it; the cost is the variance-weighted mean square
    deviation. A single curve therefore collapses to cost 0 by construction.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    scaled = []
    for c in curves:
        if not (c.p[0] <= p_c <= c.p[-1]):
            raise ValueError(f"p_c = {p_c} outside the data range of L = {c.L}")
        shift = float(np.interp(p_c, c.p, c.y))
        x = (c.p - p_c) * c.L ** (1.0 / nu)
        scaled.append((x, c.y - shift, c.stderr))

    total = 0.0
    count = 0
    for idx, (x, y, err) in enumerate(scaled):
        others = [scaled[j] for j in range(len(scaled)) if j != idx]
        if not others:
            continue
        other_x = np.concatenate([o[0] for o in others])
        if other_x.size < 2:
            continue
        other_y = np.concatenate([o[1] for o in others])
        other_e = np.concatenate([o[2] for o in others])
        order = np.argsort(other_x)
        ox, oy, oe = other_x[order], other_y[order], other_e[order]
        for xi, yi, ei in zip(x, y, err):
            hi = np.searchsorted(ox, xi)
            if hi == 0 or hi == ox.size:
                continue  # outside the others' span: no master estimate
            lo = hi - 1
            t = (xi - ox[lo]) / (ox[hi] - ox[lo]) if ox[hi] > ox[lo] else 0.5
            y_bar = (1 - t) * oy[lo] + t * oy[hi]
            var_bar = (1 - t) ** 2 * oe[lo] ** 2 + t**2 * oe[hi] ** 2
            denom = ei**2 + var_bar
            total += (yi - y_bar) ** 2 / denom if denom > 0 else (yi - y_bar) ** 2
            count += 1
    return total / count if count else 0.0


@dataclass
class CollapseFit:
    p_c: float
    nu: float
    objective: float
    trace: List[Tuple[float, float, float]] = field(default_factory=list)


def optimize_collapse(
    curves: Sequence[Curve],
    nu_range: Tuple[float, float] = (0.5, 2.0),
    grid: Tuple[int, int] = (25, 16),
) -> CollapseFit:
    """Grid search over (p_c, nu) followed by simplex refinement.

    p_c is scanned over the interior of the p-range common to all curves.
    Raises if fewer than 3 sizes are supplied or if the optimum pins to the
    edge of the swept range (data not straddling the transition).
    """
    if len(curves) < 3:
        raise ValueError("need at least 3 system sizes")
    if len({c.L for c in curves}) != len(curves):
        raise ValueError("duplicate system sizes")
    p_lo = max(float(c.p[0]) for c in curves)
    p_hi = min(float(c.p[-1]) for c in curves)
    if not p_lo < p_hi:
        raise ValueError("curves share no common p range")

    trace: List[Tuple[float, float, float]] = []
    margin = 0.02 * (p_hi - p_lo)
    p_grid = np.linspace(p_lo + margin, p_hi - margin, grid[0])
    nu_grid = np.linspace(nu_range[0], nu_range[1], grid[1])
    best = (float("inf"), p_grid[0], nu_grid[0])
    for pc in p_grid:
        for nu in nu_grid:
            cost = collapse_objective(curves, pc, nu)
            trace.append((float(pc), float(nu), cost))
            if cost < best[0]:
                best = (cost, float(pc), float(nu))

    def clamped(v: np.ndarray) -> float:
        pc, nu = float(v[0]), float(v[1])
        if not (p_lo + margin <= pc <= p_hi - margin) or not (
            nu_range[0] <= nu <= nu_range[1]
        ):
            return float("inf")
        return collapse_objective(curves, pc, nu)

    res = minimize(
        clamped,
        x0=np.array([best[1], best[2]]),
        method="Nelder-Mead",
        options={"xatol": 1e-5, "fatol": 1e-10, "maxiter": 400},
    )
    p_c, nu = float(res.x[0]), float(res.x[1])
    cost = float(res.fun)
    if cost > best[0]:  # simplex wandered off; keep the grid optimum
        p_c, nu, cost = best[1], best[2], best[0]
    trace.append((p_c, nu, cost))
    span = p_hi - p_lo
    if min(p_c - p_lo, p_hi - p_c) < 0.03 * span:
        raise ValueError("optimum pinned to the swept edge: p range does not straddle the transition")
    return CollapseFit(p_c=p_c, nu=nu, objective=cost, trace=trace)


# -- sweeps ------------------------------------------------------------------------


def _cell_seed(base_seed: int, L: int, p: float) -> int:
    blob = f"{base_seed}:{L}:{p:.9g}".encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "little") >> 1


@dataclass
class SweepSpec:
    L_values: Sequence[int]
    p_values: Sequence[float]
    seed: int = 0
    samples: int = 100
    T: Optional[int] = None  # None: 4L per system size
    dephasing_schedule: str = "boundary_even_steps"
    observables_every: int = 1

    def __post_init__(self):
        if not self.L_values or not self.p_values:
            raise ValueError("L_values and p_values must be non-empty")

    def configs(self) -> List[CircuitConfig]:
        return [
            CircuitConfig(
                L=L,
                p=p,
                T=self.T,
                seed=_cell_seed(self.seed, L, p),
                dephasing_schedule=self.dephasing_schedule,
                samples=self.samples,
                observables_every=self.observables_every,
            )
            for L in self.L_values
            for p in self.p_values
        ]


@dataclass
class SweepCell:
    L: int
    p: float
    samples: int
    stationary: bool
    late_mean: Dict[str, float]
    late_stderr: Dict[str, float]


@dataclass
class SweepResult:
    spec: SweepSpec
    cells: List[SweepCell]

    def cell(self, L: int, p: float) -> SweepCell:
        for c in self.cells:
            if c.L == L and abs(c.p - p) < 1e-12:
                return c
        raise KeyError((L, p))

    def fit_points(self, observable: str, p: float) -> List[Tuple[float, float, float]]:
        return [
            (c.L, c.late_mean[observable], c.late_stderr[observable])
            for c in self.cells
            if abs(c.p - p) < 1e-12
        ]

    def curves(self, observable: str) -> List[Curve]:
        out = []
        for L in sorted({c.L for c in self.cells}):
            rows = sorted((c.p, c) for c in self.cells if c.L == L)
            out.append(
                Curve(
                    L=L,
                    p=np.array([p for p, _ in rows]),
                    y=np.array([c.late_mean[observable] for _, c in rows]),
                    stderr=np.array([c.late_stderr[observable] for _, c in rows]),
                )
            )
        return out


def run_sweep(spec: SweepSpec, threads: int = 1, verbose: bool = False) -> SweepResult:
    cells = []
    for cfg in spec.configs():
        mc = monte_carlo(cfg, threads=threads)
        cells.append(
            SweepCell(
                L=cfg.L,
                p=cfg.p,
                samples=cfg.samples,
                stationary=mc.stationarity.passed,
                late_mean=mc.late_mean,
                late_stderr=mc.late_stderr,
            )
        )
        if verbose:
            print(
                f"L={cfg.L} p={cfg.p:.4g}: E={mc.late_mean['E']:.4g}"
                f" I={mc.late_mean['I']:.4g} stationary={mc.stationarity.passed}"
            )
    return SweepResult(spec, cells)


_SWEEP_COLUMNS = "L,p,observable,late_mean,late_stderr,samples,stationary"


def _spec_header(spec: SweepSpec) -> str:
    d = {
        "L_values": list(spec.L_values),
        "p_values": list(spec.p_values),
        "seed": spec.seed,
        "samples": spec.samples,
        "T": spec.T,
        "dephasing_schedule": spec.dephasing_schedule,
        "observables_every": spec.observables_every,
    }
    blob = json.dumps(d, sort_keys=True)
    digest = hashlib.sha256(blob.encode()).hexdigest()[:12]
    return f"# config_hash={digest} config={blob}"


def write_sweep_csv(result: SweepResult, path) -> None:
    lines = [_spec_header(result.spec), _SWEEP_COLUMNS]
    for c in result.cells:
        for name in sorted(c.late_mean):
            lines.append(
                f"{c.L},{c.p:.9g},{name},{c.late_mean[name]:.9g},"
                f"{c.late_stderr[name]:.9g},{c.samples},{int(c.stationary)}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_sweep_csv(path) -> List[Dict]:
    """Rows as dicts with typed fields; comment lines are skipped."""
    rows = []
    with open(path) as fh:
        header: Optional[List[str]] = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            parts = line.split(",")
            row = dict(zip(header, parts))
            row["L"] = int(row["L"])
            row["p"] = float(row["p"])
            row["late_mean"] = float(row["late_mean"])
            row["late_stderr"] = float(row["late_stderr"])
            row["samples"] = int(row["samples"])
            row["stationary"] = bool(int(row["stationary"]))
            rows.append(row)
    return rows


def sweep_rows_to_curves(rows: List[Dict], observable: str) -> List[Curve]:
    picked = [r for r in rows if r["observable"] == observable]
    curves = []
    for L in sorted({r["L"] for r in picked}):
        mine = sorted((r["p"], r) for r in picked if r["L"] == L)
        curves.append(
            Curve(
                L=L,
                p=np.array([p for p, _ in mine]),
                y=np.array([r["late_mean"] for _, r in mine]),
                stderr=np.array([r["late_stderr"] for _, r in mine]),
            )
        )
    return curves


# -- figure reproduction --------------------------------------------------------------


_FIG_SCALES = {
    "fig1b": {
        "full": dict(L=[40, 80, 120, 160, 200, 240, 280], p=[0.05, 0.075, 0.1, 0.125, 0.15, 0.175, 0.2, 0.225, 0.25], samples=200),
        "desk": dict(L=[16, 24, 32], p=[0.06, 0.1, 0.14, 0.18, 0.22], samples=40),
    },
    "fig1b_inset": {
        "full": dict(L=[40, 80, 120, 160, 200, 240, 280], p=[0.1], samples=200),
        "desk": dict(L=[16, 24, 32, 40], p=[0.1], samples=60),
    },
    "supp_mi": {
        "full": dict(L=[40, 80, 120, 160, 200, 240, 280], p=[0.1], samples=200),
        "desk": dict(L=[16, 24, 32, 40], p=[0.1], samples=60),
    },
    "supp_collapse": {
        "full": dict(L=[40, 80, 120, 160], p=list(np.round(np.linspace(0.10, 0.245, 7), 9)), samples=300),
        "desk": dict(L=[16, 24, 32], p=list(np.round(np.linspace(0.10, 0.245, 7), 9)), samples=40),
    },
    "fig3": {
        "full": dict(L=120, samples=100),
        "desk": dict(L=48, samples=16),
    },
}


def reproduce_figure(
    name: str,
    scale: str = "desk",
    out_dir: str = ".",
    seed: int = 2024,
    threads: int = 1,
) -> List[str]:
    """Regenerate the data behind a named figure; returns written paths.

    desk scale runs reduced sizes/samples (documented in the CSV header) so
    the pipeline finishes on a laptop; full scale matches the source plots.
    """
    if name not in _FIG_SCALES:
        raise ValueError(f"unknown figure {name!r}; choose from {sorted(_FIG_SCALES)}")
    if scale not in ("full", "desk"):
        raise ValueError("scale must be 'full' or 'desk'")
    os.makedirs(out_dir, exist_ok=True)
    params = _FIG_SCALES[name][scale]
    written: List[str] = []

    def emit(filename: str, lines: List[str]) -> None:
        path = os.path.join(out_dir, f"{name}_{scale}_{filename}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        written.append(path)

    note = f"# figure={name} scale={scale} seed={seed} params={json.dumps(params, sort_keys=True)}"

    if name == "fig3":
        written.extend(_reproduce_fig3(params, note, out_dir, name, scale, seed))
        return written

    spec = SweepSpec(
        L_values=params["L"], p_values=params["p"], seed=seed, samples=params["samples"]
    )
    result = run_sweep(spec, threads=threads)

    if name == "fig1b":
        lines = [note, "L,p,mean_E,stderr_E"]
        for c in result.cells:
            lines.append(
                f"{c.L},{c.p:.9g},{c.late_mean['E']:.9g},{c.late_stderr['E']:.9g}"
            )
        emit("curves.csv", lines)
    else:
        observable = "E" if name == "fig1b_inset" else "I"
        lines = [note, f"L,p,mean_{observable},stderr_{observable}"]
        for c in result.cells:
            lines.append(
                f"{c.L},{c.p:.9g},{c.late_mean[observable]:.9g},{c.late_stderr[observable]:.9g}"
            )
        emit("curves.csv", lines)
        if name in ("fig1b_inset", "supp_mi"):
            points = result.fit_points(observable, params["p"][0])
            c1, c2, r2 = power_law_fit(points)
            emit(
                "fit.csv",
                [note, "c1,c2,r_squared", f"{c1:.9g},{c2:.9g},{r2:.9g}"],
            )
        if name == "supp_collapse":
            fit = optimize_collapse(result.curves("I"))
            emit(
                "collapse.csv",
                [note, "p_c,nu,objective", f"{fit.p_c:.9g},{fit.nu:.9g},{fit.objective:.9g}"],
            )
    return written


def _reproduce_fig3(params, note, out_dir, name, scale, seed) -> List[str]:
    from .circuit import run_trajectory
    from .entanglement import length_distribution

    L, samples = params["L"], params["samples"]
    lines = [note, "series,length,mean_count"]
    for offset, (series, schedule) in enumerate(
        (("with_baths", "random_sites(2)"), ("without_baths", "random_sites(0)"))
    ):
        cfg = CircuitConfig(
            L=L,
            p=0.1,
            seed=_cell_seed(seed + offset, L, 0.1),
            dephasing_schedule=schedule,
            samples=samples,
            observables_every=4 * L,
        )
        counts = np.zeros(L + 1, dtype=np.float64)
        for i in range(samples):
            res = run_trajectory(cfg, i, keep_final_state=True)
            counts += length_distribution(res.final_state)
        counts /= samples
        for length in range(1, L + 1):
            if counts[length] > 0:
                lines.append(f"{series},{length},{counts[length]:.9g}")
    path = os.path.join(out_dir, f"{name}_{scale}_histogram.csv")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return [path]
