"""Subcommand implementations. Each returns a process exit code."""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import repeat
from pathlib import Path

from .config import Config, resolve
from .errors import DimensionMismatch
from .models import spring_mass_chain
from .oracle import exact_rc_2d, polygon_area, polygon_from_czono, volume_estimate
from .pdiff import inner_pdiff_with_diag, outer_pdiff, two_stage_inner_pdiff_with_diag
from .rcset import RcResult, rc_inner, rc_outer, rc_two_stage
from .serialize import (
    as_czono,
    as_symmetric,
    dump_json,
    load_rc_config,
    load_set,
    set_to_json,
    write_csv,
    write_polygon_csv,
    write_summary_csv,
    write_timings_csv,
)
from .sets import SymmetricKind, boundary_sample, is_empty, repr_complexity

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2

MODES = ("inner", "outer", "two-stage")


def cmd_pdiff(minuend: Path, subtrahend: Path, mode: str, out: Path, config: Config | None = None) -> int:
    """Pontryagin difference of two set files; writes <out> and <out stem>.meta.json."""
    cfg = resolve(config)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; choose from {list(MODES)}")
    C = as_czono(load_set(minuend), Path(minuend).name)
    S = as_symmetric(load_set(subtrahend), Path(subtrahend).name)
    if mode == "two-stage" and S.kind is not SymmetricKind.ZONOTOPE:
        raise ValueError("two-stage requires zonotope subtrahend")

    start = time.perf_counter()
    diag = None
    if mode == "inner":
        result, diag = inner_pdiff_with_diag(C, S, cfg)
    elif mode == "outer":
        result = outer_pdiff(C, S, cfg)
    else:
        result, diag = two_stage_inner_pdiff_with_diag(C, S, cfg)
    seconds = time.perf_counter() - start
    empty = result.is_empty_marker or is_empty(result, cfg)

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dump_json(set_to_json(result), out)
    cx = repr_complexity(result)
    dump_json(
        {
            "mode": mode,
            "empty": empty,
            "D": None if diag is None else diag.d.tolist(),
            "complexity": {
                "M": cx.constraints,
                "N": result.n_generators,
                "dof": _plain(cx.dof_order),
            },
            "seconds": seconds,
        },
        out.with_name(out.stem + ".meta.json"),
    )
    logger.info("pdiff %s: M=%d dof=%s empty=%s (%.3f s)", mode, cx.constraints, cx.dof_order, empty, seconds)
    return EXIT_EMPTY if empty else EXIT_OK


def _plain(x: Fraction) -> int | float:
    return int(x) if x.denominator == 1 else float(x)


_RECURSIONS = {"inner": rc_inner, "outer": rc_outer, "two-stage": rc_two_stage}


def cmd_rc(
    config_path: Path,
    out_dir: Path,
    directions: int | None = None,
    seed: int | None = None,
    config: Config | None = None,
) -> int:
    """Run one RC recursion from a scenario config and write its artifacts."""
    cfg = resolve(config)
    run = load_rc_config(config_path, seed, directions)
    result: RcResult = _RECURSIONS[run.approx](run.scenario, cfg)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for t, K in enumerate(result.sets):
        dump_json(set_to_json(K), out_dir / f"K_{t}.json")
    write_summary_csv(result, out_dir / "summary.csv")
    write_timings_csv(result, out_dir / "timings.csv")
    if run.emit_boundary and run.scenario.dim == 2:
        for t, K in enumerate(result.sets):
            if result.empty[t]:
                continue
            points = boundary_sample(K, run.directions, cfg)
            if points is not None:
                write_polygon_csv(points, out_dir / f"boundary_{t}.csv")
    k0 = result.complexities[0]
    logger.info(
        "%s RC set K_0: M=%d dof=%s in %.3f s",
        run.approx, k0.constraints, k0.dof_order, result.total_seconds,
    )
    return EXIT_OK


def parse_mass_range(text: str) -> list[int]:
    """"2..5" -> [2, 3, 4, 5]; "5" -> [5]; "2,10,50" -> [2, 10, 50]."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(part) for part in text.split("..", 1))
        values = list(range(lo, hi + 1))
    else:
        values = [int(part) for part in text.split(",") if part.strip()]
    if not values:
        raise ValueError(f"empty mass range {text!r}")
    bad = [v for v in values if not 2 <= v <= 50]
    if bad:
        raise ValueError(f"mass counts must lie in 2..50, got {bad}")
    return values


def _bench_one(masses: int, horizon: int, config: Config) -> list:
    scenario = spring_mass_chain(masses=masses, horizon=horizon)
    start = time.perf_counter()
    result = rc_inner(scenario, config)
    seconds = time.perf_counter() - start
    cx = result.complexities[0]
    return [scenario.dim, masses, seconds, cx.constraints, result.k0.n_generators, cx.dof_order]


def cmd_bench_chain(
    masses: list[int],
    horizon: int,
    out_csv: Path,
    parallel: bool = False,
    config: Config | None = None,
) -> int:
    """Time the inner recursion on chains of the given sizes."""
    cfg = resolve(config)
    masses = sorted(set(masses))
    if parallel:
        with ProcessPoolExecutor() as pool:
            rows = list(pool.map(_bench_one, masses, repeat(horizon), repeat(cfg)))
    else:
        rows = [_bench_one(m, horizon, cfg) for m in masses]
    for row in rows:
        logger.info("chain n=%d: %.3f s, M=%d, dof=%s", row[0], row[2], row[3], row[5])
    out_csv = Path(out_csv)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    write_csv(out_csv, ["n", "masses", "seconds", "M", "N", "dof"], rows)
    return EXIT_OK


def _area(K, run, cfg: Config) -> float:
    if K.is_empty_marker:
        return 0.0
    if run.area == "grid":
        return volume_estimate(K, run.resolution, cfg)
    return polygon_area(polygon_from_czono(K, cfg))


def cmd_oracle_compare(
    config_path: Path,
    out_dir: Path,
    directions: int | None = None,
    seed: int | None = None,
    config: Config | None = None,
) -> int:
    """Area of each approximate K_0 relative to the exact planar RC set."""
    cfg = resolve(config)
    run = load_rc_config(config_path, seed, directions)
    sc = run.scenario
    if sc.dim != 2:
        raise DimensionMismatch(f"oracle comparison needs a planar scenario, got R^{sc.dim}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    exact = exact_rc_2d(sc, cfg)[0]
    exact_area = polygon_area(exact)
    if exact is not None:
        write_polygon_csv(exact.vertices, out_dir / "exact.csv")

    methods = {"inner": rc_inner, "outer": rc_outer}
    if all(w.kind is SymmetricKind.ZONOTOPE for w in sc.W):
        methods["two-stage"] = rc_two_stage
    rows = [["exact", exact_area, 1.0 if exact_area > 0 else float("nan")]]
    for name, recursion in methods.items():
        K0 = recursion(sc, cfg).k0
        area = _area(K0, run, cfg)
        ratio = area / exact_area if exact_area > 0 else float("nan")
        logger.info("%s: area %.6g, ratio %.4f", name, area, ratio)
        rows.append([name, area, ratio])
        if not K0.is_empty_marker:
            points = boundary_sample(K0, run.directions, cfg)
            if points is not None:
                write_polygon_csv(points, out_dir / f"{name}.csv")
    write_csv(out_dir / "ratios.csv", ["method", "area", "ratio"], rows)
    return EXIT_OK
