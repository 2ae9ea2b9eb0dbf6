"""Command handlers: run games, check uniqueness, export PSDs, beampatterns and sweeps"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from application.channel import siso_interference, symmetric_distances
from application.constraints import ConstraintSpec, beampattern
from application.engine import RunResult, run
from application.errors import BadParamsError
from application.file_handlers import OutputFileWriter, Table
from application.game import GameVariant, UniquenessReport, build_game, feasibility, uniqueness_for_game
from application.scenario_parser import (
    RandomChannelSettings,
    Scenario,
    ScenarioSerializer,
    ScheduleSettings,
    encode_array,
)
from application.translations import TRANSLATIONS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNIQUENESS_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_INFEASIBLE = 3
EXIT_NOT_CONVERGED = 4


@dataclass(frozen=True)
class RunOptions:
    """Resolved run settings: CLI flag, then scenario, then settings.json, then default"""

    max_iter: int
    tol: float
    workers: int
    init: str = "zero"
    xlsx: bool = False

    @classmethod
    def resolve(cls, cli: Dict, scenario: Scenario, saved: Dict) -> "RunOptions":
        def pick(key: str):
            if cli.get(key) is not None:
                return cli[key]
            if getattr(scenario.run, key) is not None:
                return getattr(scenario.run, key)
            return saved[key]

        return cls(pick("max_iter"), pick("tol"), pick("workers"), scenario.run.init, bool(cli.get("xlsx")))


class CommandHandler:
    """Shared plumbing: translated messages, report output and file writing"""

    def __init__(self, language: str, echo: Callable[[str], None]):
        self.language = language
        self.t = TRANSLATIONS.get(language, TRANSLATIONS["EN"])
        self.echo = echo
        self.write_errors: List[str] = []

    def _msg(self, message_key: str, fallback: str, /, **kwargs) -> str:
        return self.t.get(message_key, fallback).format(**kwargs)

    def _check_write(self, error: Optional[str], path: Path) -> None:
        if error:
            message = self._msg("save_error", "Could not write {path}: {error}", path=path, error=error)
            self.write_errors.append(message)
            self.echo(message)

    def _write_tables(self, out_dir: Path, tables: Dict[str, Table], xlsx: bool) -> None:
        for name, (header, rows) in tables.items():
            path = out_dir / f"{name}.csv"
            self._check_write(OutputFileWriter.write_csv(path, header, rows), path)
        if xlsx:
            path = out_dir / "results.xlsx"
            self._check_write(OutputFileWriter.write_workbook(path, tables), path)

    def _run(self, scenario: Scenario, options: RunOptions) -> RunResult:
        game = scenario.game
        return run(game, scenario.schedule.build(game.user_count), options.init, options.max_iter, options.tol, options.workers)

    def _finish(self, result: RunResult) -> int:
        if result.converged:
            self.echo(self._msg("converged", "Converged after {iterations} ticks", iterations=result.iterations))
            return EXIT_OK
        self.echo(
            self._msg(
                "not_converged",
                "No convergence after {iterations} ticks (max NE residual {residual:.3e})",
                iterations=result.iterations,
                residual=result.report.max_residual,
            )
        )
        return EXIT_NOT_CONVERGED


class RunHandler(CommandHandler):
    """Handles the ``run`` command"""

    def handle(self, scenario: Scenario, out_dir: Path, options: RunOptions) -> int:
        """
        Run the game to equilibrium and write rates, steps, final profile and NE report

        Args:
            scenario: parsed scenario
            out_dir: output directory
            options: resolved run settings

        Returns:
            Exit code
        """
        result = self._run(scenario, options)
        game = scenario.game
        rate_rows = [[tick, q, rates[q]] for tick, rates in enumerate(result.rates) for q in range(game.user_count)]
        step_rows = [[tick, step] for tick, step in enumerate(result.steps)]
        self._write_tables(
            out_dir,
            {"rates": (["tick", "user", "rate_bits"], rate_rows), "residuals": (["tick", "max_step"], step_rows)},
            options.xlsx,
        )

        if game.is_siso:
            users = [{"user": q, "powers": [float(p) for p in s]} for q, s in enumerate(result.profile)]
        else:
            users = [{"user": q, "covariance": encode_array(s)} for q, s in enumerate(result.profile)]
        path = out_dir / "final_profile.json"
        self._check_write(OutputFileWriter.write_json(path, {"variant": game.variant.value, "users": users}), path)

        report = result.report
        checks = feasibility(result.profile, game)
        ne_report = {
            "variant": game.variant.value,
            "converged": result.converged,
            "iterations": result.iterations,
            "is_nash": report.is_nash,
            "tolerance": report.tolerance,
            "residuals": report.residuals,
            "rates": report.rates,
            "sum_rate": result.sum_rate,
            "feasible": [c.passed for c in checks],
            "violations": [c.failed for c in checks],
        }
        path = out_dir / "ne_report.json"
        self._check_write(OutputFileWriter.write_json(path, ne_report), path)
        path = out_dir / "scenario_resolved.json"
        self._check_write(ScenarioSerializer.write(scenario, path), path)

        for q, value in enumerate(report.rates):
            self.echo(self._msg("user_rate", "user {user}: {rate:.6f} bits", user=q, rate=value))
        self.echo(self._msg("sum_rate", "sum rate: {rate:.6f} bits", rate=result.sum_rate))
        return self._finish(result)


class UniquenessHandler(CommandHandler):
    """Handles the ``check-uniqueness`` command"""

    def handle(self, scenario: Scenario) -> int:
        """Print both sufficient conditions with their margins; exit 0 iff one holds"""
        report = uniqueness_for_game(scenario.game)
        self.print_report(report)
        return EXIT_OK if report.holds else EXIT_UNIQUENESS_FAILED

    def print_report(self, report: UniquenessReport) -> None:
        if report.heuristic:
            self.echo(self._msg("heuristic_gate", "heuristic gate on the effective channels"))
        for key, label, held, margins in (
            ("received", "low MUI received", report.condition_received, report.margins_received),
            ("generated", "low MUI generated", report.condition_generated, report.margins_generated),
        ):
            verdict = self._msg("pass", "PASS") if held else self._msg("fail", "FAIL")
            name = self._msg(f"condition_{key}", label)
            self.echo(f"{name}: {verdict} (min margin {format(float(margins.min()), '.6g')})")
            for user, margin in enumerate(margins):
                self.echo(self._msg("user_margin", "  user {user}: margin {margin:.6g}", user=user, margin=margin))
        overall = self._msg("unique", "UNIQUE") if report.holds else self._msg("not_proven", "NOT PROVEN")
        self.echo(self._msg("uniqueness_verdict", "uniqueness: {verdict}", verdict=overall))


class PsdHandler(CommandHandler):
    """Handles the ``psd`` command"""

    def handle(self, scenario: Scenario, out_dir: Path, options: RunOptions) -> int:
        """Equilibrium power per bin and interference normalized by |H_qq(k)|^2"""
        game = scenario.game
        if not game.is_siso:
            raise BadParamsError(self._msg("psd_needs_siso", "psd needs a SISO game"))
        result = self._run(scenario, options)
        powers = result.profile.strategies
        gains = game.siso.gains()
        rows = []
        for q in range(game.user_count):
            normalized = siso_interference(q, powers, game.siso) / gains[q, q]
            rows.extend([k, q, powers[q][k], normalized[k]] for k in range(game.siso.bin_count))
        header = ["bin", "user", "power", "normalized_interference"]
        self._write_tables(out_dir, {"psd": (header, rows)}, options.xlsx)
        return self._finish(result)


class BeampatternHandler(CommandHandler):
    """Handles the ``beampattern`` command"""

    def handle(
        self, scenario: Scenario, out_dir: Path, options: RunOptions, angles_deg: Sequence[float], spacing: float
    ) -> int:
        """Per-mode and total transmit patterns of every user's equilibrium covariance"""
        game = scenario.game
        if game.is_siso:
            raise BadParamsError(self._msg("beampattern_needs_mimo", "beampattern needs a MIMO game"))
        result = self._run(scenario, options)
        radians = np.radians(np.asarray(angles_deg, dtype=float))
        rows = []
        for q, covariance in enumerate(result.profile):
            pattern = beampattern(covariance, radians, spacing)
            for mode, eigenvalue in enumerate(pattern.eigenvalues):
                rows.extend(
                    [q, mode, eigenvalue, angle, gain] for angle, gain in zip(angles_deg, pattern.gains[mode])
                )
            rows.extend([q, "total", "", angle, gain] for angle, gain in zip(angles_deg, pattern.total))
        header = ["user", "mode", "eigenvalue", "angle_deg", "gain"]
        self._write_tables(out_dir, {"beampattern": (header, rows)}, options.xlsx)
        return self._finish(result)


@dataclass(frozen=True, eq=False)
class SweepJob:
    """One sweep point: an independent deterministic run keyed by (antennas, distance, seed)"""

    antennas: int
    distance: float
    seed: int
    channels: RandomChannelSettings
    constraints: ConstraintSpec
    variant: GameVariant
    alpha: float
    schedule: ScheduleSettings
    max_iter: int
    tol: float
    init: str


def run_sweep_point(job: SweepJob) -> Tuple[int, float, int, float, bool, int]:
    """
    Run a single sweep point

    Module level so a ProcessPoolExecutor can pickle it.
    """
    distances = symmetric_distances(job.channels.users, 1.0, job.distance)
    channels = job.channels.build(job.seed, job.antennas, distances)
    game = build_game(job.variant, job.constraints, channels, alpha=job.alpha)
    result = run(game, job.schedule.build(game.user_count), job.init, job.max_iter, job.tol)
    return job.antennas, job.distance, job.seed, result.sum_rate, result.converged, result.iterations


class SweepHandler(CommandHandler):
    """Handles the ``sweep-distance`` command"""

    def handle(
        self,
        scenario: Scenario,
        out_dir: Path,
        options: RunOptions,
        distances: Sequence[float],
        seed_count: int,
        antennas: Optional[Sequence[int]] = None,
    ) -> int:
        """
        Sum rate at equilibrium against the cross/direct distance ratio

        Args:
            scenario: template with random MIMO channels and power-only constraints
            out_dir: output directory
            options: resolved run settings (workers sets the process pool size)
            distances: ratios d_rq / d_qq to visit
            seed_count: channel realizations per point, seeds counted up from the template's
            antennas: antenna counts to visit (defaults to the template's)

        Returns:
            Exit code
        """
        settings = scenario.random_channels
        game = scenario.game
        if settings is None or game.is_siso:
            raise BadParamsError(self._msg("sweep_needs_random", "sweep-distance needs random MIMO channels"))
        if any(uc.has_null or uc.has_shaping for uc in game.constraints.users):
            raise BadParamsError(self._msg("sweep_power_only", "sweep-distance supports power budgets only"))
        if seed_count < 1 or not distances:
            raise BadParamsError(self._msg("sweep_empty", "sweep-distance needs distances and at least one seed"))
        if antennas is None:
            antennas = [settings.antennas if isinstance(settings.antennas, int) else settings.antennas[0]]

        jobs = [
            SweepJob(
                n, float(d), settings.seed + i, settings, game.constraints, game.variant, game.alpha,
                scenario.schedule, options.max_iter, options.tol, options.init,
            )
            for n in sorted(set(antennas))
            for d in sorted(set(distances))
            for i in range(seed_count)
        ]
        logger.info("sweep over %d points with %d workers", len(jobs), options.workers)
        if options.workers > 1:
            with ProcessPoolExecutor(max_workers=options.workers) as executor:
                points = list(executor.map(run_sweep_point, jobs))
        else:
            points = [run_sweep_point(job) for job in jobs]
        points.sort(key=lambda p: (p[0], p[1], p[2]))

        grouped: Dict[Tuple[int, float], List[float]] = {}
        for n, d, _, value, _, _ in points:
            grouped.setdefault((n, d), []).append(value)
        summary = []
        for (n, d), values in sorted(grouped.items()):
            arr = np.array(values)
            stderr = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
            summary.append([n, d, float(arr.mean()), stderr, arr.size])
        self._write_tables(
            out_dir,
            {
                "sweep": (["antennas", "distance", "mean_sum_rate", "stderr", "points"], summary),
                "sweep_points": (
                    ["antennas", "distance", "seed", "sum_rate", "converged", "iterations"],
                    [list(p) for p in points],
                ),
            },
            options.xlsx,
        )
        for n, d, mean, stderr, _ in summary:
            self.echo(
                self._msg(
                    "sweep_row", "antennas {antennas} distance {distance:g}: {mean:.6f} +/- {stderr:.6f} bits",
                    antennas=n, distance=d, mean=mean, stderr=stderr,
                )
            )
        failed = sum(1 for p in points if not p[4])
        if failed:
            self.echo(self._msg("sweep_not_converged", "{count} sweep points did not converge", count=failed))
            return EXIT_NOT_CONVERGED
        return EXIT_OK
