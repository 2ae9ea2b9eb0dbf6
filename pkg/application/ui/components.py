"""Command-line components factory for building the argument parser"""

import argparse
from typing import Dict

from application.config import LANGUAGES


class UIComponents:
    """Factory for creating command-line components"""

    @staticmethod
    def create_parser(t: Dict[str, str]) -> argparse.ArgumentParser:
        """
        Create the top-level parser with one subparser per command

        Args:
            t: translation dictionary for help texts

        Returns:
            Configured ArgumentParser
        """
        parser = argparse.ArgumentParser(
            prog="cogwf",
            description=t.get("app_description", "Competitive rate-maximization games simulator"),
        )
        parser.add_argument("--language", choices=LANGUAGES, help=t.get("help_language", "message language (saved)"))
        parser.add_argument("--config-dir", default=None, help=t.get("help_config_dir", "configuration directory"))
        parser.add_argument("-v", "--verbose", action="store_true", help=t.get("help_verbose", "debug logging"))
        commands = parser.add_subparsers(dest="command", required=True)

        run_parser = commands.add_parser("run", help=t.get("help_run", "run a game to equilibrium"))
        UIComponents.add_scenario_options(run_parser, t, with_output=True)
        UIComponents.add_run_options(run_parser, t)

        check = commands.add_parser(
            "check-uniqueness", help=t.get("help_check", "check the sufficient uniqueness conditions")
        )
        UIComponents.add_scenario_options(check, t, with_output=False)

        psd = commands.add_parser("psd", help=t.get("help_psd", "equilibrium power spectral densities"))
        UIComponents.add_scenario_options(psd, t, with_output=True)
        UIComponents.add_run_options(psd, t)

        pattern = commands.add_parser("beampattern", help=t.get("help_beampattern", "equilibrium beampatterns"))
        UIComponents.add_scenario_options(pattern, t, with_output=True)
        UIComponents.add_run_options(pattern, t)
        pattern.add_argument(
            "--angles",
            nargs=3,
            type=float,
            default=[-90.0, 90.0, 181],
            metavar=("START", "STOP", "COUNT"),
            help=t.get("help_angles", "angle grid in degrees"),
        )
        pattern.add_argument("--spacing", type=float, default=0.5, help=t.get("help_spacing", "element spacing"))

        sweep = commands.add_parser("sweep-distance", help=t.get("help_sweep", "sum rate versus distance"))
        UIComponents.add_scenario_options(sweep, t, with_output=True)
        UIComponents.add_run_options(sweep, t)
        sweep.add_argument(
            "--distances", nargs="+", type=float, required=True, help=t.get("help_distances", "distance ratios")
        )
        sweep.add_argument("--seeds", type=int, default=1, help=t.get("help_seeds", "realizations per point"))
        sweep.add_argument("--antennas", nargs="+", type=int, default=None, help=t.get("help_antennas", "antenna counts"))
        return parser

    @staticmethod
    def add_scenario_options(parser: argparse.ArgumentParser, t: Dict[str, str], with_output: bool) -> None:
        """Scenario path, seed override and (optionally) the output directory"""
        parser.add_argument("--scenario", required=True, help=t.get("help_scenario", "scenario JSON file"))
        parser.add_argument("--seed", type=int, default=None, help=t.get("help_seed", "override every seed"))
        if with_output:
            parser.add_argument("--out", required=True, help=t.get("help_out", "output directory"))

    @staticmethod
    def add_run_options(parser: argparse.ArgumentParser, t: Dict[str, str]) -> None:
        """Iteration limits, worker count and workbook export"""
        parser.add_argument("--max-iter", type=int, default=None, help=t.get("help_max_iter", "tick limit"))
        parser.add_argument("--tol", type=float, default=None, help=t.get("help_tol", "convergence tolerance"))
        parser.add_argument("--workers", type=int, default=None, help=t.get("help_workers", "parallel workers"))
        parser.add_argument("--xlsx", action="store_true", help=t.get("help_xlsx", "also write results.xlsx"))
