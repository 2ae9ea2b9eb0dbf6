"""Application controller: reads the command line and dispatches to the command handlers"""

import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from application.config import ConfigManager
from application.errors import (
    InfeasibleBudgetError,
    InfeasibleInitError,
    ScenarioParseError,
    SimulationError,
)
from application.handlers import (
    EXIT_INFEASIBLE,
    EXIT_PARSE_ERROR,
    BeampatternHandler,
    PsdHandler,
    RunHandler,
    RunOptions,
    SweepHandler,
    UniquenessHandler,
)
from application.scenario_parser import ScenarioParser
from application.translations import TRANSLATIONS
from application.ui.components import UIComponents

logger = logging.getLogger(__name__)


class SimulatorApp:
    """Command-line application"""

    def __init__(
        self,
        base_path: Path,
        echo: Callable[[str], None] = print,
        echo_error: Optional[Callable[[str], None]] = None,
    ) -> None:
        """
        Initialize the application

        Args:
            base_path: directory holding main.py; the default configuration lives in
                ``application/.config`` below it
            echo: sink for report lines
            echo_error: sink for diagnostics (stderr by default)
        """
        self.base_path = base_path
        self.echo = echo
        self.echo_error = echo_error or (lambda line: print(line, file=sys.stderr))
        self.config_manager = ConfigManager(base_path / "application" / ".config")
        self.current_language = self.config_manager.get_language()
        self.t = TRANSLATIONS.get(self.current_language, TRANSLATIONS["EN"])

    def _setup(self, config_dir: Optional[str], language: Optional[str], verbose: bool) -> None:
        if config_dir:
            self.config_manager = ConfigManager(Path(config_dir))
        if language:
            self.config_manager.save_language(language)
        self.current_language = language or self.config_manager.get_language()
        self.t = TRANSLATIONS.get(self.current_language, TRANSLATIONS["EN"])
        logging.basicConfig(
            level=logging.DEBUG if verbose else logging.WARNING,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )

    def run(self, argv: Optional[List[str]] = None) -> int:
        """
        Parse ``argv`` and execute the selected command

        Returns:
            Process exit code
        """
        parser = UIComponents.create_parser(self.t)
        args = parser.parse_args(argv)
        self._setup(args.config_dir, args.language, args.verbose)

        try:
            scenario = ScenarioParser(self.current_language).parse(Path(args.scenario), args.seed)
            if args.command == "check-uniqueness":
                return UniquenessHandler(self.current_language, self.echo).handle(scenario)

            options = RunOptions.resolve(vars(args), scenario, self.config_manager.get_run_defaults())
            out_dir = Path(args.out)
            if args.command == "run":
                return RunHandler(self.current_language, self.echo).handle(scenario, out_dir, options)
            if args.command == "psd":
                return PsdHandler(self.current_language, self.echo).handle(scenario, out_dir, options)
            if args.command == "beampattern":
                start, stop, count = args.angles
                angles = np.linspace(start, stop, int(count))
                return BeampatternHandler(self.current_language, self.echo).handle(
                    scenario, out_dir, options, angles, args.spacing
                )
            return SweepHandler(self.current_language, self.echo).handle(
                scenario, out_dir, options, args.distances, args.seeds, args.antennas
            )
        except ScenarioParseError as exc:
            self.echo_error(self.t.get("parse_failed", "Scenario has errors:"))
            for error in exc.errors:
                self.echo_error(f"  {error}")
            return EXIT_PARSE_ERROR
        except (InfeasibleBudgetError, InfeasibleInitError) as exc:
            self.echo_error(self.t.get("infeasible", "Infeasible: {error}").format(error=exc))
            return EXIT_INFEASIBLE
        except (SimulationError, ValueError, np.linalg.LinAlgError) as exc:
            logger.debug("command failed", exc_info=True)
            self.echo_error(self.t.get("error", "Error: {error}").format(error=exc))
            return EXIT_PARSE_ERROR
