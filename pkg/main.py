"""Main entry point for the cognitive IWFA simulator"""

import sys
from pathlib import Path

from application.simulator_app import SimulatorApp


def main() -> None:
    """Main function to start the application"""
    # Get base path (directory where main.py is located)
    base_path = Path(__file__).parent

    app = SimulatorApp(base_path)
    sys.exit(app.run(sys.argv[1:]))


if __name__ == "__main__":
    main()
