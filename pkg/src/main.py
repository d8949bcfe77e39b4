import sys

from PyQt6.QtCore import QCoreApplication

from src.cli import run
from src.settings_manager import SettingsManager


def main():
    # QThread bench workers need an application instance; no event loop is run
    app = QCoreApplication.instance() or QCoreApplication(sys.argv)  # noqa: F841

    settings_manager = SettingsManager()
    sys.exit(run(sys.argv[1:], settings_manager))


if __name__ == "__main__":
    main()
