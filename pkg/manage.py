#!/usr/bin/env python
"""Command-line utility for the MIMO detection lab: train, sweep, plot, report."""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "mimo_lab.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Django is missing. Install the lab's dependencies with "
            "`pip install -r requirements.txt` inside the project's virtual environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
