"""Shared plumbing of the lab's management commands.

Exit statuses: 0 on success, 1 for usage errors (bad or missing flags),
2 for runtime failures.
"""
import argparse
import sys
from typing import List

from django.core.management.base import BaseCommand, CommandError

EXIT_USAGE = 1
EXIT_RUNTIME = 2


def comma_separated(cast):
    def parse(value: str) -> List:
        items = [item.strip() for item in value.split(",") if item.strip()]
        if not items:
            raise argparse.ArgumentTypeError("expected a comma-separated list")
        try:
            return [cast(item) for item in items]
        except ValueError as error:
            raise argparse.ArgumentTypeError(str(error)) from error

    parse.__name__ = f"comma-separated {cast.__name__}"
    return parse


def format_errors(errors) -> str:
    if isinstance(errors, dict):
        parts = []
        for field, value in errors.items():
            if field == "non_field_errors":
                parts.append(format_errors(value))
            elif isinstance(field, int):
                # list fields report per-entry errors keyed by position
                parts.append(f"entry {field}: {format_errors(value)}")
            else:
                parts.append(f"--{field.replace('_', '-')}: {format_errors(value)}")
        return "; ".join(parts)
    if isinstance(errors, (list, tuple)):
        return " ".join(format_errors(value) for value in errors)
    return str(errors)


class LabCommand(BaseCommand):
    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        if getattr(self, "_called_from_command_line", False):
            # argparse exits with 2 on bad flags; 2 is reserved for runtime errors here.
            def usage_error(message):
                parser.print_usage(sys.stderr)
                parser.exit(EXIT_USAGE, f"{parser.prog}: error: {message}\n")

            parser.error = usage_error
        return parser

    def validate_options(self, serializer_class, options) -> dict:
        serializer = serializer_class(data=options)
        if not serializer.is_valid():
            raise CommandError(format_errors(serializer.errors), returncode=EXIT_USAGE)
        return dict(serializer.validated_data)

    def fail(self, error) -> CommandError:
        return CommandError(str(error), returncode=EXIT_RUNTIME)
