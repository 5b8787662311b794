import argparse

from django.conf import settings
from django.test import SimpleTestCase

from mimo_lab.commands import EXIT_RUNTIME, LabCommand, comma_separated, format_errors


class CommaSeparatedTest(SimpleTestCase):
    def test_parses_and_strips(self):
        self.assertEqual(comma_separated(float)("0, 5,10 ,"), [0.0, 5.0, 10.0])

    def test_rejects_empty(self):
        with self.assertRaises(argparse.ArgumentTypeError):
            comma_separated(str)(" , ")

    def test_rejects_bad_item(self):
        with self.assertRaises(argparse.ArgumentTypeError):
            comma_separated(int)("1,two")


class FormatErrorsTest(SimpleTestCase):
    def test_fields_become_flags(self):
        message = format_errors({"mod_order": ["not a valid choice."], "p": ["must lie in (0, 1]"]})
        self.assertEqual(message, "--mod-order: not a valid choice.; --p: must lie in (0, 1]")

    def test_non_field_errors_stand_alone(self):
        self.assertEqual(format_errors({"non_field_errors": ["broken"]}), "broken")

    def test_list_entries(self):
        message = format_errors({"snr_set": {1: ["A valid number is required."]}})
        self.assertEqual(message, "--snr-set: entry 1: A valid number is required.")


class LabCommandTest(SimpleTestCase):
    def test_fail_is_a_runtime_error(self):
        error = LabCommand().fail("disk full")
        self.assertEqual(error.returncode, EXIT_RUNTIME)
        self.assertEqual(str(error), "disk full")


class SettingsTest(SimpleTestCase):
    def test_time_zone_support_is_off(self):
        self.assertFalse(settings.USE_TZ)
