import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "mimo_lab.settings")
django.setup()
