"""Pytest wiring: load the same Django settings `manage.py` uses."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "prhr_project.settings")
django.setup()
