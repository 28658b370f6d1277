from django.apps import AppConfig


class PrhrConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "prhr"
    verbose_name = "Proportional reversed hazards test"
