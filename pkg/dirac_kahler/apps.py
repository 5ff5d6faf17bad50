from django.apps import AppConfig


class DiracKahlerConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'dirac_kahler'
