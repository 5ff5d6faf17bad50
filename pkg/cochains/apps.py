from django.apps import AppConfig


class CochainsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cochains'
