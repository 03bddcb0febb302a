from django.apps import AppConfig
import logging

logger = logging.getLogger(__name__)

class ApiConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'api'

    def ready(self):
        from django.conf import settings
        policy = getattr(settings, 'SPANNER_POLICY', {})
        disabled = [name for name, on in (policy.get('bounds') or {}).items() if not on]
        logger.debug(
            f"spanner policy: k_cap={policy.get('k_cap')} apsp_limit={policy.get('apsp_limit')} "
            f"threads={policy.get('threads')} disabled_checks={disabled or 'none'}"
        )
