from .run_config import RunConfig
from .settings_service import SettingsService
