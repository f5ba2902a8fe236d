import sys
import os
from pathlib import Path

from hypothesis import HealthCheck, settings

# Add project root to Python path
project_root = str(Path(__file__).parent.parent)
sys.path.insert(0, project_root)

# Every ascent restarts several times; wall-clock deadlines would only add flakiness
settings.register_profile(
    "qnr", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "qnr"))
