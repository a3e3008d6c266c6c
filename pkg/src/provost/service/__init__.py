"""HTTP service and CLI over the whole engine.

Both faces share one configuration object and one set of read views, so a
CLI verb with --json and the matching endpoint return byte-identical
canonical JSON for the same store.
"""

from provost.service.config import Runtime, ServiceConfig, load_config, open_runtime

__all__ = ["Runtime", "ServiceConfig", "load_config", "open_runtime"]
