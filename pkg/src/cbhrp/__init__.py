"""Head-set clustering for wireless sensor networks: closed-form model and simulator."""

__version__ = "0.1.0"
