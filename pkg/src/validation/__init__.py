"""Channel validation."""

from .validator import ChannelFileValidator

__all__ = ["ChannelFileValidator"]
