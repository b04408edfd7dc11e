"""Channel representations: evaluation and conversion."""

from .converter import ChannelConverter
from .evaluator import ChannelEvaluator, uniform_weights

__all__ = ["ChannelConverter", "ChannelEvaluator", "uniform_weights"]
