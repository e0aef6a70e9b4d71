"""AutoML adapter process speaking the line-delimited JSON fit/score
protocol over a bounded scikit-learn model search."""
__version__ = "0.1.0"
