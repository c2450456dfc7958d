"""Post-session EEG and pulse-oximeter analysis toolkit."""

__version__ = "0.1.0"
