"""Fine-tuning hyperparameters with validated, reproducible defaults."""

from __future__ import annotations

from dataclasses import dataclass


class ConfigError(ValueError):
    """A fine-tuning hyperparameter is out of range."""


@dataclass(frozen=True)
class FineTuneConfig:
    """Settings for one fine-tuning run.

    The learning rate follows a one-cycle schedule peaking at ``max_lr``;
    sentences are truncated to ``max_seq_len`` tokens.  ``base_model`` is a
    model hub identifier or a local directory holding a saved checkpoint.
    """

    base_model: str = "bert-base-uncased"
    max_lr: float = 2e-5
    epochs: int = 3
    batch_size: int = 16
    max_seq_len: int = 128
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_lr <= 0:
            raise ConfigError(f"max_lr must be > 0, got {self.max_lr}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_seq_len < 8:
            raise ConfigError(f"max_seq_len must be >= 8, got {self.max_seq_len}")
        if not self.base_model:
            raise ConfigError("base_model must not be empty")
