"""Text-pair scoring service.

A small sequence-pair transformer classifier served over HTTP: /score
returns the positive-class probability per CSV row, /finetune trains and
persists a new model, /pbt runs a population-based hyperparameter
search. The tokenizer hashes words into a fixed bucket vocabulary, so
the model is fully self-contained and deterministic for a fixed seed.
"""

__version__ = "0.1.0"
