"""Event trigger detection and classification for short stories.

Subpackages:
    corpus      BRAT standoff I/O, tokenization, splits, statistics, labels
    tagging     LSTM/BiLSTM sequence-labeling baselines with CRF
    prompting   the prompt-based span-selection model
    evaluation  span-level P/R/F1, macro-F1, confusion matrices
    augment     model-assisted dataset expansion with human review
    cli         the ``storyevents`` command-line driver
"""

__version__ = "0.1.0"
