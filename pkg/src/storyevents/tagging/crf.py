"""Linear-chain CRF: scoring, log-partition, NLL loss, and Viterbi decoding.

Transitions are a square (L+2) x (L+2) table over the L emission labels plus
the virtual START (index L) and STOP (index L+1) states; ``transitions[i, j]``
scores moving from i to j. The partition function runs the forward algorithm
entirely in log space.
"""
from __future__ import annotations

import torch
from torch import Tensor


def start_stop_indices(n_labels: int) -> tuple[int, int]:
    return n_labels, n_labels + 1


def make_transitions(n_labels: int, generator: torch.Generator | None = None) -> torch.nn.Parameter:
    weight = torch.empty(n_labels + 2, n_labels + 2)
    weight.normal_(0.0, 0.1, generator=generator)
    return torch.nn.Parameter(weight)


def crf_path_score(emissions: Tensor, transitions: Tensor, tags: Tensor) -> Tensor:
    """Unnormalized log score of one label path."""
    n_labels = emissions.shape[1]
    start, stop = start_stop_indices(n_labels)
    score = transitions[start, tags[0]] + emissions[0, tags[0]]
    for t in range(1, emissions.shape[0]):
        score = score + transitions[tags[t - 1], tags[t]] + emissions[t, tags[t]]
    return score + transitions[tags[-1], stop]


def crf_log_partition(emissions: Tensor, transitions: Tensor) -> Tensor:
    """log sum over all label paths of exp(path score)."""
    n_labels = emissions.shape[1]
    start, stop = start_stop_indices(n_labels)
    alpha = transitions[start, :n_labels] + emissions[0]
    inner = transitions[:n_labels, :n_labels]
    for t in range(1, emissions.shape[0]):
        alpha = torch.logsumexp(alpha.unsqueeze(1) + inner, dim=0) + emissions[t]
    return torch.logsumexp(alpha + transitions[:n_labels, stop], dim=0)


def crf_neg_log_likelihood(emissions: Tensor, transitions: Tensor, tags: Tensor) -> Tensor:
    """-log p(tags | emissions) under the linear-chain factorization."""
    if emissions.shape[0] != tags.shape[0]:
        raise ValueError(
            f"emission length {emissions.shape[0]} != gold length {tags.shape[0]}"
        )
    return crf_log_partition(emissions, transitions) - crf_path_score(
        emissions, transitions, tags
    )


def crf_decode(emissions: Tensor, transitions: Tensor) -> list[int]:
    """Highest-scoring label path (Viterbi). Ties resolve to the lowest label
    index at every backtracking step."""
    n_labels = emissions.shape[1]
    start, stop = start_stop_indices(n_labels)
    with torch.no_grad():
        score = transitions[start, :n_labels] + emissions[0]
        backpointers = []
        inner = transitions[:n_labels, :n_labels]
        for t in range(1, emissions.shape[0]):
            candidate = score.unsqueeze(1) + inner  # (from, to)
            best, argbest = candidate.max(dim=0)  # first maximal index on ties
            score = best + emissions[t]
            backpointers.append(argbest)
        final = score + transitions[:n_labels, stop]
        last = int(final.max(dim=0).indices.item())
        path = [last]
        for pointers in reversed(backpointers):
            last = int(pointers[last].item())
            path.append(last)
    path.reverse()
    return path
