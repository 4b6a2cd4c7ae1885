from collections import Counter

from fanosearch.oracle import Verdict


class SetOracle:
    """Synthetic reward oracle: a fixed set of reward points, call-counted."""

    def __init__(self, rewards):
        self.rewards = {tuple(r) for r in rewards}
        self.calls = Counter()

    def verdict(self, weights):
        self.calls[tuple(weights)] += 1
        if tuple(weights) in self.rewards:
            return Verdict.TERMINAL_NONQUASISMOOTH
        return Verdict.NON_TERMINAL

    def is_reward(self, weights):
        return self.verdict(weights).is_reward
