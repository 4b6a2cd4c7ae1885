"""Dynamic search heuristic: a value network trained online by TD bootstrapping.

A single-hidden-layer network f maps a weight vector to a priority
estimate.  At every search step the freshly expanded point p and its
neighbourhood provide one training batch: targets t(n) = r(n) + gamma *
f'(n) are computed with a frozen parameter copy, the TD errors
delta = f(p) - t(n) feed the loss L = mean(delta^2) / 2, and one Adam step
is taken.  Queue priorities are f(n) plus Gaussian exploration noise.
All randomness flows from a single seeded generator, so runs are
reproducible from their configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from fanosearch.engines import EngineResult, PriorityQueue, RewardOracle
from fanosearch.lattice import Weights, in_cone, neighbors
from fanosearch.oracle import Verdict
from fanosearch.records import SearchRecord

Params = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


@dataclass
class RLHyperparameters:
    """Dynamic-search settings; the defaults are the reference values."""

    gamma: float = 0.2
    sigma: float = 2.0
    r_reward: float = 1.0
    learning_rate: float = 0.001
    hidden: int = 40
    leaky_slope: float = 0.01
    input_scale: float = 100.0
    s_max: int = 1000
    rng_seed: int = 0
    # reward given to non-reward siblings in a batch that contains a reward:
    # 0 (reset happens first, the default) or -sqrt(previous s_reward).
    sibling_penalty: bool = False
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def as_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "sigma": self.sigma,
            "r_reward": self.r_reward,
            "learning_rate": self.learning_rate,
            "hidden": self.hidden,
            "leaky_slope": self.leaky_slope,
            "input_scale": self.input_scale,
            "s_max": self.s_max,
            "rng_seed": self.rng_seed,
            "sibling_penalty": self.sibling_penalty,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "adam_eps": self.adam_eps,
        }


class ValueNetwork:
    """input -> dense(hidden) -> LeakyReLU -> dense(1), float64 throughout.

    Inputs are divided by `input_scale` before the first layer.  Parameters
    are initialised fan-in-scaled uniform from the supplied generator.
    """

    def __init__(
        self,
        input_dim: int,
        hidden: int = 40,
        slope: float = 0.01,
        input_scale: float = 100.0,
        rng: np.random.Generator | None = None,
    ):
        self.input_dim = input_dim
        self.hidden = hidden
        self.slope = slope
        self.input_scale = input_scale
        rng = rng if rng is not None else np.random.default_rng(0)
        k1 = 1.0 / math.sqrt(input_dim)
        k2 = 1.0 / math.sqrt(hidden)
        self.w1 = rng.uniform(-k1, k1, size=(input_dim, hidden))
        self.b1 = rng.uniform(-k1, k1, size=hidden)
        self.w2 = rng.uniform(-k2, k2, size=hidden)
        self.b2 = rng.uniform(-k2, k2, size=1)

    @property
    def params(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2]

    def copy_params(self) -> Params:
        return (self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())

    def _inputs(self, points: Sequence[Weights]) -> np.ndarray:
        return np.asarray(points, dtype=np.float64) / self.input_scale

    def forward_batch(self, points: Sequence[Weights], params: Params | None = None) -> np.ndarray:
        w1, b1, w2, b2 = params if params is not None else self.params
        x = self._inputs(points)
        z = x @ w1 + b1
        a = np.where(z > 0, z, self.slope * z)
        return a @ w2 + b2[0]

    def forward(self, point: Weights) -> float:
        return float(self.forward_batch([point])[0])

    def forward_cached(self, point: Weights) -> tuple[float, tuple]:
        x = self._inputs([point])[0]
        z = x @ self.w1 + self.b1
        a = np.where(z > 0, z, self.slope * z)
        out = float(a @ self.w2 + self.b2[0])
        return out, (x, z, a)

    def backward(self, cache: tuple, upstream: float) -> list[np.ndarray]:
        """Gradients of upstream * f(point) w.r.t. (w1, b1, w2, b2)."""
        x, z, a = cache
        g_w2 = upstream * a
        g_b2 = np.array([upstream])
        da = upstream * self.w2
        dz = da * np.where(z > 0, 1.0, self.slope)
        g_w1 = np.outer(x, dz)
        g_b1 = dz
        return [g_w1, g_b1, g_w2, g_b2]


class Adam:
    """Adam with zero-initialised moments and per-step bias correction."""

    def __init__(self, lr: float = 0.001, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: list[np.ndarray] | None = None
        self._v: list[np.ndarray] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for p, g, m, v in zip(params, grads, self._m, self._v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            m_hat = m / (1 - b1**self.t)
            v_hat = v / (1 - b2**self.t)
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def reward_value(is_reward: bool, s_reward: int, r_reward: float) -> float:
    """r_reward for a reward point, -sqrt(steps since the last reward) otherwise."""
    if is_reward:
        return r_reward
    return -math.sqrt(s_reward)


def td_update(
    net: ValueNetwork,
    optimizer: Adam,
    parent: Weights,
    neighbor_points: Sequence[Weights],
    rewards: Sequence[float],
    gamma: float,
    frozen: Params | None = None,
) -> float:
    """One TD bootstrapping step; returns the pre-step loss.

    Targets t(n) = r(n) + gamma * f(n) are evaluated with the frozen
    parameter copy (taken at entry when not supplied) and held constant;
    the optimiser minimises L = (1/2N) sum (f(parent) - t(n))^2.
    """
    if len(neighbor_points) == 0:
        return 0.0
    if frozen is None:
        frozen = net.copy_params()
    targets = np.asarray(rewards, dtype=np.float64) + gamma * net.forward_batch(
        neighbor_points, params=frozen
    )
    value, cache = net.forward_cached(parent)
    deltas = value - targets
    loss = 0.5 * float(np.mean(deltas**2))
    grads = net.backward(cache, float(np.mean(deltas)))
    optimizer.step(net.params, grads)
    return loss


def priority_value(
    net: ValueNetwork, point: Weights, sigma: float, rng: np.random.Generator
) -> float:
    """f(point) plus one Gaussian draw of standard deviation sigma."""
    return float(net.forward(point) + rng.normal(0.0, sigma))


def run_dynamic(
    oracle: RewardOracle,
    seeds: list[Weights],
    hyper: RLHyperparameters,
    *,
    fano_index: int = 1,
    run_id: str = "dynamic",
    net: ValueNetwork | None = None,
    train: bool = True,
    on_record: Callable[[SearchRecord], None] | None = None,
    on_telemetry: Callable[[dict], None] | None = None,
    on_expand: Callable[[Weights, int], None] | None = None,
) -> EngineResult:
    """Stochastic best-first search steered by the online-trained network.

    Seeds are forced as the first expansions (each consumes a step).  Per
    step: evaluate the neighbourhood, reset the steps-since-reward counter
    if it contains a reward, compute reward values, take one TD step
    against a fresh frozen copy, then enqueue unseen neighbours at
    f(n) + N(0, sigma^2).  Reproducible given rng_seed.
    """
    if not seeds:
        raise ValueError("at least one seed point is required")
    rng = np.random.default_rng(hyper.rng_seed)
    m = len(seeds[0])
    if net is None:
        net = ValueNetwork(m, hyper.hidden, hyper.leaky_slope, hyper.input_scale, rng)
    adam = Adam(hyper.learning_rate, hyper.beta1, hyper.beta2, hyper.adam_eps)

    seen_verdicts: dict[Weights, Verdict] = {}

    def verdict_of(w: Weights) -> Verdict:
        v = seen_verdicts.get(w)
        if v is None:
            v = oracle.verdict(w)
            seen_verdicts[w] = v
        return v

    enqueued: set[Weights] = set()
    ordered_seeds: list[Weights] = []
    for sd in seeds:
        sd = tuple(sd)
        if sd not in enqueued:
            if not in_cone(sd):
                raise ValueError(f"seed {sd} is not in the cone")
            enqueued.add(sd)
            ordered_seeds.append(sd)

    queue = PriorityQueue()
    records: list[SearchRecord] = []
    found: dict[str, int] = {}
    s = 0
    s_reward = 0
    seed_pos = 0
    exhausted = False

    while s < hyper.s_max:
        if seed_pos < len(ordered_seeds):
            p = ordered_seeds[seed_pos]
            seed_pos += 1
        elif len(queue):
            p, _ = queue.pop()
        else:
            exhausted = True
            break
        s += 1
        s_reward += 1
        if on_expand is not None:
            on_expand(p, s)

        ns = neighbors(p)
        verdicts = [verdict_of(n) for n in ns]
        any_reward = any(v.is_reward for v in verdicts)
        previous_s_reward = s_reward
        if any_reward:
            s_reward = 0
        penalty_base = (
            previous_s_reward if (hyper.sibling_penalty and any_reward) else s_reward
        )
        rewards = [
            reward_value(v.is_reward, penalty_base, hyper.r_reward) for v in verdicts
        ]

        loss = 0.0
        if train and ns:
            loss = td_update(net, adam, p, ns, rewards, hyper.gamma, net.copy_params())

        if ns:
            values = net.forward_batch(ns)
            noise = rng.normal(0.0, hyper.sigma, size=len(ns))
            for n, verdict, val, eps in zip(ns, verdicts, values, noise):
                pr = float(val + eps)
                if n in enqueued:
                    continue
                enqueued.add(n)
                queue.push(n, pr)
                if verdict.is_reward:
                    rec = SearchRecord(
                        weights=n,
                        degree=sum(n) - fano_index,
                        verdict=verdict.value,
                        step=s,
                        priority=pr,
                        run_id=run_id,
                        engine="dynamic",
                    )
                    records.append(rec)
                    found[verdict.value] = found.get(verdict.value, 0) + 1
                    if on_record is not None:
                        on_record(rec)

        if on_telemetry is not None:
            on_telemetry(
                {"step": s, "loss": loss, "s_reward": s_reward, "queue_size": len(queue)}
            )

    return EngineResult(records, s, exhausted, len(seen_verdicts), found)
