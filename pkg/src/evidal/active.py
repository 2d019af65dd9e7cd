"""Pool-based active-learning controller.

Protocol per run: a seed round labels a random budget slice of the
training pool, then every later round queries the strategy's pick of
unlabeled samples (most-uncertain first, or uniform random), gets labels
from the oracle, fine-tunes on everything labeled so far, and evaluates
on a held-out split that is fixed up front and never queried.

The controller is a single-owner state machine: one round in flight,
label submissions serialized, training owning the model exclusively.
All randomness is keyed by (run seed, purpose, round) so a history is
reproducible regardless of when labels arrive.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .datagen import PoolDataset
from .evidential import one_hot
from .metrics import accuracy, uncertainty_separation, weighted_f1
from .network import (
    ModelState,
    NetworkConfig,
    TrainHyper,
    forward,
    init_model,
    predict_batch,
)
from .pipeline import finetune_evidential

QUERY_UNCERTAINTY = "uncertainty_topk"
QUERY_RANDOM = "random"
STRATEGIES = (QUERY_UNCERTAINTY, QUERY_RANDOM)

PHASE_IDLE = "idle"
PHASE_AWAITING = "awaiting_labels"
PHASE_READY = "ready_to_train"
PHASE_TRAINING = "training"
PHASE_FINISHED = "finished"

CSV_HEADER = "round,labels_fraction,strategy,seed,accuracy,weighted_f1,mean_u_correct,mean_u_incorrect"

# rng purpose tags
_PURPOSE_SEED_ROUND = 0
_PURPOSE_QUERY = 1
_PURPOSE_TRAIN = 2


class BudgetExhaustedError(RuntimeError):
    """No further rounds fit under the label budget."""


class WrongPhaseError(RuntimeError):
    """Operation not valid in the controller's current phase."""


class DuplicateLabelError(ValueError):
    """Sample already labeled this round (first write wins)."""


class InvalidLabelError(ValueError):
    """Label value outside [0, K)."""


class StaleSampleError(ValueError):
    """Sample is not part of the current round's queue."""


@dataclass(frozen=True)
class RoundRecord:
    round: int
    labels_fraction: float
    accuracy: float
    weighted_f1: float
    mean_u_correct: float
    mean_u_incorrect: float
    queried_ids: tuple[int, ...]
    wall_time: float

    def csv_fields(self) -> dict:
        """The stable CSV-schema subset (wall time and ids excluded)."""
        return {
            "round": self.round,
            "labels_fraction": self.labels_fraction,
            "accuracy": self.accuracy,
            "weighted_f1": self.weighted_f1,
            "mean_u_correct": self.mean_u_correct,
            "mean_u_incorrect": self.mean_u_incorrect,
        }


@dataclass
class ALConfig:
    strategy: str = QUERY_UNCERTAINTY
    seed: int = 0
    budget_fraction_per_round: float = 0.01
    max_budget_fraction: float = 0.10
    epochs_per_round: int = 15
    warm_start: bool = True  # False: retrain from the round-0 model every round
    anneal_continue: bool = False  # True: λ_t epoch counter runs across rounds
    hyper: TrainHyper = field(default_factory=TrainHyper)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if not 0.0 < self.budget_fraction_per_round <= 1.0:
            raise ValueError("budget_fraction_per_round must be in (0, 1]")
        if not self.budget_fraction_per_round <= self.max_budget_fraction <= 1.0:
            raise ValueError("max_budget_fraction must be in [q, 1]")
        if self.epochs_per_round < 1:
            raise ValueError("epochs_per_round must be >= 1")


@dataclass
class ALState:
    """Bookkeeping snapshot: grows monotonically, never forgets an id."""

    round: int
    labeled_ids: tuple[int, ...]
    budget_fraction_per_round: float
    max_budget_fraction: float
    history: tuple[RoundRecord, ...]
    seed: int


def _ceil_exact(x: float) -> int:
    """ceil() robust to float dust (0.03·8000 = 240.0000…03 stays 240)."""
    return int(math.ceil(x - 1e-9))


def query_ids(
    model: ModelState,
    pool: PoolDataset,
    labeled: set[int],
    strategy: str,
    k: int,
    rng: np.random.Generator,
) -> list[int]:
    """Pick k unlabeled train-pool ids to annotate next.

    uncertainty_topk: largest opinion uncertainty first, ties broken by
    ascending id; random: uniform draw without replacement.
    """
    unlabeled = np.array([i for i in pool.train_pool_ids if i not in labeled])
    if k > unlabeled.shape[0]:
        raise ValueError(f"k={k} exceeds {unlabeled.shape[0]} unlabeled samples")
    if strategy == QUERY_RANDOM:
        return [int(v) for v in rng.choice(unlabeled, size=k, replace=False)]
    if strategy != QUERY_UNCERTAINTY:
        raise ValueError(f"unknown strategy {strategy!r}")
    _, evidence = forward(model, pool.features[unlabeled])
    u = pool.num_classes / (evidence.sum(axis=1) + pool.num_classes)
    order = np.lexsort((unlabeled, -u))  # primary: u desc; secondary: id asc
    return [int(v) for v in unlabeled[order[:k]]]


class ALController:
    """Drives one active-learning run over one pool/model/config."""

    def __init__(self, pool: PoolDataset, model: ModelState, config: ALConfig):
        pool.validate()
        if pool.eval_ids.size == 0:
            raise ValueError("pool has no eval split")
        if not np.all(pool.label_known[pool.eval_ids]):
            raise ValueError("eval split must carry ground-truth labels")
        self.pool = pool
        self.model = model
        self.config = config
        self._initial_model = model.clone()
        self.n_pool = int(pool.train_pool_ids.size)
        if self.n_pool == 0:
            raise ValueError("pool has no queryable train_pool samples")
        self.total_rounds = int(
            math.floor(config.max_budget_fraction / config.budget_fraction_per_round + 1e-9)
        )
        self.round = 0
        self.labeled_ids: list[int] = []
        self._labeled_set: set[int] = set()
        self.annotations: dict[int, int] = {}
        self.history: list[RoundRecord] = []
        self.phase = PHASE_IDLE
        self.pending: list[int] = []
        self._pending_labels: dict[int, int] = {}
        self._anneal_next_t = 1
        self._round_started = 0.0

    # -- snapshots ---------------------------------------------------

    @property
    def state(self) -> ALState:
        return ALState(
            round=self.round,
            labeled_ids=tuple(self.labeled_ids),
            budget_fraction_per_round=self.config.budget_fraction_per_round,
            max_budget_fraction=self.config.max_budget_fraction,
            history=tuple(self.history),
            seed=self.config.seed,
        )

    @property
    def labels_fraction(self) -> float:
        return len(self.labeled_ids) / self.n_pool

    @property
    def quota_remaining(self) -> int:
        return len(self.pending) - len(self._pending_labels)

    def _target_labeled(self, round_index: int) -> int:
        q = self.config.budget_fraction_per_round
        return min(self.n_pool, _ceil_exact(round_index * q * self.n_pool))

    def _rng(self, purpose: int, round_index: int) -> np.random.Generator:
        return np.random.default_rng([self.config.seed, purpose, round_index])

    # -- round lifecycle ----------------------------------------------

    def begin_next_round(self) -> list[int]:
        """Select the next round's queue (seed draw or strategy query)."""
        if self.phase == PHASE_FINISHED:
            raise BudgetExhaustedError("label budget already exhausted")
        if self.phase != PHASE_IDLE:
            raise WrongPhaseError(f"cannot begin a round while {self.phase}")
        if self.round >= self.total_rounds:
            self.phase = PHASE_FINISHED
            raise BudgetExhaustedError("label budget already exhausted")
        r = self.round + 1
        quota = self._target_labeled(r) - len(self.labeled_ids)
        if quota <= 0:
            raise ValueError("degenerate schedule: zero quota for this round")
        self._round_started = time.perf_counter()
        if r == 1:
            rng = self._rng(_PURPOSE_SEED_ROUND, r)
            chosen = [int(v) for v in rng.choice(self.pool.train_pool_ids, size=quota, replace=False)]
        else:
            rng = self._rng(_PURPOSE_QUERY, r)
            chosen = query_ids(self.model, self.pool, self._labeled_set,
                               self.config.strategy, quota, rng)
        assert not (set(chosen) & self._labeled_set)
        self.pending = chosen
        self._pending_labels = {}
        self.phase = PHASE_AWAITING
        return list(chosen)

    def abort_round(self) -> None:
        """Drop the in-flight queue; committed state is untouched."""
        if self.phase not in (PHASE_AWAITING, PHASE_READY):
            raise WrongPhaseError(f"no round to abort while {self.phase}")
        self.pending = []
        self._pending_labels = {}
        self.phase = PHASE_IDLE

    def submit_label(self, sample_id: int, label: int) -> int:
        """Record one annotation; returns the remaining quota."""
        if self.phase != PHASE_AWAITING:
            raise WrongPhaseError(f"not accepting labels while {self.phase}")
        if sample_id not in self.pending:
            raise StaleSampleError(f"sample {sample_id} is not in the current queue")
        if not 0 <= int(label) < self.pool.num_classes:
            raise InvalidLabelError(f"label {label} outside [0, {self.pool.num_classes})")
        if sample_id in self._pending_labels:
            raise DuplicateLabelError(f"sample {sample_id} already labeled this round")
        self._pending_labels[sample_id] = int(label)
        if self.quota_remaining == 0:
            self.phase = PHASE_READY
        return self.quota_remaining

    def commit_pending(self) -> tuple[int, tuple[int, ...]]:
        """Fold the filled queue into the labeled set (fast, mutating)."""
        if self.phase != PHASE_READY:
            raise WrongPhaseError(f"round not ready to train while {self.phase}")
        self.phase = PHASE_TRAINING
        r = self.round + 1
        queried = tuple(self.pending)
        for sid in queried:
            assert sid not in self._labeled_set
            self.labeled_ids.append(sid)
            self._labeled_set.add(sid)
            self.annotations[sid] = self._pending_labels[sid]
        self.pending = []
        self._pending_labels = {}
        return r, queried

    def finetune_committed(self, round_index: int) -> None:
        """Fine-tune on everything labeled so far (slow, owns the model)."""
        if not self.config.warm_start:
            self.model = self._initial_model.clone()
        ids = np.array(self.labeled_ids)
        x = self.pool.features[ids]
        y = one_hot([self.annotations[int(i)] for i in ids], self.pool.num_classes)
        anneal_start = self._anneal_next_t if self.config.anneal_continue else 1
        finetune_evidential(
            self.model, x, y,
            epochs=self.config.epochs_per_round,
            rng=self._rng(_PURPOSE_TRAIN, round_index),
            anneal_start_t=anneal_start,
            hyper=self.config.hyper,
        )
        self._anneal_next_t = anneal_start + self.config.epochs_per_round

    def record_round(self, round_index: int, queried: tuple[int, ...]) -> RoundRecord:
        """Evaluate on the held-out split and close the round (fast)."""
        record = self._evaluate(round_index, queried)
        self.history.append(record)
        self.round = round_index
        self.phase = PHASE_FINISHED if self.round >= self.total_rounds else PHASE_IDLE
        return record

    def train_and_record(self) -> RoundRecord:
        """Commit the round's labels, fine-tune, evaluate, append history."""
        r, queried = self.commit_pending()
        self.finetune_committed(r)
        return self.record_round(r, queried)

    def _evaluate(self, round_index: int, queried: tuple[int, ...]) -> RoundRecord:
        ev = self.pool.eval_ids
        preds = predict_batch(
            self.model, self.pool.features[ev], sample_ids=ev,
            true_labels=self.pool.labels[ev],
        )
        mean_u_c, mean_u_i = uncertainty_separation(preds)
        return RoundRecord(
            round=round_index,
            labels_fraction=self.labels_fraction,
            accuracy=accuracy(preds),
            weighted_f1=weighted_f1(preds),
            mean_u_correct=mean_u_c,
            mean_u_incorrect=mean_u_i,
            queried_ids=queried,
            wall_time=time.perf_counter() - self._round_started,
        )

    @property
    def finished(self) -> bool:
        return self.phase == PHASE_FINISHED

    @property
    def last_record(self) -> RoundRecord | None:
        return self.history[-1] if self.history else None


class DatasetOracle:
    """Labels straight from the pool's stored ground truth."""

    def __init__(self, pool: PoolDataset):
        self.pool = pool

    def annotate(self, ids) -> dict[int, int]:
        missing = [i for i in ids if not self.pool.label_known[i]]
        if missing:
            raise ValueError(f"pool has no ground truth for ids {missing[:5]}")
        return {int(i): int(self.pool.labels[i]) for i in ids}


def seed_round(controller: ALController, oracle: DatasetOracle) -> RoundRecord:
    """Round 1: random seed labels via the oracle, then fine-tune."""
    if controller.round != 0:
        raise WrongPhaseError("seed round must be the first round")
    return run_round(controller, oracle)


def run_round(controller: ALController, oracle: DatasetOracle) -> RoundRecord:
    """One full cycle: query → annotate → fine-tune → evaluate → record.

    Oracle failure aborts the round with committed state unchanged.
    """
    controller.begin_next_round()
    try:
        labels = oracle.annotate(controller.pending)
        for sid in list(controller.pending):
            controller.submit_label(sid, labels[sid])
    except Exception:
        controller.abort_round()
        raise
    return controller.train_and_record()


def run_experiment(
    pool: PoolDataset,
    config: ALConfig,
    network: NetworkConfig | None = None,
    initial_model: ModelState | None = None,
    oracle: DatasetOracle | None = None,
) -> tuple[list[RoundRecord], ModelState]:
    """Seed round plus query rounds until the budget cap; full history."""
    if initial_model is None:
        if network is None:
            raise ValueError("provide either a network config or an initial model")
        initial_model = init_model(network)
    controller = ALController(pool, initial_model, config)
    oracle = oracle or DatasetOracle(pool)
    while not controller.finished:
        run_round(controller, oracle)
    return list(controller.history), controller.model


# -- run artifacts --------------------------------------------------


def _fmt(value: float) -> str:
    return repr(float(value))


def csv_rows(records, strategy: str, seed: int) -> list[str]:
    rows = []
    for r in records:
        rows.append(
            f"{r.round},{_fmt(r.labels_fraction)},{strategy},{seed},"
            f"{_fmt(r.accuracy)},{_fmt(r.weighted_f1)},"
            f"{_fmt(r.mean_u_correct)},{_fmt(r.mean_u_incorrect)}"
        )
    return rows


def queried_sidecar_lines(records, strategy: str, seed: int) -> list[str]:
    return [
        json.dumps(
            {"strategy": strategy, "seed": seed, "round": r.round,
             "queried_ids": list(r.queried_ids)},
            sort_keys=True,
        )
        for r in records
    ]
