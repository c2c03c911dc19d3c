import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config.run_config import RunConfig
from src.corpus.corpus import Conversation, Corpus
from src.errors import InvalidInput, NumericalError
from src.log.run_logger import RunLogger
from src.log.system_logger import Logger, get_system_logger
from src.objective.classification import LossReport, make_report
from src.pipeline.metrics import MetricsReport, compute_metrics
from src.pipeline.model import forward, loss_and_grads, predict
from src.pipeline.optimizer import AdamW
from src.pipeline.params import ModelParams, init_params
from src.utils.decorators import log_duration
from src.utils.json import save_json

LOG: Logger = get_system_logger(__name__)

DUMP_NAME = "nan_dump.json"


@dataclass
class TrainResult:
    """
    Outcome of a training run.

    Attributes:
        params (ModelParams): Parameters of the best validation epoch.
        history (List[Dict[str, Any]]): One record per epoch (same fields as the log).
        best_epoch (int): 1-based epoch whose parameters were kept.
        best_val_f1 (float): Validation W-F1 at that epoch.
        stopped_early (bool): Whether patience ran out before `epochs`.
    """
    params: ModelParams
    history: List[Dict[str, Any]] = field(default_factory=list)
    best_epoch: int = 0
    best_val_f1: float = -1.0
    stopped_early: bool = False


def evaluate(conversations: Sequence[Conversation], params: ModelParams, n_classes: Optional[int] = None,
             use_flip_mask: bool = True) -> MetricsReport:
    """
    Predicts every utterance and scores the predictions.

    When the conversations carry flip markers, `masked_acc` is the accuracy
    on the flipped utterances.
    """
    labels: List[np.ndarray] = []
    preds: List[np.ndarray] = []
    masks: List[np.ndarray] = []
    for conv in conversations:
        labels.append(conv.labels)
        preds.append(predict(forward(conv, params).logits))
        masks.append(conv.flipped if conv.flipped is not None else np.zeros(conv.n_utt, dtype=bool))
    n_classes = n_classes if n_classes is not None else params.n_classes
    if not labels:
        return compute_metrics(np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), n_classes)
    has_flips = use_flip_mask and any(c.flipped is not None for c in conversations)
    return compute_metrics(np.concatenate(labels), np.concatenate(preds), n_classes,
                           mask=np.concatenate(masks) if has_flips else None)


def write_diagnostic_dump(path: str, params: ModelParams, error: Exception, epoch: int) -> None:
    """Writes per-tensor norms and finiteness flags next to the run outputs."""
    tensors = {}
    for name, value in params.items():
        finite = bool(np.all(np.isfinite(value)))
        tensors[name] = {
            "finite": finite,
            "norm": float(np.linalg.norm(value)) if finite else None,
            "shape": list(value.shape),
        }
    save_json(path, {"epoch": epoch, "error": str(error), "tensors": tensors})
    LOG.error(f"Numerical failure at epoch {epoch}; diagnostic dump written to '{path}'.")


def _mean_report(reports: List[LossReport], lambda_ccl: float) -> LossReport:
    return make_report(
        ce=float(np.mean([r.ce for r in reports])),
        lfcl=float(np.mean([r.lfcl for r in reports])),
        hfcl=float(np.mean([r.hfcl for r in reports])),
        lambda_ccl=lambda_ccl,
    )


def _batch_step(batch: List[Conversation], params: ModelParams, pool: Optional[ThreadPoolExecutor],
                deterministic: bool = True) -> Tuple[List[LossReport], Dict[str, np.ndarray]]:
    def run(conv: Conversation):
        return loss_and_grads(conv, params)

    if pool is None:
        outputs = [run(conv) for conv in batch]
    elif deterministic:
        # batch order keeps sums bit-stable
        outputs = list(pool.map(run, batch))
    else:
        # completion order; float sums may differ between runs
        outputs = [future.result() for future in as_completed([pool.submit(run, conv) for conv in batch])]
    total = params.zeros_like()
    for _, grads in outputs:
        for name in total:
            total[name] += grads[name]
    scale = 1.0 / len(batch)
    return [r for r, _ in outputs], {name: g * scale for name, g in total.items()}


@log_duration("training")
def train(corpus: Corpus, config: RunConfig, log_path: Optional[str] = None,
          dump_dir: Optional[str] = None, run_name: str = "train") -> TrainResult:
    """
    Minibatch AdamW on the train split with early stopping on validation W-F1.

    All randomness derives from `config.seed`: one child stream initializes
    the parameters, another shuffles the minibatches.

    Args:
        corpus (Corpus): Corpus with "train" (and ideally "val") conversations.
        config (RunConfig): Hyperparameters.
        log_path (Optional[str]): JSON-lines training log; none written when None.
        dump_dir (Optional[str]): Where a diagnostic dump goes on numerical failure.
        run_name (str): Name recorded in the log.

    Returns:
        TrainResult: Best parameters and per-epoch history.

    Raises:
        InvalidInput: If there are no training conversations.
        NumericalError: On a non-finite loss or gradient (after writing the dump).
    """
    train_set = corpus.split("train")
    if not train_set:
        raise InvalidInput("corpus has no training conversations")
    val_set = corpus.split("val")
    if not val_set:
        LOG.warning("Corpus has no validation conversations; early stopping uses the train split.")
        val_set = train_set

    init_seq, shuffle_seq = np.random.SeedSequence(config.seed).spawn(2)
    params = init_params(config, corpus.dims, corpus.n_speakers, corpus.n_classes,
                         np.random.default_rng(init_seq), speaker_names=corpus.speaker_names)
    shuffle_rng = np.random.default_rng(shuffle_seq)
    optimizer = AdamW.from_config(params, config)
    lam = config.effective_lambda

    run_log = RunLogger(log_path, run_name=run_name) if log_path else None
    if run_log:
        run_log.record(event="config", config=config.to_dict(), n_params=params.count(),
                       n_train=len(train_set), n_val=len(val_set))
    LOG.info(f"Training {params.count()} parameters on {len(train_set)} conversations "
             f"({config.epochs} epochs max, batch {config.batch_size}).")

    result = TrainResult(params=params.copy())
    stale = 0
    aborted = False
    pool = ThreadPoolExecutor(max_workers=config.workers) if config.workers > 1 else None
    try:
        for epoch in range(1, config.epochs + 1):
            order = shuffle_rng.permutation(len(train_set))
            reports: List[LossReport] = []
            try:
                for start in range(0, len(order), config.batch_size):
                    batch = [train_set[i] for i in order[start:start + config.batch_size]]
                    batch_reports, grads = _batch_step(batch, params, pool, config.deterministic)
                    reports.extend(batch_reports)
                    optimizer.step(grads)
                params.check_finite()
                metrics = evaluate(val_set, params, corpus.n_classes)
            except NumericalError as e:
                aborted = True
                if dump_dir:
                    write_diagnostic_dump(os.path.join(dump_dir, DUMP_NAME), params, e, epoch)
                if run_log:
                    run_log.record(event="abort", epoch=epoch, error=str(e))
                raise

            epoch_loss = _mean_report(reports, lam)
            entry = {"epoch": epoch, **epoch_loss.to_dict(),
                     "val_w_acc": metrics.weighted_acc, "val_w_f1": metrics.weighted_f1}
            result.history.append(entry)
            if run_log:
                run_log.record(event="epoch", **entry)
            LOG.debug(f"epoch {epoch}: total {epoch_loss.total:.4f}, val W-F1 {metrics.weighted_f1:.4f}")

            if metrics.weighted_f1 > result.best_val_f1:
                result.best_val_f1 = metrics.weighted_f1
                result.best_epoch = epoch
                result.params = params.copy()
                stale = 0
            else:
                stale += 1
                if stale >= config.patience:
                    result.stopped_early = True
                    LOG.info(f"Early stopping after epoch {epoch} (best epoch {result.best_epoch}).")
                    break
    finally:
        if pool is not None:
            pool.shutdown()
        if run_log and not aborted:
            run_log.record(event="done", best_epoch=result.best_epoch, best_val_w_f1=result.best_val_f1,
                           stopped_early=result.stopped_early)
        if run_log:
            run_log.close()

    LOG.info(f"Training finished: best validation W-F1 {result.best_val_f1:.4f} at epoch {result.best_epoch}.")
    return result
