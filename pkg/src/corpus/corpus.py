from dataclasses import dataclass, field, replace
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from src.corpus.records import CorpusRecord
from src.errors import InvalidInput, ParseError
from src.log.system_logger import Logger, get_system_logger
from src.utils.json import load_json, save_json

LOG: Logger = get_system_logger(__name__)

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class Conversation:
    """
    Array view of one conversation.

    Attributes:
        id (str): Conversation identifier.
        split (str): "train", "val" or "test".
        speakers (np.ndarray): 0-based speaker indices [N].
        labels (np.ndarray): Emotion labels [N].
        feat_t (np.ndarray): Text features [N × d_t].
        feat_a (np.ndarray): Audio features [N × d_a].
        feat_v (np.ndarray): Visual features [N × d_v].
        flipped (Optional[np.ndarray]): Boolean flip markers [N], when recorded.
    """
    id: str
    split: str
    speakers: np.ndarray
    labels: np.ndarray
    feat_t: np.ndarray
    feat_a: np.ndarray
    feat_v: np.ndarray
    flipped: Optional[np.ndarray] = None

    @property
    def n_utt(self) -> int:
        return int(self.labels.shape[0])


@dataclass(frozen=True)
class Corpus:
    """
    A validated set of conversations sharing feature dims and label space.

    Attributes:
        conversations (List[Conversation]): In file order.
        dims (Tuple[int, int, int]): (d_t, d_a, d_v).
        n_classes (int): C.
        speaker_names (List[Hashable]): Original speaker identifier of each index.
    """
    conversations: List[Conversation]
    dims: Tuple[int, int, int]
    n_classes: int
    speaker_names: List[Hashable] = field(default_factory=list)

    @property
    def n_speakers(self) -> int:
        return max(len(self.speaker_names), 1)

    def split(self, name: str) -> List[Conversation]:
        if name not in SPLITS:
            raise InvalidInput(f"unknown split '{name}'")
        return [c for c in self.conversations if c.split == name]

    def n_utterances(self, split: Optional[str] = None) -> int:
        convs = self.conversations if split is None else self.split(split)
        return sum(c.n_utt for c in convs)


def _location(loc: Sequence[Any]) -> str:
    return ".".join(str(part) for part in loc)


def corpus_from_document(document: Any, path: Optional[str] = None) -> Corpus:
    """
    Validates a decoded corpus document and converts it to arrays.

    Speaker identifiers are mapped to indices by first appearance across the corpus.

    Raises:
        ParseError: On a schema violation (names the offending field).
        InvalidInput: If a feature vector's length differs from the declared dims.
    """
    try:
        record = CorpusRecord.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        raise ParseError(first["msg"], path=path, field=_location(first["loc"])) from e

    dims = (record.dims.t, record.dims.a, record.dims.v)
    speaker_index: Dict[Hashable, int] = {}
    conversations: List[Conversation] = []
    for ci, conv in enumerate(record.conversations):
        for ui, utt in enumerate(conv.utterances):
            where = f"conversations.{ci}.utterances.{ui}"
            if utt.label >= record.n_classes:
                raise ParseError(f"label {utt.label} is not below n_classes={record.n_classes}",
                                 path=path, field=f"{where}.label")
            for name, dim in zip("tav", dims):
                if len(getattr(utt, name)) != dim:
                    raise InvalidInput(f"{where}.{name} has {len(getattr(utt, name))} values, expected {dim}")
            speaker_index.setdefault(utt.speaker, len(speaker_index))
        flips = [u.flipped for u in conv.utterances]
        conversations.append(Conversation(
            id=conv.id,
            split=conv.split,
            speakers=np.array([speaker_index[u.speaker] for u in conv.utterances], dtype=np.int64),
            labels=np.array([u.label for u in conv.utterances], dtype=np.int64),
            feat_t=np.array([u.t for u in conv.utterances], dtype=np.float64),
            feat_a=np.array([u.a for u in conv.utterances], dtype=np.float64),
            feat_v=np.array([u.v for u in conv.utterances], dtype=np.float64),
            flipped=None if any(f is None for f in flips) else np.array(flips, dtype=bool),
        ))

    return Corpus(conversations=conversations, dims=dims, n_classes=record.n_classes,
                  speaker_names=list(speaker_index))


def load_corpus(path: str) -> Corpus:
    """
    Loads and validates a JSON corpus file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: On malformed JSON (with line) or a schema violation (with field).
        InvalidInput: On inconsistent feature dims.
    """
    corpus = corpus_from_document(load_json(path), path=path)
    LOG.info(f"Loaded corpus '{path}': {len(corpus.conversations)} conversations, "
             f"{corpus.n_utterances()} utterances, {corpus.n_classes} classes.")
    return corpus


def remap_speakers(corpus: Corpus, speaker_names: Sequence[Hashable]) -> Corpus:
    """
    Re-indexes every conversation's speakers against `speaker_names`, the
    table a trained model was built with.

    Raises:
        InvalidInput: If the corpus has a speaker the table does not know.
    """
    known = {name: i for i, name in enumerate(speaker_names)}
    unknown = [name for name in corpus.speaker_names if name not in known]
    if unknown:
        raise InvalidInput(f"speakers unknown to the model: {unknown}")
    lookup = np.array([known[name] for name in corpus.speaker_names], dtype=np.int64)
    conversations = [replace(conv, speakers=lookup[conv.speakers]) for conv in corpus.conversations]
    return Corpus(conversations=conversations, dims=corpus.dims, n_classes=corpus.n_classes,
                  speaker_names=list(speaker_names))


def corpus_to_document(corpus: Corpus) -> Dict[str, Any]:
    names = corpus.speaker_names or [0]
    conversations = []
    for conv in corpus.conversations:
        utterances = []
        for i in range(conv.n_utt):
            utt: Dict[str, Any] = {
                "speaker": names[int(conv.speakers[i])],
                "label": int(conv.labels[i]),
                "t": conv.feat_t[i].tolist(),
                "a": conv.feat_a[i].tolist(),
                "v": conv.feat_v[i].tolist(),
            }
            if conv.flipped is not None:
                utt["flipped"] = bool(conv.flipped[i])
            utterances.append(utt)
        conversations.append({"id": conv.id, "split": conv.split, "utterances": utterances})
    return {
        "n_classes": corpus.n_classes,
        "dims": dict(zip("tav", corpus.dims)),
        "conversations": conversations,
    }


def write_corpus(corpus: Corpus, path: str) -> None:
    """Writes the corpus as deterministic JSON in the load schema."""
    save_json(path, corpus_to_document(corpus), indent=0)
    LOG.info(f"Wrote corpus '{path}' ({len(corpus.conversations)} conversations).")
