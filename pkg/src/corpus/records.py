from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, FiniteFloat, StrictBool, StrictInt, StrictStr

Split = Literal["train", "val", "test"]


class UtteranceRecord(BaseModel):
    """
    One speaker turn as stored on disk.

    Attributes:
        speaker (Union[str, int]): Speaker identifier, mapped to an index on load.
        label (int): Emotion class in [0, n_classes).
        t (List[float]): Text feature vector.
        a (List[float]): Audio feature vector.
        v (List[float]): Visual feature vector.
        flipped (Optional[bool]): Set by the synthetic generator on utterances
            whose emotion departs from the conversation trend.
    """
    model_config = ConfigDict(extra="forbid")

    speaker: Union[StrictInt, StrictStr]
    label: StrictInt = Field(ge=0)
    t: List[FiniteFloat]
    a: List[FiniteFloat]
    v: List[FiniteFloat]
    flipped: Optional[StrictBool] = None


class ConversationRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    id: StrictStr
    split: Split = "train"
    utterances: List[UtteranceRecord] = Field(min_length=1)


class DimsRecord(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: StrictInt = Field(ge=1)
    a: StrictInt = Field(ge=1)
    v: StrictInt = Field(ge=1)


class CorpusRecord(BaseModel):
    """
    Top level of a corpus file:

        {"n_classes": C, "dims": {"t": d_t, "a": d_a, "v": d_v},
         "conversations": [{"id", "split", "utterances": [...]}]}
    """
    model_config = ConfigDict(extra="forbid")

    n_classes: StrictInt = Field(ge=1)
    dims: DimsRecord
    conversations: List[ConversationRecord]
