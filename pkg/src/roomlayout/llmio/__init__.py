"""Staged language-model querying behind a provider abstraction.

The elicitation pipeline asks a chat-completion provider for structured JSON
in stages: room parameters, zones, objects per tier, styles, constraint
sentences, constraint cleaning, and finally translation of sentences into
cost-function calls.  A record/replay transcript backend makes the whole
phase a deterministic offline function for tests and fixtures.
"""

from .providers import (
    API_KEY_ENV,
    CannedProvider,
    ChatRequest,
    HttpProvider,
    Provider,
    RecordingProvider,
    ReplayMissError,
    ReplayProvider,
    TranscriptStore,
    request_hash,
)
from .schemas import STAGE_SCHEMAS, STAGES
from .stages import (
    BriefRequest,
    StageFailure,
    StageResponse,
    TaggedSentence,
    clean_constraints,
    elicit_graph,
    query_inter_constraints,
    query_intra_constraints,
    query_primary,
    query_room_params,
    query_secondary,
    query_styles,
    query_tertiary,
    query_zones,
)
from .translate import translate

__all__ = [
    "API_KEY_ENV",
    "BriefRequest",
    "CannedProvider",
    "ChatRequest",
    "HttpProvider",
    "Provider",
    "RecordingProvider",
    "ReplayMissError",
    "ReplayProvider",
    "STAGES",
    "STAGE_SCHEMAS",
    "StageFailure",
    "StageResponse",
    "TaggedSentence",
    "TranscriptStore",
    "clean_constraints",
    "elicit_graph",
    "query_inter_constraints",
    "query_intra_constraints",
    "query_primary",
    "query_room_params",
    "query_secondary",
    "query_styles",
    "query_tertiary",
    "query_zones",
    "request_hash",
    "translate",
]
