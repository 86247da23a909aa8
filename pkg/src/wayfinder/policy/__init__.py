"""High-level landmark selection: prompts, parsing and planners."""
from . import prompts
from .llm import (
    HttpTransport,
    LLMClient,
    PolicyFailure,
    RecordingTransport,
    ReplayTransport,
    TransportError,
    build_messages,
    llm_choose,
)
from .mock_server import MockLLMServer
from .planners import (
    Choice,
    Exhausted,
    NoIndex,
    ParseError,
    PolicyConfig,
    PromptBundle,
    UnknownIndex,
    VisitedIndex,
    build_prompt,
    choose_closest,
    choose_oracle,
    choose_random,
    direction_hints,
    format_choice,
    parse_choice,
    planner_view,
    text_covers,
)

__all__ = [
    "Choice",
    "Exhausted",
    "HttpTransport",
    "LLMClient",
    "MockLLMServer",
    "NoIndex",
    "ParseError",
    "PolicyConfig",
    "PolicyFailure",
    "PromptBundle",
    "RecordingTransport",
    "ReplayTransport",
    "TransportError",
    "UnknownIndex",
    "VisitedIndex",
    "build_messages",
    "build_prompt",
    "choose_closest",
    "choose_oracle",
    "choose_random",
    "direction_hints",
    "format_choice",
    "llm_choose",
    "parse_choice",
    "planner_view",
    "prompts",
    "text_covers",
]
