from .enhance import GateThresholds, EnhanceParams, Mode, enhance, should_enhance
from .image import Image, LumaStats, luminance_stats
from .prompt import build_prompt
from .vision import (
    HttpVisionClient,
    MockVisionClient,
    VisionRequest,
    VisionResponse,
    query_vision_model,
    select_grasp_area,
)
from .workflow import (
    AgentConfig,
    Episode,
    ScriptedExecutor,
    Stage,
    StochasticExecutor,
    episode_ledger,
    run_episode,
)
