from AWGIF_depth_tool.filter_registry import FilterRegistry
from AWGIF_depth_tool.guided_filters import AWGIFFilter, GIFFilter, WGIFFilter


def initialize_registry() -> FilterRegistry:
    """フィルタレジストリを初期化し、デフォルトのフィルタを登録する"""
    registry = FilterRegistry()

    # Proposed filter first so listings and rankings start with it
    registry.register(AWGIFFilter)

    # Baselines
    registry.register(GIFFilter)
    registry.register(WGIFFilter)

    return registry


# グローバルなレジストリインスタンス
FILTER_REGISTRY = initialize_registry()
