from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Protocol, Type

if TYPE_CHECKING:
    import numpy as np

    from AWGIF_depth_tool.guided_filters import FilterOutput, FilterParams


@dataclass
class FilterMetadata:
    """フィルタのメタデータ"""
    name: str
    description: str
    version: str
    author: str
    parameters: Dict[str, Any]
    category: str


class GuidedFilter(Protocol):
    """ガイド付きフィルタの統一インターフェース"""

    def get_metadata(self) -> FilterMetadata:
        """フィルタのメタデータを返す"""
        ...

    def apply(self, Z: np.ndarray, G: np.ndarray, params: FilterParams) -> FilterOutput:
        """入力画像 Z をガイド画像 G で平滑化し、ベース層と係数を返す"""
        ...


class BaseGuidedFilter(ABC):
    """フィルタの基底クラス"""

    @abstractmethod
    def get_metadata(self) -> FilterMetadata:
        pass

    @abstractmethod
    def apply(self, Z: np.ndarray, G: np.ndarray, params: FilterParams) -> FilterOutput:
        pass


class FilterRegistry:
    """フィルタレジストリ"""

    def __init__(self):
        self._filter_classes: Dict[str, Type[GuidedFilter]] = {}
        self._metadata: Dict[str, FilterMetadata] = {}

    def register(self, filter_class: Type[GuidedFilter]) -> None:
        """フィルタクラスを登録"""
        # メタデータ取得のために一時的にインスタンス化
        metadata = filter_class().get_metadata()
        self._filter_classes[metadata.name] = filter_class
        self._metadata[metadata.name] = metadata

    def get_filter(self, name: str) -> Optional[GuidedFilter]:
        """フィルタの新しいインスタンスを取得 (未登録なら None)"""
        filter_class = self._filter_classes.get(name)
        if filter_class:
            return filter_class()
        return None

    def list_filters(self) -> List[str]:
        """登録済みフィルタの一覧を取得"""
        return list(self._filter_classes.keys())

    def get_metadata(self, name: str) -> Optional[FilterMetadata]:
        """フィルタのメタデータを取得"""
        return self._metadata.get(name)

    def __contains__(self, name: object) -> bool:
        return name in self._filter_classes
