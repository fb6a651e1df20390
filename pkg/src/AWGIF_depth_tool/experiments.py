import logging
import time
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence

from AWGIF_depth_tool.image_core import DepthMap, ImageGrid, ImageStack
from AWGIF_depth_tool.metrics import MetricError, corr, rmsd, rmse
from AWGIF_depth_tool.plugin_loader import FILTER_REGISTRY
from AWGIF_depth_tool.recorder import MetricsRow
from AWGIF_depth_tool.sff_pipeline import (
    SffParams,
    decompose_depth,
    estimate_initial_depth,
    guidance_image,
    reconstruct_depth,
)

logger = logging.getLogger(__name__)

# (zeta, lambda0) pairs used for each kind of scene
SCENE_PRESETS: Dict[str, Dict[str, float]] = {
    "cone": {"zeta": 2, "lambda0": 100.0},
    "coswave": {"zeta": 5, "lambda0": 700.0},
    "sinewave": {"zeta": 5, "lambda0": 700.0},
    "noisy_cone": {"zeta": 3, "lambda0": 50.0},
    "real": {"zeta": 11, "lambda0": 400.0},
    "cases": {"zeta": 15, "lambda0": 1000.0},
}

NOISE_PRESETS: Dict[str, float] = {
    "cone": 0.02,
    "coswave": 0.005,
    "sinewave": 0.005,
    "real": 0.003,
}

DEFAULT_BETAS = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5)


@dataclass
class DepthScores:
    """rmse/corr need a ground truth; rmsd is always measured against the initial map."""
    rmse: Optional[float]
    corr: Optional[float]
    rmsd: float


@dataclass
class FilterRunResult:
    """1フィルタ分の深度強調結果"""
    filter_name: str
    params: SffParams
    final: ImageGrid
    scores: DepthScores
    elapsed: float


@dataclass
class ComparisonResult:
    """比較結果の集約"""
    initial: DepthMap
    initial_scores: DepthScores
    results: Dict[str, FilterRunResult]
    rankings: Dict[str, List[str]]


@dataclass
class SweepPoint:
    beta: float
    final: ImageGrid
    scores: DepthScores


@dataclass
class SweepResult:
    """beta スイープの結果 (分解は1回だけ行う)"""
    params: SffParams
    initial: DepthMap
    points: List[SweepPoint]

    @property
    def best_beta(self) -> Optional[float]:
        """RMSE が最小の beta (正解がない場合は None)"""
        scored = [p for p in self.points if p.scores.rmse is not None]
        if not scored:
            return None
        return min(scored, key=lambda p: p.scores.rmse).beta


def scene_settings(scene: str, noisy: bool = False) -> Dict[str, float]:
    """Look up the (zeta, lambda0) preset of a scene; noisy cones have their own."""
    key = "noisy_cone" if noisy and scene == "cone" else scene
    if key not in SCENE_PRESETS:
        raise ValueError(
            f"No preset for scene '{scene}'. Choose from {', '.join(SCENE_PRESETS)}.")
    return dict(SCENE_PRESETS[key])


def evaluate_depth(final: ImageGrid, initial: DepthMap,
                   truth: Optional[DepthMap] = None) -> DepthScores:
    """評価指標を計算 (truth がない場合は RMSD のみ)"""
    rmse_value = corr_value = None
    if truth is not None:
        rmse_value = rmse(final, truth)
        try:
            corr_value = corr(final, truth)
        except MetricError as e:
            logger.warning("CORR skipped: %s", e)
    return DepthScores(rmse=rmse_value, corr=corr_value, rmsd=rmsd(final, initial))


def _rank(results: Dict[str, FilterRunResult]) -> Dict[str, List[str]]:
    names = list(results.keys())
    rankings = {"rmsd": sorted(names, key=lambda k: results[k].scores.rmsd, reverse=True)}
    if all(results[k].scores.rmse is not None for k in names):
        rankings["rmse"] = sorted(names, key=lambda k: results[k].scores.rmse)
    if all(results[k].scores.corr is not None for k in names):
        rankings["corr"] = sorted(names, key=lambda k: results[k].scores.corr, reverse=True)
    return rankings


def run_filter_comparison(
    stack: ImageStack,
    params: SffParams,
    truth: Optional[DepthMap] = None,
    filter_names: Optional[Sequence[str]] = None
) -> ComparisonResult:
    """同じ初期深度マップに複数のフィルタを適用して比較する

    Args:
        stack: フォーカススタック
        params: 共通パラメータ (filter_name はフィルタごとに差し替える)
        truth: 正解深度 (フレーム番号単位)。None の場合は RMSD のみ
        filter_names: 実行するフィルタ。None の場合は登録済みの全フィルタ
    """
    if not filter_names:
        filter_names = FILTER_REGISTRY.list_filters()

    initial = estimate_initial_depth(stack, params)
    guidance = guidance_image(stack)

    results = {}
    for name in filter_names:
        if name not in FILTER_REGISTRY:
            raise ValueError(f"unsupported filter '{name}'.")
        run_params = replace(params, filter_name=name)
        started = time.perf_counter()
        decomposition = decompose_depth(initial, guidance, stack.num_frames, run_params)
        final = reconstruct_depth(decomposition, stack.num_frames, run_params.enhancement)
        elapsed = time.perf_counter() - started
        results[name] = FilterRunResult(
            filter_name=name,
            params=run_params,
            final=final,
            scores=evaluate_depth(final, initial, truth),
            elapsed=elapsed,
        )
        logger.info("%s finished in %.3f s", name, elapsed)

    return ComparisonResult(
        initial=initial,
        initial_scores=evaluate_depth(initial, initial, truth),
        results=results,
        rankings=_rank(results),
    )


def run_beta_sweep(
    stack: ImageStack,
    params: SffParams,
    betas: Sequence[float] = DEFAULT_BETAS,
    truth: Optional[DepthMap] = None
) -> SweepResult:
    """beta ごとに最終深度を再構成して評価する"""
    if not betas:
        raise ValueError("At least one beta value is required.")
    initial = estimate_initial_depth(stack, params)
    decomposition = decompose_depth(initial, guidance_image(stack), stack.num_frames, params)

    points = []
    for beta in betas:
        point_params = replace(params, beta=float(beta))
        final = reconstruct_depth(decomposition, stack.num_frames, point_params.enhancement)
        points.append(SweepPoint(beta=float(beta), final=final,
                                 scores=evaluate_depth(final, initial, truth)))
    return SweepResult(params=params, initial=initial, points=points)


def to_metrics_row(scene: str, params: SffParams, scores: DepthScores,
                   filter_name: Optional[str] = None,
                   beta: Optional[float] = None) -> MetricsRow:
    return MetricsRow(
        scene=scene,
        filter=filter_name or params.filter_name,
        zeta=params.filter.zeta,
        lambda0=params.filter.lambda0,
        beta=params.beta if beta is None else beta,
        rmse=scores.rmse,
        corr=scores.corr,
        rmsd=scores.rmsd,
    )
