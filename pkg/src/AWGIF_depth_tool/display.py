from typing import List, Optional

from AWGIF_depth_tool.experiments import ComparisonResult, DepthScores, SweepResult


def format_metric(value: Optional[float], precision: int = 4) -> str:
    """Format a metric value; missing values are shown as a dash"""
    if value is None:
        return "-"
    return f"{value:.{precision}f}"


# (label, attribute, higher is better)
METRICS = [
    ("RMSE", "rmse", False),
    ("CORR", "corr", True),
    ("RMSD", "rmsd", True),
]


def _highlight(values: List[Optional[float]], higher_is_better: bool) -> List[str]:
    formatted = [format_metric(v) for v in values]
    present = [v for v in values if v is not None]
    if len(present) < 2:
        return formatted
    best = max(present) if higher_is_better else min(present)
    return [f"**{text}**" if v == best else text for v, text in zip(values, formatted)]


def generate_comparison_table(comparison_result: ComparisonResult,
                              include_initial: bool = True) -> str:
    """フィルタ比較のMarkdownテーブルを生成 (最良値を太字で表示)"""
    names = list(comparison_result.results.keys())
    columns = (["initial"] if include_initial else []) + names
    scores: List[DepthScores] = (
        ([comparison_result.initial_scores] if include_initial else [])
        + [comparison_result.results[name].scores for name in names]
    )

    header = "| Metric       | " + " | ".join(f"{c:<10}" for c in columns) + " |"
    separator = "|:-------------|" + "|".join([":----------"] * len(columns)) + "|"
    rows = []
    for label, attr, higher_is_better in METRICS:
        values = [getattr(s, attr) for s in scores]
        if all(v is None for v in values):
            continue
        # initial map is the reference, not a candidate
        offset = 1 if include_initial else 0
        cells = [format_metric(v) for v in values[:offset]]
        cells += _highlight(values[offset:], higher_is_better)
        rows.append(f"| {label:<12} | " + " | ".join(f"{c:<10}" for c in cells) + " |")

    lines = [header, separator] + rows
    if comparison_result.rankings:
        lines.append("")
        for metric, ranked in comparison_result.rankings.items():
            lines.append(f"{metric.upper()} ranking: " + " > ".join(ranked))
    return "\n".join(lines)


def generate_sweep_table(sweep_result: SweepResult) -> str:
    """beta スイープのMarkdownテーブルを生成"""
    header = "| beta  | RMSE       | CORR       | RMSD       |"
    separator = "|:------|:-----------|:-----------|:-----------|"
    columns = {attr: _highlight([getattr(p.scores, attr) for p in sweep_result.points], hib)
               for _, attr, hib in METRICS}
    rows = []
    for i, point in enumerate(sweep_result.points):
        rows.append(f"| {point.beta:<5g} | "
                    + " | ".join(f"{columns[attr][i]:<10}" for _, attr, _ in METRICS) + " |")
    lines = [header, separator] + rows
    if sweep_result.best_beta is not None:
        lines.append("")
        lines.append(f"Best beta (lowest RMSE): {sweep_result.best_beta:g}")
    return "\n".join(lines)
