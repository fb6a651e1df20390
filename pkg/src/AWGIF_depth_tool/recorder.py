import csv
import logging
import os
from typing import Optional, TypedDict

logger = logging.getLogger(__name__)

METRICS_FIELDS = ["scene", "filter", "zeta", "lambda0", "beta", "rmse", "corr", "rmsd"]


class MetricsRow(TypedDict, total=False):
    """One evaluation result; missing metrics are written as empty cells."""
    scene: str
    filter: str
    zeta: Optional[int]
    lambda0: Optional[float]
    beta: Optional[float]
    rmse: Optional[float]
    corr: Optional[float]
    rmsd: Optional[float]


class MetricsWriteError(Exception):
    """Custom exception for errors during metrics CSV writing."""
    pass


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def record_metrics(row: MetricsRow, file_path: str = "metrics.csv") -> None:
    """評価結果を1行としてCSVファイルに追記する。

    ヘッダー (scene,filter,zeta,lambda0,beta,rmse,corr,rmsd) はファイルが
    新規または空のときだけ書き込む。

    Args:
        row (MetricsRow): 記録する評価結果。
        file_path (str): CSVファイルのパス (デフォルト: metrics.csv)。
    """
    unknown = set(row) - set(METRICS_FIELDS)
    if unknown:
        raise ValueError(f"Unknown metrics fields: {', '.join(sorted(unknown))}.")
    needs_header = not os.path.exists(file_path) or os.path.getsize(file_path) == 0

    try:
        with open(file_path, 'a', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=METRICS_FIELDS)

            if needs_header:
                writer.writeheader()

            writer.writerow({field: _format_cell(row.get(field)) for field in METRICS_FIELDS})
    except OSError as e:
        raise MetricsWriteError(f"Failed to write metrics to {file_path}: {e}") from e
    logger.debug("Appended metrics row for %s/%s to %s", row.get("scene"), row.get("filter"), file_path)
