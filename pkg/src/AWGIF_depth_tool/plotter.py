import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from AWGIF_depth_tool.experiments import ComparisonResult, SweepResult  # noqa: E402


def _save(output_filename: str) -> str:
    plt.tight_layout()

    # Ensure the output directory exists
    output_dir = os.path.dirname(output_filename)
    if output_dir and not os.path.exists(output_dir):
        os.makedirs(output_dir)

    plt.savefig(output_filename, dpi=150, bbox_inches='tight')
    plt.close()
    return output_filename


def plot_beta_sweep(
    sweep_result: SweepResult,
    output_filename: str = "beta_sweep_chart.png",
    title: str = "Depth error versus beta"
) -> str:
    """beta と RMSE / RMSD の関係をプロット"""
    betas = [p.beta for p in sweep_result.points]
    rmse_values = [p.scores.rmse for p in sweep_result.points]
    rmsd_values = [p.scores.rmsd for p in sweep_result.points]

    fig, ax = plt.subplots(figsize=(8, 5))
    if all(v is not None for v in rmse_values):
        ax.plot(betas, rmse_values, marker='o', linewidth=2, label='RMSE (vs. ground truth)')
    ax.plot(betas, rmsd_values, marker='s', linewidth=2, linestyle='--',
            label='RMSD (vs. initial depth)')

    best = sweep_result.best_beta
    if best is not None:
        ax.axvline(best, color='gray', alpha=0.5, linestyle=':', label=f'best beta = {best:g}')

    ax.set_title(title, fontsize=14, fontweight='bold')
    ax.set_xlabel('beta', fontsize=12)
    ax.set_ylabel('frames', fontsize=12)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=10)
    return _save(output_filename)


def plot_filter_comparison(
    comparison_result: ComparisonResult,
    output_filename: str = "filter_comparison_chart.png",
    title: str = "Filter comparison"
) -> str:
    """フィルタごとの RMSE / RMSD を棒グラフで比較"""
    names = list(comparison_result.results.keys())
    series = {"RMSD": [comparison_result.results[n].scores.rmsd for n in names]}
    rmse_values = [comparison_result.results[n].scores.rmse for n in names]
    if all(v is not None for v in rmse_values):
        series = {"RMSE": rmse_values, **series}

    colors = plt.get_cmap('tab10')
    width = 0.8 / len(series)
    fig, ax = plt.subplots(figsize=(8, 5))
    for i, (label, values) in enumerate(series.items()):
        positions = [x + (i - (len(series) - 1) / 2) * width for x in range(len(names))]
        ax.bar(positions, values, width=width, label=label, color=colors(i))

    initial_rmse = comparison_result.initial_scores.rmse
    if initial_rmse is not None:
        ax.axhline(initial_rmse, color='black', linestyle='--', linewidth=1,
                   label='initial RMSE')

    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names)
    ax.set_title(title, fontsize=14, fontweight='bold')
    ax.set_ylabel('frames', fontsize=12)
    ax.grid(True, axis='y', alpha=0.3)
    ax.legend(fontsize=10)
    return _save(output_filename)
