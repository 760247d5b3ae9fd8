"""Configuration, orchestration and file outputs."""
from .config import PipelineConfig, SeriesSpec, load_config, parse_config
from .pipeline import PairResult, Report, run_pipeline, write_outputs
from .render import export_correlation_paths, read_correlation_path, render_heatmap, render_tables

__all__ = [
    "PipelineConfig",
    "SeriesSpec",
    "load_config",
    "parse_config",
    "PairResult",
    "Report",
    "run_pipeline",
    "write_outputs",
    "export_correlation_paths",
    "read_correlation_path",
    "render_heatmap",
    "render_tables",
]
