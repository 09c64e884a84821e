from __future__ import annotations

from .__main__ import RunConfig, build_parser, build_report, cli_run, render, run

__all__ = (
    "RunConfig",
    "build_parser",
    "build_report",
    "cli_run",
    "render",
    "run",
)
