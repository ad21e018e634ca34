"""Runnable verifications of concrete claims about definability and verdicts.

Each check is registered under a dotted name and returns a
:class:`CheckResult`. A failing result always carries a counterexample that
:func:`replay_counterexample` can re-evaluate.
"""
from .registry import (SCALES, SCHEMA, CheckError, CheckResult, names, replay_counterexample, run, run_all,
                       thread_count)

__all__ = ["SCALES", "SCHEMA", "CheckError", "CheckResult", "names", "replay_counterexample", "run", "run_all",
           "thread_count"]
