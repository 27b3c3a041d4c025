"""A full grid experiment and the published boundary-tuning table.

Runs the six task-by-assistance combinations a few times each, renders
the standard report (Laplace success rates with adjusted-Wald intervals,
geometric-mean times, attempt counts), then aggregates the shipped
boundary-parameter failure-rate fixture.
"""

from gazeassist import stats
from gazeassist.report import failure_table_to_markdown, report_to_markdown, summarize_records
from gazeassist.sim import run_experiment

print("running the 6-cell grid, 4 trials per cell (seed 11)...\n")
records = run_experiment(n_trials=4, seed=11, timeout=20.0)
print(report_to_markdown(summarize_records(records)))

none_times = [r.completion_time for r in records
              if r.config["mode"]["kind"] == "none" and r.config["task"] == "grasping"]
force_times = [r.completion_time for r in records
               if r.config["mode"]["kind"] == "guidance_force" and r.config["task"] == "grasping"]
test = stats.two_sample_t(force_times, none_times)
print(f"grasping, guidance vs none: Welch t = {test.statistic:.3f}, p = {test.p_value:.3f}")
print("(small n: direction only, significance is not expected)\n")

print("boundary parameter tuning, published failure rates:")
table = stats.aggregate_failure_table(stats.PARAM_SET_FAILURE_RATES)
print(failure_table_to_markdown(table))
