#!/usr/bin/env python3
"""Solve an MPS/LP model with HiGHS and write a cdsp solution file.

Usage:
  highs_solve.py --model m.mps --solution out.sol [--time-limit S]
                 [--threads N] [--gap G]

The solution file is line oriented:

  # cdsp-solution v1
  status <optimal|feasible-time-limit|infeasible|no-solution-time-limit|error>
  objective <value>        (only when an incumbent exists)
  bound <value>            (best dual bound, when the solver reports one)
  seconds <wall seconds>
  message <free text>      (optional)
  values <count>
  <column name> <value>    (count lines)
"""

import argparse
import math
import sys
import time


def write_solution(path, status, objective=None, bound=None, seconds=0.0,
                   message=None, values=()):
    with open(path, "w") as out:
        out.write("# cdsp-solution v1\n")
        out.write(f"status {status}\n")
        if objective is not None and math.isfinite(objective):
            out.write(f"objective {objective!r}\n")
        if bound is not None and math.isfinite(bound):
            out.write(f"bound {bound!r}\n")
        out.write(f"seconds {seconds!r}\n")
        if message:
            out.write("message " + " ".join(message.split()) + "\n")
        out.write(f"values {len(values)}\n")
        for name, value in values:
            out.write(f"{name} {value!r}\n")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--model", required=True)
    parser.add_argument("--solution", required=True)
    parser.add_argument("--time-limit", type=float, default=3600.0)
    parser.add_argument("--threads", type=int, default=16)
    parser.add_argument("--gap", type=float, default=0.0)
    args = parser.parse_args()

    start = time.monotonic()
    try:
        import highspy
    except ImportError as exc:
        write_solution(args.solution, "error", message=f"highspy unavailable: {exc}")
        return 2

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", max(1, args.threads))
    h.setOptionValue("mip_rel_gap", max(args.gap, 0.0))
    h.setOptionValue("mip_abs_gap", 1e-9)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    h.setOptionValue("primal_feasibility_tolerance", 1e-9)

    status = h.readModel(args.model)
    if status == highspy.HighsStatus.kError:
        write_solution(args.solution, "error", seconds=time.monotonic() - start,
                       message=f"cannot read model {args.model}")
        return 1

    # HiGHS also applies time_limit to reading, so set it once the model is in.
    h.setOptionValue("time_limit", max(args.time_limit, 1e-6))
    h.run()
    seconds = time.monotonic() - start
    model_status = h.getModelStatus()
    info = h.getInfo()
    has_incumbent = info.primal_solution_status == 2  # kSolutionStatusFeasible
    bound = getattr(info, "mip_dual_bound", None)
    objective = info.objective_function_value if has_incumbent else None

    MS = highspy.HighsModelStatus
    if model_status == MS.kOptimal:
        status = "optimal"
    elif model_status in (MS.kInfeasible, MS.kUnboundedOrInfeasible):
        status = "infeasible"
    elif model_status in (MS.kTimeLimit, MS.kInterrupt, MS.kIterationLimit,
                          MS.kSolutionLimit):
        status = "feasible-time-limit" if has_incumbent else "no-solution-time-limit"
    else:
        write_solution(args.solution, "error", bound=bound, seconds=seconds,
                       message=h.modelStatusToString(model_status))
        return 1

    values = ()
    if has_incumbent:
        lp = h.getLp()
        col_values = h.getSolution().col_value
        values = list(zip(lp.col_names_, col_values))
    write_solution(args.solution, status, objective=objective, bound=bound,
                   seconds=seconds, values=values)
    return 0


if __name__ == "__main__":
    sys.exit(main())
