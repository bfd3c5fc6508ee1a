"""Command-line front end; every subcommand writes CSV.

Exit status is 0 on success, 2 on a usage error and 1 when a computation
fails (no local maximum, no matching priority, ...).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import circuits, coherence, comparator, gcp, logical
from .errors import ComputationError, NoLocalMax, UsageError
from .simulator import (PriorityOracle, evolve, first_local_max,
                        grover_optimal_steps, grover_success)

ENGINES = ("auto", "statevector", "logical", "both")
LOGICAL_THRESHOLD = 2 ** 12
MAX_DOUBLINGS = 6


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17g" % x
    return str(x)


def write_csv(header: Sequence[str], rows: Sequence[Sequence], out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(out, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:num`` (inclusive linspace) or a comma separated list."""
    try:
        if ":" in spec:
            start, stop, num = spec.split(":")
            count = int(num)
            if count < 1:
                raise ValueError("grid needs at least one point")
            return np.linspace(float(start), float(stop), count)
        return np.array([float(v) for v in spec.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad grid {spec!r}: {exc}") from exc


def parse_int_grid(spec: str) -> list[int]:
    try:
        if ":" in spec:
            start, stop, step = (int(v) for v in spec.split(":"))
            return list(range(start, stop + 1, step))
        return [int(v) for v in spec.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad integer grid {spec!r}: {exc}") from exc


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    m: int | None = None
    eps: float | None = None
    eps_grid: np.ndarray | None = None
    m_grid: list[int] | None = None
    t: int | None = None
    t_max: int | None = None
    R: list[float] | None = None
    engine: str = "auto"
    instance: str | None = None
    show: str | None = None
    out: str | None = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        cfg = cls(command=ns.command)
        for name in ("n", "m", "eps", "t", "t_max", "R", "engine", "instance", "show", "out"):
            if hasattr(ns, name) and getattr(ns, name) is not None:
                setattr(cfg, name, getattr(ns, name))
        if getattr(ns, "eps_grid", None):
            cfg.eps_grid = parse_grid(ns.eps_grid)
        if getattr(ns, "m_grid", None):
            cfg.m_grid = parse_int_grid(ns.m_grid)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.n is not None and self.n < 1:
            raise UsageError(f"--n must be positive, got {self.n}")
        if self.m is not None and self.m < 1:
            raise UsageError(f"--m must be positive, got {self.m}")
        if self.eps is not None and not -1.0 <= self.eps <= 0.0:
            raise UsageError(f"--eps must lie in [-1, 0], got {self.eps}")
        if self.eps_grid is not None and ((self.eps_grid < -1).any() or (self.eps_grid > 0).any()):
            raise UsageError("--eps-grid values must lie in [-1, 0]")
        for name in ("t", "t_max"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise UsageError(f"--{name.replace('_', '-')} must be non-negative, got {v}")

    def resolved_engine(self, n: int) -> str:
        if self.engine != "auto":
            return self.engine
        return "logical" if n > LOGICAL_THRESHOLD else "statevector"


def _split_check(n: int, m: int) -> None:
    if m < 2 or m % 2 or m > n:
        raise UsageError(f"two-class runs need even m <= n, got n={n}, m={m}")


def _statevector_series(n: int, m: int, eps: float, steps: int) -> np.ndarray:
    trace = evolve(PriorityOracle.two_class(n, m, eps), steps)
    p0 = trace.probs[:, : m // 2].sum(axis=1)
    pe = trace.probs[:, m // 2:].sum(axis=1)
    return np.column_stack([p0, pe, trace.failure])


def class_series(n: int, m: int, eps: float, steps: int, engine: str) -> np.ndarray:
    """Rows ``(p_class0, p_class_eps, p_fail)`` for t = 0..steps."""
    if engine == "logical":
        return logical.class_probability_series(n, m, eps, steps)
    return _statevector_series(n, m, eps, steps)


def cmd_sweep_t(cfg: RunConfig) -> None:
    n, m = cfg.n or 256, cfg.m or 2
    eps = -0.05 if cfg.eps is None else cfg.eps
    t_max = 50 if cfg.t_max is None else cfg.t_max
    _split_check(n, m)
    engine = cfg.resolved_engine(n)
    t = np.arange(t_max + 1)
    ref = grover_success(n, m, t)
    header = ["t", "P_x1", "P_x2", "P_total", "P_grover"]
    if engine == "both":
        sv = class_series(n, m, eps, t_max, "statevector")
        lg = class_series(n, m, eps, t_max, "logical")
        header += ["P_x1_logical", "P_x2_logical", "P_total_logical"]
        rows = [(int(k), sv[k, 0], sv[k, 1], sv[k, 0] + sv[k, 1], ref[k],
                 lg[k, 0], lg[k, 1], lg[k, 0] + lg[k, 1]) for k in t]
    else:
        p = class_series(n, m, eps, t_max, engine)
        rows = [(int(k), p[k, 0], p[k, 1], p[k, 0] + p[k, 1], ref[k]) for k in t]
    write_csv(header, rows, cfg.out)


def cmd_sweep_eps(cfg: RunConfig) -> None:
    n, m = cfg.n or 256, cfg.m or 2
    _split_check(n, m)
    grid = cfg.eps_grid if cfg.eps_grid is not None else np.linspace(-1.0, 0.0, 101)
    t = grover_optimal_steps(n, m) if cfg.t is None else cfg.t
    engine = cfg.resolved_engine(n)
    if engine == "both":
        engine = "logical"
    rows = []
    for eps in grid:
        p = class_series(n, m, float(eps), t, engine)[t]
        ratio = p[0] / p[1] if p[1] > 0 else math.inf
        rows.append((float(eps), t, ratio, p[0] + p[1]))
    write_csv(["eps_tilde", "t", "ratio", "P_total"], rows, cfg.out)


def _first_peaks(series_fn: Callable[[int], np.ndarray], steps: int) -> list[tuple[int, float] | None]:
    """First local maximum of every column, doubling the horizon as needed."""
    for _ in range(MAX_DOUBLINGS + 1):
        s = series_fn(steps)
        try:
            return [first_local_max(s[:, k]) for k in range(s.shape[1])]
        except NoLocalMax:
            steps *= 2
    out = []
    for k in range(s.shape[1]):
        try:
            out.append(first_local_max(s[:, k]))
        except NoLocalMax:
            out.append(None)
    return out


def _local_max_row(n: int, m: int, eps: float, steps: int, engine: str) -> tuple:
    def per_item(k: int) -> np.ndarray:
        # items in a class share one amplitude, so divide the class sum
        return class_series(n, m, eps, k, engine)[:, :2] / (m // 2)

    peaks = _first_peaks(per_item, steps)
    cells: list = []
    for pk in peaks:
        cells += ["", ""] if pk is None else [pk[0], pk[1]]
    status = "ok" if all(pk is not None for pk in peaks) else "NoLocalMax"
    return (*cells, status)


def cmd_local_max(cfg: RunConfig) -> None:
    header_tail = ["t_x1", "P_x1", "t_x2", "P_x2", "status"]
    rows = []
    if cfg.m_grid is not None:
        n = cfg.n or 2 ** 16
        eps = -0.01 if cfg.eps is None else cfg.eps
        for m in cfg.m_grid:
            _split_check(n, m)
            engine = cfg.resolved_engine(n)
            engine = "logical" if engine == "both" else engine
            steps = cfg.t_max or 6 * grover_optimal_steps(n, m) + 10
            rows.append((m, *_local_max_row(n, m, eps, steps, engine)))
        write_csv(["m", *header_tail], rows, cfg.out)
        return
    n, m = cfg.n or 1000, cfg.m or 2
    _split_check(n, m)
    grid = cfg.eps_grid if cfg.eps_grid is not None else coherence.default_grid()
    engine = cfg.resolved_engine(n)
    engine = "logical" if engine == "both" else engine
    steps = cfg.t_max or 6 * grover_optimal_steps(n, m) + 10
    for eps in grid:
        rows.append((float(eps), *_local_max_row(n, m, float(eps), steps, engine)))
    write_csv(["eps_tilde", *header_tail], rows, cfg.out)


def cmd_compare_ps(cfg: RunConfig) -> None:
    rows = []
    for R in cfg.R or [16.81, 4.0]:
        r = comparator.match_ratio(R)
        rows.append((r.R, r.eps, r.eps_tilde, r.Q1, r.Q2, r.Q_total, r.P1, r.P2, r.P_total))
    write_csv(["R", "eps", "eps_tilde", "Q1", "Q2", "Q_total", "P1", "P2", "P_total"], rows, cfg.out)


def cmd_coherence(cfg: RunConfig) -> None:
    n = cfg.n or coherence.DEFAULT_N
    grid = cfg.eps_grid if cfg.eps_grid is not None else coherence.default_grid()
    rep = coherence.coherence_sweep(grid, n)
    header = ["eps_tilde"]
    for k in (1, 2):
        header += [f"P_opt_x{k}", f"H_opt_x{k}", f"t_psi_x{k}", f"t_rho_x{k}",
                   f"prob_ratio_x{k}", f"query_ratio_x{k}"]
    pr, qr = rep.prob_ratio, rep.query_ratio
    rows = []
    for i, eps in enumerate(rep.eps_tilde):
        row: list = [float(eps)]
        for k in (0, 1):
            row += [rep.p_opt[i, k], rep.h_opt[i, k], int(rep.t_psi[i, k]), int(rep.t_rho[i, k]),
                    pr[i, k], qr[i, k]]
        rows.append(row)
    write_csv(header, rows, cfg.out)


def _circuit_table(eps: float) -> dict[str, tuple[circuits.Circuit, float]]:
    diff = circuits.diffusion_circuit_3q()
    diff_err = np.abs(circuits.to_matrix(diff) - circuits.diffusion_matrix(8)).max()

    tof = circuits.Circuit(3, [circuits.Gate("TOFFOLI", 2, (0, 1))])
    tof_err = np.abs(circuits.to_matrix(circuits.lower_toffoli(tof)) - circuits.to_matrix(tof)).max()

    pri = circuits.priority_oracle_n8(eps)
    pri_ref = np.diag(comparator.phase_oracle_n8(eps))
    pri_err = np.abs(np.diag(circuits.to_matrix(pri)) - pri_ref).max()

    ps = circuits.ps_oracle_circuit(eps)
    ps_ref = comparator.ps_oracle(eps)
    _, g = circuits.phase_equivalent(circuits.to_matrix(ps), ps_ref)
    ps_err = np.abs(circuits.to_matrix(ps) - g * ps_ref).max()
    return {"diffusion": (diff, diff_err), "toffoli": (tof, tof_err),
            "priority_oracle": (pri, pri_err), "ps_oracle": (ps, ps_err)}


def cmd_circuit(cfg: RunConfig) -> None:
    eps = -0.5 if cfg.eps is None else cfg.eps
    table = _circuit_table(eps)
    if cfg.show is not None:
        text = circuits.lower_toffoli(table[cfg.show][0]).to_text()
        if cfg.out is None or cfg.out == "-":
            sys.stdout.write(text)
        else:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        return
    rows = [(name, circuits.cnot_count(circ), circuits.REFERENCE_CNOT_COUNTS[name], err)
            for name, (circ, err) in table.items()]
    write_csv(["circuit", "cnot_count", "reference_count", "max_error"], rows, cfg.out)


def cmd_gcp(cfg: RunConfig) -> None:
    if cfg.instance is None:
        raise UsageError("gcp needs --instance FILE")
    try:
        graph = gcp.load_instance(cfg.instance)
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.instance}: {exc}") from exc
    table = gcp.reward_table(graph)
    j_max = float(table.max())
    best = int(np.argmax(table))
    if cfg.t is None:
        steps = cfg.t_max or 6 * max(1, grover_optimal_steps(graph.space_size, 1)) + 10
        peaks = _first_peaks(lambda s: gcp.gcp_search_series(graph, j_max, s)[:, [best]], steps)
        if peaks[0] is None:
            raise NoLocalMax("best colouring shows no local maximum")
        t = peaks[0][0]
    else:
        t = cfg.t
    dist = gcp.gcp_search(graph, j_max, t)
    order = sorted(range(dist.size), key=lambda k: (-round(dist[k], 15), k))
    rows = []
    for rank, k in enumerate(order, 1):
        a = graph.assignment(k)
        rows.append((rank, k, " ".join(str(c) for c in a), table[k],
                     table[k] / j_max - 1.0, t, dist[k]))
    write_csv(["rank", "index", "assignment", "reward", "eps", "t", "probability"], rows, cfg.out)


COMMANDS = {
    "sweep-t": cmd_sweep_t,
    "sweep-eps": cmd_sweep_eps,
    "local-max": cmd_local_max,
    "compare-ps": cmd_compare_ps,
    "coherence": cmd_coherence,
    "circuit": cmd_circuit,
    "gcp": cmd_gcp,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rankgrover", description="Ranked Grover search experiments (CSV output).")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--out", help="output file (default: stdout)")

    def sizes(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--n", type=int, help="database size")
        sp.add_argument("--m", type=int, help="number of marked items (even)")
        sp.add_argument("--engine", choices=ENGINES, default="auto")

    sp = sub.add_parser("sweep-t", help="class probabilities against t")
    sizes(sp)
    sp.add_argument("--eps", type=float, help="priority of the second class")
    sp.add_argument("--t-max", type=int)
    common(sp)

    sp = sub.add_parser("sweep-eps", help="ratio and total at a fixed t against eps")
    sizes(sp)
    sp.add_argument("--eps-grid", help="start:stop:num or comma list")
    sp.add_argument("--t", type=int, help="query count (default: floor(pi/(2 theta)))")
    common(sp)

    sp = sub.add_parser("local-max", help="first local maxima against eps or m")
    sizes(sp)
    sp.add_argument("--eps", type=float, help="priority for an m sweep")
    sp.add_argument("--eps-grid", help="start:stop:num or comma list")
    sp.add_argument("--m-grid", help="start:stop:step or comma list of even m")
    sp.add_argument("--t-max", type=int, help="initial search horizon")
    common(sp)

    sp = sub.add_parser("compare-ps", help="match P1/P2 = R against the amplitude-encoded oracle")
    sp.add_argument("--R", type=float, action="append", help="target ratio (repeatable)")
    common(sp)

    sp = sub.add_parser("coherence", help="coherent versus incoherent start")
    sp.add_argument("--n", type=int)
    sp.add_argument("--eps-grid", help="start:stop:num or comma list")
    common(sp)

    sp = sub.add_parser("circuit", help="CNOT counts and exactness of the n=8 circuits")
    sp.add_argument("--eps", type=float, help="priority used by both oracles")
    sp.add_argument("--show", choices=sorted(circuits.REFERENCE_CNOT_COUNTS),
                    help="print one lowered circuit in text form instead")
    common(sp)

    sp = sub.add_parser("gcp", help="ranked search over a reward graph colouring instance")
    sp.add_argument("--instance", help="instance file")
    sp.add_argument("--t", type=int, help="query count (default: first local max of the best colouring)")
    sp.add_argument("--t-max", type=int, help="initial search horizon")
    common(sp)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig.from_args(ns)
        COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"rankgrover: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ComputationError as exc:
        print(f"rankgrover: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
