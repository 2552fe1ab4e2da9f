"""
Output Module.

Serializes analysis results as CSV, JSON or plain-text reports.

CSV and JSON are interchange formats: numbers in CSV use 17 significant
digits and JSON numbers are written with the shortest round-trip repr, so
both reproduce every double exactly and identical runs give identical
bytes. Text reports are for reading and round to 12 digits.
"""

import csv
import json
import sys
from contextlib import contextmanager
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO

from qhd_system.core.classical import BimatrixGame2x2, ClassicalESSReport, Strategy
from qhd_system.core.dynamics import InvasionTrajectory, RoleInvasionTrajectory
from qhd_system.core.equilibria import EquilibriumCandidate, EquilibriumReport, NashCondition
from qhd_system.core.quantum import BASIS_LABELS, MODULI_NAMES, DensityMatrix4, InitialState, PayoffSurface
from qhd_system.core.sweep import SWEEP_COLUMNS, SweepCell
from qhd_system.core.verification import VerificationReport

SURFACE_KEYS = ("k_pq", "k_p", "k_q", "k_0")


def format_number(x: float) -> str:
    """Decimal with 17 significant digits."""
    return f"{x:.17g}"


def format_bool(value: bool) -> str:
    return "true" if value else "false"


def _short(x: float) -> str:
    return f"{x:.12g}"


@contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    """Yield the destination stream: the file at ``path`` or stdout."""
    if not path:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as f:
        yield f


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def write_json(stream: TextIO, document: Any) -> None:
    json.dump(document, stream, indent=2)
    stream.write("\n")


def write_lines(stream: TextIO, lines: Iterable[str]) -> None:
    for line in lines:
        print(line, file=stream)


# Shared pieces

def surface_dict(surface: PayoffSurface) -> Dict[str, float]:
    return dict(zip(SURFACE_KEYS, surface.coefficients()))


def moduli_dict(state: InitialState) -> Dict[str, float]:
    return dict(zip(MODULI_NAMES, state.squared_moduli()))


def _surface_line(label: str, surface: PayoffSurface) -> str:
    return f"{label}: " + " ".join(f"{k}={_short(v)}" for k, v in zip(SURFACE_KEYS, surface.coefficients()))


# classical

CLASSICAL_COLUMNS = ("row_strategy", "col_strategy", "row_payoff", "col_payoff")


def classical_rows(game: BimatrixGame2x2) -> List[List[str]]:
    return [[r.name.lower(), c.name.lower(), format_number(game.row(r, c)), format_number(game.col(r, c))]
            for r in Strategy for c in Strategy]


def classical_document(game: BimatrixGame2x2, report: ClassicalESSReport) -> Dict[str, Any]:
    mixed = None
    if report.mixed is not None:
        mixed = {"hawk_fraction": report.mixed.hawk_fraction, "stable": report.mixed.stable}
    return {
        "matrix": game.as_lists(),
        "hawk_pure": report.hawk_pure.value,
        "dove_pure": report.dove_pure.value,
        "mixed": mixed,
        "reasons": list(report.reasons),
    }


def classical_lines(game: BimatrixGame2x2, report: ClassicalESSReport) -> List[str]:
    lines = ["Hawk-Dove payoff matrix (row payoff, column payoff):",
             f"{'':8}{'Hawk':>24}{'Dove':>24}"]
    for r in Strategy:
        cells = [f"({_short(game.row(r, c))}, {_short(game.col(r, c))})" for c in Strategy]
        lines.append(f"{r.name.capitalize():8}{cells[0]:>24}{cells[1]:>24}")

    lines.append("")
    lines.append("Pure strategies:")
    lines.append(f"  Hawk: {report.hawk_pure.value}")
    lines.append(f"  Dove: {report.dove_pure.value}")
    if report.mixed is None:
        lines.append("No mixed ESS")
    elif report.mixed.stable:
        lines.append(f"mixed ESS h = {format_number(report.mixed.hawk_fraction)}")
    else:
        lines.append(f"mixed NE h = {format_number(report.mixed.hawk_fraction)} (not stable)")

    lines.append("")
    lines.append("Reasons:")
    lines.extend(f"  - {reason}" for reason in report.reasons)
    return lines


# analyze

CANDIDATE_COLUMNS = ("kind", "p_star", "q_star", "ne_status", "ess_status", "ess", "payoff_A", "payoff_B")


def candidate_document(candidate: EquilibriumCandidate, report: EquilibriumReport) -> Dict[str, Any]:
    surf_a, surf_b = report.surfaces
    return {
        "kind": candidate.kind.value,
        "p_star": candidate.p_star,
        "q_star": candidate.q_star,
        "p_range": list(candidate.p_range) if candidate.p_range else None,
        "q_range": list(candidate.q_range) if candidate.q_range else None,
        "ne_status": candidate.ne_status.value,
        "ess_status": candidate.ess_status.value,
        "ess": candidate.is_ess,
        "payoff_A": surf_a(candidate.p_star, candidate.q_star),
        "payoff_B": surf_b(candidate.p_star, candidate.q_star),
        "margins": [{"condition": m.condition, "value": m.value} for m in candidate.justification],
    }


def analysis_rows(report: EquilibriumReport) -> List[List[str]]:
    surf_a, surf_b = report.surfaces
    return [[c.kind.value, format_number(c.p_star), format_number(c.q_star), c.ne_status.value,
             c.ess_status.value, format_bool(c.is_ess),
             format_number(surf_a(c.p_star, c.q_star)), format_number(surf_b(c.p_star, c.q_star))]
            for c in report.candidates]


def analysis_document(state: InitialState, report: EquilibriumReport, tactics: Sequence[float],
                      traced: Sequence[float], rho: DensityMatrix4,
                      conditions: Dict[str, List[NashCondition]]) -> Dict[str, Any]:
    return {
        "state": moduli_dict(state),
        "game_kind": report.game_kind.value,
        "tolerance": report.tolerance,
        "surfaces": {"A": surface_dict(report.surfaces[0]), "B": surface_dict(report.surfaces[1])},
        "tactics": {"p": tactics[0], "q": tactics[1], "payoff_A": traced[0], "payoff_B": traced[1],
                    "populations": rho.populations()},
        "candidates": [candidate_document(c, report) for c in report.candidates],
        "corner_conditions": {
            corner: [{"player": c.player, "coefficients": list(c.coefficients), "relation": c.relation,
                      "holds": c.holds(state)} for c in found]
            for corner, found in conditions.items()
        },
    }


def _candidate_line(candidate: EquilibriumCandidate, report: EquilibriumReport) -> str:
    surf_a, surf_b = report.surfaces
    p, q = candidate.p_star, candidate.q_star
    line = (f"  {candidate.kind.value} {candidate.ne_status.value} ({_short(p)}, {_short(q)}), "
            f"ESS={format_bool(candidate.is_ess)} [{candidate.ess_status.value}], "
            f"payoff {_short(surf_a(p, q))} / {_short(surf_b(p, q))}")
    if candidate.p_range is not None and candidate.q_range is not None:
        line += (f", p in [{_short(candidate.p_range[0])}, {_short(candidate.p_range[1])}]"
                 f", q in [{_short(candidate.q_range[0])}, {_short(candidate.q_range[1])}]")
    return line


def analysis_lines(state: InitialState, report: EquilibriumReport, tactics: Sequence[float],
                   traced: Sequence[float], rho: DensityMatrix4,
                   conditions: Dict[str, List[NashCondition]]) -> List[str]:
    moduli = " ".join(f"{k}={_short(v)}" for k, v in moduli_dict(state).items())
    populations = " ".join(f"{label}={_short(rho.populations()[label])}" for label in BASIS_LABELS)
    lines = [
        f"Initial state squared moduli: {moduli}",
        f"Game kind: {report.game_kind.value}",
        _surface_line("Surface A", report.surfaces[0]),
        _surface_line("Surface B", report.surfaces[1]),
        f"Tactics (p, q) = ({_short(tactics[0])}, {_short(tactics[1])}): "
        f"payoff {_short(traced[0])} / {_short(traced[1])}, populations {populations}",
        "",
        "Candidates (payoff A / B):",
    ]
    for candidate in report.candidates:
        lines.append(_candidate_line(candidate, report))
        lines.extend(f"      {m.condition} = {_short(m.value)}" for m in candidate.justification)

    lines.append("")
    lines.append("Strict NE conditions on the state:")
    for corner, found in conditions.items():
        for condition in found:
            lines.append(f"  {corner} {condition.describe()} "
                         f"[{'holds' if condition.holds(state) else 'fails'}]")
    return lines


# sweep

def sweep_rows(cells: Iterable[SweepCell]) -> List[List[str]]:
    rows = []
    for cell in cells:
        row = [format_number(m) for m in cell.moduli]
        row += [format_number(k) for k in cell.surface_a.coefficients()]
        row += [format_number(k) for k in cell.surface_b.coefficients()]
        row += [format_bool(cell.symmetric), cell.ne_kinds, cell.p_star, cell.q_star, format_bool(cell.ess_found)]
        rows.append(row)
    return rows


def sweep_document(cells: Iterable[SweepCell]) -> List[Dict[str, Any]]:
    documents = []
    for cell in cells:
        values = (list(cell.moduli) + list(cell.surface_a.coefficients()) + list(cell.surface_b.coefficients())
                  + [cell.symmetric, cell.ne_kinds, cell.p_star, cell.q_star, cell.ess_found])
        documents.append(dict(zip(SWEEP_COLUMNS, values)))
    return documents


# simulate

def trajectory_rows(trajectory: InvasionTrajectory) -> List[List[str]]:
    return [[str(g), format_number(x)] for g, x in enumerate(trajectory.shares)]


def role_trajectory_rows(trajectory: RoleInvasionTrajectory) -> List[List[str]]:
    return [[str(g), format_number(x), format_number(y)]
            for g, (x, y) in enumerate(zip(trajectory.row_shares, trajectory.col_shares))]


def simulation_document(trajectory: Any, barrier: Optional[float] = None) -> Dict[str, Any]:
    if isinstance(trajectory, RoleInvasionTrajectory):
        return {
            "verdict": trajectory.verdict.value,
            "generations": len(trajectory.row_shares) - 1,
            "row_shares": trajectory.row_shares,
            "col_shares": trajectory.col_shares,
        }
    return {
        "verdict": trajectory.verdict.value,
        "certified": trajectory.certified,
        "generations": trajectory.generations,
        "invasion_barrier": barrier,
        "shares": trajectory.shares,
    }


def simulation_lines(trajectory: Any, barrier: Optional[float] = None) -> List[str]:
    if isinstance(trajectory, RoleInvasionTrajectory):
        return [
            f"Verdict: {trajectory.verdict.value}",
            f"Generations: {len(trajectory.row_shares) - 1}",
            f"Final mutant shares: row {_short(trajectory.row_shares[-1])}, "
            f"column {_short(trajectory.col_shares[-1])}",
        ]
    return [
        f"Verdict: {trajectory.verdict.value}" + (" (certified)" if trajectory.certified else ""),
        f"Generations: {trajectory.generations}",
        f"Final mutant share: {_short(trajectory.final_share)}",
        f"Invasion barrier: {'none' if barrier is None else _short(barrier)}",
    ]


# verify

VERIFY_COLUMNS = ("check", "passed", "detail")


def verification_rows(report: VerificationReport) -> List[List[str]]:
    return [[c.name, format_bool(c.passed), c.detail] for c in report.checks]


def verification_document(report: VerificationReport) -> Dict[str, Any]:
    return {
        "passed": report.passed,
        "checks": [{"check": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks],
    }


def verification_lines(report: VerificationReport) -> List[str]:
    lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else "")
             for c in report.checks]
    failures = report.failures()
    lines.append("")
    if failures:
        lines.append(f"{len(failures)} of {len(report.checks)} checks failed")
    else:
        lines.append(f"All {len(report.checks)} checks passed")
    return lines
