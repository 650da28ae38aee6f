"""CSV input formats: par-swap quotes, the swaption vol matrix, loan tapes.

The vol matrix file mirrors the market data sheet: first column holds expiry
labels (1Mo, 3Mo, ..., 1Yr, 2Yr, ...), the header row holds tenor labels, and
cells are ATM normal vols in basis points.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

from .curve import SwapQuote
from .prepayment import LoanObservation
from .shortrate import SwaptionQuote

__all__ = [
    "MarketDataError",
    "VolMatrix",
    "read_curve_csv",
    "write_curve_csv",
    "read_vol_matrix_csv",
    "write_vol_matrix_csv",
    "read_loans_csv",
    "write_loans_csv",
    "counterdiagonal_quotes",
]

_LABEL_RE = re.compile(r"^\s*(\d+)\s*(Mo|Yr)\s*$", re.IGNORECASE)


class MarketDataError(ValueError):
    """Malformed market-data file."""


def _parse_label(label: str, path: str) -> float:
    match = _LABEL_RE.match(label)
    if not match:
        raise MarketDataError(f"{path}: cannot parse tenor label {label!r}")
    n, unit = int(match.group(1)), match.group(2).lower()
    return n / 12.0 if unit == "mo" else float(n)


def read_curve_csv(path: str) -> list[SwapQuote]:
    """Par-swap quote file with header maturity_years,par_rate,fixed_frequency."""
    quotes = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"maturity_years", "par_rate", "fixed_frequency"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise MarketDataError(f"{path}: header must contain {sorted(required)}")
        for row in reader:
            try:
                quotes.append(SwapQuote(int(row["maturity_years"]), float(row["par_rate"]),
                                        int(row["fixed_frequency"])))
            except (TypeError, ValueError) as exc:
                raise MarketDataError(f"{path}: bad quote row {row}: {exc}") from exc
    if not quotes:
        raise MarketDataError(f"{path}: no quotes found")
    return quotes


def write_curve_csv(path: str, quotes: list[SwapQuote]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["maturity_years", "par_rate", "fixed_frequency"])
        for q in quotes:
            writer.writerow([q.maturity_years, repr(q.par_rate), q.fixed_frequency])


@dataclass(frozen=True)
class VolMatrix:
    """ATM normal vol grid in basis points, indexed expiry label x tenor label."""

    expiry_labels: list[str]
    tenor_labels: list[str]
    vols_bps: list[list[float]]

    def expiry_years(self, label: str) -> float:
        return _parse_label(label, "<volmatrix>")

    def vol_bps(self, expiry_label: str, tenor_label: str) -> float:
        try:
            i = self.expiry_labels.index(expiry_label)
            j = self.tenor_labels.index(tenor_label)
        except ValueError as exc:
            raise MarketDataError(f"no cell {expiry_label} x {tenor_label}") from exc
        return self.vols_bps[i][j]

    def quote(self, expiry_label: str, tenor_label: str) -> SwaptionQuote:
        return SwaptionQuote(
            _parse_label(expiry_label, "<volmatrix>"),
            _parse_label(tenor_label, "<volmatrix>"),
            self.vol_bps(expiry_label, tenor_label) / 1e4,
        )


def read_vol_matrix_csv(path: str) -> VolMatrix:
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    if len(rows) < 2 or len(rows[0]) < 2:
        raise MarketDataError(f"{path}: vol matrix needs a header row and at least one expiry row")
    tenor_labels = [c.strip() for c in rows[0][1:]]
    for label in tenor_labels:
        _parse_label(label, path)
    expiry_labels = []
    vols = []
    for row in rows[1:]:
        if not row or not row[0].strip():
            continue
        _parse_label(row[0], path)
        if len(row) != len(tenor_labels) + 1:
            raise MarketDataError(f"{path}: row {row[0]!r} has {len(row) - 1} cells, "
                                  f"expected {len(tenor_labels)}")
        expiry_labels.append(row[0].strip())
        try:
            vols.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise MarketDataError(f"{path}: non-numeric vol in row {row[0]!r}") from exc
    return VolMatrix(expiry_labels, tenor_labels, vols)


def write_vol_matrix_csv(path: str, matrix: VolMatrix) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([""] + matrix.tenor_labels)
        for label, row in zip(matrix.expiry_labels, matrix.vols_bps):
            writer.writerow([label] + [f"{v:.2f}" for v in row])


def counterdiagonal_quotes(matrix: VolMatrix, maturity_years: int = 10) -> list[SwaptionQuote]:
    """Calibration set for a mortgage of the given maturity.

    Takes the quoted expiry/tenor pairs stepping down the matrix so expiry
    plus tenor stays near the mortgage maturity: 1y-10y, 3y-7y, 5y-5y, 7y-3y,
    9y-1y for ten years.
    """
    if maturity_years != 10:
        raise MarketDataError("counter-diagonal selection is defined for 10y mortgages")
    pairs = [("1Yr", "10Yr"), ("3Yr", "7Yr"), ("5Yr", "5Yr"), ("7Yr", "3Yr"), ("9Yr", "1Yr")]
    return [matrix.quote(e, t) for e, t in pairs]


def read_loans_csv(path: str) -> list[LoanObservation]:
    """Loan tape with header period,starting_balance,prepaid_amount,incentive."""
    out = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        required = {"period", "starting_balance", "prepaid_amount", "incentive"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise MarketDataError(f"{path}: header must contain {sorted(required)}")
        for row in reader:
            try:
                out.append(LoanObservation(row["period"], float(row["starting_balance"]),
                                           float(row["prepaid_amount"]), float(row["incentive"])))
            except (TypeError, ValueError) as exc:
                raise MarketDataError(f"{path}: bad loan row {row}: {exc}") from exc
    if not out:
        raise MarketDataError(f"{path}: no observations found")
    return out


def write_loans_csv(path: str, observations: list[LoanObservation]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["period", "starting_balance", "prepaid_amount", "incentive"])
        for o in observations:
            writer.writerow([o.period, f"{o.starting_balance:.2f}", f"{o.prepaid_amount:.2f}",
                             repr(o.incentive)])
