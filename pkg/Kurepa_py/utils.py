from enum import Enum

import pandas as pd


class ReportFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    PRETTY = "pretty"


class Utility:
    """Rendering helpers shared by the command line and the evaluation suites."""

    @staticmethod
    def format_real(value: float, precision: int = 6) -> str:
        """Formats a real with ``precision`` significant digits."""
        return f"{value:.{precision}g}"

    @staticmethod
    def render(frame: pd.DataFrame, fmt: ReportFormat = ReportFormat.CSV, precision: int = 6,
               header: bool = True) -> str:
        """
        Renders a table as CSV, line-delimited JSON or an aligned text table.

        Args:
            frame (pd.DataFrame): The table to render.
            fmt (ReportFormat): Output format.
            precision (int): Significant digits for reals in the pretty table.
            header (bool): Whether CSV output starts with the header line.

        Returns:
            str: The rendered text, newline terminated unless empty.
        """
        fmt = ReportFormat(fmt)
        if fmt is ReportFormat.CSV:
            return frame.to_csv(index=False, header=header, lineterminator="\n")
        if frame.empty:
            return ""
        if fmt is ReportFormat.JSON:
            text = frame.to_json(orient="records", lines=True)
            return text if text.endswith("\n") else text + "\n"
        return frame.to_string(index=False, float_format=lambda v: Utility.format_real(v, precision)) + "\n"
