from .csv import load_csv, load_matrix_csv, save_csv
from .report import ReportWriter

__all__ = (
    "load_csv",
    "load_matrix_csv",
    "save_csv",
    "ReportWriter",
)
