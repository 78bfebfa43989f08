# Reporting package

from .plots import PLOT_COLUMNS, plot_data, save_plot_csv, save_plot_svg
from .report import CornerReport, build_report
