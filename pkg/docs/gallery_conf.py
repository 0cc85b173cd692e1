import os
import re
import sys

from mkdocs_gallery.sorting import FileNameSortKey

# reproducible builds do not report timings
min_reported_time = sys.maxsize if "SOURCE_DATE_EPOCH" in os.environ else 0

# mkdocs-gallery is a port of sphinx-gallery; see
# https://sphinx-gallery.github.io/stable/configuration.html for the options
conf = {
    "min_reported_time": min_reported_time,
    "within_subsection_order": FileNameSortKey,
    # scripts named plot_*.py are executed, _plot_*.py are skipped
    "filename_pattern": re.escape(os.sep) + r"plot_.+\.py$",
    "ignore_pattern": r"_plot_.+\.py$",
}
