"""
On-disk archive of check reports.
"""

import glob
import logging
import os
from datetime import datetime
from typing import List, Optional

from errors import ConfigError
from reports.models import Report

logger = logging.getLogger(__name__)


class ReportArchive:
    """Archive of JSON reports, one timestamped file per run plus a latest copy."""

    def __init__(self, archive_dir: str, keep_latest: bool = True):
        """
        Initialize the report archive.

        Args:
            archive_dir: Directory to store report files
            keep_latest: Also write <report_type>_latest.json
        """
        self.archive_dir = os.path.expanduser(archive_dir)
        self.keep_latest = keep_latest
        try:
            os.makedirs(self.archive_dir, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Cannot create report archive {self.archive_dir}: {e}") from e

    def save(self, report: Report) -> str:
        """
        Write a report.

        Args:
            report: Report to archive

        Returns:
            Path of the timestamped file
        """
        text = report.to_json()
        timestamp = datetime.now().strftime('%Y%m%d%H%M%S%f')
        filepath = os.path.join(self.archive_dir, f"{report.report_type}_{timestamp}.json")
        with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logger.info(f"Archived {report.report_type} report to {filepath}")

        if self.keep_latest:
            latest_path = os.path.join(self.archive_dir, f"{report.report_type}_latest.json")
            with open(latest_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
        return filepath

    def history(self, report_type: str) -> List[str]:
        """Timestamped report files for a type, oldest first."""
        pattern = os.path.join(self.archive_dir, f"{report_type}_*.json")
        return sorted(path for path in glob.glob(pattern) if not path.endswith('_latest.json'))

    def load_latest(self, report_type: str) -> Optional[Report]:
        """
        Load the most recent report of a type.

        Returns:
            The report, or None if nothing has been archived
        """
        latest_path = os.path.join(self.archive_dir, f"{report_type}_latest.json")
        if not os.path.exists(latest_path):
            history = self.history(report_type)
            if not history:
                logger.warning(f"No archived {report_type} reports in {self.archive_dir}")
                return None
            latest_path = history[-1]
        with open(latest_path, 'r', encoding='utf-8') as f:
            return Report.from_dict(f.read())
