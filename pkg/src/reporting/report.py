import logging
import os

from src.axioms import check_garp, check_sarseu
from src.beliefs import check_belief_compatibility, find_beliefs
from src.errors import SarseuInconclusiveError
from src.families import CORNER_TAGS, all_family_report
from src.model import Beliefs, Dataset, validation_report
from src.reporting.plots import plot_data, save_plot_csv, save_plot_svg
from src.verify import verify_certificate

logger = logging.getLogger(__name__)


class CornerReport:
    """Full pipeline on one corner dataset: axioms, beliefs, family regions and certificates."""

    def __init__(self, data: Dataset, beliefs: Beliefs = None, fixed=None, tol=None, grid_points=None):
        self.data = data
        self.given_beliefs = beliefs
        self.fixed = dict(fixed or {})
        self.tol = tol
        self.grid_points = grid_points
        self.beliefs = None
        self.regions = {}
        self.certified = {}

    def axioms(self):
        results = {"garp": check_garp(self.data).to_dict()}
        try:
            results["sarseu"] = check_sarseu(self.data).to_dict()
        except SarseuInconclusiveError as e:
            results["sarseu"] = {"axiom": "sarseu", "verdict": "inconclusive", "message": str(e)}
        return results

    def resolve_beliefs(self):
        if self.given_beliefs is not None:
            self.beliefs = self.given_beliefs
            compatibility = check_belief_compatibility(self.data, self.beliefs, strict=False)
            body = {"source": "given", "feasible": compatibility.passes}
            body.update(self.beliefs.to_dict())
            body["compatibility"] = compatibility.to_dict()
            return body
        search = find_beliefs(self.data, strict=True)
        self.beliefs = search.beliefs
        body = {"source": "found"}
        body.update(search.to_dict())
        return body

    def families(self):
        self.regions = all_family_report(self.beliefs, self.data, self.fixed)
        results = {}
        for tag, region in self.regions.items():
            entry = region.to_dict()
            entry["nonempty"] = not region.is_empty
            if not region.is_empty:
                point = region.sample_point()
                family = region.family_at(point)
                certificate = verify_certificate(
                    self.data, self.beliefs, family, tol=self.tol, grid_points=self.grid_points
                )
                self.certified[tag] = family
                entry["sample_point"] = point
                entry["certificate"] = certificate.to_dict()
            results[tag] = entry
        return results

    def generate_report(self):
        report = {
            "dataset": {
                "states": list(self.data.states),
                "observations": self.data.n_observations,
            },
            "corners": validation_report(self.data),
        }
        report.update(self.axioms())
        report["beliefs"] = self.resolve_beliefs()
        if self.beliefs is None:
            report["families"] = {}
            report["verdict"] = "fail"
            return report

        report["families"] = self.families()
        entries = [report["families"][tag] for tag in CORNER_TAGS]
        certified = all(
            entry["nonempty"] and entry["certificate"]["valid"] for entry in entries
        )
        axioms_pass = report["garp"]["verdict"] == "pass" and report["sarseu"]["verdict"] == "pass"
        report["verdict"] = "pass" if axioms_pass and report["beliefs"]["feasible"] and certified else "fail"
        logger.info("Report verdict: %s", report["verdict"])
        return report

    def save_plots(self, output_dir):
        """Plot data (CSV) and figure (SVG) for every certified family; two states only."""
        os.makedirs(output_dir, exist_ok=True)
        written = []
        for tag, family in self.certified.items():
            frame = plot_data(self.data, self.beliefs, family)
            csv_path = os.path.join(output_dir, f"{tag}.csv")
            svg_path = os.path.join(output_dir, f"{tag}.svg")
            save_plot_csv(frame, csv_path)
            save_plot_svg(frame, svg_path, title=tag)
            written.extend([csv_path, svg_path])
        logger.info("Report plots saved to %s", output_dir)
        return written


def build_report(data: Dataset, beliefs: Beliefs = None, fixed=None, tol=None, grid_points=None):
    return CornerReport(data, beliefs, fixed, tol, grid_points).generate_report()
