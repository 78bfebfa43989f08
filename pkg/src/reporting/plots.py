import logging
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns
from scipy.optimize import brentq

from src.config import load_settings
from src.errors import PreconditionError
from src.families import UtilityFamily
from src.model import Beliefs, Dataset, wealth

logger = logging.getLogger(__name__)

PLOT_COLUMNS = ["observation", "curve", "x1", "x2"]


def _window(data: Dataset, family: UtilityFamily):
    """Largest coordinate drawn: a margin past every budget extreme, inside the monotone range."""
    extreme = max(
        float(wealth(obs) / p) for obs in data.observations for p in obs.prices
    )
    cap = 2.0 * max(extreme, 1.0)
    return min(cap, family.monotone_limit())


def _inverse(family, target, cap):
    """x in [0, cap] with u(x) = target, NaN when the level is out of reach."""
    if target < 0:
        return math.nan
    if target == 0:
        return 0.0
    top = family.evaluate(cap)
    if top < target:
        return math.nan
    return brentq(lambda x: family.evaluate(x) - target, 0.0, cap, xtol=1e-12)


def plot_data(data: Dataset, beliefs: Beliefs, family: UtilityFamily, points=None) -> pd.DataFrame:
    """Budget line and indifference curve through the observed bundle, per observation."""
    if data.n_states != 2:
        raise PreconditionError(f"plot data needs exactly two states, the dataset has {data.n_states}")
    if points is None:
        points = load_settings().plot_points

    pi1, pi2 = beliefs.as_floats()
    cap = _window(data, family)
    frames = []
    for index, obs in enumerate(data.observations):
        p1, p2 = (float(p) for p in obs.prices)
        w = float(wealth(obs))
        x1 = np.linspace(0.0, w / p1, points)
        frames.append(
            pd.DataFrame(
                {
                    "observation": index + 1,
                    "curve": "budget",
                    "x1": x1,
                    "x2": np.clip((w - p1 * x1) / p2, 0.0, None),
                }
            )
        )

        observed = [float(x) for x in obs.demand]
        level = pi1 * family.evaluate(observed[0]) + pi2 * family.evaluate(observed[1])
        right = _inverse(family, level / pi1, cap)
        x1 = np.linspace(0.0, cap if math.isnan(right) else right, points)
        x2 = np.array([_inverse(family, (level - pi1 * family.evaluate(v)) / pi2, cap) for v in x1])
        keep = ~np.isnan(x2)
        frames.append(
            pd.DataFrame(
                {"observation": index + 1, "curve": "indifference", "x1": x1[keep], "x2": x2[keep]}
            )
        )
        frames.append(
            pd.DataFrame(
                {"observation": [index + 1], "curve": ["demand"], "x1": [observed[0]], "x2": [observed[1]]}
            )
        )
    frame = pd.concat(frames, ignore_index=True)[PLOT_COLUMNS]
    logger.info("Sampled plot data for %d observations (%d rows).", data.n_observations, len(frame))
    return frame


def save_plot_csv(frame: pd.DataFrame, output_path):
    directory = os.path.dirname(str(output_path))
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(output_path, index=False, float_format="%.12g")
    logger.info("Plot data saved to %s", output_path)


def save_plot_svg(frame: pd.DataFrame, output_path, title=None):
    """One panel per observation: budget line, indifference curve and the chosen bundle."""
    directory = os.path.dirname(str(output_path))
    if directory:
        os.makedirs(directory, exist_ok=True)

    observations = sorted(frame["observation"].unique())
    plt.rcParams["svg.hashsalt"] = "seu-corner"
    fig, axes = plt.subplots(1, len(observations), figsize=(5 * len(observations), 5), squeeze=False)
    for ax, observation in zip(axes[0], observations):
        panel = frame[frame["observation"] == observation]
        curves = panel[panel["curve"] != "demand"]
        sns.lineplot(data=curves, x="x1", y="x2", hue="curve", ax=ax, sort=False)
        chosen = panel[panel["curve"] == "demand"]
        ax.scatter(chosen["x1"], chosen["x2"], color="black", zorder=3, label="demand")
        ax.set_title(f"Observation {observation}")
        ax.set_xlabel("state 1 claims")
        ax.set_ylabel("state 2 claims")
        ax.set_xlim(left=0)
        ax.set_ylim(bottom=0)
        ax.legend()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    # no Date metadata so reruns give identical files
    fig.savefig(output_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info("Plot saved to %s", output_path)
