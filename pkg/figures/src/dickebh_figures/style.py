"""All figure style knobs in one place; override any key via a JSON file."""

import json

STYLE = {
    # viridis keeps monotone luminance, so grayscale printing stays readable
    "colormap": "viridis",
    "figure_size": [6.0, 4.5],
    "panel_size": [3.2, 2.6],
    "dpi": 150,
    "font_size": 10,
    "line_width": 1.2,
    "contour_color": "white",
    "contour_width": 1.4,
    "marker_color": "crimson",
    "marker_symbol": "^",
    "marker_size": 55,
    "label_color": "white",
    "branch_colors": {"e_minus": "#1f77b4", "e_zero": "#555555", "e_plus": "#d62728"},
}


def load_style(path=None):
    """Base style, optionally updated from a JSON file of overrides."""
    style = dict(STYLE)
    if path is not None:
        with open(path) as fh:
            style.update(json.load(fh))
    return style
