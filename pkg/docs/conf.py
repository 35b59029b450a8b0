# Sphinx configuration for the lijoin documentation.
#
# Build with ``sphinx-build docs docs/_build``.

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.pardir, "src")))

project = "lijoin"
copyright = "2026, the lijoin developers"  # noqa: A001
author = "the lijoin developers"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
]

master_doc = "index"
language = "en"
exclude_patterns = ["_build"]

html_theme = "alabaster"
html_theme_options = {
    "description": "Joins of monoid varieties with LI",
}
html_sidebars = {
    "**": [
        "about.html",
        "localtoc.html",
        "searchbox.html",
    ]
}

# The API pages are generated without the numeric stack installed.
autodoc_mock_imports = [
    "numpy",
    "pandas",
    "progressbar",
]
