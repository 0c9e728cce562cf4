#!/usr/bin/env python
#
# Documentation build configuration file.

import os
import sys

# Get the project root dir, which is the parent dir of this
cwd = os.getcwd()
project_root = os.path.dirname(cwd) + "/src"

# Insert the project root dir as the first element in the PYTHONPATH.
# This lets us ensure that the source package is imported, and that its
# version is used.
sys.path.insert(0, project_root)

import polypart  # noqa: E402

# -- General configuration ---------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "sphinxarg.ext",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "polypart"
copyright = "The polypart developers"

version = polypart.__version__
release = polypart.__version__

exclude_patterns = ["_build"]

autodoc_member_order = "bysource"
autodoc_default_options = {"members": True, "show-inheritance": True}

pygments_style = "sphinx"

# -- Options for HTML output -------------------------------------------

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "polypart-doc"
