# -*- coding: utf-8 -*-
#
# riemcontrol documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os
from unittest import mock

# Autodoc imports the package; the numerical stack is not needed to render
# the docstrings.
MOCK_MODULES = ['numpy', 'scipy', 'scipy.linalg', 'scipy.spatial',
                'scipy.spatial.transform', 'tomli']
for mod_name in MOCK_MODULES:
    sys.modules[mod_name] = mock.MagicMock()

sys.path.insert(0, os.path.abspath('../..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'Riemcontrol'

# The short X.Y version.
version = '0.3'
# The full version, including alpha/beta/rc tags.
release = '0.3.0'

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = ['_static']
html_show_sourcelink = False
html_show_copyright = False
htmlhelp_basename = 'riemcontroldoc'

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'riemcontrol', u'riemcontrol Documentation',
     [u'riemcontrol developers'], 1)
]

intersphinx_mapping = {'numpy': ('https://numpy.org/doc/stable/', None),
                       'scipy': ('https://docs.scipy.org/doc/scipy/', None)}
