#
# adt-design documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.
#
# Note that not all possible configuration values are present in this
# file.  All configuration values have a default; values that are
# commented out serve to show the default.

import os
import sys

# autodoc imports adtdesign from the source tree
sys.path.insert(0, os.path.abspath('..'))
sys.path.insert(0, os.path.abspath('../adtdesign'))

# -- General configuration -----------------------------------------------------

# If your documentation needs a minimal Sphinx version, state it here.
needs_sphinx = '4.0'

# Add any Sphinx extension module names here, as strings. They can be extensions
# coming with Sphinx (named 'sphinx.ext.*') or your custom ones.
extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.intersphinx',
]

autodoc_member_order = 'bysource'
autodoc_typehints = 'description'

# The suffix of source filenames.
source_suffix = '.rst'

# The master toctree document.
master_doc = 'index'

# General information about the project.
project = 'adt-design'
copyright = '2026 The adt-design authors'

# The version info for the project you're documenting, acts as replacement for
# |version| and |release|, also used in various other places throughout the
# built documents.
#
import _version  # noqa: E402  module-level-import-not-at-top-of-file

# The short X.Y version.
version = _version.__version__
# The full version, including alpha/beta/rc tags.
release = _version.__version__

# The name of the Pygments (syntax highlighting) style to use.
pygments_style = 'sphinx'


# -- Options for HTML output ---------------------------------------------------

# The theme to use for HTML and HTML Help pages.  See the documentation for
# a list of builtin themes.
html_theme = 'default'

# Theme options are theme-specific and customize the look and feel of a theme
# further.  For a list of options available for each theme, see the
# documentation.
html_theme_options = {
    'stickysidebar': True,
}

# Custom sidebar templates, maps document names to template names.
html_sidebars = {
    '**': ['localtoc.html', 'sourcelink.html'],
}

# If false, no module index is generated.
html_domain_indices = False

# If false, no index is generated.
html_use_index = False


# intersphinx
intersphinx_mapping = {
    'python': ('https://docs.python.org/3/', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}
