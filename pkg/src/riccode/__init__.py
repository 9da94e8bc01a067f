"""riccode: adaptive arithmetic coding, MDL order selection and MDL histograms."""

__version__ = "0.1.0"
