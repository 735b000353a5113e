"""Surface amalgams, right-angled Coxeter groups and the maps between them."""

__version__ = "0.1.0"
