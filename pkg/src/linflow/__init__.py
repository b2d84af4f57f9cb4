"""Classification of linear flows up to topological, Hölder, Lipschitz and smooth equivalence."""

__version__ = "0.1.0"
