"""Decision procedures for (almost) structural completeness of finitely generated
quasivarieties, built on a small finite-algebra engine."""

__version__ = "0.1.0"
