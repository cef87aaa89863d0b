"""Independent-set sequences of random trees and sparse random graphs."""

__version__ = "0.1.0"
