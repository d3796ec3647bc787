"""Singular flat surfaces of quartic differentials as polygon complexes."""
from .geodesic import (CorridorError, CurveClass, GeodesicResult, MoveBudgetExceeded, Representative,
                       check_corridor, edge_loop_word, free_reduce, geodesic_length, insert_backtrack,
                       representative, swing, torus_basis, torus_intersection, torus_word, trace_word)
from .mixed import (MixedLength, MixedStructure, Piece, SupportError, WeightedCurve,
                    intersection_number, mixed_length)
from .saddles import (BudgetExceeded, ClosedGeodesic, SaddleConnection, SaddleReport,
                      closed_geodesics, saddle_connections, systole_and_saddles)
from .surface import (FlatSurface, Frame, SurfaceError, build_flat_surface, builtin_surface,
                      parallelogram_torus, regular_octagon, square_torus)

__all__ = [
    "BudgetExceeded", "ClosedGeodesic", "CorridorError", "CurveClass", "FlatSurface", "Frame",
    "GeodesicResult", "MixedLength", "MixedStructure", "MoveBudgetExceeded", "Piece", "Representative",
    "SaddleConnection", "SaddleReport", "SupportError", "SurfaceError", "WeightedCurve",
    "build_flat_surface", "builtin_surface", "check_corridor", "closed_geodesics", "edge_loop_word",
    "free_reduce", "geodesic_length", "insert_backtrack", "intersection_number", "mixed_length",
    "parallelogram_torus", "regular_octagon", "representative", "saddle_connections", "square_torus",
    "swing", "systole_and_saddles", "torus_basis", "torus_intersection", "torus_word", "trace_word",
]
