from .c_radius_calculator import CRadiusCalculator, ConvexityReport, NormCertificate, c_objective, midpoint_distance

__all__ = ['CRadiusCalculator', 'ConvexityReport', 'NormCertificate', 'c_objective', 'midpoint_distance']
