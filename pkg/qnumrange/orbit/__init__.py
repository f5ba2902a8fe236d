from .saturated_orbit import (
    OrbitElement, OrbitMembership, build_cq, make_orbit_element, random_orbit_element,
    is_in_orbit, canonicalize, orbit_element_from_matrix, orbit_element_to_dict, orbit_element_from_dict,
)
from .decomposition import SpanReport, decompose_rank_one, rank_one_decomposition_span, rank_two_decomposition_span

__all__ = [
    'OrbitElement', 'OrbitMembership', 'build_cq', 'make_orbit_element', 'random_orbit_element',
    'is_in_orbit', 'canonicalize', 'orbit_element_from_matrix', 'orbit_element_to_dict',
    'orbit_element_from_dict',
    'SpanReport', 'decompose_rank_one', 'rank_one_decomposition_span', 'rank_two_decomposition_span',
]
