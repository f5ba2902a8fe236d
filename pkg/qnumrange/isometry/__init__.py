from .descriptor import (
    IsometryDescriptor, apply, compose, identity_descriptor, random_descriptor,
    descriptor_to_dict, descriptor_from_dict,
)
from .verifier import (
    BlackBoxMap, CountingMap, IsometryVerifier, IsometryReport, TrialRecord,
    DaggerInvarianceReport, OrbitPreservationReport, evaluate,
)
from .recovery import IsometryRecovery, RecoveryReport, recover_parameters

__all__ = [
    'IsometryDescriptor', 'apply', 'compose', 'identity_descriptor', 'random_descriptor',
    'descriptor_to_dict', 'descriptor_from_dict',
    'BlackBoxMap', 'CountingMap', 'IsometryVerifier', 'IsometryReport', 'TrialRecord',
    'DaggerInvarianceReport', 'OrbitPreservationReport', 'evaluate',
    'IsometryRecovery', 'RecoveryReport', 'recover_parameters',
]
