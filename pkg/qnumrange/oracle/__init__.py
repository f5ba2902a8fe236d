from .brute_force import GridSpec, OracleResult, brute_q_radius_2x2, brute_c_radius_2x2

__all__ = ['GridSpec', 'OracleResult', 'brute_q_radius_2x2', 'brute_c_radius_2x2']
