"""Edge modes of decohered cluster chains, computed with matrix product states.

Modules, bottom up: ``spinops`` (Pauli strings and ladder operators),
``model`` (Hamiltonian MPO), ``mps``/``dmrg`` (tensor network engine),
``choi`` (doubled density matrices and the dephasing channel),
``observables`` (order parameters and edge correlations), ``oracle``
(dense reference) and ``harness`` (configs, sweeps, CLI).
"""

__version__ = "0.1.0"
