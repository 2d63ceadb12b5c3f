"""rivetlite: incremental quantum-circuit transpilation with a built-in
statevector oracle and a layerwise-learning benchmark harness.

The pipeline transpiles virtual circuits onto device topologies and can
append ("stitch") new suffixes onto an already-transpiled prefix without
redoing the finished work — the core trick behind the transpile-time
benchmarks and the layerwise training loop.
"""

from .backend import Topology, builtin_topology, distances, load
from .circuit import (Circuit, Gate, ParamExpr, append, bind, circuit_hash,
                      measure_all, random_circuit, remove_final_measurements)
from .encode import (amplitude_encode, angle_encode, encoder_for, pqc_layer,
                     zz_feature_map)
from .exceptions import (BackendError, CircuitError, RivetLiteError,
                         SimulationError, TranspileError)
from .layerwise import (Dataset, GradientEstimate, LLConfig, TrainTrace,
                        barren_plateau_variance, load_fixture,
                        parameter_shift_gradient, predict, split_dataset,
                        train_phase1, train_phase2, train_regular)
from .pauli import (create_rotation_circuit, expectation_from_counts,
                    random_pauli)
from .sim import (KERNEL_BACKEND, MAX_SIM_QUBITS, CountsDistribution,
                  expectation, hellinger_fidelity, sample, statevector)
from .stitch import StitchCache, transpile_chain, transpile_right
from .transpiler import (Layout, TranspileOptions, TranspiledCircuit,
                         check_transpiled, transpile, virtual_equivalent)

__version__ = "0.1.0"

__all__ = [
    "BackendError", "Circuit", "CircuitError", "CountsDistribution",
    "Dataset", "Gate", "GradientEstimate", "KERNEL_BACKEND", "LLConfig",
    "Layout", "MAX_SIM_QUBITS", "ParamExpr", "RivetLiteError",
    "SimulationError", "StitchCache", "Topology", "TrainTrace",
    "TranspileError", "TranspileOptions", "TranspiledCircuit",
    "amplitude_encode", "angle_encode", "append", "barren_plateau_variance",
    "bind", "builtin_topology", "check_transpiled", "circuit_hash",
    "create_rotation_circuit", "distances", "encoder_for", "expectation",
    "expectation_from_counts", "hellinger_fidelity", "load", "load_fixture",
    "measure_all", "parameter_shift_gradient", "pqc_layer", "predict",
    "random_circuit", "random_pauli", "remove_final_measurements", "sample",
    "split_dataset", "statevector", "train_phase1", "train_phase2",
    "train_regular", "transpile", "transpile_chain", "transpile_right",
    "virtual_equivalent", "zz_feature_map", "__version__",
]
