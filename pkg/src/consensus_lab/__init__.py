"""consensus_lab: pairwise-consensus dynamics on connected graphs.

A library + CLI for simulating the edge-sampling consensus process and for
exact analysis of its absorption law: graph-independent surviving-strategy
probabilities, delayed gambler's ruin expected absorption times (closed
form and solver), coupon-collector completion-time bounds, and the graph
families whose stabilisation times the experiments compare.

Hot simulation loops run on a compiled kernel when the extension is built
(``kernels.BACKEND == "c"``) and on a bit-identical pure-Python fallback
otherwise.
"""

from .errors import (CapacityError, ConsensusTimeout, GraphParseError,
                     InvalidParameterError, ReplicationTimeout)
from .graphs import (Graph, make_complete, make_cycle, make_jellyfish,
                     make_lollipop, make_path, make_spider, make_star,
                     make_sundew, parse_graph, write_graph)
from .process import (SimStats, StrategyState, coarse_grain, estimate,
                      init_nonempty, init_uniform, run_to_consensus,
                      simulate_batch, step)
from .chain import (AbsorbingChain, absorption_distribution, build_chain,
                    expected_absorption_time, validate_chain)
from .dgr import (DgrParams, MonotonicityReport, complete_graph_expected_consensus_time,
                  complete_graph_gammas, expected_time_closed, expected_time_solve,
                  ruin_probability, scan_single_term, survivor_distribution,
                  symmetric_sum_scan)
from .coupon import (ConnectedGeometrics, CouponSpec, HarmonicTable,
                     IndependentGeometric, SingleTarget, collector_bound,
                     harmonic, harmonic_interp, simulate_connected_geometrics,
                     simulate_multipass, simulate_slow_type)
from .rng import Stream
from .kernels import BACKEND

__version__ = "0.1.0"
