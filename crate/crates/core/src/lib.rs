//! Graph coloring through degeneracy in space-conscious models: low-degeneracy
//! partition, one-pass streaming via linear sketches, sublinear query
//! algorithms, round-accounted distributed simulations, and the adversarial
//! instance generators used to exercise them.

pub mod degeneracy;
pub mod distsim;
pub mod exact;
pub mod gadget;
pub mod graph;
pub mod ldp;
pub mod planted;
pub mod query;
pub mod rng;
pub mod sketch;
pub mod stream;

pub use degeneracy::{
    arboricity_bounds_from_kappa, degeneracy_ordering, exact_degeneracy, greedy_color,
    max_ordered_degree, DegeneracyCertificate, Ordering,
};
pub use distsim::{
    local_color, local_color_with, mpc_color, mpc_color_with, round_audit, DistError,
    LocalConfig, LocalOutcome, MpcOutcome, MpcVariant, RoundTranscript, Verdict,
};
pub use gadget::{
    bipartite_gadget, blow_up, dist_instance, gadget_oracle, join_graph, known_kappa_instance,
    multipass_instance, query_gadget, rlc_experiment, verify_certificate, BitMatrix, Bound,
    GadgetCertificate, QueryGadgetVariant, RlcReport, Witness,
};
pub use graph::{Color, Coloring, Graph, GraphError, VertexId};
pub use ldp::{
    block_count, blocks, color_via_ldp, lambda, ldp_params, random_partition, verify_ldp, Block,
    LdpParams, LdpReport, VertexPartition,
};
pub use planted::{planted_edge_count, planted_graph};
pub use query::{query_color, OracleBackend, QueryBudgetReport, QueryError, QueryOracle};
pub use sketch::{EdgeIndex, L0Sketch, SketchError, SparseRecoverySketch};
pub use stream::{
    replay_file, replay_reader, stream_color, stream_color_insertion_only,
    stream_color_multigraph, SpaceLedger, StreamError, StreamOutcome, UpdateToken,
};
