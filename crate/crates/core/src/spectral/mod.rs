//! Graph Fourier analysis and spectral filtering.

mod basis;
mod chebyshev;
mod context;
mod gate;
mod response;
mod signal;

pub use basis::{eigendecompose, gft, igft, SpectralBasis, DEFAULT_DENSE_LIMIT};
pub use chebyshev::{
    chebyshev_filter, chebyshev_terms, chebyshev_values, combine_terms, estimate_lambda_max,
    estimate_lambda_max_with, fit_chebyshev, gershgorin_bound, lambda_max_for, sample_response,
    uniform_grid, ChebyshevFilter, PowerIteration, FIT_NODES,
};
pub use context::SpectralContext;
pub use gate::{band_gate_combine, softmax, BandGate, DEFAULT_GATE_WIDTH};
pub use response::{exact_filter, FrequencyResponse, ResponseKind};
pub use signal::{Domain, GraphSignal};
